//! Grid and randomized checks of algebraic predicates.
//!
//! Every check enumerates a uniform grid (endpoints included) in
//! lexicographic order and then a seeded batch of random points. A
//! `holds_on_grid` verdict only says no counterexample was found. A
//! `violated` verdict carries the lexicographically smallest violating grid
//! tuple, or, if the grid was clean, the smallest violating random tuple.
//! The result does not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{make_operator, Family, FamilyId, Operator, Polarity};
use crate::constructors::Generator;
use crate::error::{Error, Result};
use crate::unit::{grid_points, ANTECEDENT_TOL, ASSOC_TOL, POINT_TOL, VIOLATION_TOL};

/// Values this close are treated as a fixed point of the power sequence.
const STALL_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub resolution: usize,
    pub random_samples: usize,
    pub seed: u64,
}

impl GridSpec {
    pub fn new(resolution: usize, random_samples: usize, seed: u64) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidGrid(resolution));
        }
        Ok(GridSpec {
            resolution,
            random_samples,
            seed,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        grid_points(self.resolution)
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    A,
    #[serde(rename = "A_prime")]
    APrime,
    B,
    #[serde(rename = "B_prime")]
    BPrime,
    #[serde(rename = "commutative")]
    Commutative,
    #[serde(rename = "associative")]
    Associative,
    #[serde(rename = "monotone")]
    Monotone,
    #[serde(rename = "neutral")]
    Neutral,
    #[serde(rename = "copula")]
    Copula,
    #[serde(rename = "zero_divisors")]
    ZeroDivisors,
    #[serde(rename = "archimedean")]
    Archimedean,
    #[serde(rename = "generator_condition")]
    GeneratorCondition,
}

/// The four order properties used by the rearrangement theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderProperty {
    A,
    APrime,
    B,
    BPrime,
}

impl OrderProperty {
    pub const ALL: [OrderProperty; 4] = [
        OrderProperty::A,
        OrderProperty::APrime,
        OrderProperty::B,
        OrderProperty::BPrime,
    ];
}

impl From<OrderProperty> for Property {
    fn from(p: OrderProperty) -> Self {
        match p {
            OrderProperty::A => Property::A,
            OrderProperty::APrime => Property::APrime,
            OrderProperty::B => Property::B,
            OrderProperty::BPrime => Property::BPrime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
}

/// A violating point together with the two compared quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// For composite checks, the sub-check that failed.
    pub sub_check: Option<Property>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyVerdict {
    pub property: Property,
    pub operator: String,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub grid: GridSpec,
    /// Squaring budget of an Archimedean check.
    pub n_max: Option<usize>,
}

impl PropertyVerdict {
    fn from_search(
        property: Property,
        op_label: String,
        witness: Option<Witness>,
        grid: GridSpec,
    ) -> Self {
        PropertyVerdict {
            property,
            operator: op_label,
            verdict: if witness.is_some() {
                Verdict::Violated
            } else {
                Verdict::HoldsOnGrid
            },
            witness,
            grid,
            n_max: None,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }

    /// Re-evaluates the witness against `op`; true when the violation reproduces.
    pub fn reverify(&self, op: &Operator) -> bool {
        let Some(w) = &self.witness else {
            return false;
        };
        let property = w.sub_check.unwrap_or(self.property);
        let identity = if self.property == Property::Copula {
            1.0
        } else {
            op.identity()
        };
        match property {
            Property::Archimedean => {
                let floor = power_floor(op, w.point[0], self.n_max.unwrap_or(0));
                floor > w.point[1]
            }
            Property::GeneratorCondition => false,
            _ => violation(op, property, &w.point, identity).is_some(),
        }
    }

    /// One line of the verdict stream.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "property": self.property,
            "operator": self.operator,
            "verdict": self.verdict,
            "witness": self.witness.as_ref().map(|w| w.point.clone()),
            "lhs": self.witness.as_ref().map(|w| w.lhs),
            "rhs": self.witness.as_ref().map(|w| w.rhs),
            "sub_check": self.witness.as_ref().and_then(|w| w.sub_check),
            "grid": self.grid,
            "seed": self.grid.seed,
            "n_max": self.n_max,
        })
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Shape of the tuples a check quantifies over.
#[derive(Clone, Copy)]
enum Shape {
    /// `x1 <= x2 <= ... <= xk`
    Sorted,
    /// `x <= y`, `z <= w`
    TwoPairs,
    /// `x <= y`, free `z`
    PairThenFree,
    /// No ordering constraint.
    Free,
    /// All coordinates strictly inside (0, 1).
    Interior,
}

impl Shape {
    fn admits(self, t: &[f64]) -> bool {
        match self {
            Shape::Sorted => t.windows(2).all(|w| w[0] <= w[1]),
            Shape::TwoPairs => t[0] <= t[1] && t[2] <= t[3],
            Shape::PairThenFree => t[0] <= t[1],
            Shape::Free => true,
            Shape::Interior => t.iter().all(|&v| v > 0.0 && v < 1.0),
        }
    }

    fn canonicalize(self, t: &mut [f64]) {
        match self {
            Shape::Sorted => t.sort_by(f64::total_cmp),
            Shape::TwoPairs => {
                t[..2].sort_by(f64::total_cmp);
                t[2..].sort_by(f64::total_cmp);
            }
            Shape::PairThenFree => t[..2].sort_by(f64::total_cmp),
            Shape::Free | Shape::Interior => {}
        }
    }
}

fn arity_and_shape(property: Property) -> (usize, Shape) {
    match property {
        Property::A | Property::APrime => (4, Shape::Sorted),
        Property::B | Property::BPrime => (4, Shape::TwoPairs),
        Property::Commutative => (2, Shape::Free),
        Property::Associative => (3, Shape::Free),
        Property::Monotone => (3, Shape::PairThenFree),
        Property::Neutral => (1, Shape::Free),
        Property::ZeroDivisors => (2, Shape::Interior),
        _ => unreachable!("{property:?} is not a pointwise check"),
    }
}

/// Returns `(lhs, rhs)` if `point` violates `property` for `op`.
fn violation(op: &Operator, property: Property, t: &[f64], identity: f64) -> Option<(f64, f64)> {
    let f = |a: f64, b: f64| op.eval(a, b);
    match property {
        Property::A | Property::APrime => {
            let (x, y, z, w) = (t[0], t[1], t[2], t[3]);
            let (lhs, rhs) = (f(x, w), f(y, z));
            if property == Property::A {
                (w + x <= y + z + ANTECEDENT_TOL && lhs > rhs + VIOLATION_TOL).then_some((lhs, rhs))
            } else {
                (w + x >= y + z - ANTECEDENT_TOL && lhs < rhs - VIOLATION_TOL).then_some((lhs, rhs))
            }
        }
        Property::B | Property::BPrime => {
            let (x, y, z, w) = (t[0], t[1], t[2], t[3]);
            let lhs = f(x, w) - f(x, z);
            let rhs = f(y, w) - f(y, z);
            if property == Property::B {
                (lhs > rhs + VIOLATION_TOL).then_some((lhs, rhs))
            } else {
                (lhs < rhs - VIOLATION_TOL).then_some((lhs, rhs))
            }
        }
        Property::Commutative => {
            let (lhs, rhs) = (f(t[0], t[1]), f(t[1], t[0]));
            ((lhs - rhs).abs() > POINT_TOL).then_some((lhs, rhs))
        }
        Property::Associative => {
            let (x, y, z) = (t[0], t[1], t[2]);
            let (lhs, rhs) = (f(f(x, y), z), f(x, f(y, z)));
            ((lhs - rhs).abs() > ASSOC_TOL).then_some((lhs, rhs))
        }
        Property::Monotone => {
            let (x, y, z) = (t[0], t[1], t[2]);
            let (l1, r1) = (f(x, z), f(y, z));
            if l1 > r1 + VIOLATION_TOL {
                return Some((l1, r1));
            }
            let (l2, r2) = (f(z, x), f(z, y));
            (l2 > r2 + VIOLATION_TOL).then_some((l2, r2))
        }
        Property::Neutral => {
            let x = t[0];
            let l1 = f(x, identity);
            if (l1 - x).abs() > POINT_TOL {
                return Some((l1, x));
            }
            let l2 = f(identity, x);
            ((l2 - x).abs() > POINT_TOL).then_some((l2, x))
        }
        Property::ZeroDivisors => {
            let v = f(t[0], t[1]);
            (v == 0.0).then_some((v, 0.0))
        }
        _ => None,
    }
}

/// Enumerates grid tuples lexicographically, then random tuples.
fn search<T>(grid: &GridSpec, arity: usize, shape: Shape, test: T) -> Option<Witness>
where
    T: Fn(&[f64]) -> Option<(f64, f64)> + Sync,
{
    let points = grid.points();
    let r = points.len();
    let total = r.pow(arity as u32);
    let decode = |mut idx: usize, buf: &mut [f64]| {
        for slot in buf.iter_mut().rev() {
            *slot = points[idx % r];
            idx /= r;
        }
    };
    let on_grid = (0..total).into_par_iter().find_map_first(|idx| {
        let mut t = [0.0; 4];
        let t = &mut t[..arity];
        decode(idx, t);
        if !shape.admits(t) {
            return None;
        }
        test(t).map(|(lhs, rhs)| Witness {
            point: t.to_vec(),
            lhs,
            rhs,
            sub_check: None,
        })
    });
    if on_grid.is_some() {
        return on_grid;
    }
    let samples = random_tuples(grid, arity, shape);
    samples
        .par_iter()
        .filter_map(|t| {
            test(t).map(|(lhs, rhs)| Witness {
                point: t.clone(),
                lhs,
                rhs,
                sub_check: None,
            })
        })
        .min_by(|a, b| lex_cmp(&a.point, &b.point))
}

fn random_tuples(grid: &GridSpec, arity: usize, shape: Shape) -> Vec<Vec<f64>> {
    let mut rng = grid.rng();
    (0..grid.random_samples)
        .map(|_| {
            let mut t: Vec<f64> = (0..arity).map(|_| draw_unit(&mut rng, shape)).collect();
            shape.canonicalize(&mut t);
            t
        })
        .collect()
}

fn draw_unit(rng: &mut ChaCha8Rng, shape: Shape) -> f64 {
    loop {
        let v: f64 = rng.random();
        if !matches!(shape, Shape::Interior) || v > 0.0 {
            return v;
        }
    }
}

fn pointwise(op: &Operator, property: Property, grid: &GridSpec, identity: f64) -> Option<Witness> {
    let (arity, shape) = arity_and_shape(property);
    search(grid, arity, shape, |t| violation(op, property, t, identity))
}

/// Checks one of the order properties A, A', B, B'.
pub fn check_property(op: &Operator, property: OrderProperty, grid: &GridSpec) -> PropertyVerdict {
    let property = Property::from(property);
    let witness = pointwise(op, property, grid, op.identity());
    PropertyVerdict::from_search(property, op.to_string(), witness, *grid)
}

/// Commutativity, associativity, monotonicity and neutrality of the claimed identity.
pub fn check_axioms(op: &Operator, grid: &GridSpec) -> Vec<PropertyVerdict> {
    [
        Property::Commutative,
        Property::Associative,
        Property::Monotone,
        Property::Neutral,
    ]
    .into_iter()
    .map(|p| check_axiom(op, p, grid))
    .collect()
}

/// A single axiom; `property` must be commutative, associative, monotone or neutral.
pub fn check_axiom(op: &Operator, property: Property, grid: &GridSpec) -> PropertyVerdict {
    assert!(matches!(
        property,
        Property::Commutative | Property::Associative | Property::Monotone | Property::Neutral
    ));
    let witness = pointwise(op, property, grid, op.identity());
    PropertyVerdict::from_search(property, op.to_string(), witness, *grid)
}

/// Neutrality of 1, monotonicity and property B, checked in that order.
pub fn check_copula(op: &Operator, grid: &GridSpec) -> PropertyVerdict {
    let witness = [Property::Neutral, Property::Monotone, Property::B]
        .into_iter()
        .find_map(|sub| {
            pointwise(op, sub, grid, 1.0).map(|mut w| {
                w.sub_check = Some(sub);
                w
            })
        });
    PropertyVerdict::from_search(Property::Copula, op.to_string(), witness, *grid)
}

/// `violated` means a zero divisor was found: `0 < x, y < 1` with `f(x, y) = 0`.
pub fn check_zero_divisors(op: &Operator, grid: &GridSpec) -> PropertyVerdict {
    let witness = pointwise(op, Property::ZeroDivisors, grid, op.identity());
    PropertyVerdict::from_search(Property::ZeroDivisors, op.to_string(), witness, *grid)
}

/// Smallest value of `x, x^2, x^4, ...` over at most `steps` squarings,
/// stopping early at a fixed point.
fn power_floor(op: &Operator, x: f64, steps: usize) -> f64 {
    let mut p = x;
    for _ in 0..steps {
        let next = op.eval(p, p);
        if next >= p - STALL_TOL {
            return next.min(p);
        }
        p = next;
    }
    p
}

/// Archimedean check: for grid `x, y` in (0,1), some power of `x` must drop to `y` or below.
///
/// Powers are generated by repeated squaring, so `n_max` squarings reach
/// the power `2^n_max`. A power sequence that stops decreasing (within
/// 1e-15) above `y`, or that is still above `y` when the budget runs
/// out, is reported with witness `(x, y)`; the compared values are the
/// lowest power reached and `y`.
pub fn check_archimedean(op: &Operator, grid: &GridSpec, n_max: usize) -> PropertyVerdict {
    let interior: Vec<f64> = grid
        .points()
        .into_iter()
        .filter(|&v| v > 0.0 && v < 1.0)
        .collect();
    let mut witness = None;
    if let Some(&y_min) = interior.first() {
        witness = interior.par_iter().find_map_first(|&x| {
            let floor = power_floor(op, x, n_max);
            (floor > y_min).then(|| Witness {
                point: vec![x, y_min],
                lhs: floor,
                rhs: y_min,
                sub_check: None,
            })
        });
    }
    if witness.is_none() {
        let samples = random_tuples(grid, 2, Shape::Interior);
        witness = samples
            .par_iter()
            .filter_map(|t| {
                let floor = power_floor(op, t[0], n_max);
                (floor > t[1]).then(|| Witness {
                    point: vec![t[0], t[1]],
                    lhs: floor,
                    rhs: t[1],
                    sub_check: None,
                })
            })
            .min_by(|a, b| lex_cmp(&a.point, &b.point));
    }
    let mut verdict =
        PropertyVerdict::from_search(Property::Archimedean, op.to_string(), witness, *grid);
    verdict.n_max = Some(n_max);
    verdict
}

/// Checks `mu(x) - mu(x+h) >= mu(y) - mu(y+h)` for grid `x <= y`, `h >= 0`, `y + h <= 1`.
pub fn check_generator_condition(gen: &Generator, grid: &GridSpec) -> PropertyVerdict {
    let pts = grid.points();
    let r = pts.len();
    let mu: Vec<f64> = pts.iter().map(|&x| gen.mu(x)).collect();
    let witness = (0..r).into_par_iter().find_map_first(|i| {
        for j in i..r {
            for k in 1..(r - j) {
                let lhs = mu[i] - mu[i + k];
                let rhs = mu[j] - mu[j + k];
                // inf - finite on the left always satisfies the condition
                if lhs.is_infinite() && lhs > 0.0 {
                    continue;
                }
                if lhs < rhs - VIOLATION_TOL {
                    let h = pts[k];
                    return Some(Witness {
                        point: vec![pts[i], pts[j], h],
                        lhs,
                        rhs,
                        sub_check: None,
                    });
                }
            }
        }
        None
    });
    PropertyVerdict::from_search(Property::GeneratorCondition, gen.label(), witness, *grid)
}

/// Ground-truth property marks from the family tables.
///
/// For norms the flags are properties A and B; for conorms they are A' and B'.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExpectedFlags {
    pub polarity: Polarity,
    pub property_a: bool,
    pub property_b: bool,
}

impl ExpectedFlags {
    /// The expected outcome for `property`, or `None` when the table has no
    /// column for it (A/B on a conorm, A'/B' on a norm).
    pub fn get(&self, property: OrderProperty) -> Option<bool> {
        match (self.polarity, property) {
            (Polarity::Norm, OrderProperty::A) | (Polarity::Conorm, OrderProperty::APrime) => {
                Some(self.property_a)
            }
            (Polarity::Norm, OrderProperty::B) | (Polarity::Conorm, OrderProperty::BPrime) => {
                Some(self.property_b)
            }
            _ => None,
        }
    }
}

pub fn expected_flags(id: FamilyId, alpha: Option<f64>) -> Result<ExpectedFlags> {
    make_operator(id, alpha)?;
    let (property_a, property_b) = match id.family {
        Family::Drastic => (false, false),
        Family::NilpotentMinimum => (true, false),
        _ => (true, true),
    };
    Ok(ExpectedFlags {
        polarity: id.polarity,
        property_a,
        property_b,
    })
}
