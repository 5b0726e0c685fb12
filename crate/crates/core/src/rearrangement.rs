//! Rearrangement inequalities over a pair of aggregation operators.
//!
//! The primal inequality pairs terms with `⊗` and aggregates with `⊕`; the
//! dual swaps the two roles and reverses the chain. Everything here works on
//! plain `f64` slices that must lie in [0,1].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::catalog::{standard_dual, Operator};
use crate::error::{Error, Result};
use crate::unit::{grid_points, CLAMP_TOL, REPRO_TOL, VIOLATION_TOL};

/// Largest `n` for exhaustive permutation checks.
pub const MAX_BRUTE_FORCE: usize = 9;
/// Largest `n` for exhaustive circular checks.
pub const MAX_CIRCULAR: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Primal,
    Dual,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Primal => Direction::Dual,
            Direction::Dual => Direction::Primal,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Primal => "primal",
            Direction::Dual => "dual",
        })
    }
}

/// A bijection on `{1, ..., n}`, stored zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Builds from the usual one-based image list.
    pub fn new(one_based: Vec<usize>) -> Result<Self> {
        let n = one_based.len();
        let mut seen = vec![false; n];
        for &v in &one_based {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{one_based:?} is not a bijection on 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation(one_based.into_iter().map(|v| v - 1).collect()))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn reversal(n: usize) -> Self {
        Permutation((0..n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based images.
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|v| v + 1).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str(")")
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

/// Advances to the next permutation in lexicographic order; false after the last.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn check_unit(values: &[f64]) -> Result<()> {
    match values
        .iter()
        .find(|v| !v.is_finite() || **v < -CLAMP_TOL || **v > 1.0 + CLAMP_TOL)
    {
        Some(&v) => Err(Error::OutOfUnitInterval(v)),
        None => Ok(()),
    }
}

fn check_sorted(name: &str, values: &[f64]) -> Result<()> {
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Unsorted(format!("{name} = {values:?}")));
    }
    Ok(())
}

/// Left fold of `op` over `values`.
pub fn aggregate(op: &Operator, values: &[f64]) -> Result<f64> {
    let (&first, rest) = values.split_first().ok_or(Error::EmptySequence)?;
    check_unit(values)?;
    Ok(fold(op, first, rest.iter().copied()))
}

fn fold(op: &Operator, first: f64, rest: impl Iterator<Item = f64>) -> f64 {
    rest.fold(first, |acc, v| op.eval(acc, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVerdict {
    HoldsOnSamples,
    Violated,
}

/// Outcome of the two-element condition for one operator pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCheckResult {
    pub otimes: String,
    pub oplus: String,
    pub direction: Direction,
    pub verdict: PairVerdict,
    /// `(x1, x2, y1, y2)` with `x1 <= x2`, `y1 <= y2`.
    pub witness: Option<[f64; 4]>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub samples_tested: usize,
    pub budget: usize,
    pub seed: u64,
}

impl PairCheckResult {
    pub fn is_violated(&self) -> bool {
        self.verdict == PairVerdict::Violated
    }

    /// Recomputes both sides at the witness: they must match the recorded
    /// values and still violate the condition.
    pub fn reverify(&self, otimes: &Operator, oplus: &Operator) -> bool {
        let (Some(q), Some(lhs), Some(rhs)) = (self.witness, self.lhs, self.rhs) else {
            return false;
        };
        let (l, r) = pair_sides(otimes, oplus, q, self.direction);
        (l - lhs).abs() <= REPRO_TOL
            && (r - rhs).abs() <= REPRO_TOL
            && violates(l, r, self.direction)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("pair results always serialize")
    }
}

/// Both sides of the two-element condition at `(x1, x2, y1, y2)`.
///
/// Primal: `(x1⊗y1)⊕(x2⊗y2)` against `(x1⊗y2)⊕(x2⊗y1)`, which must be `>=`.
/// Dual: `(x1⊕y1)⊗(x2⊕y2)` against `(x1⊕y2)⊗(x2⊕y1)`, which must be `<=`.
pub fn pair_sides(
    otimes: &Operator,
    oplus: &Operator,
    q: [f64; 4],
    direction: Direction,
) -> (f64, f64) {
    let [x1, x2, y1, y2] = q;
    let (inner, outer) = match direction {
        Direction::Primal => (otimes, oplus),
        Direction::Dual => (oplus, otimes),
    };
    let lhs = outer.eval(inner.eval(x1, y1), inner.eval(x2, y2));
    let rhs = outer.eval(inner.eval(x1, y2), inner.eval(x2, y1));
    (lhs, rhs)
}

fn violates(lhs: f64, rhs: f64, direction: Direction) -> bool {
    match direction {
        Direction::Primal => lhs < rhs - VIOLATION_TOL,
        Direction::Dual => lhs > rhs + VIOLATION_TOL,
    }
}

/// Evaluates the two-element condition at a single sorted quadruple.
pub fn pair_condition(
    otimes: &Operator,
    oplus: &Operator,
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
    direction: Direction,
) -> Result<PairCheckResult> {
    let q = [x1, x2, y1, y2];
    check_unit(&q)?;
    if x1 > x2 || y1 > y2 {
        return Err(Error::Unsorted(format!(
            "need x1 <= x2 and y1 <= y2, got {q:?}"
        )));
    }
    let (lhs, rhs) = pair_sides(otimes, oplus, q, direction);
    let violated = violates(lhs, rhs, direction);
    Ok(PairCheckResult {
        otimes: otimes.to_string(),
        oplus: oplus.to_string(),
        direction,
        verdict: if violated {
            PairVerdict::Violated
        } else {
            PairVerdict::HoldsOnSamples
        },
        witness: Some(q),
        lhs: Some(lhs),
        rhs: Some(rhs),
        samples_tested: 1,
        budget: 0,
        seed: 0,
    })
}

/// Scans every sorted grid quadruple in lexicographic order, then `budget`
/// seeded random quadruples, and reports the first violation.
///
/// Random quadruples are four uniforms sorted into `x1 <= x2` and `y1 <= y2`.
pub fn search_counterexample(
    otimes: &Operator,
    oplus: &Operator,
    direction: Direction,
    budget: usize,
    seed: u64,
    resolution: usize,
) -> Result<PairCheckResult> {
    if resolution < 2 {
        return Err(Error::InvalidGrid(resolution));
    }
    let pts = grid_points(resolution);
    let r = resolution;
    let (inner, outer) = match direction {
        Direction::Primal => (otimes, oplus),
        Direction::Dual => (oplus, otimes),
    };
    // Inner terms only ever combine two grid values, so tabulate them once.
    let table: Vec<f64> = (0..r * r)
        .map(|k| inner.eval(pts[k / r], pts[k % r]))
        .collect();
    let at = |i: usize, j: usize| table[i * r + j];
    let grid_hit = |idx: usize| {
        let (a, rest) = (idx / (r * r * r), idx % (r * r * r));
        let (b, rest) = (rest / (r * r), rest % (r * r));
        let (c, d) = (rest / r, rest % r);
        if a > b || c > d {
            return None;
        }
        let lhs = outer.eval(at(a, c), at(b, d));
        let rhs = outer.eval(at(a, d), at(b, c));
        violates(lhs, rhs, direction).then_some(([pts[a], pts[b], pts[c], pts[d]], lhs, rhs))
    };
    let is_admissible = |idx: usize| {
        let (a, b) = (idx / (r * r * r), (idx / (r * r)) % r);
        let (c, d) = ((idx / r) % r, idx % r);
        a <= b && c <= d
    };
    let test = |q: [f64; 4]| {
        let (lhs, rhs) = pair_sides(otimes, oplus, q, direction);
        violates(lhs, rhs, direction).then_some((q, lhs, rhs))
    };

    let grid_total = r * (r + 1) / 2;
    let grid_total = grid_total * grid_total;
    let on_grid = (0..r.pow(4))
        .into_par_iter()
        .find_map_first(|idx| grid_hit(idx).map(|hit| (idx, hit)));

    let (hit, tested) = match on_grid {
        Some((idx, hit)) => {
            let tested = (0..=idx).filter(|&i| is_admissible(i)).count();
            (Some(hit), tested)
        }
        None => {
            let quads = random_quads(budget, seed);
            match quads.par_iter().position_first(|&q| test(q).is_some()) {
                Some(pos) => (test(quads[pos]), grid_total + pos + 1),
                None => (None, grid_total + budget),
            }
        }
    };

    Ok(PairCheckResult {
        otimes: otimes.to_string(),
        oplus: oplus.to_string(),
        direction,
        verdict: if hit.is_some() {
            PairVerdict::Violated
        } else {
            PairVerdict::HoldsOnSamples
        },
        witness: hit.map(|h| h.0),
        lhs: hit.map(|h| h.1),
        rhs: hit.map(|h| h.2),
        samples_tested: tested,
        budget,
        seed,
    })
}

fn random_quads(budget: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..budget)
        .map(|_| {
            let mut q: [f64; 4] = rng.random();
            if q[0] > q[1] {
                q.swap(0, 1);
            }
            if q[2] > q[3] {
                q.swap(2, 3);
            }
            q
        })
        .collect()
}

/// Maps `(x1, x2, y1, y2)` to `(1-x2, 1-x1, 1-y2, 1-y1)`.
///
/// A violation for `(⊗, ⊕)` in one direction becomes a violation at the
/// transported point for `(dual ⊕, dual ⊗)` in the other direction.
pub fn transport_quad(q: [f64; 4]) -> [f64; 4] {
    [1.0 - q[1], 1.0 - q[0], 1.0 - q[3], 1.0 - q[2]]
}

/// Re-checks a violation's transported witness on the dual pair.
pub fn transport_witness(
    otimes: &Operator,
    oplus: &Operator,
    result: &PairCheckResult,
) -> Option<PairCheckResult> {
    let q = transport_quad(result.witness?);
    let (dual_otimes, dual_oplus) = (standard_dual(oplus), standard_dual(otimes));
    pair_condition(
        &dual_otimes,
        &dual_oplus,
        q[0],
        q[1],
        q[2],
        q[3],
        result.direction.flipped(),
    )
    .ok()
}

/// `⊕_i (x_{σ(i)} ⊗ y_i)` for primal, `⊗_i (x_{σ(i)} ⊕ y_i)` for dual.
pub fn rearrangement_value(
    otimes: &Operator,
    oplus: &Operator,
    xs: &[f64],
    ys: &[f64],
    sigma: &Permutation,
    direction: Direction,
) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() != sigma.len() {
        return Err(Error::LengthMismatch(xs.len(), sigma.len()));
    }
    if xs.is_empty() {
        return Err(Error::EmptySequence);
    }
    check_unit(xs)?;
    check_unit(ys)?;
    Ok(value_unchecked(
        otimes,
        oplus,
        xs,
        ys,
        sigma.as_slice(),
        direction,
    ))
}

fn value_unchecked(
    otimes: &Operator,
    oplus: &Operator,
    xs: &[f64],
    ys: &[f64],
    sigma: &[usize],
    direction: Direction,
) -> f64 {
    let (inner, outer) = match direction {
        Direction::Primal => (otimes, oplus),
        Direction::Dual => (oplus, otimes),
    };
    let mut terms = sigma.iter().zip(ys).map(|(&s, &y)| inner.eval(xs[s], y));
    let first = terms.next().expect("non-empty");
    fold(outer, first, terms)
}

/// A permutation whose value leaves the identity/reversal bracket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangementWitness {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub sigma: Permutation,
    pub value: f64,
    /// Value of the identity pairing.
    pub identity_value: f64,
    /// Value of the reversed pairing.
    pub reversal_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RearrangementOutcome {
    pub holds: bool,
    pub witness: Option<RearrangementWitness>,
    pub permutations_checked: usize,
}

/// Exhaustively checks the permutation chain for sorted `xs`, `ys`.
///
/// Primal requires `reversal <= σ <= identity`, dual requires
/// `identity <= σ <= reversal`, both up to the violation tolerance. The
/// witness is the first offending σ in lexicographic order.
pub fn verify_rearrangement(
    otimes: &Operator,
    oplus: &Operator,
    xs: &[f64],
    ys: &[f64],
    direction: Direction,
) -> Result<RearrangementOutcome> {
    let n = xs.len();
    if ys.len() != n {
        return Err(Error::LengthMismatch(n, ys.len()));
    }
    if n == 0 || n > MAX_BRUTE_FORCE {
        return Err(Error::LengthOutOfRange {
            n,
            min: 1,
            max: MAX_BRUTE_FORCE,
        });
    }
    check_unit(xs)?;
    check_unit(ys)?;
    check_sorted("xs", xs)?;
    check_sorted("ys", ys)?;

    let identity_value = value_unchecked(
        otimes,
        oplus,
        xs,
        ys,
        Permutation::identity(n).as_slice(),
        direction,
    );
    let reversal_value = value_unchecked(
        otimes,
        oplus,
        xs,
        ys,
        Permutation::reversal(n).as_slice(),
        direction,
    );
    let (low, high) = match direction {
        Direction::Primal => (reversal_value, identity_value),
        Direction::Dual => (identity_value, reversal_value),
    };

    let mut sigma: Vec<usize> = (0..n).collect();
    let mut checked = 0;
    loop {
        checked += 1;
        let value = value_unchecked(otimes, oplus, xs, ys, &sigma, direction);
        if value < low - VIOLATION_TOL || value > high + VIOLATION_TOL {
            return Ok(RearrangementOutcome {
                holds: false,
                witness: Some(RearrangementWitness {
                    xs: xs.to_vec(),
                    ys: ys.to_vec(),
                    sigma: Permutation(sigma),
                    value,
                    identity_value,
                    reversal_value,
                }),
                permutations_checked: checked,
            });
        }
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    Ok(RearrangementOutcome {
        holds: true,
        witness: None,
        permutations_checked: checked,
    })
}

/// `n` uniforms on [0,1), sorted.
pub fn sorted_uniforms<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// The three pairing values of the sum-product variant and whether they are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumProdOutcome {
    pub low: f64,
    pub given: f64,
    pub high: f64,
    pub holds: bool,
}

/// Checks that the given adjacent pairing of `a` lies between the two
/// extreme pairings of its sorted copy `b`.
///
/// Primal: `⊕ b_i⊗b_{2n-i+1} <= ⊕ a_{2i-1}⊗a_{2i} <= ⊕ b_{2i-1}⊗b_{2i}`.
/// Dual: `⊗ (b_{2i-1}⊕b_{2i}) <= ⊗ (a_{2i-1}⊕a_{2i}) <= ⊗ (b_i⊕b_{2n-i+1})`.
pub fn sumprod_variant_check(
    otimes: &Operator,
    oplus: &Operator,
    a: &[f64],
    direction: Direction,
) -> Result<SumProdOutcome> {
    if a.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !a.len().is_multiple_of(2) {
        return Err(Error::OddLength(a.len()));
    }
    check_unit(a)?;
    let mut b = a.to_vec();
    b.sort_by(f64::total_cmp);
    let n = a.len() / 2;
    let (inner, outer) = match direction {
        Direction::Primal => (otimes, oplus),
        Direction::Dual => (oplus, otimes),
    };
    let pairing = |pairs: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut terms = pairs.map(|(u, v)| inner.eval(u, v));
        let first = terms.next().expect("non-empty");
        fold(outer, first, terms)
    };
    let opposite = pairing(&mut (0..n).map(|i| (b[i], b[2 * n - 1 - i])));
    let given = pairing(&mut a.chunks(2).map(|c| (c[0], c[1])));
    let adjacent = pairing(&mut b.chunks(2).map(|c| (c[0], c[1])));
    let (low, high) = match direction {
        Direction::Primal => (opposite, adjacent),
        Direction::Dual => (adjacent, opposite),
    };
    Ok(SumProdOutcome {
        low,
        given,
        high,
        holds: low <= given + VIOLATION_TOL && given <= high + VIOLATION_TOL,
    })
}

/// The circular arrangement that minimizes the primal cyclic value.
///
/// Outer pairs `k, n-k` are placed alternately on the left (odd `k`) and
/// right (even `k`) ends, so for `n = 8` this is `(1, 7, 3, 5, 4, 6, 2, 8)`.
pub fn sigma_m1(n: usize) -> Result<Permutation> {
    if n < 2 {
        return Err(Error::TooShort { n, min: 2 });
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let mut k = 1;
    while k <= n - k {
        let side = if k % 2 == 1 { &mut left } else { &mut right };
        side.push(k);
        if n - k != k {
            side.push(n - k);
        }
        k += 1;
    }
    right.reverse();
    left.extend(right);
    left.push(n);
    Permutation::new(left)
}

/// Odd positions ascending, then even positions descending.
pub fn sigma_m2(n: usize) -> Result<Permutation> {
    if n < 2 {
        return Err(Error::TooShort { n, min: 2 });
    }
    let odd = (1..=n).filter(|k| k % 2 == 1);
    let even = (1..=n).rev().filter(|k| k % 2 == 0);
    Permutation::new(odd.chain(even).collect())
}

/// Cyclic aggregate over neighbouring entries `a_{σ(i)}, a_{σ(i+1)}`, wrapping around.
pub fn circular_value(
    otimes: &Operator,
    oplus: &Operator,
    a: &[f64],
    sigma: &Permutation,
    direction: Direction,
) -> Result<f64> {
    if a.len() != sigma.len() {
        return Err(Error::LengthMismatch(a.len(), sigma.len()));
    }
    if a.len() < 2 {
        return Err(Error::TooShort { n: a.len(), min: 2 });
    }
    check_unit(a)?;
    check_sorted("a", a)?;
    Ok(circular_unchecked(
        otimes,
        oplus,
        a,
        sigma.as_slice(),
        direction,
    ))
}

fn circular_unchecked(
    otimes: &Operator,
    oplus: &Operator,
    a: &[f64],
    sigma: &[usize],
    direction: Direction,
) -> f64 {
    let (inner, outer) = match direction {
        Direction::Primal => (otimes, oplus),
        Direction::Dual => (oplus, otimes),
    };
    let n = sigma.len();
    let mut terms = (0..n).map(|i| inner.eval(a[sigma[i]], a[sigma[(i + 1) % n]]));
    let first = terms.next().expect("n >= 2");
    fold(outer, first, terms)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularOutcome {
    pub min: f64,
    pub max: f64,
    pub at_m1: f64,
    pub at_m2: f64,
    pub holds: bool,
}

/// Brute-forces all arrangements and checks that `σ_m1`/`σ_m2` attain the
/// minimum/maximum (primal) or maximum/minimum (dual).
pub fn verify_circular_extremes(
    otimes: &Operator,
    oplus: &Operator,
    a: &[f64],
    direction: Direction,
) -> Result<CircularOutcome> {
    let n = a.len();
    if !(2..=MAX_CIRCULAR).contains(&n) {
        return Err(Error::LengthOutOfRange {
            n,
            min: 2,
            max: MAX_CIRCULAR,
        });
    }
    check_unit(a)?;
    check_sorted("a", a)?;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut sigma: Vec<usize> = (0..n).collect();
    loop {
        let v = circular_unchecked(otimes, oplus, a, &sigma, direction);
        min = min.min(v);
        max = max.max(v);
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    let at_m1 = circular_unchecked(otimes, oplus, a, sigma_m1(n)?.as_slice(), direction);
    let at_m2 = circular_unchecked(otimes, oplus, a, sigma_m2(n)?.as_slice(), direction);
    let (target_m1, target_m2) = match direction {
        Direction::Primal => (min, max),
        Direction::Dual => (max, min),
    };
    Ok(CircularOutcome {
        min,
        max,
        at_m1,
        at_m2,
        holds: (at_m1 - target_m1).abs() <= VIOLATION_TOL
            && (at_m2 - target_m2).abs() <= VIOLATION_TOL,
    })
}
