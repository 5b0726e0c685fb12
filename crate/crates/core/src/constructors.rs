//! Operators built from negations, additive generators and ordinal sums.

use std::fmt;
use std::sync::Arc;

use crate::catalog::{Operator, OperatorKind, Provenance};
use crate::error::{Error, Result};
use crate::unit::{grid_points, UnitValue, POINT_TOL};

const BISECTION_ITERS: usize = 80;
const BISECTION_WIDTH: f64 = 1e-13;
/// Grid used to validate monotonicity of user-supplied maps.
const VALIDATION_GRID: usize = 257;
/// Grid used for the involution and generator range checks.
const CHECK_GRID: usize = 33;

/// Largest `x` in `[0, 1]` with `pred(x)` true, assuming `pred` holds on a
/// prefix of the interval and `pred(0)` is true.
fn bisect_sup(pred: impl Fn(f64) -> bool) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_ITERS {
        if hi - lo < BISECTION_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

type UnaryFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum NegationRule {
    Standard,
    /// `phi^-1(1 - phi(x))`, with `phi^-1` by bisection when not supplied.
    Phi {
        phi: UnaryFn,
        inverse: Option<UnaryFn>,
    },
    Custom(UnaryFn),
}

/// A nonincreasing map on [0,1] with `n(0) = 1` and `n(1) = 0`.
#[derive(Clone)]
pub struct Negation {
    rule: NegationRule,
    strict: bool,
    strong: bool,
}

impl fmt::Debug for Negation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.rule {
            NegationRule::Standard => "standard",
            NegationRule::Phi { .. } => "phi",
            NegationRule::Custom(_) => "custom",
        };
        f.debug_struct("Negation")
            .field("rule", &rule)
            .field("strict", &self.strict)
            .field("strong", &self.strong)
            .finish()
    }
}

impl Negation {
    /// `x -> 1 - x`.
    pub fn standard() -> Self {
        Negation {
            rule: NegationRule::Standard,
            strict: true,
            strong: true,
        }
    }

    /// Validates an arbitrary negation and derives its strict/strong flags on a grid.
    pub fn from_fn<F>(rule: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if rule(0.0) != 1.0 || rule(1.0) != 0.0 {
            return Err(Error::InvalidNegation(
                "boundary values must be n(0)=1, n(1)=0".into(),
            ));
        }
        let grid = grid_points(VALIDATION_GRID);
        let values: Vec<f64> = grid.iter().map(|&x| rule(x)).collect();
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidNegation("not nonincreasing".into()));
        }
        let strict = values.windows(2).all(|w| w[1] < w[0]);
        let mut neg = Negation {
            rule: NegationRule::Custom(Arc::new(rule)),
            strict,
            strong: false,
        };
        neg.strong = strict && neg.involution_error() <= POINT_TOL;
        Ok(neg)
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.rule {
            NegationRule::Standard => 1.0 - x,
            NegationRule::Phi { phi, inverse } => {
                let t = 1.0 - phi(x);
                // Exact at the ends; bisection slack there is amplified by steep inverses.
                if t <= 0.0 {
                    return 0.0;
                }
                if t >= 1.0 {
                    return 1.0;
                }
                match inverse {
                    Some(inv) => inv(t),
                    None => bisect_sup(|u| phi(u) < t),
                }
            }
            NegationRule::Custom(f) => f(x),
        }
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn is_strong(&self) -> bool {
        self.strong
    }

    /// Largest `|n(n(x)) - x|` over the check grid.
    pub fn involution_error(&self) -> f64 {
        grid_points(CHECK_GRID)
            .into_iter()
            .map(|x| (self.apply(self.apply(x)) - x).abs())
            .fold(0.0, f64::max)
    }
}

fn validate_phi(phi: &dyn Fn(f64) -> f64) -> Result<()> {
    if (phi(0.0)).abs() > 1e-12 || (phi(1.0) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidNegation(
            "phi must map [0,1] onto [0,1] with phi(0)=0, phi(1)=1".into(),
        ));
    }
    let values: Vec<f64> = grid_points(VALIDATION_GRID).into_iter().map(phi).collect();
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidNegation(
            "phi is not strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Strong negation `phi^-1(1 - phi(x))`; `phi^-1` is found by bisection.
pub fn make_strong_negation<F>(phi: F) -> Result<Negation>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    build_phi_negation(Arc::new(phi), None)
}

/// Same as [`make_strong_negation`] with a closed-form inverse of `phi`.
pub fn make_strong_negation_with_inverse<F, G>(phi: F, inverse: G) -> Result<Negation>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    build_phi_negation(Arc::new(phi), Some(Arc::new(inverse)))
}

fn build_phi_negation(phi: UnaryFn, inverse: Option<UnaryFn>) -> Result<Negation> {
    validate_phi(phi.as_ref())?;
    let neg = Negation {
        rule: NegationRule::Phi { phi, inverse },
        strict: true,
        strong: true,
    };
    let err = neg.involution_error();
    if err > POINT_TOL {
        return Err(Error::InvalidNegation(format!(
            "involution error {err:e} exceeds tolerance"
        )));
    }
    Ok(neg)
}

pub struct CustomGenerator {
    pub label: String,
    mu: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGenerator")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum GeneratorShape {
    /// `1 - x`
    Lukasiewicz,
    /// `-ln x`
    NegLog,
    /// `(1 - x)^alpha`, alpha >= 1
    Yager(f64),
    Custom(Arc<CustomGenerator>),
}

/// An additive generator: strictly decreasing, `mu(1) = 0`, values in `[0, inf]`.
#[derive(Debug, Clone)]
pub struct Generator {
    shape: GeneratorShape,
    mu_at_zero: f64,
}

impl Generator {
    pub fn lukasiewicz() -> Self {
        Generator {
            shape: GeneratorShape::Lukasiewicz,
            mu_at_zero: 1.0,
        }
    }

    pub fn neg_log() -> Self {
        Generator {
            shape: GeneratorShape::NegLog,
            mu_at_zero: f64::INFINITY,
        }
    }

    pub fn yager(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::ParameterOutOfRange {
                family: "yager generator",
                alpha,
                range: "alpha >= 1",
            });
        }
        Ok(Generator {
            shape: GeneratorShape::Yager(alpha),
            mu_at_zero: 1.0,
        })
    }

    /// Validates a user-supplied generator on a grid: `mu(1) = 0` exactly,
    /// strictly decreasing, and `mu(x) + mu(y)` inside `Range(mu) ∪ [mu(0), inf]`.
    pub fn custom<F>(label: impl Into<String>, mu: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if mu(1.0) != 0.0 {
            return Err(Error::InvalidGenerator("mu(1) must be exactly 0".into()));
        }
        let mu_at_zero = mu(0.0);
        if mu_at_zero.is_nan() || mu_at_zero <= 0.0 {
            return Err(Error::InvalidGenerator("mu(0) must lie in (0, inf]".into()));
        }
        let values: Vec<f64> = grid_points(VALIDATION_GRID).into_iter().map(&mu).collect();
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidGenerator(
                "mu must take values in [0, inf]".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidGenerator(
                "mu is not strictly decreasing".into(),
            ));
        }
        let gen = Generator {
            shape: GeneratorShape::Custom(Arc::new(CustomGenerator {
                label: label.into(),
                mu: Box::new(mu),
            })),
            mu_at_zero,
        };
        gen.check_range_condition()?;
        Ok(gen)
    }

    fn check_range_condition(&self) -> Result<()> {
        let grid = grid_points(CHECK_GRID);
        for &x in &grid {
            for &y in &grid {
                let s = self.mu(x) + self.mu(y);
                if s >= self.mu_at_zero {
                    continue;
                }
                let back = self.mu(self.pinv(s));
                if (back - s).abs() > 1e-9 * s.max(1.0) {
                    return Err(Error::InvalidGenerator(format!(
                        "mu({x}) + mu({y}) = {s} is not in the range of mu"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> &GeneratorShape {
        &self.shape
    }

    /// Spec-grammar rendering for built-in shapes, the user label otherwise.
    pub fn label(&self) -> String {
        match &self.shape {
            GeneratorShape::Lukasiewicz => "gen(luka)".into(),
            GeneratorShape::NegLog => "gen(nlog)".into(),
            GeneratorShape::Yager(a) => format!("gen(yager:{a})"),
            GeneratorShape::Custom(c) => c.label.clone(),
        }
    }

    pub fn mu_at_zero(&self) -> f64 {
        self.mu_at_zero
    }

    pub fn mu(&self, x: f64) -> f64 {
        match &self.shape {
            GeneratorShape::Lukasiewicz => 1.0 - x,
            GeneratorShape::NegLog => -x.ln(),
            GeneratorShape::Yager(a) => (1.0 - x).powf(*a),
            GeneratorShape::Custom(c) => (c.mu)(x),
        }
    }

    /// Pseudo-inverse `sup{x : mu(x) > t}` with `sup ∅ = 0`.
    pub fn pseudo_inverse(&self, t: f64) -> Result<UnitValue> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeArgument(t));
        }
        UnitValue::new(self.pinv(t))
    }

    pub(crate) fn pinv(&self, t: f64) -> f64 {
        if t >= self.mu_at_zero {
            return 0.0;
        }
        match &self.shape {
            GeneratorShape::Lukasiewicz => 1.0 - t,
            GeneratorShape::NegLog => (-t).exp(),
            GeneratorShape::Yager(a) => 1.0 - t.powf(1.0 / a),
            GeneratorShape::Custom(c) => bisect_sup(|x| (c.mu)(x) > t),
        }
    }
}

/// Free-function form of [`Generator::pseudo_inverse`].
pub fn pseudo_inverse(gen: &Generator, t: f64) -> Result<UnitValue> {
    gen.pseudo_inverse(t)
}

/// `f(x, y) = mu^(-1)(mu(x) + mu(y))`.
pub fn tnorm_from_generator(gen: &Generator) -> Operator {
    Operator::from_parts(OperatorKind::TNorm, 1.0, Provenance::Generator(gen.clone()))
}

/// A T-norm rescaled onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct OrdinalSummand {
    op: Operator,
    a: f64,
    b: f64,
}

impl OrdinalSummand {
    pub fn new(op: Operator, a: f64, b: f64) -> Result<Self> {
        if op.kind() != OperatorKind::TNorm {
            return Err(Error::InvalidOrdinalSum("summands must be T-norms".into()));
        }
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
            return Err(Error::InvalidOrdinalSum(format!(
                "interval [{a}, {b}] is not inside [0,1]"
            )));
        }
        if a >= b {
            return Err(Error::InvalidOrdinalSum(format!(
                "interval [{a}, {b}] is empty"
            )));
        }
        Ok(OrdinalSummand { op, a, b })
    }

    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Ordinal sum: each summand acts on its own square `[a_i, b_i]^2`, minimum elsewhere.
pub fn ordinal_sum(summands: Vec<OrdinalSummand>) -> Result<Operator> {
    let mut summands = summands;
    summands.sort_by(|p, q| p.a.total_cmp(&q.a));
    for w in summands.windows(2) {
        if w[1].a < w[0].b {
            return Err(Error::InvalidOrdinalSum(format!(
                "intervals [{}, {}] and [{}, {}] overlap",
                w[0].a, w[0].b, w[1].a, w[1].b
            )));
        }
    }
    Ok(Operator::from_parts(
        OperatorKind::TNorm,
        1.0,
        Provenance::OrdinalSum(summands.into()),
    ))
}

/// `x ⊗ x ⊗ ... ⊗ x` with `n` copies, folded from the left.
pub fn iterate_power(op: &Operator, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    Ok((1..n).fold(x, |acc, _| op.eval(acc, x)))
}
