//! Closed-form T-norm and T-conorm families, the operator descriptor, and duality.
//!
//! Every family comes in two polarities: the T-norm and the T-conorm obtained
//! from it through the standard negation `x -> 1 - x`. Conorms are evaluated
//! from their own closed forms rather than by dualizing the norm, so the two
//! tables can be checked against each other.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constructors::{Generator, Negation, OrdinalSummand};
use crate::error::{Error, Result};
use crate::unit::{UnitValue, CLAMP_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Minimum,
    Product,
    Lukasiewicz,
    Drastic,
    NilpotentMinimum,
    DuboisPrade,
    AliMikhailHaq,
    Clayton,
    Frank,
    Yager,
    MayorTorrens,
    SugenoWeber,
    Gumbel,
    Joe,
}

impl Family {
    pub const ALL: [Family; 14] = [
        Family::Minimum,
        Family::Product,
        Family::Lukasiewicz,
        Family::Drastic,
        Family::NilpotentMinimum,
        Family::DuboisPrade,
        Family::AliMikhailHaq,
        Family::Clayton,
        Family::Frank,
        Family::Yager,
        Family::MayorTorrens,
        Family::SugenoWeber,
        Family::Gumbel,
        Family::Joe,
    ];

    /// Canonical snake_case name, used by the operator grammar.
    pub fn name(self) -> &'static str {
        match self {
            Family::Minimum => "minimum",
            Family::Product => "product",
            Family::Lukasiewicz => "lukasiewicz",
            Family::Drastic => "drastic",
            Family::NilpotentMinimum => "nilpotent_minimum",
            Family::DuboisPrade => "dubois_prade",
            Family::AliMikhailHaq => "ali_mikhail_haq",
            Family::Clayton => "clayton",
            Family::Frank => "frank",
            Family::Yager => "yager",
            Family::MayorTorrens => "mayor_torrens",
            Family::SugenoWeber => "sugeno_weber",
            Family::Gumbel => "gumbel",
            Family::Joe => "joe",
        }
    }

    /// Short symbol of the T-norm, e.g. `T_p`; the conorm symbol adds a prime.
    pub fn symbol(self) -> &'static str {
        match self {
            Family::Minimum => "T_m",
            Family::Product => "T_p",
            Family::Lukasiewicz => "T_L",
            Family::Drastic => "T_d",
            Family::NilpotentMinimum => "T_n",
            Family::DuboisPrade => "T_DP",
            Family::AliMikhailHaq => "T_AMH",
            Family::Clayton => "T_C",
            Family::Frank => "T_F",
            Family::Yager => "T_Y",
            Family::MayorTorrens => "T_MT",
            Family::SugenoWeber => "T_SW",
            Family::Gumbel => "T_G",
            Family::Joe => "T_J",
        }
    }

    pub fn is_parametric(self) -> bool {
        !matches!(
            self,
            Family::Minimum
                | Family::Product
                | Family::Lukasiewicz
                | Family::Drastic
                | Family::NilpotentMinimum
        )
    }

    /// Human-readable admissible parameter range.
    pub fn range_text(self) -> &'static str {
        match self {
            Family::DuboisPrade | Family::MayorTorrens => "alpha in [0,1]",
            Family::AliMikhailHaq => "alpha in [0,2]",
            Family::Clayton => "alpha <= 1, alpha != 0",
            Family::Frank => "0 < alpha != 1",
            Family::Yager | Family::Gumbel | Family::Joe => "alpha >= 1",
            Family::SugenoWeber => "alpha >= 0",
            _ => "no parameter",
        }
    }

    pub fn admits(self, alpha: f64) -> bool {
        if !alpha.is_finite() {
            return false;
        }
        match self {
            Family::DuboisPrade | Family::MayorTorrens => (0.0..=1.0).contains(&alpha),
            Family::AliMikhailHaq => (0.0..=2.0).contains(&alpha),
            Family::Clayton => alpha != 0.0 && alpha <= 1.0,
            Family::Frank => alpha > 0.0 && alpha != 1.0,
            Family::Yager | Family::Gumbel | Family::Joe => alpha >= 1.0,
            Family::SugenoWeber => alpha >= 0.0,
            _ => false,
        }
    }

    /// Parameter values exercised by the test suites; empty for parameter-free families.
    pub fn parameter_samples(self) -> &'static [f64] {
        match self {
            Family::DuboisPrade | Family::MayorTorrens => &[0.25, 0.5, 0.75],
            Family::AliMikhailHaq => &[0.5, 1.5],
            Family::Clayton => &[-1.0, 0.5, 1.0],
            Family::Frank => &[0.5, 2.0, 10.0],
            Family::Yager | Family::Gumbel | Family::Joe => &[1.0, 2.0, 5.0],
            Family::SugenoWeber => &[0.0, 1.0, 5.0],
            _ => &[],
        }
    }

    /// `[None]` for parameter-free families, otherwise each sample wrapped in `Some`.
    pub fn sampled_alphas(self) -> Vec<Option<f64>> {
        if self.is_parametric() {
            self.parameter_samples().iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Norm,
    Conorm,
}

/// One row of the T-norm table or the T-conorm table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyId {
    pub family: Family,
    pub polarity: Polarity,
}

impl FamilyId {
    pub const fn norm(family: Family) -> Self {
        FamilyId {
            family,
            polarity: Polarity::Norm,
        }
    }

    pub const fn conorm(family: Family) -> Self {
        FamilyId {
            family,
            polarity: Polarity::Conorm,
        }
    }

    pub fn dual(self) -> Self {
        match self.polarity {
            Polarity::Norm => FamilyId::conorm(self.family),
            Polarity::Conorm => FamilyId::norm(self.family),
        }
    }

    /// All 28 rows: the 14 norms followed by the 14 conorms.
    pub fn all() -> impl Iterator<Item = FamilyId> {
        Family::ALL
            .into_iter()
            .map(FamilyId::norm)
            .chain(Family::ALL.into_iter().map(FamilyId::conorm))
    }

    pub fn symbol(self) -> String {
        match self.polarity {
            Polarity::Norm => self.family.symbol().to_string(),
            Polarity::Conorm => format!("{}'", self.family.symbol()),
        }
    }

    /// Canonical grammar name.
    pub fn name(self) -> String {
        match (self.polarity, self.family) {
            (Polarity::Norm, f) => f.name().to_string(),
            (Polarity::Conorm, Family::Minimum) => "maximum".into(),
            (Polarity::Conorm, Family::Product) => "probabilistic_sum".into(),
            (Polarity::Conorm, Family::Lukasiewicz) => "bounded_sum".into(),
            (Polarity::Conorm, Family::Drastic) => "drastic_maximum".into(),
            (Polarity::Conorm, Family::NilpotentMinimum) => "nilpotent_maximum".into(),
            (Polarity::Conorm, f) => format!("{}_conorm", f.name()),
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    TNorm,
    TConorm,
    UninormGeneric,
}

impl OperatorKind {
    pub fn flipped(self) -> Self {
        match self {
            OperatorKind::TNorm => OperatorKind::TConorm,
            OperatorKind::TConorm => OperatorKind::TNorm,
            OperatorKind::UninormGeneric => OperatorKind::UninormGeneric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UninormClass {
    Conjunctive,
    Disjunctive,
}

/// A user-supplied binary rule.
pub struct CustomRule {
    pub label: String,
    rule: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomRule")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// How an operator was built. Evaluation dispatches on this.
#[derive(Debug, Clone)]
pub enum Provenance {
    ClosedForm {
        id: FamilyId,
        alpha: Option<f64>,
    },
    /// `1 - f(1-x, 1-y)`.
    StandardDual(Arc<Operator>),
    /// `n(f(n(x), n(y)))` for a strong negation `n`.
    DualUnder {
        inner: Arc<Operator>,
        negation: Negation,
    },
    OrdinalSum(Arc<[OrdinalSummand]>),
    Generator(Generator),
    /// Pointwise `weight * first + (1 - weight) * second`.
    Blend {
        weight: f64,
        first: Arc<Operator>,
        second: Arc<Operator>,
    },
    Custom(Arc<CustomRule>),
}

/// An immutable binary operation on [0,1]^2.
#[derive(Debug, Clone)]
pub struct Operator {
    kind: OperatorKind,
    identity: f64,
    provenance: Provenance,
}

impl Operator {
    pub(crate) fn from_parts(kind: OperatorKind, identity: f64, provenance: Provenance) -> Self {
        Operator {
            kind,
            identity,
            provenance,
        }
    }

    /// Wraps an arbitrary rule. The caller vouches for `kind` and `identity`;
    /// the axiom checks in [`crate::properties`] can confirm them.
    pub fn custom<F>(label: impl Into<String>, kind: OperatorKind, identity: f64, rule: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Operator::from_parts(
            kind,
            identity,
            Provenance::Custom(Arc::new(CustomRule {
                label: label.into(),
                rule: Box::new(rule),
            })),
        )
    }

    /// Convex combination `weight * first + (1 - weight) * second`.
    pub fn blend(weight: f64, first: &Operator, second: &Operator) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::OutOfUnitInterval(weight));
        }
        let kind = if first.kind == second.kind {
            first.kind
        } else {
            OperatorKind::UninormGeneric
        };
        Ok(Operator::from_parts(
            kind,
            first.identity,
            Provenance::Blend {
                weight,
                first: Arc::new(first.clone()),
                second: Arc::new(second.clone()),
            },
        ))
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// The claimed identity element.
    pub fn identity(&self) -> f64 {
        self.identity
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Catalog row, for closed-form operators.
    pub fn family(&self) -> Option<FamilyId> {
        match self.provenance {
            Provenance::ClosedForm { id, .. } => Some(id),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.provenance {
            Provenance::ClosedForm { alpha, .. } => alpha,
            _ => None,
        }
    }

    /// Evaluates the operator, clamping the result to [0,1].
    ///
    /// Inputs are assumed to lie in [0,1]. NaN propagates; use
    /// [`Operator::try_eval`] where that must be reported.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.raw(x, y).clamp(0.0, 1.0)
    }

    /// Checked evaluation: non-finite results and excursions beyond the
    /// clamping tolerance are errors.
    pub fn try_eval(&self, x: UnitValue, y: UnitValue) -> Result<UnitValue> {
        let v = self.raw(x.get(), y.get());
        if !v.is_finite() {
            return Err(Error::NonFinite {
                operator: self.to_string(),
                x: x.get(),
                y: y.get(),
            });
        }
        UnitValue::new(v)
    }

    fn raw(&self, x: f64, y: f64) -> f64 {
        match &self.provenance {
            Provenance::ClosedForm { id, alpha } => {
                closed_form(*id, alpha.unwrap_or(f64::NAN), x, y)
            }
            Provenance::StandardDual(inner) => 1.0 - inner.eval(1.0 - x, 1.0 - y),
            Provenance::DualUnder { inner, negation } => {
                negation.apply(inner.eval(negation.apply(x), negation.apply(y)))
            }
            Provenance::OrdinalSum(summands) => ordinal_sum_value(summands, x, y),
            Provenance::Generator(gen) => gen.pinv(gen.mu(x) + gen.mu(y)),
            Provenance::Blend {
                weight,
                first,
                second,
            } => weight * first.eval(x, y) + (1.0 - weight) * second.eval(x, y),
            Provenance::Custom(rule) => (rule.rule)(x, y),
        }
    }
}

/// Builds a catalog operator, validating the parameter against the family's range.
pub fn make_operator(id: FamilyId, alpha: Option<f64>) -> Result<Operator> {
    let family = id.family;
    match (family.is_parametric(), alpha) {
        (false, Some(a)) => {
            return Err(Error::UnexpectedParameter {
                family: family.name(),
                alpha: a,
            })
        }
        (true, None) => {
            return Err(Error::MissingParameter {
                family: family.name(),
                range: family.range_text(),
            })
        }
        (true, Some(a)) if !family.admits(a) => {
            return Err(Error::ParameterOutOfRange {
                family: family.name(),
                alpha: a,
                range: family.range_text(),
            })
        }
        _ => {}
    }
    let (kind, identity) = match id.polarity {
        Polarity::Norm => (OperatorKind::TNorm, 1.0),
        Polarity::Conorm => (OperatorKind::TConorm, 0.0),
    };
    Ok(Operator::from_parts(
        kind,
        identity,
        Provenance::ClosedForm { id, alpha },
    ))
}

/// Free-function form of [`Operator::try_eval`].
pub fn eval(op: &Operator, x: UnitValue, y: UnitValue) -> Result<UnitValue> {
    op.try_eval(x, y)
}

/// The dual under the standard negation, `1 - f(1-x, 1-y)`.
pub fn standard_dual(op: &Operator) -> Operator {
    Operator::from_parts(
        op.kind.flipped(),
        1.0 - op.identity,
        Provenance::StandardDual(Arc::new(op.clone())),
    )
}

/// The dual under an arbitrary strong negation.
pub fn dual_under(op: &Operator, negation: &Negation) -> Result<Operator> {
    if !negation.is_strong() {
        return Err(Error::NotStrong);
    }
    Ok(Operator::from_parts(
        op.kind.flipped(),
        negation.apply(op.identity),
        Provenance::DualUnder {
            inner: Arc::new(op.clone()),
            negation: negation.clone(),
        },
    ))
}

/// Conjunctive if `0 * 1 = 0`, disjunctive if `0 * 1 = 1`.
pub fn classify_uninorm(op: &Operator) -> Result<UninormClass> {
    let v = op.raw(0.0, 1.0);
    if v.abs() <= CLAMP_TOL {
        Ok(UninormClass::Conjunctive)
    } else if (v - 1.0).abs() <= CLAMP_TOL {
        Ok(UninormClass::Disjunctive)
    } else {
        Err(Error::NotAUninorm(v))
    }
}

fn ordinal_sum_value(summands: &[OrdinalSummand], x: f64, y: f64) -> f64 {
    for s in summands {
        let (a, b) = (s.a(), s.b());
        if a <= x && x <= b && a <= y && y <= b {
            let w = b - a;
            return a + w * s.op().eval((x - a) / w, (y - a) / w);
        }
    }
    x.min(y)
}

fn closed_form(id: FamilyId, alpha: f64, x: f64, y: f64) -> f64 {
    match id.polarity {
        Polarity::Norm => tnorm(id.family, alpha, x, y),
        Polarity::Conorm => tconorm(id.family, alpha, x, y),
    }
}

fn tnorm(family: Family, a: f64, x: f64, y: f64) -> f64 {
    match family {
        Family::Minimum => x.min(y),
        Family::Product => x * y,
        Family::Lukasiewicz => (x + y - 1.0).max(0.0),
        Family::Drastic => {
            if x.max(y) == 1.0 {
                x.min(y)
            } else {
                0.0
            }
        }
        Family::NilpotentMinimum => {
            if x + y > 1.0 {
                x.min(y)
            } else {
                0.0
            }
        }
        Family::DuboisPrade => {
            let m = x.max(y).max(a);
            if m == 0.0 {
                0.0
            } else {
                x * y / m
            }
        }
        Family::AliMikhailHaq => {
            if x.max(y) > 0.0 {
                x * y / (a + (1.0 - a) * (x + y - x * y))
            } else {
                0.0
            }
        }
        Family::Clayton => {
            if a < 0.0 && x.min(y) == 0.0 {
                0.0
            } else {
                (x.powf(a) + y.powf(a) - 1.0).max(0.0).powf(1.0 / a)
            }
        }
        Family::Frank => frank_norm(a, x, y),
        Family::Yager => (1.0 - ((1.0 - x).powf(a) + (1.0 - y).powf(a)).powf(1.0 / a)).max(0.0),
        Family::MayorTorrens => {
            if x <= a && y <= a {
                (x + y - a).max(0.0)
            } else {
                x.min(y)
            }
        }
        Family::SugenoWeber => ((x + y - 1.0 + a * x * y) / (1.0 + a)).max(0.0),
        Family::Gumbel => {
            if x.min(y) > 0.0 {
                (-((-x.ln()).powf(a) + (-y.ln()).powf(a)).powf(1.0 / a)).exp()
            } else {
                0.0
            }
        }
        Family::Joe => {
            let (u, v) = ((1.0 - x).powf(a), (1.0 - y).powf(a));
            1.0 - (u + v - u * v).powf(1.0 / a)
        }
    }
}

fn tconorm(family: Family, a: f64, x: f64, y: f64) -> f64 {
    match family {
        Family::Minimum => x.max(y),
        Family::Product => x + y - x * y,
        Family::Lukasiewicz => (x + y).min(1.0),
        Family::Drastic => {
            if x.min(y) == 0.0 {
                x.max(y)
            } else {
                1.0
            }
        }
        Family::NilpotentMinimum => {
            if x + y < 1.0 {
                x.max(y)
            } else {
                1.0
            }
        }
        Family::DuboisPrade => {
            let d = 1.0 - x.min(y).min(1.0 - a);
            if d == 0.0 {
                1.0
            } else {
                1.0 - (1.0 - x) * (1.0 - y) / d
            }
        }
        Family::AliMikhailHaq => {
            if x.min(y) < 1.0 {
                (x + y + (a - 2.0) * x * y) / (1.0 + (a - 1.0) * x * y)
            } else {
                1.0
            }
        }
        Family::Clayton => {
            if a < 0.0 && x.max(y) == 1.0 {
                1.0
            } else {
                1.0 - ((1.0 - x).powf(a) + (1.0 - y).powf(a) - 1.0)
                    .max(0.0)
                    .powf(1.0 / a)
            }
        }
        Family::Frank => 1.0 - frank_norm(a, 1.0 - x, 1.0 - y),
        Family::Yager => (x.powf(a) + y.powf(a)).powf(1.0 / a).min(1.0),
        Family::MayorTorrens => {
            let lo = 1.0 - a;
            if lo <= x && lo <= y {
                (x + y + a - 1.0).min(1.0)
            } else {
                x.max(y)
            }
        }
        Family::SugenoWeber => (x + y - a / (1.0 + a) * x * y).min(1.0),
        Family::Gumbel => {
            if x.max(y) < 1.0 {
                1.0 - (-((-(1.0 - x).ln()).powf(a) + (-(1.0 - y).ln()).powf(a)).powf(1.0 / a)).exp()
            } else {
                1.0
            }
        }
        Family::Joe => {
            let (u, v) = (x.powf(a), y.powf(a));
            (u + v - u * v).powf(1.0 / a)
        }
    }
}

/// Frank T-norm `log_a(1 + (a^x - 1)(a^y - 1)/(a - 1))` written with
/// `expm1`/`ln_1p`; for `a > 1` the ratio is handled in log space so large
/// parameters do not overflow.
fn frank_norm(alpha: f64, x: f64, y: f64) -> f64 {
    let l = alpha.ln();
    if l > 0.0 {
        let r = ln_expm1(x * l) + ln_expm1(y * l) - ln_expm1(l);
        softplus(r) / l
    } else {
        let m = -l;
        let q = (-(-x * m).exp_m1()) * (-(-y * m).exp_m1()) / (-(-m).exp_m1());
        (-q).ln_1p() / l
    }
}

/// `ln(e^t - 1)` for `t >= 0`.
fn ln_expm1(t: f64) -> f64 {
    if t > 30.0 {
        t + (-(-t).exp()).ln_1p()
    } else {
        t.exp_m1().ln()
    }
}

/// `ln(1 + e^r)`.
fn softplus(r: f64) -> f64 {
    if r > 0.0 {
        r + (-r).exp().ln_1p()
    } else {
        r.exp().ln_1p()
    }
}
