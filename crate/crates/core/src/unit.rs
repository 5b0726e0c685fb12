//! Values on the unit interval and the numerical tolerances shared by every check.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Excursion outside [0,1] that is still clamped back rather than rejected.
pub const CLAMP_TOL: f64 = 1e-9;
/// Pointwise tolerance for single-evaluation identities (commutativity, neutrality, duality).
pub const POINT_TOL: f64 = 1e-9;
/// Tolerance for associativity, which chains two evaluations.
pub const ASSOC_TOL: f64 = 1e-7;
/// An inequality counts as violated only when it fails by more than this.
pub const VIOLATION_TOL: f64 = 1e-9;
/// Slack on the antecedent of properties A and A'.
pub const ANTECEDENT_TOL: f64 = 1e-12;
/// Re-evaluating a witness must reproduce its recorded sides to this precision.
pub const REPRO_TOL: f64 = 1e-12;

/// A real number in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct UnitValue(f64);

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue(0.0);
    pub const ONE: UnitValue = UnitValue(1.0);

    /// Clamps excursions up to [`CLAMP_TOL`]; anything further out (or NaN) is an error.
    pub fn new(v: f64) -> Result<Self> {
        if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
            return Err(Error::OutOfUnitInterval(v));
        }
        Ok(UnitValue(v.clamp(0.0, 1.0)))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitValue {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        UnitValue::new(v)
    }
}

impl From<UnitValue> for f64 {
    fn from(v: UnitValue) -> f64 {
        v.0
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `resolution` evenly spaced points on [0,1], endpoints included.
pub fn grid_points(resolution: usize) -> Vec<f64> {
    let last = (resolution - 1) as f64;
    (0..resolution).map(|i| i as f64 / last).collect()
}
