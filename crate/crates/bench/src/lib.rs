//! Shared fixtures for the criterion benches.

use tnorm_core::{make_operator, Family, FamilyId, Operator};

/// A norm/conorm pair from the catalog.
pub fn pair(
    norm: Family,
    norm_alpha: Option<f64>,
    conorm: Family,
    conorm_alpha: Option<f64>,
) -> (Operator, Operator) {
    (
        make_operator(FamilyId::norm(norm), norm_alpha).expect("valid norm"),
        make_operator(FamilyId::conorm(conorm), conorm_alpha).expect("valid conorm"),
    )
}

/// Evenly spaced sorted values strictly inside (0, 1).
pub fn ramp(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}
