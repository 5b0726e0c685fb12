//! Triangular norms and conorms, numerical property checks, and
//! verification of rearrangement inequalities for pairs of them.
//!
//! Operators are immutable [`Operator`] values built from the closed-form
//! catalog ([`make_operator`]), from duality, ordinal sums or additive
//! generators ([`constructors`]), or parsed from a short text syntax
//! ([`parse_operator_spec`]). All checks are grid-plus-random searches and
//! report witnesses that can be re-evaluated.

pub mod catalog;
pub mod constructors;
pub mod error;
pub mod grammar;
pub mod properties;
pub mod rearrangement;
pub mod table3;
pub mod unit;

pub use catalog::{
    classify_uninorm, dual_under, eval, make_operator, standard_dual, Family, FamilyId, Operator,
    OperatorKind, Polarity, Provenance, UninormClass,
};
pub use constructors::{
    iterate_power, make_strong_negation, ordinal_sum, pseudo_inverse, tnorm_from_generator,
    Generator, Negation, OrdinalSummand,
};
pub use error::{Error, Result};
pub use grammar::{parse_operator_spec, render};
pub use properties::{
    check_archimedean, check_axioms, check_copula, check_property, check_zero_divisors,
    expected_flags, GridSpec, OrderProperty, Property, PropertyVerdict, Verdict,
};
pub use rearrangement::{
    aggregate, circular_value, pair_condition, rearrangement_value, search_counterexample,
    sigma_m1, sigma_m2, sumprod_variant_check, verify_circular_extremes, verify_rearrangement,
    Direction, PairCheckResult, Permutation,
};
pub use table3::{reproduce_table3, RunConfig, Table3Cell};
pub use unit::UnitValue;
