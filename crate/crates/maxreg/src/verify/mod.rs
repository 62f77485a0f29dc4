//! Theorem checks and experiments, each emitting a structured report.

mod calculus;
mod common;
mod gradient;
mod norms;
mod report;
mod scene;
mod stability;
#[cfg(test)]
mod tests;

pub use calculus::calculus_identity_checks;
pub use gradient::{
    check_gradient_bound_alpha0, check_gradient_bound_fractional, check_gradient_bound_spherical,
};
pub use norms::{check_norm_bounds, check_zero_boundary};
pub use report::{emit_report, VerificationReport};
pub use scene::{Realized, Scenario};
pub use stability::{argmax_stability_experiment, continuity_experiment, derivative_formula_check};
