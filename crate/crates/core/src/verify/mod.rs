//! Verifiers, one file per family of statements. Every verifier returns a
//! [`VerificationReport`] with a three-state verdict.

mod bochner;
mod consistency;
pub mod diff;
mod general;
mod harnack;
mod monotonicity;
pub mod report;
mod scaling;
mod weighted;

pub use bochner::{
    bochner_terms, verify_drift_bochner, verify_drift_bochner_trajectory, BochnerReports,
    BochnerTerms,
};
pub use consistency::{verify_dual_path, verify_quadrature_mass};
pub use general::verify_general_bounds;
pub use harnack::{
    general_harnack_exponent, heat_harnack_exponent, printed_harnack_exponent,
    verify_backward_uniqueness, verify_general_harnack, verify_harnack, HarnackReports,
};
pub use monotonicity::{
    verify_eigenvalue_monotonicity, verify_equality_case, verify_frequency_monotonicity,
};
pub use report::{merge_reports, CheckKind, NodeRecord, ReportBuilder, Verdict, VerificationReport};
pub use scaling::verify_selfsimilar_scaling;
pub use weighted::{
    convergence_test_functions, max_weighted_residual, packaged_test_functions, verify_weighted_monotonicity, weighted_monotonicity_order,
    TestFunction,
};
