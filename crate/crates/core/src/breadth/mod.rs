//! Constant-breadth curve pairs.
//!
//! A pair `(α, β)` with `β = α + m1 T + m2 Y + m3 U` and opposite unit tangents at
//! corresponding points. [`systems`] integrates the coefficients, [`closed_form`] solves
//! them along helices, [`partner`] assembles and checks `β`, [`suite`] samples theorems.

pub mod closed_form;
pub mod partner;
pub mod suite;
pub mod systems;

pub use closed_form::{
    asymptotic_m23_closed_form, closed_form_m1, closed_form_m1_formula, companions, fit_constants,
    geodesic_m23_closed_form, initial_data, spacelike_asymptotic_m23_closed_form, Family,
};
pub use partner::{build_partner, helix_check, verify_pair, CurvePair, HelixCheck, PairReport};
pub use suite::{theorem_suite, SampleOutcome, SampleStatus, SuiteConfig, Theorem, TheoremOutcome, Verdict};
pub use systems::{
    breadth, coefficient_rhs, integrate_coefficients, sign_pattern, BreadthCoefficients, CoefficientRhs, Forcing, HMode,
};
