//! Rough paths of inhomogeneous degree of smoothness.
//!
//! Coordinate blocks of a driving signal may be rough to different degrees;
//! the grading assigns each block its own roughness parameter and weights
//! tensor words accordingly. On top of that grading this crate provides
//! the truncated tensor algebra, signatures of piecewise-linear paths, the
//! sewing engine that turns almost-multiplicative functionals into
//! multiplicative ones, signature extension, integration of block-graded
//! Lipschitz one-forms, and a Picard solver for differential equations
//! driven by such signals.

pub mod error;
pub mod extension;
pub mod grading;
pub mod json;
pub mod par;
pub mod path;
pub mod ratio;
pub mod tensor;

pub use error::{Error, Result};
pub use extension::{
    extend_signature, multiplicativity_defect, sew, sew_with_schedule, AlmostFunctional,
    DefectReport, ExtensionReport, RefinementSchedule, SewReport,
};
pub use grading::{ordered_shuffles, GradingSpec, MultiIndex, Permutation, Spec};
pub use path::{
    check_finite_pi_variation, control_from_path, pi_variation_distance, segment_signature,
    ControlFunction, GridRoughPath, PairTable, SampledPath, VariationCertificate,
};
pub use tensor::{shuffle_words, Letter, TensorElement, Word};
