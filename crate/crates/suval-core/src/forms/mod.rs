//! Exterior calculus with polynomial coefficients on ℂⁿ × ℂⁿ.

pub mod exterior;
pub mod invariant;
pub mod poly;
pub mod verify;

pub use exterior::PolyForm;
pub use invariant::{invariant_form, FormName, RuminData};
pub use verify::{
    check_identity_on_sphere_bundle, eval_at, product_constant, rumin_verify, verify_forms,
    FormsReport, IdentityCheck, SpherePoint,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormsError {
    #[error("unknown form name: {0}")]
    UnknownName(String),
    #[error("index k = {k} outside 0..{n} for χ_k")]
    BadIndex { k: usize, n: usize },
    #[error("complex dimensions differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("form degrees differ: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("evaluation needs {expected} vectors, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("ζ has norm {norm}, not on the unit sphere")]
    NotOnSphere { norm: f64 },
    #[error("ratio to the volume form varies across points (spread {spread:e})")]
    NotProportional { spread: f64 },
    #[error("operation requires even n, got {n}")]
    OddN { n: usize },
}
