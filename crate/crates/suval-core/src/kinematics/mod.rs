//! Haar sampling on U(n)/SU(n) and Monte Carlo verification of the
//! kinematic formulas.

pub mod estimators;
pub mod haar;

pub use estimators::{
    additive_kinematic_delta, additive_kinematic_delta_uncoupled, kinematic_correction_reference,
    principal_kinematic_delta, reproducing_check, reproducing_delta, MCEstimate, ReproOptions,
};
pub use haar::{coupled_pair, sample_special_unitary, sample_unitary, Group, HaarSampler};
