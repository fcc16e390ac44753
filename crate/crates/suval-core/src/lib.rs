//! Invariant valuations on ℂⁿ and their kinematic formulas.
//!
//! The crate is organized around the objects that appear in hermitian
//! integral geometry at desk scale (n = 2, 3):
//!
//! - [`numkernel`] — small dense real/complex linear algebra (orthonormalization,
//!   complex determinants, skew spectra, Pfaffians, unit-ball volumes).
//! - [`grassmann`] — subspaces of ℂⁿ ≅ ℝ²ⁿ, their Kähler angles and Θ-invariants,
//!   orbit representatives and orbit equality tests.
//! - [`forms`] — exterior calculus with polynomial coefficients on ℂⁿ × ℂⁿ,
//!   the invariant forms α, β, γ, θ₀, θ₁, θ₂, θ_s, χ_k on the sphere bundle,
//!   numerical identity checking and valuation products via the Rumin differential.
//! - [`polytope`] — convex polytopes in ℝ²ⁿ with face enumeration, face volumes,
//!   exterior angles, zonotope volumes and pairwise intersection in ℝ⁴.
//! - [`valuations`] — Klain functions, the constant-coefficient evaluation
//!   formula, weight laws and valuation products.
//! - [`kinematics`] — Haar sampling on U(n)/SU(n) and seeded Monte Carlo
//!   verification of the kinematic formulas.
//! - [`selftest`] — the full verification battery used by the CLI and the
//!   acceptance test suite.

pub mod forms;
pub mod grassmann;
pub mod kinematics;
pub mod numkernel;
pub mod polytope;
pub mod selftest;
pub mod valuations;

pub use num_complex::Complex64;
