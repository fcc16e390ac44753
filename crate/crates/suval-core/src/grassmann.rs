//! Orbit invariants of real subspaces of ℂⁿ ≅ ℝ²ⁿ.
//!
//! A [`Subspace`] is carried as an orthonormal real basis. The identification
//! ℂⁿ ≅ ℝ²ⁿ is the interleaved layout (x₁, y₁, …, x_n, y_n), so multiplication
//! by i acts as the block rotation (x_j, y_j) ↦ (−y_j, x_j).
//!
//! For a middle-dimensional subspace W the complete SU(n)-orbit data is the
//! vector of Kähler angles θ₁ ≤ … ≤ θ_m (from the spectrum of the compressed
//! complex structure π_W ∘ J|_W) together with the Θ-invariant
//! Θ(W) = det(w₁, …, w_n), a complex determinant of any orthonormal basis.
//! Θ is a well-defined complex number when the restricted symplectic form is
//! non-degenerate (n even, all angles < π/2) and the basis is oriented by it;
//! otherwise it is only defined up to sign.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::{self, CMatrix, CVector, NumError, RMatrix, RVector};

/// Orthonormality tolerance for stored bases.
pub const BASIS_TOL: f64 = 1e-10;
/// Default tolerance for angle and Θ comparisons.
pub const ORBIT_TOL: f64 = 1e-8;
/// Below this the restricted symplectic form counts as degenerate.
const SYMPLECTIC_DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrassmannError {
    #[error("operation requires dim W = n = {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("subspaces have mismatched dimensions")]
    DimensionMismatch,
    #[error("|Θ| = {theta_abs} does not match ∏ sin θ_j = {sine_product}")]
    InconsistentTheta { theta_abs: f64, sine_product: f64 },
    #[error("invalid subspace: {0}")]
    InvalidSubspace(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Real k-dimensional subspace of ℂⁿ ≅ ℝ²ⁿ, stored as an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    n: usize,
    basis: Vec<RVector>,
}

/// Kähler angles 0 ≤ θ₁ ≤ … ≤ θ_m ≤ π/2 of a middle-dimensional subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct KaehlerAngles {
    angles: Vec<f64>,
}

/// Θ-invariant. `mod_sign` means the value is only defined up to ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue {
    pub value: Complex64,
    pub mod_sign: bool,
}

impl ThetaValue {
    fn exact(value: Complex64) -> Self {
        ThetaValue { value, mod_sign: false }
    }

    /// Sign-ambiguous value, canonicalized to have argument in [0, π).
    fn up_to_sign(value: Complex64) -> Self {
        let canonical = if value.im < 0.0 || (value.im == 0.0 && value.re < 0.0) {
            -value
        } else {
            value
        };
        ThetaValue { value: canonical, mod_sign: true }
    }

    /// Distance to `other` respecting the mod-sign convention of both sides.
    pub fn distance(&self, other: &ThetaValue) -> f64 {
        if self.mod_sign || other.mod_sign {
            let d1 = (self.value - other.value).norm();
            let d2 = (self.value + other.value).norm();
            d1.min(d2)
        } else {
            (self.value - other.value).norm()
        }
    }
}

impl KaehlerAngles {
    pub fn new(mut angles: Vec<f64>) -> Result<Self, GrassmannError> {
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &a in &angles {
            if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&a) {
                return Err(GrassmannError::InvalidSubspace(format!(
                    "Kähler angle {a} outside [0, π/2]"
                )));
            }
        }
        Ok(KaehlerAngles { angles })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.angles
    }

    /// ∏ sin θ_j.
    pub fn sine_product(&self) -> f64 {
        self.angles.iter().map(|a| a.sin()).product()
    }

    /// ∏ cos θ_j.
    pub fn cosine_product(&self) -> f64 {
        self.angles.iter().map(|a| a.cos()).product()
    }

    pub fn max_abs_diff(&self, other: &KaehlerAngles) -> f64 {
        if self.angles.len() != other.angles.len() {
            return f64::INFINITY;
        }
        self.angles
            .iter()
            .zip(&other.angles)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Interpret a real 2n-vector as a complex n-vector (interleaved layout).
pub fn to_complex(v: &RVector) -> CVector {
    let n = v.len() / 2;
    CVector::from_fn(n, |j, _| Complex64::new(v[2 * j], v[2 * j + 1]))
}

/// Interpret a complex n-vector as a real 2n-vector.
pub fn from_complex(z: &CVector) -> RVector {
    let n = z.len();
    RVector::from_fn(2 * n, |i, _| if i % 2 == 0 { z[i / 2].re } else { z[i / 2].im })
}

/// Multiplication by i on ℝ²ⁿ: (x_j, y_j) ↦ (−y_j, x_j).
pub fn j_apply(v: &RVector) -> RVector {
    let n = v.len() / 2;
    RVector::from_fn(2 * n, |i, _| {
        if i % 2 == 0 {
            -v[i + 1]
        } else {
            v[i - 1]
        }
    })
}

/// Real standard basis vector for the complex coordinate direction e_j (0-based).
pub fn complex_axis(n: usize, j: usize) -> RVector {
    let mut v = RVector::zeros(2 * n);
    v[2 * j] = 1.0;
    v
}

/// Real standard basis vector for i·e_j (0-based).
pub fn complex_axis_i(n: usize, j: usize) -> RVector {
    let mut v = RVector::zeros(2 * n);
    v[2 * j + 1] = 1.0;
    v
}

impl Subspace {
    /// Builds a subspace from an already orthonormal basis.
    pub fn new(n: usize, basis: Vec<RVector>) -> Result<Self, GrassmannError> {
        let k = basis.len();
        if k == 0 || k > 2 * n {
            return Err(GrassmannError::InvalidSubspace(format!(
                "dimension {k} outside 1..=2n"
            )));
        }
        for v in &basis {
            if v.len() != 2 * n {
                return Err(GrassmannError::InvalidSubspace(format!(
                    "basis vector of length {} in ambient ℝ^{}",
                    v.len(),
                    2 * n
                )));
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(GrassmannError::InvalidSubspace("non-finite entry".into()));
            }
        }
        for i in 0..k {
            for j in 0..k {
                let want = if i == j { 1.0 } else { 0.0 };
                if (basis[i].dot(&basis[j]) - want).abs() > BASIS_TOL {
                    return Err(GrassmannError::InvalidSubspace(
                        "basis is not orthonormal".into(),
                    ));
                }
            }
        }
        Ok(Subspace { n, basis })
    }

    /// Builds a subspace by orthonormalizing a spanning set.
    pub fn from_spanning(n: usize, vectors: &[RVector]) -> Result<Self, GrassmannError> {
        let basis = numkernel::orthonormalize(vectors)?;
        Subspace::new(n, basis)
    }

    pub fn ambient_complex_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[RVector] {
        &self.basis
    }

    /// Orthogonal projector onto the subspace (for span comparisons).
    pub fn projector(&self) -> RMatrix {
        let d = 2 * self.n;
        let mut p = RMatrix::zeros(d, d);
        for w in &self.basis {
            p += w * w.transpose();
        }
        p
    }

    /// Matrix of J_W = π_W ∘ J|_W in the stored basis: M_ij = ⟨w_i, J w_j⟩.
    fn compressed_complex_structure(&self) -> RMatrix {
        let k = self.dim();
        let jw: Vec<RVector> = self.basis.iter().map(j_apply).collect();
        DMatrix::from_fn(k, k, |i, j| self.basis[i].dot(&jw[j]))
    }

    /// Gram matrix of the restricted symplectic form: Ω_ij = ⟨J w_i, w_j⟩.
    fn symplectic_gram(&self) -> RMatrix {
        -self.compressed_complex_structure()
    }
}

/// Kähler angles of a middle-dimensional subspace (dim W = n).
///
/// The spectrum of J_W consists of pairs ±i·cos θ_j; angles are returned
/// sorted ascending in [0, π/2].
pub fn kaehler_angles(w: &Subspace) -> Result<KaehlerAngles, GrassmannError> {
    if w.dim() != w.n {
        return Err(GrassmannError::WrongDimension {
            expected: w.n,
            got: w.dim(),
        });
    }
    angle_data(w)
}

/// Kähler-angle data of a subspace of any dimension (U(n)-orbit invariants).
pub fn angle_data(w: &Subspace) -> Result<KaehlerAngles, GrassmannError> {
    let m = w.dim() / 2;
    let spectrum = numkernel::skew_spectrum(&w.compressed_complex_structure())?;
    let angles: Vec<f64> = spectrum[..m]
        .iter()
        .map(|c| c.clamp(-1.0, 1.0).acos())
        .collect();
    KaehlerAngles::new(angles)
}

/// Θ-invariant of a middle-dimensional subspace.
///
/// When n is even and the restricted symplectic form is non-degenerate, the
/// basis is oriented so that the Pfaffian of its Gram matrix is positive and
/// the exact complex determinant is returned. Otherwise the value is reduced
/// mod ±1. In all cases |Θ| = ∏ sin θ_j.
pub fn theta_invariant(w: &Subspace) -> Result<ThetaValue, GrassmannError> {
    if w.dim() != w.n {
        return Err(GrassmannError::WrongDimension {
            expected: w.n,
            got: w.dim(),
        });
    }
    let columns: Vec<CVector> = w.basis.iter().map(to_complex).collect();
    let det = numkernel::complex_det(&columns)?;
    if w.n % 2 != 0 {
        return Ok(ThetaValue::up_to_sign(det));
    }
    let pf = numkernel::pfaffian(&w.symplectic_gram())?;
    if pf.abs() <= SYMPLECTIC_DEGENERATE_TOL {
        return Ok(ThetaValue::up_to_sign(det));
    }
    // A basis swap flips both the Pfaffian and the determinant, so fixing
    // Pf > 0 fixes the sign of det.
    Ok(ThetaValue::exact(if pf > 0.0 { det } else { -det }))
}

/// Image subspace g·W for a unitary g ∈ U(n).
pub fn apply_unitary(g: &CMatrix, w: &Subspace) -> Result<Subspace, GrassmannError> {
    let n = w.n;
    if g.nrows() != n || g.ncols() != n {
        return Err(GrassmannError::DimensionMismatch);
    }
    let residual = (g * g.adjoint() - CMatrix::identity(n, n)).norm();
    if residual > 1e-9 {
        return Err(GrassmannError::NotUnitary { residual });
    }
    let basis = w
        .basis
        .iter()
        .map(|v| from_complex(&(g * to_complex(v))))
        .collect();
    Subspace::new(n, basis)
}

/// Tests whether two subspaces lie on the same SU(n)-orbit.
///
/// For dim = n this compares Kähler angles and Θ (mod sign whenever either
/// side is flagged). For other dimensions the U(n)- and SU(n)-orbits agree,
/// so only the Kähler-angle data is compared; subspaces above the middle
/// dimension are compared through their orthogonal complements.
pub fn same_su_orbit(w1: &Subspace, w2: &Subspace, tol: f64) -> Result<bool, GrassmannError> {
    if w1.n != w2.n || w1.dim() != w2.dim() {
        return Err(GrassmannError::DimensionMismatch);
    }
    let n = w1.n;
    if w1.dim() == n {
        let a1 = kaehler_angles(w1)?;
        let a2 = kaehler_angles(w2)?;
        if a1.max_abs_diff(&a2) > tol {
            return Ok(false);
        }
        let t1 = theta_invariant(w1)?;
        let t2 = theta_invariant(w2)?;
        return Ok(t1.distance(&t2) <= tol);
    }
    let (v1, v2) = if w1.dim() > n {
        (orthogonal_complement(w1)?, orthogonal_complement(w2)?)
    } else {
        (w1.clone(), w2.clone())
    };
    let a1 = angle_data(&v1)?;
    let a2 = angle_data(&v2)?;
    Ok(a1.max_abs_diff(&a2) <= tol)
}

/// Standard representative of the orbit with the given invariants:
/// W = ⊕_j [ℝ e_{2j−1} ⊕ ℝ(cos θ_j · i e_{2j−1} + sin θ_j · e_{2j})] (⊕ ℝ e_n for odd n),
/// then rotated by diag(ξ, 1, …, 1) to land on the requested Θ.
pub fn orbit_representative(
    angles: &KaehlerAngles,
    theta: Complex64,
    n: usize,
) -> Result<Subspace, GrassmannError> {
    let m = n / 2;
    if angles.angles.len() != m {
        return Err(GrassmannError::DimensionMismatch);
    }
    let sine_product = angles.sine_product();
    if (theta.norm() - sine_product).abs() > 1e-9 {
        return Err(GrassmannError::InconsistentTheta {
            theta_abs: theta.norm(),
            sine_product,
        });
    }
    let mut basis = Vec::with_capacity(n);
    for (j, &th) in angles.angles.iter().enumerate() {
        basis.push(complex_axis(n, 2 * j));
        basis.push(complex_axis_i(n, 2 * j) * th.cos() + complex_axis(n, 2 * j + 1) * th.sin());
    }
    if n % 2 == 1 {
        basis.push(complex_axis(n, n - 1));
    }
    let base = Subspace::new(n, basis)?;
    if sine_product <= 1e-12 {
        // Θ = 0 is forced; any phase works.
        return Ok(base);
    }
    let xi = theta / sine_product;
    let xi = xi / xi.norm(); // exact unit modulus keeps the basis orthonormal
    let mut g = CMatrix::identity(n, n);
    g[(0, 0)] = xi;
    apply_unitary(&g, &base)
}

/// Phase factor relating the Θ-invariants of a middle-dimensional subspace
/// and its orthogonal complement: Θ(W⊥) = i^{n mod 2} · Θ(W).
///
/// For even n the factor is 1. For odd n the factor i is forced: a Lagrangian
/// W has W⊥ = JW, and det scales by iⁿ = ±i under J. Both sides are compared
/// mod ±1 whenever either is flagged.
pub fn theta_complement_factor(n: usize) -> Complex64 {
    if n % 2 == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// Orthonormal basis of the real orthogonal complement in ℝ²ⁿ.
pub fn orthogonal_complement(w: &Subspace) -> Result<Subspace, GrassmannError> {
    let d = 2 * w.n;
    let mut extended = w.basis.clone();
    let mut complement = Vec::with_capacity(d - w.dim());
    for axis in 0..d {
        if extended.len() == d {
            break;
        }
        let mut v = RVector::zeros(d);
        v[axis] = 1.0;
        for _ in 0..2 {
            for b in &extended {
                let c = v.dot(b);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            let u = v / norm;
            extended.push(u.clone());
            complement.push(u);
        }
    }
    if complement.len() != d - w.dim() {
        return Err(GrassmannError::InvalidSubspace(
            "failed to complete basis of the complement".into(),
        ));
    }
    Subspace::new(w.n, complement)
}

/// Uniform random k-dimensional subspace (orthogonally invariant distribution):
/// orthonormalization of k independent standard-normal 2n-vectors.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Subspace {
    assert!(k >= 1 && k <= 2 * n, "k must lie in 1..=2n");
    loop {
        let vectors: Vec<RVector> = (0..k)
            .map(|_| RVector::from_fn(2 * n, |_, _| rng.sample(StandardNormal)))
            .collect();
        if let Ok(basis) = numkernel::orthonormalize(&vectors) {
            return Subspace { n, basis };
        }
    }
}

/// The real 2n×2n rotation matrix of a unitary g ∈ U(n) in the interleaved
/// layout: each complex entry a+bi becomes the 2×2 block [[a, −b], [b, a]].
pub fn unitary_to_real(g: &CMatrix) -> RMatrix {
    let n = g.nrows();
    let mut out = RMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            let v = g[(r, c)];
            out[(2 * r, 2 * c)] = v.re;
            out[(2 * r, 2 * c + 1)] = -v.im;
            out[(2 * r + 1, 2 * c)] = v.im;
            out[(2 * r + 1, 2 * c + 1)] = v.re;
        }
    }
    out
}

/// Serialized form: complex coordinates, basis vectors as rows of [re, im] pairs.
#[derive(Debug, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub n: usize,
    pub basis: Vec<Vec<[f64; 2]>>,
}

impl Subspace {
    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            n: self.n,
            basis: self
                .basis
                .iter()
                .map(|v| {
                    let z = to_complex(v);
                    z.iter().map(|c| [c.re, c.im]).collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &SubspaceJson) -> Result<Self, GrassmannError> {
        let vectors: Vec<RVector> = json
            .basis
            .iter()
            .map(|row| {
                let z = CVector::from_iterator(
                    row.len(),
                    row.iter().map(|&[re, im]| Complex64::new(re, im)),
                );
                from_complex(&z)
            })
            .collect();
        for v in &vectors {
            if v.len() != 2 * json.n {
                return Err(GrassmannError::InvalidSubspace(
                    "basis vector length does not match n".into(),
                ));
            }
        }
        Subspace::from_spanning(json.n, &vectors)
    }
}
