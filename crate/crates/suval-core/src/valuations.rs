//! Invariant valuations on ℂⁿ: Klain functions, the constant-coefficient
//! evaluation formula on polytopes, weight laws, and valuation products.
//!
//! A valuation of degree k is evaluated on a polytope P as
//! Σ over k-faces F of γ(F) · vol_k(F) · kl(W_F), where γ(F) is the
//! normalized exterior angle and W_F the linear space parallel to F.
//! The middle-degree valuations φ₁, φ₂ have Klain functions
//! kl_{φ₂}(W) = Θ(W)² and kl_{φ₁}(W) = Θ(W)·∏ cos θ_j(W) (n even);
//! squaring and the cosine factor make both single-valued despite the
//! sign ambiguity of Θ on degenerate subspaces.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forms::{self, FormsError};
use crate::grassmann::{
    kaehler_angles, theta_invariant, unitary_to_real, GrassmannError, Subspace,
};
use crate::numkernel::{det_complex, CMatrix, RVector};
use crate::polytope::{AngleMethod, Polytope, PolytopeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValuationError {
    #[error("valuation is undefined for odd n = {n}")]
    OddN { n: usize },
    #[error("subspace has the wrong dimension")]
    WrongDimension,
    #[error("unknown valuation name: {0}")]
    UnknownName(String),
    #[error("valuation of degree {degree} cannot be evaluated on this body: {reason}")]
    Unevaluable { degree: usize, reason: String },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// The invariant valuations carried by the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationKind {
    /// Euler characteristic: 1 on every nonempty compact convex body.
    Euler,
    /// 2n-dimensional volume.
    Vol,
    /// Intrinsic-volume-type valuation of degree k (Klain function ≡ 1).
    OneK(usize),
    Phi1,
    Phi1Bar,
    Phi2,
    Phi2Bar,
}

/// Valuation descriptor: kind, scale factor.
#[derive(Debug, Clone, Copy)]
pub struct Valuation {
    pub kind: ValuationKind,
    pub scale: Complex64,
}

impl Valuation {
    pub fn new(kind: ValuationKind) -> Self {
        Valuation {
            kind,
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub fn named(name: &str) -> Result<Self, ValuationError> {
        let lower = name.to_ascii_lowercase();
        let kind = match lower.as_str() {
            "euler" | "chi" => ValuationKind::Euler,
            "vol" => ValuationKind::Vol,
            "phi1" => ValuationKind::Phi1,
            "phi1_bar" | "phi1bar" => ValuationKind::Phi1Bar,
            "phi2" => ValuationKind::Phi2,
            "phi2_bar" | "phi2bar" => ValuationKind::Phi2Bar,
            _ => {
                if let Some(rest) = lower.strip_prefix("one_") {
                    match rest.parse::<usize>() {
                        Ok(k) => ValuationKind::OneK(k),
                        Err(_) => return Err(ValuationError::UnknownName(name.into())),
                    }
                } else {
                    return Err(ValuationError::UnknownName(name.into()));
                }
            }
        };
        Ok(Valuation::new(kind))
    }

    /// Homogeneity degree in ambient complex dimension n.
    pub fn degree(&self, n: usize) -> usize {
        match self.kind {
            ValuationKind::Euler => 0,
            ValuationKind::Vol => 2 * n,
            ValuationKind::OneK(k) => k,
            _ => n,
        }
    }

    /// Weight l in the transformation law μ(gK) = det(g)^l μ(K), g ∈ U(n).
    pub fn weight(&self) -> i32 {
        match self.kind {
            ValuationKind::Phi1 => 1,
            ValuationKind::Phi1Bar => -1,
            ValuationKind::Phi2 => 2,
            ValuationKind::Phi2Bar => -2,
            _ => 0,
        }
    }
}

/// kl_{φ₂}(W) = Θ(W)² on middle-dimensional subspaces.
pub fn klain_phi2(w: &Subspace) -> Result<Complex64, ValuationError> {
    let t = theta_invariant(w)?;
    Ok(t.value * t.value)
}

/// kl_{φ₁}(W) = Θ(W) ∏ cos θ_j(W); requires even n. Zero whenever some
/// Kähler angle equals π/2, which covers every sign-ambiguous case.
pub fn klain_phi1(w: &Subspace) -> Result<Complex64, ValuationError> {
    let n = w.ambient_complex_dim();
    if n % 2 != 0 {
        return Err(ValuationError::OddN { n });
    }
    let angles = kaehler_angles(w)?;
    let t = theta_invariant(w)?;
    Ok(t.value * angles.cosine_product())
}

/// Klain function of a valuation kind on the span of an orthonormal basis.
fn klain_value(kind: ValuationKind, n: usize, basis: &[RVector]) -> Result<Complex64, ValuationError> {
    match kind {
        ValuationKind::OneK(_) => Ok(Complex64::new(1.0, 0.0)),
        ValuationKind::Phi2 => {
            let w = Subspace::new(n, basis.to_vec())?;
            klain_phi2(&w)
        }
        ValuationKind::Phi2Bar => {
            let w = Subspace::new(n, basis.to_vec())?;
            Ok(klain_phi2(&w)?.conj())
        }
        ValuationKind::Phi1 => {
            let w = Subspace::new(n, basis.to_vec())?;
            klain_phi1(&w)
        }
        ValuationKind::Phi1Bar => {
            let w = Subspace::new(n, basis.to_vec())?;
            Ok(klain_phi1(&w)?.conj())
        }
        ValuationKind::Euler | ValuationKind::Vol => Ok(Complex64::new(1.0, 0.0)),
    }
}

/// Evaluates a valuation on a polytope via the constant-coefficient face sum
/// μ(P) = Σ_{dim F = k} γ(F) · vol(F) · kl_μ(W_F).
///
/// The Euler characteristic returns 1 on any nonempty body and `vol` the full
/// 2n-volume. A k-dimensional flat body contributes its single top face with
/// γ = 1. Faces without an exact exterior angle fall back to a seeded Monte
/// Carlo estimate.
pub fn evaluate(val: &Valuation, p: &Polytope) -> Result<Complex64, ValuationError> {
    if p.dim() % 2 != 0 {
        return Err(ValuationError::WrongDimension);
    }
    let n = p.dim() / 2;
    let value = match val.kind {
        ValuationKind::Euler => Complex64::new(1.0, 0.0),
        ValuationKind::Vol => Complex64::new(p.volume()?, 0.0),
        kind => {
            let k = val.degree(n);
            if matches!(kind, ValuationKind::Phi1 | ValuationKind::Phi1Bar) && n % 2 != 0 {
                return Err(ValuationError::OddN { n });
            }
            if k == 2 * n {
                return Ok(val.scale * p.volume()?);
            }
            let faces = p.faces(k)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, f) in faces.iter().enumerate() {
                if f.volume <= 0.0 {
                    continue;
                }
                let angle = match f.exterior_angle {
                    Some(a) => a,
                    None => {
                        // Deterministic fallback stream per face index.
                        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d ^ idx as u64);
                        p.exterior_angle(f, AngleMethod::MonteCarlo { samples: 40_000 }, &mut rng)?
                    }
                };
                acc += klain_value(kind, n, &f.basis)? * (angle * f.volume);
            }
            acc
        }
    };
    Ok(val.scale * value)
}

/// Checks the weight law μ(gP) = det(g)^l μ(P) for a unitary g:
/// |evaluate(gP) − det(g)^l·evaluate(P)| ≤ tol·(1 + |evaluate(P)|).
pub fn check_weight(
    val: &Valuation,
    p: &Polytope,
    g: &CMatrix,
    tol: f64,
) -> Result<bool, ValuationError> {
    let n = g.nrows();
    let g_real = unitary_to_real(g);
    let gp = p.transform(&g_real, &RVector::zeros(2 * n))?;
    let lhs = evaluate(val, &gp)?;
    let base = evaluate(val, p)?;
    let det = det_complex(g);
    let l = val.weight();
    let factor = if l >= 0 {
        det.powi(l)
    } else {
        det.conj().powi(-l) // |det| = 1, so det^{-1} = conj(det)
    };
    let rhs = factor * base;
    Ok((lhs - rhs).norm() <= tol * (1.0 + base.norm()))
}

/// Alesker product of two middle-degree valuations, returned as the
/// coefficient of `vol`. Products whose weights do not cancel vanish.
pub fn product_middle(
    a: ValuationKind,
    b: ValuationKind,
    n: usize,
) -> Result<Complex64, ValuationError> {
    let val_a = Valuation::new(a);
    let val_b = Valuation::new(b);
    for kind in [a, b] {
        if matches!(kind, ValuationKind::Phi1 | ValuationKind::Phi1Bar) && n % 2 != 0 {
            return Err(ValuationError::OddN { n });
        }
        if !matches!(
            kind,
            ValuationKind::Phi1 | ValuationKind::Phi1Bar | ValuationKind::Phi2 | ValuationKind::Phi2Bar
        ) {
            return Err(ValuationError::UnknownName(format!("{kind:?} is not middle-degree")));
        }
    }
    if val_a.weight() + val_b.weight() != 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let form_of = |kind: ValuationKind| -> Result<forms::PolyForm, FormsError> {
        match kind {
            ValuationKind::Phi1 => forms::invariant::phi1_form(n),
            ValuationKind::Phi1Bar => Ok(forms::invariant::phi1_form(n)?.conj()),
            ValuationKind::Phi2 => forms::invariant::phi2_form(n),
            ValuationKind::Phi2Bar => Ok(forms::invariant::phi2_form(n)?.conj()),
            _ => unreachable!(),
        }
    };
    let rumin_of = |kind: ValuationKind| -> Result<forms::PolyForm, FormsError> {
        match kind {
            ValuationKind::Phi1 => Ok(forms::invariant::rumin_phi1(n)?.d_expected),
            ValuationKind::Phi1Bar => Ok(forms::invariant::rumin_phi1(n)?.d_expected.conj()),
            ValuationKind::Phi2 => Ok(forms::invariant::rumin_phi2(n)?.d_expected),
            ValuationKind::Phi2Bar => Ok(forms::invariant::rumin_phi2(n)?.d_expected.conj()),
            _ => unreachable!(),
        }
    };
    let omega_a = form_of(a)?;
    let d_omega_b = rumin_of(b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x00d1_ce);
    let (_c, product) = forms::product_constant(&omega_a, &d_omega_b, n, &mut rng)?;
    Ok(product)
}

/// dim Val^{SU(n)}: (n² + 3n + 10)/2 for even n, (n² + 3n + 6)/2 for odd n.
pub fn dimension_su(n: usize) -> usize {
    if n % 2 == 0 {
        (n * n + 3 * n + 10) / 2
    } else {
        (n * n + 3 * n + 6) / 2
    }
}

/// dim Val^{U(n)} = C(n+2, 2).
pub fn dimension_u(n: usize) -> usize {
    (n + 2) * (n + 1) / 2
}

/// Convenience: the hermitian box with generators a₁e₁, a₂·ie₁, b₁e₂, b₂·ie₂
/// in ℂ² ≅ ℝ⁴ (interleaved layout).
pub fn hermitian_box(a1: f64, a2: f64, b1: f64, b2: f64) -> Polytope {
    Polytope::axis_box(&[(0.0, a1), (0.0, a2), (0.0, b1), (0.0, b2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{complex_axis, complex_axis_i, random_subspace};
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w_theta(theta: f64) -> Subspace {
        let w2 = complex_axis_i(2, 0) * theta.cos() + complex_axis(2, 1) * theta.sin();
        Subspace::new(2, vec![complex_axis(2, 0), w2]).unwrap()
    }

    fn su2(a: Complex64, b: Complex64) -> CMatrix {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        CMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()])
    }

    fn elementary_symmetric(sides: &[f64], k: usize) -> f64 {
        let mut e = vec![0.0; k + 1];
        e[0] = 1.0;
        for &s in sides {
            for j in (1..=k).rev() {
                e[j] += e[j - 1] * s;
            }
        }
        e[k]
    }

    #[test]
    fn klain_values_on_standard_planes() {
        let line = Subspace::new(2, vec![complex_axis(2, 0), complex_axis_i(2, 0)]).unwrap();
        let lagr = Subspace::new(2, vec![complex_axis(2, 0), complex_axis(2, 1)]).unwrap();
        assert!(klain_phi2(&line).unwrap().norm() < 1e-12);
        assert!((klain_phi2(&lagr).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        assert!((klain_phi2(&w_theta(0.8)).unwrap() - c(0.8_f64.sin().powi(2), 0.0)).norm() < 1e-12);

        assert!(klain_phi1(&lagr).unwrap().norm() < 1e-12);
        assert!(klain_phi1(&line).unwrap().norm() < 1e-12);
        let w = w_theta(std::f64::consts::FRAC_PI_4);
        assert!((klain_phi1(&w).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn klain_phi1_rejects_odd_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_subspace(3, 3, &mut rng);
        assert!(matches!(klain_phi1(&w), Err(ValuationError::OddN { n: 3 })));
    }

    #[test]
    fn euler_is_one_and_vol_is_volume() {
        let p = hermitian_box(2.0, 1.0, 2.0, 1.0);
        let euler = Valuation::new(ValuationKind::Euler);
        assert_eq!(evaluate(&euler, &p).unwrap(), c(1.0, 0.0));
        let vol = Valuation::new(ValuationKind::Vol);
        assert!((evaluate(&vol, &p).unwrap() - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn intrinsic_volumes_of_boxes_are_elementary_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let sides: Vec<f64> = (0..4).map(|_| 0.2 + 2.0 * rng.random::<f64>()).collect();
            let p = Polytope::axis_box(&[
                (0.0, sides[0]),
                (0.0, sides[1]),
                (0.0, sides[2]),
                (0.0, sides[3]),
            ]);
            for k in 0..=4usize {
                let val = Valuation::new(ValuationKind::OneK(k));
                let got = evaluate(&val, &p).unwrap();
                let want = elementary_symmetric(&sides, k);
                assert!(
                    (got - c(want, 0.0)).norm() <= 1e-10 * (1.0 + want),
                    "k = {k}: {got} vs {want}"
                );
            }
        }
        // μ₂ of the unit 4-cube is 6.
        let p = Polytope::axis_box(&[(0.0, 1.0); 4]);
        let mu2 = evaluate(&Valuation::new(ValuationKind::OneK(2)), &p).unwrap();
        assert!((mu2 - c(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phi2_on_hermitian_boxes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi2 = Valuation::new(ValuationKind::Phi2);
        for _ in 0..20 {
            let a1 = 0.3 + 2.0 * rng.random::<f64>();
            let a2 = 0.3 + 2.0 * rng.random::<f64>();
            let b1 = 0.3 + 2.0 * rng.random::<f64>();
            let b2 = 0.3 + 2.0 * rng.random::<f64>();
            let p = hermitian_box(a1, a2, b1, b2);
            let got = evaluate(&phi2, &p).unwrap();
            let want = (a1 - a2) * (b1 - b2);
            assert!(
                (got - c(want, 0.0)).norm() <= 1e-9 * (1.0 + want.abs()),
                "{got} vs {want}"
            );
        }
    }

    #[test]
    fn phi2_of_flat_square_is_side_squared() {
        let s = 1.3;
        let p = Polytope::parallelotope(
            RVector::zeros(4),
            vec![
                complex_axis(2, 0) * s, // e₁ direction
                complex_axis(2, 1) * s, // e₂ direction: span{e1, e2} is Lagrangian
            ],
        )
        .unwrap();
        let phi2 = Valuation::new(ValuationKind::Phi2);
        let got = evaluate(&phi2, &p).unwrap();
        assert!((got - c(s * s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn klain_recovery_on_random_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi2 = Valuation::new(ValuationKind::Phi2);
        for _ in 0..200 {
            let w = random_subspace(2, 2, &mut rng);
            let p = Polytope::parallelotope(RVector::zeros(4), w.basis().to_vec()).unwrap();
            let got = evaluate(&phi2, &p).unwrap();
            let want = klain_phi2(&w).unwrap();
            assert!((got - want).norm() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn valuations_are_even_translation_invariant_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi1 = Valuation::new(ValuationKind::Phi1);
        let phi2 = Valuation::new(ValuationKind::Phi2);
        for _ in 0..10 {
            let gens: Vec<RVector> = (0..4)
                .map(|_| RVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0))
                .collect();
            let base = RVector::from_fn(4, |_, _| rng.random::<f64>() - 0.5);
            let Ok(p) = Polytope::parallelotope(base, gens.clone()) else {
                continue;
            };
            for val in [&phi1, &phi2] {
                let v = evaluate(val, &p).unwrap();
                // Evenness.
                let v_neg = evaluate(val, &p.reflect()).unwrap();
                assert!((v - v_neg).norm() < 1e-9, "evenness: {v} vs {v_neg}");
                // Translation invariance.
                let t = RVector::from_fn(4, |_, _| rng.random::<f64>() * 4.0 - 2.0);
                let v_t = evaluate(val, &p.translate(&t)).unwrap();
                assert!((v - v_t).norm() < 1e-10);
                // Homogeneity of degree 2.
                for s in [0.5f64, 2.0, 3.0] {
                    let scaled: Vec<RVector> = gens.iter().map(|g| g * s).collect();
                    let ps = Polytope::parallelotope(RVector::zeros(4), scaled).unwrap();
                    let p0 = Polytope::parallelotope(RVector::zeros(4), gens.clone()).unwrap();
                    let vs = evaluate(val, &ps).unwrap();
                    let v0 = evaluate(val, &p0).unwrap();
                    assert!((vs - v0 * s.powi(2)).norm() < 1e-8 * (1.0 + vs.norm()));
                }
            }
        }
    }

    #[test]
    fn weight_laws() {
        let phi2 = Valuation::new(ValuationKind::Phi2);
        let vol = Valuation::new(ValuationKind::Vol);
        let p = hermitian_box(2.0, 1.0, 2.0, 1.0);
        let g = su2(c(0.8, 0.1), c(0.3, -0.5));
        assert!(check_weight(&phi2, &p, &g, 1e-8).unwrap());
        assert!(check_weight(&vol, &p, &g, 1e-8).unwrap());

        // g = diag(i, 1): det² = −1 flips the sign of φ₂.
        let mut g = CMatrix::identity(2, 2);
        g[(0, 0)] = c(0.0, 1.0);
        assert!(check_weight(&phi2, &p, &g, 1e-8).unwrap());
        let g_real = unitary_to_real(&g);
        let gp = p.transform(&g_real, &RVector::zeros(4)).unwrap();
        let v = evaluate(&phi2, &p).unwrap();
        let gv = evaluate(&phi2, &gp).unwrap();
        assert!((gv + v).norm() < 1e-9, "det(g)² = −1 must flip φ₂");
    }

    #[test]
    fn middle_products() {
        let got = product_middle(ValuationKind::Phi1Bar, ValuationKind::Phi1, 2).unwrap();
        assert!((got - c(4.0, 0.0)).norm() < 1e-8 * 4.0);

        let got = product_middle(ValuationKind::Phi2Bar, ValuationKind::Phi2, 2).unwrap();
        assert!((got - c(16.0, 0.0)).norm() < 1e-8 * 16.0);

        let got = product_middle(ValuationKind::Phi2Bar, ValuationKind::Phi2, 3).unwrap();
        let want = -15.0 * std::f64::consts::PI;
        assert!((got - c(want, 0.0)).norm() < 1e-8 * want.abs());

        // Weights 1 + 2 = 3 do not cancel: the product vanishes.
        let got = product_middle(ValuationKind::Phi1, ValuationKind::Phi2, 2).unwrap();
        assert_eq!(got, c(0.0, 0.0));

        assert!(matches!(
            product_middle(ValuationKind::Phi1Bar, ValuationKind::Phi1, 3),
            Err(ValuationError::OddN { n: 3 })
        ));
    }

    #[test]
    fn dimension_formulas() {
        assert_eq!(dimension_su(2), 10);
        assert_eq!(dimension_su(3), 12);
        assert_eq!(dimension_u(2), 6);
        for n in 2..=8 {
            let diff = dimension_su(n) - dimension_u(n);
            assert_eq!(diff, if n % 2 == 0 { 4 } else { 2 });
        }
    }

    #[test]
    fn lagrangian_angle_is_detected() {
        // The flat-square Klain recovery must hold at the degenerate corner too.
        let p = Polytope::parallelotope(
            RVector::zeros(4),
            vec![complex_axis(2, 0), complex_axis(2, 1)],
        )
        .unwrap();
        let phi1 = Valuation::new(ValuationKind::Phi1);
        let got = evaluate(&phi1, &p).unwrap();
        assert!(got.norm() < 1e-12, "cos(π/2) = 0 forces φ₁ = 0, got {got}");
        let _ = FRAC_PI_2;
    }
}
