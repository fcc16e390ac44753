//! Numerical verification of form identities on the sphere bundle.
//!
//! Identities between invariant forms hold for the restrictions to
//! Sℂⁿ = ℂⁿ × S²ⁿ⁻¹, i.e. after evaluating both sides at points with |ζ| = 1
//! on frames tangent to the sphere factor. Checks draw random points and
//! random tangent frames and compare evaluations; a correct identity leaves
//! only rounding noise (≪ 1e-9), while any wrong coefficient shows up at O(1).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::exterior::PolyForm;
use super::invariant::{
    alpha, beta, chi, chibar, dvol_space, dvol_sphere, dvol_sphere_bundle, gamma, phi1_form,
    phi2_form, rumin_phi1, rumin_phi2, rumin_phi2_core, theta0, theta1, theta2, theta_s,
    wedge_power, RuminData,
};
use super::FormsError;
use crate::numkernel::unit_ball_volume;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Point of the sphere bundle: z ∈ ℂⁿ arbitrary, |ζ| = 1.
#[derive(Debug, Clone)]
pub struct SpherePoint {
    pub z: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
}

impl SpherePoint {
    pub fn new(z: Vec<Complex64>, zeta: Vec<Complex64>) -> Result<Self, FormsError> {
        if z.len() != zeta.len() {
            return Err(FormsError::DimensionMismatch {
                left: z.len(),
                right: zeta.len(),
            });
        }
        let norm = zeta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(FormsError::NotOnSphere { norm });
        }
        Ok(SpherePoint { z, zeta })
    }

    /// The distinguished point (0, e₁).
    pub fn base(n: usize) -> Self {
        let mut zeta = vec![Complex64::new(0.0, 0.0); n];
        zeta[0] = Complex64::new(1.0, 0.0);
        SpherePoint {
            z: vec![Complex64::new(0.0, 0.0); n],
            zeta,
        }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Values of the 4n real coordinates (x_j, y_j interleaved, then ξ_j, η_j).
    pub fn var_values(&self) -> Vec<f64> {
        let n = self.n();
        let mut vals = Vec::with_capacity(4 * n);
        for zj in &self.z {
            vals.push(zj.re);
            vals.push(zj.im);
        }
        for zj in &self.zeta {
            vals.push(zj.re);
            vals.push(zj.im);
        }
        vals
    }

    /// ζ as a real unit 2n-vector.
    fn zeta_real(&self) -> Vec<f64> {
        self.zeta.iter().flat_map(|c| [c.re, c.im]).collect()
    }
}

pub fn base_point(n: usize) -> SpherePoint {
    SpherePoint::base(n)
}

/// Random sphere-bundle point: Gaussian z, Gaussian ζ normalized to the sphere.
pub fn random_point<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpherePoint {
    let z: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    loop {
        let zeta: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = zeta.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return SpherePoint {
                z,
                zeta: zeta.into_iter().map(|c| c / norm).collect(),
            };
        }
    }
}

/// Random unit tangent vector of Sℂⁿ at p: the ζ-block is projected
/// orthogonal to ζ in the real sense (tangent to the sphere factor).
pub fn random_tangent_vector<R: Rng + ?Sized>(p: &SpherePoint, rng: &mut R) -> Vec<f64> {
    let n = p.n();
    let zr = p.zeta_real();
    loop {
        let mut v: Vec<f64> = (0..4 * n).map(|_| rng.sample(StandardNormal)).collect();
        let dot: f64 = (0..2 * n).map(|i| v[2 * n + i] * zr[i]).sum();
        for i in 0..2 * n {
            v[2 * n + i] -= dot * zr[i];
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

pub fn tangent_frame<R: Rng + ?Sized>(p: &SpherePoint, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count).map(|_| random_tangent_vector(p, rng)).collect()
}

/// Tangent vector additionally lying in the contact hyperplane α = 0
/// (no Reeb component): the z-block is projected orthogonal to ζ as well.
pub fn contact_tangent_vector<R: Rng + ?Sized>(p: &SpherePoint, rng: &mut R) -> Vec<f64> {
    let n = p.n();
    let zr = p.zeta_real();
    let mut v = random_tangent_vector(p, rng);
    let dot: f64 = (0..2 * n).map(|i| v[i] * zr[i]).sum();
    for i in 0..2 * n {
        v[i] -= dot * zr[i];
    }
    v
}

/// Multilinear antisymmetric evaluation of a form at a sphere-bundle point
/// on the given tangent vectors (real 4n-vectors).
pub fn eval_at(
    form: &PolyForm,
    p: &SpherePoint,
    vectors: &[Vec<f64>],
) -> Result<Complex64, FormsError> {
    form.eval(&p.var_values(), vectors)
}

/// Outcome of one numerical identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: impl Into<String>, max_residual: f64, tol: f64) -> Self {
        IdentityCheck {
            name: name.into(),
            max_residual,
            tol,
            pass: max_residual <= tol,
        }
    }
}

/// Compares the restrictions of two equal-degree forms to Sℂⁿ at random
/// points on random tangent frames.
pub fn check_identity_on_sphere_bundle<R: Rng + ?Sized>(
    name: &str,
    lhs: &PolyForm,
    rhs: &PolyForm,
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<IdentityCheck, FormsError> {
    if lhs.degree() != rhs.degree() {
        return Err(FormsError::DegreeMismatch {
            left: lhs.degree(),
            right: rhs.degree(),
        });
    }
    let deg = lhs.degree();
    let mut max_residual = 0.0_f64;
    for _ in 0..samples {
        let p = random_point(n, rng);
        let vars = p.var_values();
        let frame = tangent_frame(&p, deg, rng);
        let l = lhs.eval(&vars, &frame)?;
        let r = rhs.eval(&vars, &frame)?;
        max_residual = max_residual.max((l - r).norm());
    }
    Ok(IdentityCheck::new(name, max_residual, tol))
}

/// Report of a Rumin-differential check: d(ω + α∧ξ) = Dω on the bundle, and
/// Dω is vertical (vanishes on frames with no Reeb component).
#[derive(Debug, Clone, Serialize)]
pub struct RuminReport {
    pub identity: IdentityCheck,
    pub verticality: IdentityCheck,
}

pub fn rumin_verify<R: Rng + ?Sized>(
    name: &str,
    data: &RuminData,
    n: usize,
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<RuminReport, FormsError> {
    let d_omega = data.omega.add(&alpha(n).wedge(&data.xi)?).ext_d();
    let identity = check_identity_on_sphere_bundle(
        &format!("{name}: d(omega + alpha^xi) = D_omega"),
        &d_omega,
        &data.d_expected,
        n,
        samples,
        tol,
        rng,
    )?;

    let deg = data.d_expected.degree();
    let mut max_residual = 0.0_f64;
    for _ in 0..samples {
        let p = random_point(n, rng);
        let vars = p.var_values();
        let frame: Vec<Vec<f64>> = (0..deg).map(|_| contact_tangent_vector(&p, rng)).collect();
        let v = data.d_expected.eval(&vars, &frame)?;
        max_residual = max_residual.max(v.norm());
    }
    let verticality = IdentityCheck::new(
        format!("{name}: D_omega is a multiple of alpha"),
        max_residual,
        tol,
    );
    Ok(RuminReport { identity, verticality })
}

/// Determines c with ω₁∧Dω₂ = c·dvol_{Sℂⁿ} by evaluating both top forms on
/// full tangent frames at several points, and returns (c, product coefficient)
/// where the product coefficient is (−1)ⁿ (2πⁿ/(n−1)!) c.
pub fn product_constant<R: Rng + ?Sized>(
    omega1: &PolyForm,
    d_omega2: &PolyForm,
    n: usize,
    rng: &mut R,
) -> Result<(Complex64, Complex64), FormsError> {
    let top = omega1.wedge(d_omega2)?;
    if top.degree() != 4 * n - 1 {
        return Err(FormsError::DegreeMismatch {
            left: top.degree(),
            right: 4 * n - 1,
        });
    }
    let dvol = dvol_sphere_bundle(n);
    let mut ratios: Vec<Complex64> = Vec::new();
    let points = 8;
    for _ in 0..points {
        let p = random_point(n, rng);
        let vars = p.var_values();
        // Frames with |dvol| bounded away from zero keep the ratio well-conditioned.
        for _ in 0..100 {
            let frame = tangent_frame(&p, 4 * n - 1, rng);
            let denom = dvol.eval(&vars, &frame)?;
            if denom.norm() > 1e-6 {
                let numer = top.eval(&vars, &frame)?;
                ratios.push(numer / denom);
                break;
            }
        }
    }
    let c = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|r| (r - c).norm())
        .fold(0.0_f64, f64::max);
    if spread > 1e-9 * (1.0 + c.norm()) {
        return Err(FormsError::NotProportional { spread });
    }
    let pi = std::f64::consts::PI;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let factor = sign * 2.0 * pi.powi(n as i32) / (1..n).product::<usize>() as f64;
    Ok((c, c * factor))
}

/// Full identity battery at one n; every named identity is checked at
/// `samples` random sphere-bundle points with absolute tolerance `tol`
/// (relative for the pairing-ratio checks).
#[derive(Debug, Clone, Serialize)]
pub struct FormsReport {
    pub n: usize,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub checks: Vec<IdentityCheck>,
    pub overall_pass: bool,
}

pub fn verify_forms(n: usize, samples: usize, tol: f64, seed: u64) -> Result<FormsReport, FormsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rng = &mut rng;

    let al = alpha(n);
    let be = beta(n);
    let ga = gamma(n);
    let t0 = theta0(n);
    let t1 = theta1(n);
    let t2 = theta2(n);
    let ts = theta_s(n);
    let chis: Vec<PolyForm> = (0..n).map(|k| chi(n, k).unwrap()).collect();
    let chi_or_zero =
        |k: isize, deg: usize| -> PolyForm {
            if k < 0 || k as usize >= n {
                PolyForm::zero(n, deg)
            } else {
                chis[k as usize].clone()
            }
        };

    struct Battery {
        checks: Vec<IdentityCheck>,
        n: usize,
        samples: usize,
        tol: f64,
    }
    impl Battery {
        fn run(&mut self, name: String, lhs: &PolyForm, rhs: &PolyForm, rng: &mut ChaCha8Rng) {
            let c = check_identity_on_sphere_bundle(
                &name, lhs, rhs, self.n, self.samples, self.tol, rng,
            )
            .unwrap();
            self.checks.push(c);
        }
    }
    let mut b = Battery { checks: Vec::new(), n, samples, tol };

    // Differentials of the seven generating forms.
    b.run(
        "d_alpha".into(),
        &al.ext_d(),
        &be.wedge(&ga).unwrap().neg().sub(&ts),
        rng,
    );
    b.run(
        "d_beta".into(),
        &be.ext_d(),
        &al.wedge(&ga).unwrap().add(&t1),
        rng,
    );
    b.run("d_gamma".into(), &ga.ext_d(), &t0.scale(2.0.into()), rng);
    b.run("d_theta0".into(), &t0.ext_d(), &PolyForm::zero(n, 3), rng);
    b.run(
        "d_theta1".into(),
        &t1.ext_d(),
        &al.wedge(&t0).unwrap().scale(2.0.into()).add(&ga.wedge(&ts).unwrap()),
        rng,
    );
    b.run(
        "d_theta2".into(),
        &t2.ext_d(),
        &al.wedge(&t1).unwrap().add(&be.wedge(&ts).unwrap()),
        rng,
    );
    b.run(
        "d_thetas".into(),
        &ts.ext_d(),
        &be.wedge(&t0).unwrap().scale(2.0.into()).sub(&ga.wedge(&t1).unwrap()),
        rng,
    );

    // dχ_k = (n−k)((α+iβ)∧χ_{k−1} + iγ∧χ_k).
    let al_i_be = al.add(&be.scale(I));
    for k in 0..n {
        let rhs = al_i_be
            .wedge(&chi_or_zero(k as isize - 1, n - 1))
            .unwrap()
            .add(&ga.wedge(&chis[k]).unwrap().scale(I))
            .scale(((n - k) as f64).into());
        b.run(format!("d_chi_{k}"), &chis[k].ext_d(), &rhs, rng);
    }

    // χ_k∧θ₀ = −(i/2) χ_{k−1}∧(θ_s − iθ₁) and χ_{k−1}∧θ₂ = (i/2) χ_k∧(θ_s + iθ₁).
    let ts_minus = ts.sub(&t1.scale(I));
    let ts_plus = ts.add(&t1.scale(I));
    for k in 1..n {
        b.run(
            format!("chi_{k}_wedge_theta0"),
            &chis[k].wedge(&t0).unwrap(),
            &chis[k - 1].wedge(&ts_minus).unwrap().scale(-I * Complex64::from(0.5)),
            rng,
        );
        b.run(
            format!("chi_{}_wedge_theta2", k - 1),
            &chis[k - 1].wedge(&t2).unwrap(),
            &chis[k].wedge(&ts_plus).unwrap().scale(I * Complex64::from(0.5)),
            rng,
        );
    }

    // χ_k∧(θ_s − iθ₁)^l = 0 for k + l ≥ n; χ_k∧(θ_s + iθ₁)^l = 0 for l > k.
    for k in 0..n {
        for l in 1..=n {
            if k + l >= n {
                let lhs = chis[k].wedge(&wedge_power(&ts_minus, l)).unwrap();
                let zero = PolyForm::zero(n, lhs.degree());
                b.run(format!("chi_{k}_smin_pow_{l}"), &lhs, &zero, rng);
            }
            if l > k {
                let lhs = chis[k].wedge(&wedge_power(&ts_plus, l)).unwrap();
                let zero = PolyForm::zero(n, lhs.degree());
                b.run(format!("chi_{k}_splus_pow_{l}"), &lhs, &zero, rng);
            }
        }
    }

    // χ_j∧χ_k = 0 unless j + k = n − 1.
    for j in 0..n {
        for k in j..n {
            if j + k != n - 1 {
                let lhs = chis[j].wedge(&chis[k]).unwrap();
                let zero = PolyForm::zero(n, lhs.degree());
                b.run(format!("chi_{j}_wedge_chi_{k}"), &lhs, &zero, rng);
            }
        }
    }

    // Volume normalizations.
    let dvol_c = dvol_space(n);
    let dvol_s = dvol_sphere(n);
    let factorial = |m: usize| (1..=m).product::<usize>() as f64;
    b.run(
        "vol_norm_alpha_beta_theta2".into(),
        &al.wedge(&be).unwrap().wedge(&wedge_power(&t2, n - 1)).unwrap(),
        &dvol_c.scale(factorial(n - 1).into()),
        rng,
    );
    let phase = Complex64::from(2.0_f64.powi(n as i32 - 1)) * I.powu((n * n - 1) as u32);
    b.run(
        "vol_norm_alpha_beta_chi_top".into(),
        &al.wedge(&be)
            .unwrap()
            .wedge(&chis[n - 1])
            .unwrap()
            .wedge(&chibar(n, n - 1).unwrap())
            .unwrap(),
        &dvol_c.scale(phase),
        rng,
    );
    let gamma_chi_chibar = ga
        .wedge(&chis[0])
        .unwrap()
        .wedge(&chibar(n, 0).unwrap())
        .unwrap();
    b.run(
        "vol_norm_gamma_chi0_chibar0".into(),
        &gamma_chi_chibar,
        &dvol_s.scale(phase),
        rng,
    );
    if n % 2 == 0 {
        b.run(
            "vol_norm_i_gamma_chi0_chibar0".into(),
            &gamma_chi_chibar.scale(I),
            &dvol_s.scale(2.0_f64.powi(n as i32 - 1).into()),
            rng,
        );
    }

    // Rumin differentials.
    let phi2 = rumin_phi2_core(n)?;
    let rep = rumin_verify("rumin_phi2", &phi2, n, samples, tol, rng)?;
    b.checks.push(rep.identity);
    b.checks.push(rep.verticality);

    // d(γ∧χ₀∧χ_{n−1}) = 0: the closed weight-two companion form.
    let closed = ga.wedge(&chis[0]).unwrap().wedge(&chis[n - 1]).unwrap();
    let dclosed = closed.ext_d();
    b.run(
        "d_gamma_chi0_chitop".into(),
        &dclosed,
        &PolyForm::zero(n, dclosed.degree()),
        rng,
    );

    if n % 2 == 0 {
        let phi1 = rumin_phi1(n)?;
        let rep = rumin_verify("rumin_phi1", &phi1, n, samples, tol, rng)?;
        b.checks.push(rep.identity);
        b.checks.push(rep.verticality);
    }

    // Pairing densities ω̄∧Dω / dvol (relative comparison).
    {
        let omega_bar = phi2_form(n)?.conj();
        let d_omega = rumin_phi2(n)?.d_expected;
        let (c, _) = product_constant(&omega_bar, &d_omega, n, rng)?;
        let w = unit_ball_volume(n);
        let reference = Complex64::from(
            (n as f64 + 2.0) / (n as f64 * w * w) * 4.0_f64.powi(n as i32 - 1),
        );
        let rel = (c - reference).norm() / reference.norm();
        b.checks.push(IdentityCheck::new("pairing_density_phi2", rel, tol));
    }
    if n % 2 == 0 {
        let omega_bar = phi1_form(n)?.conj();
        let d_omega = rumin_phi1(n)?.d_expected;
        let (c, _) = product_constant(&omega_bar, &d_omega, n, rng)?;
        let pi = std::f64::consts::PI;
        let reference = Complex64::from(
            2.0_f64.powi(n as i32 - 1) * factorial(n - 1) / pi.powi(n as i32),
        );
        let rel = (c - reference).norm() / reference.norm();
        b.checks.push(IdentityCheck::new("pairing_density_phi1", rel, tol));
    }

    let checks = b.checks;
    let overall_pass = checks.iter().all(|c| c.pass);
    Ok(FormsReport {
        n,
        samples,
        tol,
        seed,
        checks,
        overall_pass,
    })
}
