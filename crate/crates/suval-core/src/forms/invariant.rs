//! The invariant differential forms on the sphere bundle Sℂⁿ = ℂⁿ × S²ⁿ⁻¹.
//!
//! Coordinates are z_j = x_j + iy_j on the base and ζ_j = ξ_j + iη_j on the
//! fiber. The basic invariant one- and two-forms are
//!
//! α = ½ Σ (ζ_j dz̄_j + ζ̄_j dz_j)           β = (i/2) Σ (ζ_j dz̄_j − ζ̄_j dz_j)
//! γ = (i/2) Σ (ζ_j dζ̄_j − ζ̄_j dζ_j)        θ₀ = (i/2) Σ dζ_j ∧ dζ̄_j
//! θ₂ = (i/2) Σ dz_j ∧ dz̄_j − α∧β           θ_s − iθ₁ = Σ dz_j ∧ dζ̄_j − β∧γ + iα∧γ
//!
//! together with the weight-one (n−1)-forms
//! χ_k = 1/(k!(n−k−1)!) Σ_π sgn(π) ζ_{π(1)} dz_{π(2)} ∧ … ∧ dz_{π(k+1)} ∧ dζ_{π(k+2)} ∧ … ∧ dζ_{π(n)}
//! and their conjugates.

use num_complex::Complex64;

use super::exterior::PolyForm;
use super::poly::Poly;
use super::FormsError;
use crate::numkernel::unit_ball_volume;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// Variable/generator layout: x_j ↦ 2j, y_j ↦ 2j+1, ξ_j ↦ 2n+2j, η_j ↦ 2n+2j+1.
pub fn var_x(j: usize) -> u16 {
    (2 * j) as u16
}
pub fn var_y(j: usize) -> u16 {
    (2 * j + 1) as u16
}
pub fn var_xi(n: usize, j: usize) -> u16 {
    (2 * n + 2 * j) as u16
}
pub fn var_eta(n: usize, j: usize) -> u16 {
    (2 * n + 2 * j + 1) as u16
}

/// dz_j = dx_j + i dy_j.
pub fn dz(n: usize, j: usize) -> PolyForm {
    PolyForm::generator(n, 2 * j).add(&PolyForm::generator(n, 2 * j + 1).scale(I))
}

pub fn dzbar(n: usize, j: usize) -> PolyForm {
    dz(n, j).conj()
}

/// dζ_j = dξ_j + i dη_j.
pub fn dzeta(n: usize, j: usize) -> PolyForm {
    PolyForm::generator(n, 2 * n + 2 * j).add(&PolyForm::generator(n, 2 * n + 2 * j + 1).scale(I))
}

pub fn dzetabar(n: usize, j: usize) -> PolyForm {
    dzeta(n, j).conj()
}

/// ζ_j = ξ_j + iη_j as a coefficient polynomial.
pub fn zeta_poly(n: usize, j: usize) -> Poly {
    Poly::var(var_xi(n, j)).add(&Poly::var(var_eta(n, j)).scale(I))
}

pub fn zetabar_poly(n: usize, j: usize) -> Poly {
    zeta_poly(n, j).conj()
}

pub fn alpha(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 1);
    for j in 0..n {
        let t = PolyForm::from_poly(n, zeta_poly(n, j))
            .wedge(&dzbar(n, j))
            .unwrap()
            .add(
                &PolyForm::from_poly(n, zetabar_poly(n, j))
                    .wedge(&dz(n, j))
                    .unwrap(),
            );
        acc = acc.add(&t);
    }
    acc.scale(re(0.5))
}

pub fn beta(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 1);
    for j in 0..n {
        let t = PolyForm::from_poly(n, zeta_poly(n, j))
            .wedge(&dzbar(n, j))
            .unwrap()
            .sub(
                &PolyForm::from_poly(n, zetabar_poly(n, j))
                    .wedge(&dz(n, j))
                    .unwrap(),
            );
        acc = acc.add(&t);
    }
    acc.scale(I * re(0.5))
}

pub fn gamma(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 1);
    for j in 0..n {
        let t = PolyForm::from_poly(n, zeta_poly(n, j))
            .wedge(&dzetabar(n, j))
            .unwrap()
            .sub(
                &PolyForm::from_poly(n, zetabar_poly(n, j))
                    .wedge(&dzeta(n, j))
                    .unwrap(),
            );
        acc = acc.add(&t);
    }
    acc.scale(I * re(0.5))
}

pub fn theta0(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 2);
    for j in 0..n {
        acc = acc.add(&dzeta(n, j).wedge(&dzetabar(n, j)).unwrap());
    }
    acc.scale(I * re(0.5))
}

pub fn theta2(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 2);
    for j in 0..n {
        acc = acc.add(&dz(n, j).wedge(&dzbar(n, j)).unwrap());
    }
    acc.scale(I * re(0.5)).sub(&alpha(n).wedge(&beta(n)).unwrap())
}

/// The combination θ_s − iθ₁ = Σ dz_j ∧ dζ̄_j − β∧γ + iα∧γ.
fn theta_s_minus_i_theta1(n: usize) -> PolyForm {
    let mut acc = PolyForm::zero(n, 2);
    for j in 0..n {
        acc = acc.add(&dz(n, j).wedge(&dzetabar(n, j)).unwrap());
    }
    let g = gamma(n);
    acc.sub(&beta(n).wedge(&g).unwrap())
        .add(&alpha(n).wedge(&g).unwrap().scale(I))
}

pub fn theta_s(n: usize) -> PolyForm {
    let combo = theta_s_minus_i_theta1(n);
    combo.add(&combo.conj()).scale(re(0.5))
}

pub fn theta1(n: usize) -> PolyForm {
    let combo = theta_s_minus_i_theta1(n);
    combo.sub(&combo.conj()).scale(I * re(0.5))
}

/// Permutations of 0..n with their signs. Picking the element at position i
/// of the (sorted) remainder costs i transpositions.
fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(
        remaining: &mut Vec<usize>,
        current: &mut Vec<usize>,
        sign: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if remaining.is_empty() {
            out.push((current.clone(), sign));
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            current.push(v);
            let s = if i % 2 == 0 { sign } else { -sign };
            rec(remaining, current, s, out);
            current.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..n).collect(), &mut Vec::with_capacity(n), 1.0, &mut out);
    out
}

/// χ_k (weight one, degree n−1); the index must lie in 0..n−1.
pub fn chi(n: usize, k: usize) -> Result<PolyForm, FormsError> {
    if k >= n {
        return Err(FormsError::BadIndex { k, n });
    }
    let norm = 1.0
        / ((1..=k).product::<usize>() as f64 * (1..=(n - k - 1)).product::<usize>() as f64);
    let mut acc = PolyForm::zero(n, n - 1);
    for (perm, sign) in permutations_with_sign(n) {
        let mut term = PolyForm::from_poly(n, zeta_poly(n, perm[0]).scale(re(sign)));
        for &p in &perm[1..=k] {
            term = term.wedge(&dz(n, p)).unwrap();
        }
        for &p in &perm[k + 1..] {
            term = term.wedge(&dzeta(n, p)).unwrap();
        }
        acc = acc.add(&term);
    }
    Ok(acc.scale(re(norm)))
}

pub fn chibar(n: usize, k: usize) -> Result<PolyForm, FormsError> {
    Ok(chi(n, k)?.conj())
}

/// Volume form of ℂⁿ: dx₁∧dy₁∧…∧dx_n∧dy_n.
pub fn dvol_space(n: usize) -> PolyForm {
    let mut acc = PolyForm::scalar(n, ONE);
    for g in 0..2 * n {
        acc = acc.wedge(&PolyForm::generator(n, g)).unwrap();
    }
    acc
}

/// Volume form of the unit sphere S²ⁿ⁻¹ in the ζ-coordinates: the contraction
/// of dξ₁∧dη₁∧…∧dξ_n∧dη_n with the outward position field.
pub fn dvol_sphere(n: usize) -> PolyForm {
    let mut acc = PolyForm::scalar(n, ONE);
    for g in 2 * n..4 * n {
        acc = acc.wedge(&PolyForm::generator(n, g)).unwrap();
    }
    let mut field = vec![Poly::zero(); 4 * n];
    for j in 0..n {
        field[2 * n + 2 * j] = Poly::var(var_xi(n, j));
        field[2 * n + 2 * j + 1] = Poly::var(var_eta(n, j));
    }
    acc.interior_product(&field)
}

/// Volume form of the sphere bundle: dvol_ℂⁿ ∧ dvol_{S²ⁿ⁻¹} (degree 4n−1).
pub fn dvol_sphere_bundle(n: usize) -> PolyForm {
    dvol_space(n).wedge(&dvol_sphere(n)).unwrap()
}

/// Named invariant forms, as accepted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormName {
    Alpha,
    Beta,
    Gamma,
    Theta0,
    Theta1,
    Theta2,
    ThetaS,
    Chi(usize),
    ChiBar(usize),
    DvolSpace,
    DvolSphere,
}

impl std::str::FromStr for FormName {
    type Err = FormsError;

    fn from_str(s: &str) -> Result<Self, FormsError> {
        let lower = s.to_ascii_lowercase();
        let parse_index = |prefix: &str| lower[prefix.len()..].parse::<usize>().ok();
        Ok(match lower.as_str() {
            "alpha" => FormName::Alpha,
            "beta" => FormName::Beta,
            "gamma" => FormName::Gamma,
            "theta0" => FormName::Theta0,
            "theta1" => FormName::Theta1,
            "theta2" => FormName::Theta2,
            "thetas" | "theta_s" => FormName::ThetaS,
            "dvol_space" => FormName::DvolSpace,
            "dvol_sphere" => FormName::DvolSphere,
            _ if lower.starts_with("chibar") => match parse_index("chibar") {
                Some(k) => FormName::ChiBar(k),
                None => return Err(FormsError::UnknownName(s.into())),
            },
            _ if lower.starts_with("chi") => match parse_index("chi") {
                Some(k) => FormName::Chi(k),
                None => return Err(FormsError::UnknownName(s.into())),
            },
            _ => return Err(FormsError::UnknownName(s.into())),
        })
    }
}

/// Coordinate expression of a named invariant form.
pub fn invariant_form(name: FormName, n: usize) -> Result<PolyForm, FormsError> {
    Ok(match name {
        FormName::Alpha => alpha(n),
        FormName::Beta => beta(n),
        FormName::Gamma => gamma(n),
        FormName::Theta0 => theta0(n),
        FormName::Theta1 => theta1(n),
        FormName::Theta2 => theta2(n),
        FormName::ThetaS => theta_s(n),
        FormName::Chi(k) => chi(n, k)?,
        FormName::ChiBar(k) => chibar(n, k)?,
        FormName::DvolSpace => dvol_space(n),
        FormName::DvolSphere => dvol_sphere(n),
    })
}

/// k-fold wedge power of an even-degree form.
pub fn wedge_power(f: &PolyForm, k: usize) -> PolyForm {
    let mut acc = PolyForm::scalar(f.complex_dim(), ONE);
    for _ in 0..k {
        acc = acc.wedge(f).unwrap();
    }
    acc
}

/// ω, ξ and the expected Dω = d(ω + α∧ξ) for one valuation-defining form.
#[derive(Debug, Clone)]
pub struct RuminData {
    pub omega: PolyForm,
    pub xi: PolyForm,
    pub d_expected: PolyForm,
}

impl RuminData {
    fn scale(&self, s: Complex64) -> RuminData {
        RuminData {
            omega: self.omega.scale(s),
            xi: self.xi.scale(s),
            d_expected: self.d_expected.scale(s),
        }
    }
}

/// Rumin data for the weight-two form: ω = β∧χ₀∧χ_{n−1},
/// ξ = −(n+1)i χ₀∧χ_{n−1}, Dω = −n(n+2) α∧γ∧χ₀∧χ_{n−1}.
pub fn rumin_phi2_core(n: usize) -> Result<RuminData, FormsError> {
    let chi0 = chi(n, 0)?;
    let chin1 = chi(n, n - 1)?;
    let pair = chi0.wedge(&chin1)?;
    let omega = beta(n).wedge(&pair)?;
    let xi = pair.scale(-re((n + 1) as f64) * I);
    let d_expected = alpha(n)
        .wedge(&gamma(n))?
        .wedge(&pair)?
        .scale(-re((n * (n + 2)) as f64));
    Ok(RuminData { omega, xi, d_expected })
}

/// The normalized weight-two valuation form: φ₂ is represented by
/// ((−1)^{n+1} i/(n ω_n)) β∧χ₀∧χ_{n−1}.
pub fn phi2_scale(n: usize) -> Complex64 {
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    I * re(sign / (n as f64 * unit_ball_volume(n)))
}

pub fn rumin_phi2(n: usize) -> Result<RuminData, FormsError> {
    Ok(rumin_phi2_core(n)?.scale(phi2_scale(n)))
}

fn binomial(m: usize, j: usize) -> f64 {
    let mut v = 1.0;
    for t in 0..j {
        v = v * (m - t) as f64 / (t + 1) as f64;
    }
    v
}

/// Rumin data for the weight-one form (n = 2m even):
/// ω = (1/(nπ^m)) χ₀∧θ₂^m,
/// ξ = (2i^{m+1}/(2π)^m) γ∧χ_m∧ Σ_{j odd} i^{m−j} C(m,j) θ_s^{j−1}∧θ₁^{m−j}
///     + (1/(2π^m)) β∧χ₀∧θ₂^{m−1},
/// Dω = α∧((1/(2π^m)) χ₀∧θ₁∧θ₂^{m−1} − dξ).
pub fn rumin_phi1(n: usize) -> Result<RuminData, FormsError> {
    if n % 2 != 0 {
        return Err(FormsError::OddN { n });
    }
    let m = n / 2;
    let pi = std::f64::consts::PI;
    let chi0 = chi(n, 0)?;
    let th2 = theta2(n);
    let omega = chi0
        .wedge(&wedge_power(&th2, m))?
        .scale(re(1.0 / (n as f64 * pi.powi(m as i32))));

    let ths = theta_s(n);
    let th1 = theta1(n);
    let mut series = PolyForm::zero(n, 2 * (m - 1));
    let mut j = 1;
    while j <= m {
        let coeff = I.powu((m - j) as u32) * re(binomial(m, j));
        let term = wedge_power(&ths, j - 1).wedge(&wedge_power(&th1, m - j))?;
        series = series.add(&term.scale(coeff));
        j += 2;
    }
    let first = gamma(n)
        .wedge(&chi(n, m)?)?
        .wedge(&series)?
        .scale(I.powu((m + 1) as u32) * re(2.0 / (2.0 * pi).powi(m as i32)));
    let second = beta(n)
        .wedge(&chi0)?
        .wedge(&wedge_power(&th2, m - 1))?
        .scale(re(1.0 / (2.0 * pi.powi(m as i32))));
    let xi = first.add(&second);

    let inner = chi0
        .wedge(&th1)?
        .wedge(&wedge_power(&th2, m - 1))?
        .scale(re(1.0 / (2.0 * pi.powi(m as i32))))
        .sub(&xi.ext_d());
    let d_expected = alpha(n).wedge(&inner)?;
    Ok(RuminData { omega, xi, d_expected })
}

/// φ₁ is represented by (1/(nπ^m)) χ₀∧θ₂^m (n = 2m even).
pub fn phi1_form(n: usize) -> Result<PolyForm, FormsError> {
    Ok(rumin_phi1(n)?.omega)
}

/// φ₂ is represented by ((−1)^{n+1} i/(n ω_n)) β∧χ₀∧χ_{n−1}.
pub fn phi2_form(n: usize) -> Result<PolyForm, FormsError> {
    Ok(rumin_phi2(n)?.omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::verify::{base_point, SpherePoint};

    #[test]
    fn alpha_at_base_point_is_dx1() {
        let n = 2;
        let p = base_point(n);
        let vars = p.var_values();
        let a = alpha(n);
        // Unit vector in the x₁ direction.
        let mut e = vec![0.0; 4 * n];
        e[0] = 1.0;
        let got = a.eval(&vars, &[e]).unwrap();
        assert!((got - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn point_forms_match_displayed_values() {
        // At (0, e₁): β = dy₁, γ = dη₁, and θ₂ = Σ_{j≥2} dx_j∧dy_j exactly.
        let n = 3;
        let p = base_point(n);
        let vars = p.var_values();
        let mut ey = vec![0.0; 4 * n];
        ey[1] = 1.0;
        assert!((beta(n).eval(&vars, &[ey]).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let mut eeta = vec![0.0; 4 * n];
        eeta[2 * n + 1] = 1.0;
        assert!(
            (gamma(n).eval(&vars, &[eeta]).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-15
        );

        let th2 = theta2(n);
        let mut expect = PolyForm::zero(n, 2);
        for j in 1..n {
            expect = expect.add(
                &PolyForm::generator(n, 2 * j)
                    .wedge(&PolyForm::generator(n, 2 * j + 1))
                    .unwrap(),
            );
        }
        // Compare on a handful of arbitrary vector pairs (exact at this point).
        for s in 0..5u64 {
            let v1: Vec<f64> = (0..4 * n).map(|i| ((i as u64 * 7 + s * 3 + 1) % 11) as f64 - 5.0).collect();
            let v2: Vec<f64> = (0..4 * n).map(|i| ((i as u64 * 5 + s * 7 + 2) % 13) as f64 - 6.0).collect();
            let got = th2.eval(&vars, &[v1.clone(), v2.clone()]).unwrap();
            let want = expect.eval(&vars, &[v1, v2]).unwrap();
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn d_gamma_is_twice_theta0_as_polynomials() {
        // Exact term-by-term equality, not just on the sphere bundle.
        for n in [2usize, 3] {
            let lhs = gamma(n).ext_d();
            let rhs = theta0(n).scale(Complex64::new(2.0, 0.0));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn chi_index_out_of_range_is_rejected() {
        assert!(matches!(chi(2, 2), Err(FormsError::BadIndex { .. })));
        assert!(matches!(chi(3, 5), Err(FormsError::BadIndex { .. })));
    }

    #[test]
    fn chi_at_base_point() {
        // χ_{n−1} at (0, e₁) reduces to dz₂∧…∧dz_n; evaluate against that.
        let n = 3;
        let p = SpherePoint::base(n);
        let vars = p.var_values();
        let top = chi(n, n - 1).unwrap();
        let expect = dz(n, 1).wedge(&dz(n, 2)).unwrap();
        for s in 0..5u64 {
            let v1: Vec<f64> = (0..4 * n).map(|i| ((i as u64 * 3 + s + 1) % 7) as f64 - 3.0).collect();
            let v2: Vec<f64> = (0..4 * n).map(|i| ((i as u64 * 11 + 5 * s + 2) % 9) as f64 - 4.0).collect();
            let got = top.eval(&vars, &[v1.clone(), v2.clone()]).unwrap();
            let want = expect.eval(&vars, &[v1, v2]).unwrap();
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn form_name_parsing() {
        use std::str::FromStr;
        assert_eq!(FormName::from_str("alpha").unwrap(), FormName::Alpha);
        assert_eq!(FormName::from_str("chi1").unwrap(), FormName::Chi(1));
        assert_eq!(FormName::from_str("chibar0").unwrap(), FormName::ChiBar(0));
        assert!(FormName::from_str("nope").is_err());
    }
}
