//! Haar sampling on U(n) and SU(n).
//!
//! U(n) samples come from the QR decomposition of a complex Ginibre matrix
//! with the phases of the R diagonal absorbed into Q. SU(n) samples divide
//! the determinant out of the first column; left multiplication by SU(n)
//! leaves the construction equivariant, so the result is Haar on SU(n) and
//! the pair (g_SU, g_U) is a natural variance-reduction coupling.

use nalgebra::linalg::QR;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkernel::CMatrix;

/// Compact group tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    U,
    SU,
}

impl std::str::FromStr for Group {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "u" => Ok(Group::U),
            "su" => Ok(Group::SU),
            other => Err(format!("unknown group {other:?} (expected u or su)")),
        }
    }
}

fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed g ∈ U(n); unitarity residual stays at the 1e-15 level.
pub fn sample_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let a = ginibre(n, rng);
    let qr = QR::new(a);
    let r = qr.r();
    let mut q = qr.q();
    // Fix the phase gauge: multiply column j by r_jj/|r_jj|.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// diag(δ, 1, …, 1).
pub(crate) fn phase_in_first_coordinate(n: usize, delta: Complex64) -> CMatrix {
    let mut d = CMatrix::identity(n, n);
    d[(0, 0)] = delta;
    d
}

/// The measure-preserving parametrization of SU(2) ≅ S³ by the unit cube:
/// ζ₁ = e^{2πi u₁}·√u₃, ζ₂ = e^{2πi u₂}·√(1−u₃) is uniform on S³ when
/// u ∈ [0,1]³ is uniform (|ζ₁|² of a uniform S³ point is uniform on [0,1]),
/// and [[ζ₁, −ζ̄₂], [ζ₂, ζ̄₁]] carries S³ to Haar on SU(2).
pub fn su2_from_cube(u: [f64; 3]) -> CMatrix {
    let tau = 2.0 * std::f64::consts::PI;
    let z1 = Complex64::from_polar(u[2].sqrt(), tau * u[0]);
    let z2 = Complex64::from_polar((1.0 - u[2]).max(0.0).sqrt(), tau * u[1]);
    CMatrix::from_row_slice(2, 2, &[z1, -z2.conj(), z2, z1.conj()])
}

/// Haar-distributed g ∈ SU(n): determinant divided out of the first column.
pub fn sample_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    coupled_pair(n, rng).0
}

/// Coupled pair (g_SU, g_U): g_U Haar on U(n) and
/// g_SU = g_U · diag(det(g_U)⁻¹, 1, …, 1), which is Haar on SU(n).
pub fn coupled_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (CMatrix, CMatrix) {
    let g_u = sample_unitary(n, rng);
    let det = crate::numkernel::det_complex(&g_u);
    // |det| = 1 up to rounding; conj is the inverse phase.
    let delta = det.conj() / det.norm();
    let g_su = &g_u * phase_in_first_coordinate(n, delta);
    (g_su, g_u)
}

/// Seeded, stream-indexed Haar sampler.
#[derive(Debug, Clone)]
pub struct HaarSampler {
    pub group: Group,
    pub n: usize,
    pub seed: u64,
    pub stream: u64,
    rng: ChaCha8Rng,
}

impl HaarSampler {
    pub fn new(group: Group, n: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        HaarSampler {
            group,
            n,
            seed,
            stream,
            rng,
        }
    }

    pub fn sample(&mut self) -> CMatrix {
        match self.group {
            Group::U => sample_unitary(self.n, &mut self.rng),
            Group::SU => sample_special_unitary(self.n, &mut self.rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::det_complex;

    #[test]
    fn unitarity_and_determinant_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [2usize, 3] {
            for _ in 0..200 {
                let g = sample_unitary(n, &mut rng);
                let residual = (&g * g.adjoint() - CMatrix::identity(n, n)).norm();
                assert!(residual <= 1e-12, "residual {residual}");
                let det = det_complex(&g);
                assert!((det.norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn special_unitary_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2usize, 3] {
            for _ in 0..200 {
                let g = sample_special_unitary(n, &mut rng);
                let det = det_complex(&g);
                assert!((det - Complex64::new(1.0, 0.0)).norm() <= 1e-12, "det {det}");
            }
        }
    }

    #[test]
    fn coupled_pair_shares_all_but_a_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (g_su, g_u) = coupled_pair(2, &mut rng);
        let det = det_complex(&g_u);
        let d = phase_in_first_coordinate(2, det.conj() / det.norm());
        assert!((&g_u * d - g_su).norm() < 1e-13);
    }

    #[test]
    fn first_entry_second_moment_is_one_over_n() {
        // Columns of a Haar unitary are uniform on the sphere: E|g₁₁|² = 1/n.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 2;
        let draws = 100_000;
        let vals: Vec<f64> = (0..draws)
            .map(|_| sample_unitary(n, &mut rng)[(0, 0)].norm_sqr())
            .collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - 1.0 / n as f64).abs() <= 3.0 * se,
            "mean {mean}, se {se}"
        );
    }

    /// Two-sample Kolmogorov–Smirnov statistic.
    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (na, nb) = (a.len(), b.len());
        let (mut i, mut j) = (0, 0);
        let mut d = 0.0f64;
        while i < na && j < nb {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
        }
        d
    }

    #[test]
    fn trace_distribution_consistent_across_seeds() {
        let draw = |seed: u64| -> Vec<f64> {
            let mut s = HaarSampler::new(Group::SU, 2, seed, 0);
            (0..4000).map(|_| s.sample().trace().re).collect()
        };
        let a = draw(11);
        let b = draw(12);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let d = ks_statistic(a, b);
        // α ≈ 0.0027 (a 3σ-equivalent level): c(α) = √(−ln(α/2)/2) ≈ 1.82.
        let critical = 1.82 * ((na + nb) / (na * nb)).sqrt();
        assert!(d <= critical, "KS statistic {d} above {critical}");
    }

    #[test]
    fn left_invariance_of_special_unitary_statistics() {
        // Statistics of k·g for fixed k ∈ SU(2) match those of g.
        let k = {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            sample_special_unitary(2, &mut rng)
        };
        let draws = 20_000;
        let base: Vec<f64> = {
            let mut s = HaarSampler::new(Group::SU, 2, 5, 0);
            (0..draws).map(|_| s.sample().trace().re).collect()
        };
        let shifted: Vec<f64> = {
            let mut s = HaarSampler::new(Group::SU, 2, 6, 0);
            (0..draws).map(|_| (&k * s.sample()).trace().re).collect()
        };
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0);
        let (m1, m2) = (mean(&base), mean(&shifted));
        let se = (var(&base, m1) / draws as f64 + var(&shifted, m2) / draws as f64).sqrt();
        assert!((m1 - m2).abs() <= 3.0 * se, "moment comparison failed");
    }

    #[test]
    fn cube_parametrization_matches_haar_statistics() {
        // Compare the first-entry modulus moments of the cube construction
        // against the Ginibre-QR sampler.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let draws = 40_000;
        let mut cube: Vec<f64> = Vec::with_capacity(draws);
        for _ in 0..draws {
            let g = su2_from_cube([rng.random(), rng.random(), rng.random()]);
            assert!((&g * g.adjoint() - CMatrix::identity(2, 2)).norm() < 1e-12);
            assert!((det_complex(&g) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
            cube.push(g[(0, 0)].norm_sqr());
        }
        let qr: Vec<f64> = (0..draws)
            .map(|_| sample_special_unitary(2, &mut rng)[(0, 0)].norm_sqr())
            .collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| {
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
        };
        let (m1, m2) = (mean(&cube), mean(&qr));
        let se = (var(&cube, m1) / draws as f64 + var(&qr, m2) / draws as f64).sqrt();
        assert!((m1 - m2).abs() <= 3.5 * se, "cube {m1} vs qr {m2}");
    }

    #[test]
    fn sampler_streams_are_reproducible_and_distinct() {
        let mut a = HaarSampler::new(Group::U, 2, 7, 0);
        let mut b = HaarSampler::new(Group::U, 2, 7, 0);
        assert_eq!(a.sample(), b.sample());
        let mut c = HaarSampler::new(Group::U, 2, 7, 1);
        assert_ne!(a.sample(), c.sample());
    }
}
