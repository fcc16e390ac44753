//! Property tests for the algebraic invariants that admit clean generators.

use nalgebra::DMatrix;
use proptest::prelude::*;
use suval_core::forms::exterior::PolyForm;
use suval_core::forms::poly::Poly;
use suval_core::numkernel::{self, RVector};
use suval_core::polytope::{zonotope_volume, Zonotope};

fn skew_matrix(d: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, d * (d - 1) / 2).prop_map(move |entries| {
        let mut m = DMatrix::zeros(d, d);
        let mut it = entries.into_iter();
        for i in 0..d {
            for j in i + 1..d {
                let v = it.next().unwrap();
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squared_equals_determinant(a in skew_matrix(6)) {
        let pf = numkernel::pfaffian(&a).unwrap();
        let det = a.determinant();
        prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs().max(1.0));
    }

    #[test]
    fn skew_spectrum_values_bounded_by_operator_norm(a in skew_matrix(6)) {
        let spectrum = numkernel::skew_spectrum(&a).unwrap();
        let svd = a.clone().svd(false, false);
        let norm2 = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        for c in spectrum {
            prop_assert!(c >= -1e-12 && c <= norm2 + 1e-9);
        }
    }

    #[test]
    fn wedge_is_graded_commutative(
        coeffs_a in prop::collection::vec(-2.0f64..2.0, 4),
        coeffs_b in prop::collection::vec(-2.0f64..2.0, 6),
    ) {
        // a: random 1-form, b: random 2-form on ℂ² (8 generators).
        let n = 2;
        let mut a = PolyForm::zero(n, 1);
        for (g, &c) in coeffs_a.iter().enumerate() {
            a.add_term(1u64 << g, Poly::constant(c.into()).mul(&Poly::var(g as u16)));
        }
        let mut b = PolyForm::zero(n, 2);
        for (i, &c) in coeffs_b.iter().enumerate() {
            let mask = (1u64 << (i % 7)) | (1u64 << 7);
            if mask.count_ones() == 2 {
                b.add_term(mask, Poly::constant(c.into()));
            }
        }
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        // deg 1 · deg 2: ab = (−1)^{1·2} ba = ba.
        prop_assert_eq!(ab, ba);
        // And d² = 0 on the product.
        let dd = a.wedge(&b).unwrap().ext_d().ext_d();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn zonotope_volume_symmetric_and_monotone(
        gens_a in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 4),
        gens_b in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 3),
    ) {
        let to_vecs = |g: &Vec<Vec<f64>>| -> Vec<RVector> {
            g.iter().map(|v| RVector::from_column_slice(v)).collect()
        };
        let a = to_vecs(&gens_a);
        let b = to_vecs(&gens_b);
        let mut ab = a.clone();
        ab.extend(b.iter().cloned());
        let mut ba = b.clone();
        ba.extend(a.iter().cloned());
        let vol_ab = zonotope_volume(4, &ab);
        let vol_ba = zonotope_volume(4, &ba);
        prop_assert!((vol_ab - vol_ba).abs() <= 1e-10 * (1.0 + vol_ab));
        // Monotone under adding generators.
        prop_assert!(vol_ab + 1e-12 >= zonotope_volume(4, &a));
        // Consistent with the Minkowski-sum operation.
        let za = Zonotope::new(RVector::zeros(4), a);
        let zb = Zonotope::new(RVector::zeros(4), b);
        let sum = za.minkowski_sum(&zb).unwrap();
        prop_assert!((sum.volume() - vol_ab).abs() <= 1e-10 * (1.0 + vol_ab));
    }
}
