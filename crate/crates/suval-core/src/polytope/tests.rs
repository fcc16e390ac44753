use super::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rv(data: &[f64]) -> RVector {
    RVector::from_column_slice(data)
}

fn unit_cube4() -> Polytope {
    Polytope::axis_box(&[(0.0, 1.0); 4])
}

fn random_parallelotope4(rng: &mut ChaCha8Rng) -> Polytope {
    loop {
        let gens: Vec<RVector> = (0..4)
            .map(|_| RVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0))
            .collect();
        let base = RVector::from_fn(4, |_, _| rng.random::<f64>() - 0.5);
        if let Ok(p) = Polytope::parallelotope(base, gens) {
            if p.volume().unwrap() > 0.05 {
                return p;
            }
        }
    }
}

#[test]
fn cube_face_counts() {
    let cube = unit_cube4();
    assert_eq!(cube.faces(0).unwrap().len(), 16);
    assert_eq!(cube.faces(1).unwrap().len(), 32);
    assert_eq!(cube.faces(2).unwrap().len(), 24);
    assert_eq!(cube.faces(3).unwrap().len(), 8);
    assert_eq!(cube.faces(4).unwrap().len(), 1);
}

#[test]
fn simplex_face_count() {
    // Standard 4-simplex: conv{0, e1, e2, e3, e4}; C(5,3) = 10 two-faces.
    let mut verts = vec![RVector::zeros(4)];
    for i in 0..4 {
        let mut e = RVector::zeros(4);
        e[i] = 1.0;
        verts.push(e);
    }
    let simplex = Polytope::simplex(verts).unwrap();
    assert_eq!(simplex.faces(2).unwrap().len(), 10);
    assert_eq!(simplex.faces(3).unwrap().len(), 5);
    let v = simplex.volume().unwrap();
    assert!((v - 1.0 / 24.0).abs() < 1e-12);
}

#[test]
fn parallelotope_two_faces_are_parallelograms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = random_parallelotope4(&mut rng);
    let faces = p.faces(2).unwrap();
    assert_eq!(faces.len(), 24);
    for f in &faces {
        assert_eq!(f.vertex_ids.len(), 4);
        assert!(f.volume > 0.0);
        assert!(f.exterior_angle.is_some(), "2-face cones in ℝ⁴ are planar");
    }
}

#[test]
fn box_exterior_angles_are_orthant_fractions() {
    let cube = unit_cube4();
    for k in 0..=4usize {
        for f in cube.faces(k).unwrap() {
            let expect = 0.5_f64.powi(4 - k as i32);
            assert!(
                (f.exterior_angle.unwrap() - expect).abs() < 1e-12,
                "k = {k}"
            );
        }
    }
}

#[test]
fn square_vertex_angle_in_plane() {
    // Unit square in ℝ²: each vertex has exterior angle 1/4.
    let square = Polytope::axis_box(&[(0.0, 1.0), (0.0, 1.0)]);
    for f in square.faces(0).unwrap() {
        assert!((f.exterior_angle.unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn gram_normalization_vertex_angles_sum_to_one() {
    // Monte Carlo with per-vertex streams: Σ_v γ(v) = 1 within 3σ.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..3 {
        let p = random_parallelotope4(&mut rng);
        let vertices = p.faces(0).unwrap();
        let samples = 20_000usize;
        let mut total = 0.0;
        let mut var = 0.0;
        for (i, f) in vertices.iter().enumerate() {
            let mut stream = ChaCha8Rng::seed_from_u64(1000 * trial + i as u64);
            let est = p
                .exterior_angle(f, AngleMethod::MonteCarlo { samples }, &mut stream)
                .unwrap();
            total += est;
            var += est * (1.0 - est) / samples as f64;
        }
        let sigma = var.sqrt();
        assert!(
            (total - 1.0).abs() <= 3.0 * sigma,
            "Σγ(v) = {total}, σ = {sigma}"
        );
    }
}

#[test]
fn monte_carlo_matches_exact_on_two_faces() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..8 {
        let p = random_parallelotope4(&mut rng);
        let faces = p.faces(2).unwrap();
        let samples = 20_000usize;
        for f in faces.iter().take(2) {
        let exact = f.exterior_angle.unwrap();
        let est = p
            .exterior_angle(f, AngleMethod::MonteCarlo { samples }, &mut rng)
            .unwrap();
            let se = (exact * (1.0 - exact) / samples as f64).sqrt();
            assert!(
                (est - exact).abs() <= 3.5 * se.max(1e-4),
                "exact {exact} vs mc {est}"
            );
        }
    }
}

#[test]
fn zonotope_volumes() {
    // Axis box.
    let gens = vec![
        rv(&[2.0, 0.0, 0.0, 0.0]),
        rv(&[0.0, 1.0, 0.0, 0.0]),
        rv(&[0.0, 0.0, 2.0, 0.0]),
        rv(&[0.0, 0.0, 0.0, 1.0]),
    ];
    assert!((zonotope_volume(4, &gens) - 4.0).abs() < 1e-12);

    // Two segments in ℝ²: parallelogram area |det|.
    let g2 = vec![rv(&[1.0, 2.0]), rv(&[3.0, 1.0])];
    assert!((zonotope_volume(2, &g2) - 5.0).abs() < 1e-12);

    // A single parallelotope (4 generators in ℝ⁴): |det|, matching the polytope volume.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = random_parallelotope4(&mut rng);
    let BodyKind::Parallelotope { generators, .. } = &p.kind else {
        unreachable!()
    };
    assert!((zonotope_volume(4, generators) - p.volume().unwrap()).abs() < 1e-12);
}

#[test]
fn minkowski_sum_basics() {
    let z = Zonotope::new(rv(&[0.0, 0.0, 0.0, 0.0]), vec![rv(&[1.0, 0.0, 0.0, 0.0])]);
    let point = Zonotope::new(rv(&[1.0, 2.0, 3.0, 4.0]), vec![]);
    let translated = z.minkowski_sum(&point).unwrap();
    assert_eq!(translated.base, rv(&[1.0, 2.0, 3.0, 4.0]));
    assert_eq!(translated.generators.len(), 1);

    // Axis box + axis box: sides add.
    let b1 = Zonotope::new(
        RVector::zeros(4),
        (0..4)
            .map(|i| {
                let mut g = RVector::zeros(4);
                g[i] = 1.0;
                g
            })
            .collect(),
    );
    let sum = b1.minkowski_sum(&b1).unwrap();
    assert!((sum.volume() - 16.0).abs() < 1e-12);

    // vol(K + K) = 2^{2n} vol(K) for a parallelotope.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gens: Vec<RVector> = (0..4)
        .map(|_| RVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    let k = Zonotope::new(RVector::zeros(4), gens);
    let kk = k.minkowski_sum(&k).unwrap();
    assert!((kk.volume() - 16.0 * k.volume()).abs() < 1e-9 * kk.volume().max(1.0));
}

#[test]
fn zonotope_membership_and_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gens: Vec<RVector> = (0..6)
        .map(|_| RVector::from_fn(4, |_, _| rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    let z = Zonotope::new(rv(&[0.2, -0.1, 0.3, 0.0]), gens.clone());
    let normals = z.facet_normals();
    let (lo, hi) = z.interval_hull();
    // Points built from the generator parametrization always belong.
    for _ in 0..50 {
        let mut x = z.base.clone();
        for g in &gens {
            x += g * rng.random::<f64>();
        }
        assert!(z.contains_with_normals(&x, &normals, 1e-9));
        for i in 0..4 {
            assert!(x[i] >= lo[i] - 1e-9 && x[i] <= hi[i] + 1e-9);
        }
    }
    // Far-away points never do.
    let far = rv(&[50.0, 0.0, 0.0, 0.0]);
    assert!(!z.contains_with_normals(&far, &normals, 1e-9));
}

#[test]
fn intersect_shifted_cubes() {
    let cube = unit_cube4();
    let mut t = RVector::zeros(4);
    t[0] = 0.5;
    let shifted = cube.translate(&t);
    match cube.intersect_hrep(&shifted).unwrap() {
        Intersection::Polytope(p) => {
            assert_eq!(p.vertices().len(), 16);
            assert!((p.volume().unwrap() - 0.5).abs() < 1e-9);
            // Sides (0.5, 1, 1, 1): x₁ ranges over [0.5, 1].
            for v in p.vertices() {
                assert!(v[0] > 0.5 - 1e-9 && v[0] < 1.0 + 1e-9);
            }
        }
        other => panic!("expected full-dimensional intersection, got {other:?}"),
    }
}

#[test]
fn intersect_disjoint_is_empty() {
    let cube = unit_cube4();
    let mut t = RVector::zeros(4);
    t[0] = 3.0;
    match cube.intersect_hrep(&cube.translate(&t)).unwrap() {
        Intersection::Empty => {}
        other => panic!("expected empty, got {other:?}"),
    }
}

#[test]
fn intersect_touching_is_lower_dimensional() {
    let cube = unit_cube4();
    let mut t = RVector::zeros(4);
    t[0] = 1.0;
    match cube.intersect_hrep(&cube.translate(&t)).unwrap() {
        Intersection::LowerDimensional => {}
        other => panic!("expected lower-dimensional, got {other:?}"),
    }
}

#[test]
fn self_intersection_reproduces_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = random_parallelotope4(&mut rng);
    match p.intersect_hrep(&p).unwrap() {
        Intersection::Polytope(q) => {
            assert_eq!(q.vertices().len(), p.vertices().len());
            for v in p.vertices() {
                assert!(
                    q.vertices().iter().any(|w| (v - w).norm() < 1e-9),
                    "missing vertex"
                );
            }
            assert!((q.volume().unwrap() - p.volume().unwrap()).abs() < 1e-9);
        }
        other => panic!("expected polytope, got {other:?}"),
    }
}

#[test]
fn transform_requires_orthogonal() {
    let cube = unit_cube4();
    let mut g = DMatrix::identity(4, 4);
    g[(0, 0)] = 2.0;
    assert!(matches!(
        cube.transform(&g, &RVector::zeros(4)),
        Err(PolytopeError::NotOrthogonal { .. })
    ));
}

#[test]
fn translation_preserves_face_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let p = random_parallelotope4(&mut rng);
    let t = rv(&[0.3, -1.2, 0.7, 2.0]);
    let q = p.translate(&t);
    let fp = p.faces(2).unwrap();
    let fq = q.faces(2).unwrap();
    assert_eq!(fp.len(), fq.len());
    for (a, b) in fp.iter().zip(fq.iter()) {
        assert!((a.volume - b.volume).abs() < 1e-10);
        assert!((a.exterior_angle.unwrap() - b.exterior_angle.unwrap()).abs() < 1e-12);
    }
}

#[test]
fn from_vertices_reconstructs_cube() {
    let cube = unit_cube4();
    let p = Polytope::from_vertices(4, cube.vertices().to_vec()).unwrap();
    assert_eq!(p.vertices().len(), 16);
    assert_eq!(p.halfspaces().unwrap().len(), 8);
    assert!((p.volume().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(p.faces(2).unwrap().len(), 24);
}

#[test]
fn flat_parallelotope_single_top_face() {
    // Flat square of side s in the (x₁, x₂) plane of ℝ⁴.
    let s = 1.7;
    let p = Polytope::parallelotope(
        RVector::zeros(4),
        vec![rv(&[s, 0.0, 0.0, 0.0]), rv(&[0.0, 0.0, s, 0.0])],
    )
    .unwrap();
    assert_eq!(p.affine_dim(), 2);
    let faces = p.faces(2).unwrap();
    assert_eq!(faces.len(), 1);
    assert!((faces[0].volume - s * s).abs() < 1e-12);
    assert_eq!(faces[0].exterior_angle, Some(1.0));
    assert!(p.volume().unwrap() == 0.0);
    assert!(matches!(
        p.faces(1),
        Err(PolytopeError::UnsupportedDimension { .. })
    ));
}

#[test]
fn polytope_json_round_trip() {
    let json = r#"{"parallelotope": {"base": [0,0,0,0], "generators": [[2,0,0,0],[0,1,0,0],[0,0,2,0],[0,0,0,1]]}}"#;
    let parsed: PolytopeJson = serde_json::from_str(json).unwrap();
    let p = Polytope::from_json(&parsed).unwrap();
    assert!((p.volume().unwrap() - 4.0).abs() < 1e-12);

    let json = r#"{"halfspaces": [
        {"normal": [1,0,0,0], "offset": 1}, {"normal": [-1,0,0,0], "offset": 0},
        {"normal": [0,1,0,0], "offset": 1}, {"normal": [0,-1,0,0], "offset": 0},
        {"normal": [0,0,1,0], "offset": 1}, {"normal": [0,0,-1,0], "offset": 0},
        {"normal": [0,0,0,1], "offset": 1}, {"normal": [0,0,0,-1], "offset": 0}]}"#;
    let parsed: PolytopeJson = serde_json::from_str(json).unwrap();
    let p = Polytope::from_json(&parsed).unwrap();
    assert_eq!(p.vertices().len(), 16);

    let verts: Vec<Vec<f64>> = p
        .vertices()
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let json = serde_json::to_string(&PolytopeJson::Vertices { vertices: verts }).unwrap();
    let parsed: PolytopeJson = serde_json::from_str(&json).unwrap();
    let q = Polytope::from_json(&parsed).unwrap();
    assert!((q.volume().unwrap() - 1.0).abs() < 1e-9);
}
