//! Convex polytopes in ℝ²ⁿ: face enumeration, face volumes, exterior angles,
//! zonotope volumes, Minkowski sums, and pairwise intersection in ℝ⁴.
//!
//! Combinatorial bodies (boxes, parallelotopes, simplices) work in any
//! ambient dimension through their generator/vertex structure. General
//! V-rep/H-rep polytopes are supported in ℝ⁴, where faces are enumerated by
//! brute force over facet subsets — a few dozen facets at most, which is all
//! the kinematic integrals need.

mod hrep4;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkernel::{orthonormalize, RVector};

pub use hrep4::Intersection;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("general face enumeration is only implemented in ℝ⁴ (got ℝ^{dim})")]
    UnsupportedDimension { dim: usize },
    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),
    #[error("ambient dimensions do not match")]
    DimensionMismatch,
    #[error("transform is not orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },
    #[error("no exact exterior-angle rule applies to this face")]
    ExactUnavailable,
    #[error("operation requires an H-representation")]
    MissingHrep,
    #[error("polytope has no vertices")]
    NoVertices,
}

/// Closed halfspace ⟨normal, x⟩ ≤ offset with a unit normal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        let norm = normal.iter().map(|x| x * x).sum::<f64>().sqrt();
        Halfspace {
            normal: normal.into_iter().map(|x| x / norm).collect(),
            offset: offset / norm,
        }
    }
}

/// Structure used for exact face paths.
#[derive(Debug, Clone)]
enum BodyKind {
    /// base + Σ u_i g_i, u ∈ [0,1]^k; k may be below the ambient dimension
    /// (flat bodies). Vertex index = bitmask over generators.
    Parallelotope { base: RVector, generators: Vec<RVector> },
    /// Convex hull of affinely independent vertices.
    Simplex,
    /// Anything else; faces come from the H-representation.
    General,
}

/// Convex polytope. Vertices are exactly the extreme points.
#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RVector>,
    halfspaces: Option<Vec<Halfspace>>,
    kind: BodyKind,
}

/// Face of a polytope: dimension, vertex ids, an orthonormal basis of the
/// linear space W_F parallel to the face, its k-volume, and the normalized
/// exterior angle when an exact rule applies.
#[derive(Debug, Clone)]
pub struct Face {
    pub dim: usize,
    pub vertex_ids: Vec<usize>,
    pub basis: Vec<RVector>,
    pub volume: f64,
    pub exterior_angle: Option<f64>,
}

/// How to compute an exterior angle.
#[derive(Debug, Clone, Copy)]
pub enum AngleMethod {
    Exact,
    MonteCarlo { samples: usize },
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RVector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> Option<&[Halfspace]> {
        self.halfspaces.as_deref()
    }

    /// Axis-aligned box ∏ [lo_i, hi_i].
    pub fn axis_box(intervals: &[(f64, f64)]) -> Polytope {
        let d = intervals.len();
        let base = RVector::from_iterator(d, intervals.iter().map(|&(lo, _)| lo));
        let generators: Vec<RVector> = (0..d)
            .map(|i| {
                let mut g = RVector::zeros(d);
                g[i] = intervals[i].1 - intervals[i].0;
                g
            })
            .collect();
        Polytope::parallelotope(base, generators).expect("axis box is non-degenerate")
    }

    /// Parallelotope base + Σ [0,1]·g_i. With fewer generators than the
    /// ambient dimension this is a flat body (positive-dimensional but not
    /// full-dimensional); those support only their top-dimensional face.
    pub fn parallelotope(base: RVector, generators: Vec<RVector>) -> Result<Polytope, PolytopeError> {
        let d = base.len();
        let k = generators.len();
        if generators.iter().any(|g| g.len() != d) || k > d {
            return Err(PolytopeError::DimensionMismatch);
        }
        orthonormalize(&generators)
            .map_err(|_| PolytopeError::DegeneratePolytope("dependent generators".into()))?;
        let vertices: Vec<RVector> = (0..1usize << k)
            .map(|mask| {
                let mut v = base.clone();
                for (i, g) in generators.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v += g;
                    }
                }
                v
            })
            .collect();
        let halfspaces = if k == d {
            // Dual vectors: rows of G⁻¹ give ⟨n_i, g_j⟩ = δ_ij.
            let g = DMatrix::from_fn(d, d, |r, c| generators[c][r]);
            let ninv = g
                .try_inverse()
                .ok_or_else(|| PolytopeError::DegeneratePolytope("singular generator matrix".into()))?;
            let mut hs = Vec::with_capacity(2 * d);
            for i in 0..d {
                let n: Vec<f64> = (0..d).map(|c| ninv[(i, c)]).collect();
                let nb: f64 = n.iter().zip(base.iter()).map(|(a, b)| a * b).sum();
                hs.push(Halfspace::new(n.clone(), nb + 1.0));
                hs.push(Halfspace::new(n.iter().map(|x| -x).collect(), -nb));
            }
            Some(hs)
        } else {
            None
        };
        Ok(Polytope {
            dim: d,
            vertices,
            halfspaces,
            kind: BodyKind::Parallelotope { base, generators },
        })
    }

    /// Simplex from d+1 affinely independent vertices (any ambient d).
    pub fn simplex(vertices: Vec<RVector>) -> Result<Polytope, PolytopeError> {
        let d = vertices.first().ok_or(PolytopeError::NoVertices)?.len();
        if vertices.len() != d + 1 {
            return Err(PolytopeError::DimensionMismatch);
        }
        let edges: Vec<RVector> = vertices[1..].iter().map(|v| v - &vertices[0]).collect();
        orthonormalize(&edges)
            .map_err(|_| PolytopeError::DegeneratePolytope("affinely dependent vertices".into()))?;
        Ok(Polytope {
            dim: d,
            vertices,
            halfspaces: None,
            kind: BodyKind::Simplex,
        })
    }

    /// General polytope from its extreme points; in ℝ⁴ the H-representation
    /// is reconstructed by brute force.
    pub fn from_vertices(dim: usize, vertices: Vec<RVector>) -> Result<Polytope, PolytopeError> {
        if vertices.is_empty() {
            return Err(PolytopeError::NoVertices);
        }
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(PolytopeError::DimensionMismatch);
        }
        if dim != 4 {
            return Err(PolytopeError::UnsupportedDimension { dim });
        }
        let halfspaces = hrep4::hull4(&vertices)?;
        let verts = hrep4::enumerate_vertices(&halfspaces)?;
        if verts.is_empty() {
            return Err(PolytopeError::NoVertices);
        }
        Ok(Polytope {
            dim,
            vertices: verts
                .into_iter()
                .map(|v| RVector::from_column_slice(&v))
                .collect(),
            halfspaces: Some(halfspaces),
            kind: BodyKind::General,
        })
    }

    /// General polytope from halfspaces (ℝ⁴ only).
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Polytope, PolytopeError> {
        if dim != 4 {
            return Err(PolytopeError::UnsupportedDimension { dim });
        }
        let verts = hrep4::enumerate_vertices(&halfspaces)?;
        if verts.is_empty() {
            return Err(PolytopeError::NoVertices);
        }
        Ok(Polytope {
            dim,
            vertices: verts
                .into_iter()
                .map(|v| RVector::from_column_slice(&v))
                .collect(),
            halfspaces: Some(halfspaces),
            kind: BodyKind::General,
        })
    }

    /// The underlying zonotope when this body is a parallelotope.
    pub fn as_zonotope(&self) -> Option<Zonotope> {
        match &self.kind {
            BodyKind::Parallelotope { base, generators } => Some(Zonotope {
                base: base.clone(),
                generators: generators.clone(),
            }),
            _ => None,
        }
    }

    /// Dimension of the affine hull of the vertex set.
    pub fn affine_dim(&self) -> usize {
        if self.vertices.len() <= 1 {
            return 0;
        }
        let edges: Vec<RVector> = self.vertices[1..]
            .iter()
            .map(|v| v - &self.vertices[0])
            .collect();
        numerical_rank(&edges)
    }

    /// Complete list of k-faces.
    pub fn faces(&self, k: usize) -> Result<Vec<Face>, PolytopeError> {
        match &self.kind {
            BodyKind::Parallelotope { base, generators } => {
                faces_parallelotope(self.dim, base, generators, k)
            }
            BodyKind::Simplex => faces_simplex(&self.vertices, k),
            BodyKind::General => {
                let hs = self.halfspaces.as_ref().ok_or(PolytopeError::MissingHrep)?;
                hrep4::faces_general(&self.vertices, hs, k)
            }
        }
    }

    /// Exterior angle of a face: fraction of the unit sphere of the normal
    /// space whose directions support exactly this face.
    pub fn exterior_angle<R: Rng + ?Sized>(
        &self,
        face: &Face,
        method: AngleMethod,
        rng: &mut R,
    ) -> Result<f64, PolytopeError> {
        match method {
            AngleMethod::Exact => face.exterior_angle.ok_or(PolytopeError::ExactUnavailable),
            AngleMethod::MonteCarlo { samples } => {
                Ok(self.exterior_angle_monte_carlo(face, samples, rng))
            }
        }
    }

    fn exterior_angle_monte_carlo<R: Rng + ?Sized>(
        &self,
        face: &Face,
        samples: usize,
        rng: &mut R,
    ) -> f64 {
        let d = self.dim;
        let mut in_face = vec![false; self.vertices.len()];
        for &i in &face.vertex_ids {
            in_face[i] = true;
        }
        let scale = 1.0 + self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = 1e-9 * scale;
        let mut hits = 0usize;
        let mut u = RVector::zeros(d);
        let mut vals = vec![0.0f64; self.vertices.len()];
        for _ in 0..samples {
            // Uniform direction in the normal space W_F^⊥.
            for x in u.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            for b in &face.basis {
                let c = u.dot(b);
                u.axpy(-c, b, 1.0);
            }
            let norm = u.norm();
            if norm < 1e-9 {
                continue;
            }
            let mut max = f64::NEG_INFINITY;
            for (i, v) in self.vertices.iter().enumerate() {
                let val = u.dot(v) / norm;
                vals[i] = val;
                if val > max {
                    max = val;
                }
            }
            // Hit iff the support set is exactly the face's vertex set.
            let hit = vals
                .iter()
                .enumerate()
                .all(|(i, &val)| (val >= max - tol) == in_face[i]);
            if hit {
                hits += 1;
            }
        }
        hits as f64 / samples as f64
    }

    /// Ids of the vertices maximizing ⟨u, ·⟩ (the support set of direction u).
    pub fn support_set(&self, u: &RVector) -> Vec<usize> {
        let vals: Vec<f64> = self.vertices.iter().map(|v| u.dot(v)).collect();
        let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let scale = 1.0 + self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tol = 1e-9 * scale;
        let mut ids: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= max - tol).collect();
        ids.sort_unstable();
        ids
    }

    /// Image under an orthogonal map plus translation.
    pub fn transform(&self, g: &DMatrix<f64>, t: &RVector) -> Result<Polytope, PolytopeError> {
        let d = self.dim;
        if g.nrows() != d || g.ncols() != d || t.len() != d {
            return Err(PolytopeError::DimensionMismatch);
        }
        let residual = (g * g.transpose() - DMatrix::identity(d, d)).norm();
        if residual > 1e-9 {
            return Err(PolytopeError::NotOrthogonal { residual });
        }
        let vertices = self.vertices.iter().map(|v| g * v + t).collect();
        let halfspaces = self.halfspaces.as_ref().map(|hs| {
            hs.iter()
                .map(|h| {
                    let n = g * RVector::from_column_slice(&h.normal);
                    let offset = h.offset + n.dot(t);
                    Halfspace {
                        normal: n.iter().copied().collect(),
                        offset,
                    }
                })
                .collect()
        });
        let kind = match &self.kind {
            BodyKind::Parallelotope { base, generators } => BodyKind::Parallelotope {
                base: g * base + t,
                generators: generators.iter().map(|v| g * v).collect(),
            },
            k => k.clone(),
        };
        Ok(Polytope {
            dim: d,
            vertices,
            halfspaces,
            kind,
        })
    }

    pub fn translate(&self, t: &RVector) -> Polytope {
        let g = DMatrix::identity(self.dim, self.dim);
        self.transform(&g, t).expect("translation is orthogonal")
    }

    /// Point reflection through the origin.
    pub fn reflect(&self) -> Polytope {
        let g = -DMatrix::<f64>::identity(self.dim, self.dim);
        let t = RVector::zeros(self.dim);
        self.transform(&g, &t).expect("reflection is orthogonal")
    }

    /// Full-dimensional volume. Zero for flat bodies.
    pub fn volume(&self) -> Result<f64, PolytopeError> {
        match &self.kind {
            BodyKind::Parallelotope { generators, .. } => {
                if generators.len() != self.dim {
                    return Ok(0.0);
                }
                let g = DMatrix::from_fn(self.dim, self.dim, |r, c| generators[c][r]);
                Ok(g.determinant().abs())
            }
            BodyKind::Simplex => {
                let d = self.dim;
                let g =
                    DMatrix::from_fn(d, d, |r, c| self.vertices[c + 1][r] - self.vertices[0][r]);
                let fact: f64 = (1..=d).map(|i| i as f64).product();
                Ok(g.determinant().abs() / fact)
            }
            BodyKind::General => {
                let hs = self.halfspaces.as_ref().ok_or(PolytopeError::MissingHrep)?;
                hrep4::volume4(&self.vertices, hs)
            }
        }
    }

    /// Membership test (requires H-rep).
    pub fn contains(&self, x: &RVector, tol: f64) -> Result<bool, PolytopeError> {
        let hs = self.halfspaces.as_ref().ok_or(PolytopeError::MissingHrep)?;
        Ok(hs.iter().all(|h| {
            let dot: f64 = h.normal.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            dot <= h.offset + tol
        }))
    }

    /// Intersection of two H-rep polytopes in ℝ⁴.
    pub fn intersect_hrep(&self, other: &Polytope) -> Result<Intersection, PolytopeError> {
        if self.dim != 4 || other.dim != 4 {
            return Err(PolytopeError::UnsupportedDimension { dim: self.dim });
        }
        let a = self.halfspaces.as_ref().ok_or(PolytopeError::MissingHrep)?;
        let b = other.halfspaces.as_ref().ok_or(PolytopeError::MissingHrep)?;
        let combined: Vec<Halfspace> = a.iter().chain(b.iter()).cloned().collect();
        hrep4::intersection_from_halfspaces(combined)
    }
}

fn numerical_rank(vectors: &[RVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let d = vectors[0].len();
    let m = DMatrix::from_fn(d, vectors.len(), |r, c| vectors[c][r]);
    let svd = m.svd(false, false);
    let scale = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .filter(|&&s| s > 1e-9 * scale.max(1.0))
        .count()
}

/// Gram volume √det(GᵀG) of the parallelotope spanned by the vectors.
fn gram_volume(vectors: &[RVector]) -> f64 {
    let k = vectors.len();
    if k == 0 {
        return 1.0;
    }
    let g = DMatrix::from_fn(k, k, |r, c| vectors[r].dot(&vectors[c]));
    g.determinant().max(0.0).sqrt()
}

fn faces_parallelotope(
    d: usize,
    _base: &RVector,
    generators: &[RVector],
    k: usize,
) -> Result<Vec<Face>, PolytopeError> {
    let kg = generators.len();
    if kg < d {
        // Flat body: only its own top face is supported.
        if k != kg {
            return Err(PolytopeError::UnsupportedDimension { dim: d });
        }
        let basis = orthonormalize(generators)
            .map_err(|_| PolytopeError::DegeneratePolytope("dependent generators".into()))?;
        return Ok(vec![Face {
            dim: k,
            vertex_ids: (0..1 << kg).collect(),
            basis,
            volume: gram_volume(generators),
            exterior_angle: Some(1.0),
        }]);
    }
    if k > d {
        return Ok(Vec::new());
    }
    // Dual vectors: ⟨n_i, g_j⟩ = δ_ij.
    let gmat = DMatrix::from_fn(d, d, |r, c| generators[c][r]);
    let ninv = gmat
        .try_inverse()
        .ok_or_else(|| PolytopeError::DegeneratePolytope("singular generator matrix".into()))?;
    let duals: Vec<RVector> = (0..d)
        .map(|i| RVector::from_iterator(d, (0..d).map(|c| ninv[(i, c)])))
        .collect();

    let mut faces = Vec::new();
    for subset in subsets_of_size(d, k) {
        let span: Vec<RVector> = subset.iter().map(|&i| generators[i].clone()).collect();
        let basis = orthonormalize(&span)
            .map_err(|_| PolytopeError::DegeneratePolytope("dependent face span".into()))?;
        let volume = gram_volume(&span);
        let rest: Vec<usize> = (0..d).filter(|i| !subset.contains(i)).collect();
        for eps in 0..1usize << rest.len() {
            // Outward normal along generator i: +n_i at its far side, −n_i at the base side.
            let rays: Vec<RVector> = rest
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let sign = if eps >> pos & 1 == 1 { 1.0 } else { -1.0 };
                    let n = &duals[i];
                    n * (sign / n.norm())
                })
                .collect();
            let exterior_angle = exact_cone_fraction(&rays);
            let mut fixed = 0usize;
            for (pos, &i) in rest.iter().enumerate() {
                if eps >> pos & 1 == 1 {
                    fixed |= 1 << i;
                }
            }
            let vertex_ids: Vec<usize> = (0..1usize << k)
                .map(|m| {
                    let mut mask = fixed;
                    for (pos, &i) in subset.iter().enumerate() {
                        if m >> pos & 1 == 1 {
                            mask |= 1 << i;
                        }
                    }
                    mask
                })
                .collect();
            faces.push(Face {
                dim: k,
                vertex_ids,
                basis: basis.clone(),
                volume,
                exterior_angle,
            });
        }
    }
    Ok(faces)
}

/// Exact spherical fraction of the cone spanned by the given unit rays,
/// measured in the sphere of the normal space. Covers the cases with an
/// elementary answer: no rays (the whole body, fraction 1), a single ray
/// (1/2), a planar cone (angle/2π), and an orthant cone (2^{-q}).
pub(crate) fn exact_cone_fraction(rays: &[RVector]) -> Option<f64> {
    match rays.len() {
        0 => Some(1.0),
        1 => Some(0.5),
        2 => {
            let dot = (rays[0].dot(&rays[1])).clamp(-1.0, 1.0);
            Some(dot.acos() / (2.0 * std::f64::consts::PI))
        }
        q => {
            let orthogonal =
                (0..q).all(|i| (i + 1..q).all(|j| rays[i].dot(&rays[j]).abs() < 1e-12));
            if orthogonal {
                Some(0.5_f64.powi(q as i32))
            } else {
                None
            }
        }
    }
}

fn faces_simplex(vertices: &[RVector], k: usize) -> Result<Vec<Face>, PolytopeError> {
    let d = vertices[0].len();
    if k > d {
        return Ok(Vec::new());
    }
    let mut faces = Vec::new();
    for subset in subsets_of_size(vertices.len(), k + 1) {
        let pts: Vec<&RVector> = subset.iter().map(|&i| &vertices[i]).collect();
        let edges: Vec<RVector> = pts[1..].iter().map(|v| *v - pts[0]).collect();
        let basis = if k == 0 {
            Vec::new()
        } else {
            orthonormalize(&edges)
                .map_err(|_| PolytopeError::DegeneratePolytope("degenerate simplex face".into()))?
        };
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let volume = if k == 0 { 1.0 } else { gram_volume(&edges) / fact };
        let exterior_angle = match d - k {
            0 => Some(1.0),
            1 => Some(0.5),
            _ => None,
        };
        faces.push(Face {
            dim: k,
            vertex_ids: subset,
            basis,
            volume,
            exterior_angle,
        });
    }
    Ok(faces)
}

pub(crate) fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Zonotope: base point plus a Minkowski sum of segments [0, g_i].
#[derive(Debug, Clone)]
pub struct Zonotope {
    pub base: RVector,
    pub generators: Vec<RVector>,
}

impl Zonotope {
    pub fn new(base: RVector, generators: Vec<RVector>) -> Self {
        Zonotope { base, generators }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Volume: Σ over all d-subsets of |det| of the chosen generators.
    pub fn volume(&self) -> f64 {
        zonotope_volume(self.dim(), &self.generators)
    }

    /// Minkowski sum: concatenated generators, added base points.
    pub fn minkowski_sum(&self, other: &Zonotope) -> Result<Zonotope, PolytopeError> {
        if self.dim() != other.dim() {
            return Err(PolytopeError::DimensionMismatch);
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(Zonotope {
            base: &self.base + &other.base,
            generators,
        })
    }

    /// −Z as a zonotope.
    pub fn reflect(&self) -> Zonotope {
        Zonotope {
            base: -&self.base,
            generators: self.generators.iter().map(|g| -g).collect(),
        }
    }

    pub fn translate(&self, t: &RVector) -> Zonotope {
        Zonotope {
            base: &self.base + t,
            generators: self.generators.clone(),
        }
    }

    /// Componentwise interval hull [lo, hi].
    pub fn interval_hull(&self) -> (RVector, RVector) {
        let d = self.dim();
        let mut lo = self.base.clone();
        let mut hi = self.base.clone();
        for g in &self.generators {
            for i in 0..d {
                if g[i] < 0.0 {
                    lo[i] += g[i];
                } else {
                    hi[i] += g[i];
                }
            }
        }
        (lo, hi)
    }

    /// Support function h(Z, u) = max_{x ∈ Z} ⟨u, x⟩.
    pub fn support(&self, u: &RVector) -> f64 {
        let mut h = self.base.dot(u);
        for g in &self.generators {
            h += g.dot(u).max(0.0);
        }
        h
    }

    /// Unit facet normals via (d−1)-subsets of generators (generalized cross
    /// products); both orientations are returned.
    pub fn facet_normals(&self) -> Vec<RVector> {
        let d = self.dim();
        let mut normals = Vec::new();
        for subset in subsets_of_size(self.generators.len(), d - 1) {
            let vecs: Vec<&RVector> = subset.iter().map(|&i| &self.generators[i]).collect();
            if let Some(n) = generalized_cross(d, &vecs) {
                let norm = n.norm();
                if norm > 1e-12 {
                    normals.push(n.clone() / norm);
                    normals.push(-(n / norm));
                }
            }
        }
        normals
    }

    /// Membership test against precomputed facet normals.
    pub fn contains_with_normals(&self, x: &RVector, normals: &[RVector], tol: f64) -> bool {
        normals.iter().all(|u| x.dot(u) <= self.support(u) + tol)
    }
}

/// Σ over all d-subsets of |det|; the exact volume of a zonotope with the
/// given generators.
pub fn zonotope_volume(d: usize, generators: &[RVector]) -> f64 {
    let n = generators.len();
    if n < d {
        return 0.0;
    }
    let mut total = 0.0;
    let mut subset = vec![0usize; d];
    fn rec(
        start: usize,
        pos: usize,
        d: usize,
        n: usize,
        generators: &[RVector],
        subset: &mut Vec<usize>,
        total: &mut f64,
    ) {
        if pos == d {
            let m = DMatrix::from_fn(d, d, |r, c| generators[subset[c]][r]);
            *total += m.determinant().abs();
            return;
        }
        for i in start..n {
            if n - i < d - pos {
                break;
            }
            subset[pos] = i;
            rec(i + 1, pos + 1, d, n, generators, subset, total);
        }
    }
    rec(0, 0, d, n, generators, &mut subset, &mut total);
    total
}

/// Vector orthogonal to d−1 vectors in ℝ^d (cofactor expansion).
fn generalized_cross(d: usize, vecs: &[&RVector]) -> Option<RVector> {
    if vecs.len() != d - 1 {
        return None;
    }
    let mut out = RVector::zeros(d);
    for i in 0..d {
        let m = DMatrix::from_fn(d - 1, d - 1, |r, c| {
            let row = if r < i { r } else { r + 1 };
            vecs[c][row]
        });
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        out[i] = sign * m.determinant();
    }
    Some(out)
}

/// JSON input formats for polytopes.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolytopeJson {
    Vertices { vertices: Vec<Vec<f64>> },
    Halfspaces { halfspaces: Vec<Halfspace> },
    Parallelotope { parallelotope: ParallelotopeJson },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ParallelotopeJson {
    pub base: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn from_json(json: &PolytopeJson) -> Result<Polytope, PolytopeError> {
        match json {
            PolytopeJson::Vertices { vertices } => {
                let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
                Polytope::from_vertices(
                    dim,
                    vertices
                        .iter()
                        .map(|v| RVector::from_column_slice(v))
                        .collect(),
                )
            }
            PolytopeJson::Halfspaces { halfspaces } => {
                let dim = halfspaces.first().map(|h| h.normal.len()).unwrap_or(0);
                Polytope::from_halfspaces(dim, halfspaces.clone())
            }
            PolytopeJson::Parallelotope { parallelotope } => Polytope::parallelotope(
                RVector::from_column_slice(&parallelotope.base),
                parallelotope
                    .generators
                    .iter()
                    .map(|g| RVector::from_column_slice(g))
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests;
