//! Brute-force H-representation machinery in ℝ⁴.
//!
//! Vertices are enumerated as feasible intersections of 4 facet hyperplanes,
//! k-faces as vertex sets shared by (4−k) facets with the right affine rank,
//! and volumes cascade through the face lattice (polygon areas → facet
//! volumes → full volume). Everything is O(#facets⁴) at worst, which is what
//! the brute-force design wants at desk scale.

use super::{exact_cone_fraction, Face, Halfspace, Polytope, PolytopeError};
use crate::numkernel::{orthonormalize, RVector};

const FEAS_TOL: f64 = 1e-9;
const INCIDENCE_TOL: f64 = 1e-8;
const DEDUPE_TOL: f64 = 1e-8;

/// Result of an H-rep intersection.
#[derive(Debug, Clone)]
pub enum Intersection {
    Polytope(Polytope),
    Empty,
    LowerDimensional,
}

#[inline]
fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Solves the 4×4 system rows·x = rhs; None when numerically singular.
fn solve4(rows: &[[f64; 4]; 4], rhs: &[f64; 4]) -> Option<[f64; 4]> {
    let mut a = [[0.0f64; 5]; 4];
    for r in 0..4 {
        a[r][..4].copy_from_slice(&rows[r]);
        a[r][4] = rhs[r];
    }
    for k in 0..4 {
        let mut piv = k;
        let mut best = a[k][k].abs();
        for r in k + 1..4 {
            if a[r][k].abs() > best {
                best = a[r][k].abs();
                piv = r;
            }
        }
        if best < 1e-10 {
            return None;
        }
        a.swap(piv, k);
        let pivot = a[k][k];
        for r in k + 1..4 {
            let f = a[r][k] / pivot;
            if f != 0.0 {
                for c in k..5 {
                    a[r][c] -= f * a[k][c];
                }
            }
        }
    }
    let mut x = [0.0f64; 4];
    for k in (0..4).rev() {
        let mut s = a[k][4];
        for c in k + 1..4 {
            s -= a[k][c] * x[c];
        }
        x[k] = s / a[k][k];
    }
    Some(x)
}

/// All vertices of ∩ halfspaces, deduplicated. Empty when infeasible.
pub fn enumerate_vertices(halfspaces: &[Halfspace]) -> Result<Vec<[f64; 4]>, PolytopeError> {
    let m = halfspaces.len();
    if m > 64 {
        return Err(PolytopeError::DegeneratePolytope(format!(
            "{m} halfspaces exceed the brute-force budget"
        )));
    }
    let normals: Vec<[f64; 4]> = halfspaces
        .iter()
        .map(|h| [h.normal[0], h.normal[1], h.normal[2], h.normal[3]])
        .collect();
    let offsets: Vec<f64> = halfspaces.iter().map(|h| h.offset).collect();
    let scale = 1.0 + offsets.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let feas = FEAS_TOL * scale;
    let dedupe = DEDUPE_TOL * scale;

    let mut vertices: Vec<[f64; 4]> = Vec::new();
    let mut idx = [0usize; 4];
    for a in 0..m {
        idx[0] = a;
        for b in a + 1..m {
            idx[1] = b;
            for c in b + 1..m {
                idx[2] = c;
                for d in c + 1..m {
                    idx[3] = d;
                    let rows = [normals[a], normals[b], normals[c], normals[d]];
                    let rhs = [offsets[a], offsets[b], offsets[c], offsets[d]];
                    let Some(x) = solve4(&rows, &rhs) else {
                        continue;
                    };
                    if !x.iter().all(|v| v.is_finite()) {
                        continue;
                    }
                    let mut ok = true;
                    for i in 0..m {
                        if dot4(&normals[i], &x) > offsets[i] + feas {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let duplicate = vertices.iter().any(|v| {
                        (v[0] - x[0]).abs() < dedupe
                            && (v[1] - x[1]).abs() < dedupe
                            && (v[2] - x[2]).abs() < dedupe
                            && (v[3] - x[3]).abs() < dedupe
                    });
                    if !duplicate {
                        vertices.push(x);
                    }
                }
            }
        }
    }
    Ok(vertices)
}

/// Incidence bitmask per vertex: bit i set when the vertex lies on facet i.
fn incidence(vertices: &[RVector], halfspaces: &[Halfspace]) -> Vec<u64> {
    let scale = 1.0
        + halfspaces
            .iter()
            .fold(0.0f64, |acc, h| acc.max(h.offset.abs()));
    let tol = INCIDENCE_TOL * scale;
    vertices
        .iter()
        .map(|v| {
            let mut mask = 0u64;
            for (i, h) in halfspaces.iter().enumerate() {
                let d: f64 = h.normal.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                if (d - h.offset).abs() <= tol {
                    mask |= 1 << i;
                }
            }
            mask
        })
        .collect()
}

fn affine_basis(points: &[&RVector]) -> Option<Vec<RVector>> {
    let edges: Vec<RVector> = points[1..].iter().map(|p| *p - points[0]).collect();
    // Greedy Gram–Schmidt keeping independent directions.
    let mut basis: Vec<RVector> = Vec::new();
    for e in &edges {
        let mut w = e.clone();
        for b in &basis {
            let c = w.dot(b);
            w -= b * c;
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / norm);
        }
    }
    Some(basis)
}

/// Convex polygon area from its vertices (which lie in a 2-plane).
fn polygon_area(points: &[&RVector], basis: &[RVector]) -> f64 {
    let n = points.len();
    let centroid: RVector = points.iter().fold(RVector::zeros(points[0].len()), |a, p| a + *p) / n as f64;
    let mut coords: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            let d = *p - &centroid;
            (d.dot(&basis[0]), d.dot(&basis[1]))
        })
        .collect();
    coords.sort_by(|a, b| {
        a.1.atan2(a.0)
            .partial_cmp(&b.1.atan2(b.0))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut area = 0.0;
    for i in 0..n {
        let (x1, y1) = coords[i];
        let (x2, y2) = coords[(i + 1) % n];
        area += x1 * y2 - x2 * y1;
    }
    area.abs() / 2.0
}

/// Faces shared by `need` facets with affine rank k; deduplicated by vertex set.
fn candidate_faces(
    vertices: &[RVector],
    inc: &[u64],
    active: &[usize],
    k: usize,
) -> Vec<(Vec<usize>, u64)> {
    let need = 4 - k;
    let mut found: Vec<(Vec<usize>, u64)> = Vec::new();
    for subset in super::subsets_of_size(active.len(), need) {
        let mask: u64 = subset.iter().map(|&i| 1u64 << active[i]).sum();
        let ids: Vec<usize> = (0..vertices.len())
            .filter(|&v| inc[v] & mask == mask)
            .collect();
        if ids.len() < k + 1 {
            continue;
        }
        let pts: Vec<&RVector> = ids.iter().map(|&i| &vertices[i]).collect();
        let basis = affine_basis(&pts).unwrap_or_default();
        if basis.len() != k {
            continue;
        }
        if let Some(existing) = found.iter_mut().find(|(v, _)| *v == ids) {
            existing.1 |= mask;
            continue;
        }
        found.push((ids, mask));
    }
    found
}

/// Angular fraction of a 2-dimensional normal cone spanned by facet normals.
fn planar_cone_fraction(normals: &[RVector]) -> f64 {
    let mut width = 0.0f64;
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let dot = normals[i].dot(&normals[j]).clamp(-1.0, 1.0);
            width = width.max(dot.acos());
        }
    }
    width / (2.0 * std::f64::consts::PI)
}

/// Complete k-face list of a general H-rep polytope in ℝ⁴.
pub fn faces_general(
    vertices: &[RVector],
    halfspaces: &[Halfspace],
    k: usize,
) -> Result<Vec<Face>, PolytopeError> {
    if vertices.is_empty() {
        return Err(PolytopeError::NoVertices);
    }
    if k > 4 {
        return Ok(Vec::new());
    }
    if k == 4 {
        let basis: Vec<RVector> = (0..4)
            .map(|i| {
                let mut e = RVector::zeros(4);
                e[i] = 1.0;
                e
            })
            .collect();
        return Ok(vec![Face {
            dim: 4,
            vertex_ids: (0..vertices.len()).collect(),
            basis,
            volume: volume4(vertices, halfspaces)?,
            exterior_angle: Some(1.0),
        }]);
    }
    let inc = incidence(vertices, halfspaces);
    if k == 0 {
        return Ok((0..vertices.len())
            .map(|i| Face {
                dim: 0,
                vertex_ids: vec![i],
                basis: Vec::new(),
                volume: 1.0,
                exterior_angle: None,
            })
            .collect());
    }

    // Active facets: support at least a 3-dimensional vertex set.
    let active: Vec<usize> = (0..halfspaces.len())
        .filter(|&i| {
            let ids: Vec<&RVector> = (0..vertices.len())
                .filter(|&v| inc[v] >> i & 1 == 1)
                .map(|v| &vertices[v])
                .collect();
            ids.len() >= 4 && affine_basis(&ids).map(|b| b.len()) == Some(3)
        })
        .collect();

    let mut faces = Vec::new();
    for (ids, _mask) in candidate_faces(vertices, &inc, &active, k) {
        let pts: Vec<&RVector> = ids.iter().map(|&i| &vertices[i]).collect();
        let basis = affine_basis(&pts).ok_or(PolytopeError::NoVertices)?;
        // All facets containing every vertex of the face span its normal cone.
        let common = ids.iter().fold(u64::MAX, |acc, &i| acc & inc[i]);
        let cone_normals: Vec<RVector> = active
            .iter()
            .filter(|&&f| common >> f & 1 == 1)
            .map(|&f| RVector::from_column_slice(&halfspaces[f].normal))
            .collect();
        let exterior_angle = match k {
            3 => Some(0.5),
            2 => {
                if cone_normals.len() == 2 {
                    exact_cone_fraction(&cone_normals)
                } else if cone_normals.len() > 2 {
                    Some(planar_cone_fraction(&cone_normals))
                } else {
                    None
                }
            }
            _ => None,
        };
        let volume = match k {
            1 => {
                let dir = &basis[0];
                let vals: Vec<f64> = pts.iter().map(|p| p.dot(dir)).collect();
                vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - vals.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            2 => polygon_area(&pts, &basis),
            3 => facet_volume(&ids, &basis, vertices, &inc, &active),
            _ => unreachable!(),
        };
        faces.push(Face {
            dim: k,
            vertex_ids: ids,
            basis,
            volume,
            exterior_angle,
        });
    }
    Ok(faces)
}

/// Volume of a 3-face: (1/3) Σ over its polygonal 2-faces of
/// dist(facet centroid, polygon plane) · area.
fn facet_volume(
    facet_ids: &[usize],
    facet_basis: &[RVector],
    vertices: &[RVector],
    inc: &[u64],
    active: &[usize],
) -> f64 {
    let centroid: RVector = facet_ids
        .iter()
        .fold(RVector::zeros(4), |a, &i| a + &vertices[i])
        / facet_ids.len() as f64;
    let inside_set: std::collections::HashSet<usize> = facet_ids.iter().copied().collect();
    let mut vol = 0.0;
    for (ids, _) in candidate_faces(vertices, inc, active, 2) {
        if !ids.iter().all(|i| inside_set.contains(i)) {
            continue;
        }
        let pts: Vec<&RVector> = ids.iter().map(|&i| &vertices[i]).collect();
        let Some(basis) = affine_basis(&pts) else { continue };
        if basis.len() != 2 {
            continue;
        }
        let area = polygon_area(&pts, &basis);
        // Component of (polygon centroid − facet centroid) orthogonal to the
        // polygon plane within the facet 3-space.
        let pc: RVector = pts.iter().fold(RVector::zeros(4), |a, p| a + *p) / pts.len() as f64;
        let mut w = pc - &centroid;
        // Restrict to the facet 3-space, then remove the in-plane part.
        let mut in_facet = RVector::zeros(4);
        for b in facet_basis {
            in_facet += b * w.dot(b);
        }
        w = in_facet;
        for b in &basis {
            let c = w.dot(b);
            w -= b * c;
        }
        vol += w.norm() * area;
    }
    vol / 3.0
}

/// Volume of a full-dimensional H-rep polytope in ℝ⁴:
/// (1/4) Σ over facets of dist(centroid, facet plane) · facet volume.
pub fn volume4(vertices: &[RVector], halfspaces: &[Halfspace]) -> Result<f64, PolytopeError> {
    if vertices.len() < 5 {
        return Ok(0.0);
    }
    let faces3 = faces_general(vertices, halfspaces, 3)?;
    let centroid: RVector =
        vertices.iter().fold(RVector::zeros(4), |a, p| a + p) / vertices.len() as f64;
    let mut vol = 0.0;
    for f in &faces3 {
        let pts: Vec<&RVector> = f.vertex_ids.iter().map(|&i| &vertices[i]).collect();
        let face_centroid: RVector =
            pts.iter().fold(RVector::zeros(4), |a, p| a + *p) / pts.len() as f64;
        let mut w = face_centroid - &centroid;
        for b in &f.basis {
            let c = w.dot(b);
            w -= b * c;
        }
        vol += w.norm() * f.volume;
    }
    Ok(vol / 4.0)
}

/// H-representation of the convex hull of points in ℝ⁴ by brute force over
/// vertex 4-subsets spanning candidate facet hyperplanes.
pub fn hull4(points: &[RVector]) -> Result<Vec<Halfspace>, PolytopeError> {
    let n = points.len();
    if n < 5 {
        return Err(PolytopeError::DegeneratePolytope(
            "need at least 5 points for a full-dimensional hull in ℝ⁴".into(),
        ));
    }
    let scale = 1.0 + points.iter().map(|p| p.norm()).fold(0.0f64, f64::max);
    let tol = 1e-9 * scale;
    let mut halfspaces: Vec<Halfspace> = Vec::new();
    for subset in super::subsets_of_size(n, 4) {
        let pts: Vec<&RVector> = subset.iter().map(|&i| &points[i]).collect();
        let edges: Vec<RVector> = pts[1..].iter().map(|p| *p - pts[0]).collect();
        let Ok(basis) = orthonormalize(&edges) else { continue };
        if basis.len() != 3 {
            continue;
        }
        // Normal: orthogonal complement of the 3 edge directions.
        let mut normal = None;
        for axis in 0..4 {
            let mut e = RVector::zeros(4);
            e[axis] = 1.0;
            for b in &basis {
                let c = e.dot(b);
                e -= b * c;
            }
            let norm = e.norm();
            if norm > 1e-6 {
                normal = Some(e / norm);
                break;
            }
        }
        let Some(mut normal) = normal else { continue };
        let mut offset = normal.dot(pts[0]);
        // Orient outward; reject if points lie on both sides.
        let (mut above, mut below) = (false, false);
        for p in points {
            let d = normal.dot(p) - offset;
            if d > tol {
                above = true;
            } else if d < -tol {
                below = true;
            }
        }
        if above && below {
            continue;
        }
        if above {
            normal = -normal;
            offset = -offset;
        }
        let duplicate = halfspaces.iter().any(|h| {
            let nd: f64 = h
                .normal
                .iter()
                .zip(normal.iter())
                .map(|(a, b)| a * b)
                .sum();
            nd > 1.0 - 1e-9 && (h.offset - offset).abs() < tol
        });
        if !duplicate {
            halfspaces.push(Halfspace {
                normal: normal.iter().copied().collect(),
                offset,
            });
        }
    }
    if halfspaces.len() < 5 {
        return Err(PolytopeError::DegeneratePolytope(
            "points do not span a full-dimensional polytope".into(),
        ));
    }
    Ok(halfspaces)
}

/// Builds the intersection polytope from a combined halfspace list.
pub fn intersection_from_halfspaces(
    halfspaces: Vec<Halfspace>,
) -> Result<Intersection, PolytopeError> {
    let verts = enumerate_vertices(&halfspaces)?;
    if verts.is_empty() {
        return Ok(Intersection::Empty);
    }
    let vertices: Vec<RVector> = verts
        .iter()
        .map(|v| RVector::from_column_slice(&v[..]))
        .collect();
    if vertices.len() < 5 {
        return Ok(Intersection::LowerDimensional);
    }
    let refs: Vec<&RVector> = vertices.iter().collect();
    if affine_basis(&refs).map(|b| b.len()) != Some(4) {
        return Ok(Intersection::LowerDimensional);
    }
    Ok(Intersection::Polytope(Polytope {
        dim: 4,
        vertices,
        halfspaces: Some(halfspaces),
        kind: super::BodyKind::General,
    }))
}
