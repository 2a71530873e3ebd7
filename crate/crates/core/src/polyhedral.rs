//! Polyhedral normed spaces.
//!
//! A [`NormedSpace`] is a finite-dimensional real space whose closed unit
//! ball is a centrally symmetric full-dimensional rational polytope, carried
//! in both representations at once: the vertex list and the facet list. Each
//! facet normal `a` is normalized so the facet lies on `{x : a·x = 1}`;
//! the induced norm is then the gauge `‖v‖ = max_i a_i·v`, evaluated
//! exactly.
//!
//! Construction accepts either representation (or both, cross-validated)
//! and derives the missing one by exhaustive subset enumeration: every facet
//! of a full-dimensional polytope whose hyperplane avoids the origin is
//! determined by `dim` linearly independent incident vertices, and dually
//! every vertex by `dim` independent tight facets. This is exponential in
//! `dim` but exact; practical for `dim <= 4` and a few dozen vertices.

use crate::linalg::{combinations, Covector, Matrix, Vector};
use crate::scalar::Scalar;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// One facet of the unit ball: its normalized supporting functional and the
/// ids of the ball vertices lying on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Covector,
    /// Ascending vertex ids with `normal · vertex = 1`.
    pub incident: Vec<usize>,
}

/// Symmetric full-dimensional polytope in both representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polytope {
    pub vertices: Vec<Vector>,
    /// Sorted by incident vertex-id list, lexicographically. This canonical
    /// order makes facet ids stable across rebuilds of the same space.
    pub facets: Vec<Facet>,
}

/// Finite-dimensional normed space with a polytope unit ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dim: usize,
    pub ball: Polytope,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("no vertices or facet normals supplied")]
    EmptyInput,
    #[error("expected dimension {expected}, got an entry of dimension {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not centrally symmetric: {witness:?} has no mirror image")]
    NotSymmetric { witness: Vector },
    #[error("origin is not strictly interior to the ball")]
    OriginNotInterior,
    #[error("ball is not full-dimensional: degenerate along {missing_direction:?}")]
    NotFullDimensional { missing_direction: Vector },
    #[error("halfspace intersection is unbounded along the ray {ray:?}")]
    Unbounded { ray: Vector },
    #[error("vertex and facet data disagree: {detail}")]
    RepresentationMismatch { detail: String },
}

impl NormedSpace {
    /// Gauge norm `max_i a_i·v` over facet normals. Exact; zero iff `v = 0`.
    /// Panics on dimension mismatch; dimensions are validated at
    /// construction and document-parse boundaries.
    pub fn norm(&self, v: &Vector) -> Scalar {
        assert_eq!(v.dim(), self.dim, "vector dimension mismatch");
        self.ball
            .facets
            .iter()
            .map(|f| f.normal.apply(v))
            .max()
            .expect("a valid space has at least one facet")
    }

    /// Dual norm `max_v w·v` over ball vertices.
    pub fn dual_norm(&self, w: &Covector) -> Scalar {
        assert_eq!(w.dim(), self.dim, "covector dimension mismatch");
        self.ball
            .vertices
            .iter()
            .map(|v| w.apply(v))
            .max()
            .expect("a valid space has at least one vertex")
    }

    /// True iff `‖v‖ = 1`.
    pub fn sphere_membership(&self, v: &Vector) -> bool {
        self.norm(v).is_one()
    }

    pub fn facet(&self, id: usize) -> &Facet {
        &self.ball.facets[id]
    }

    pub fn vertex(&self, id: usize) -> &Vector {
        &self.ball.vertices[id]
    }

    pub fn facet_count(&self) -> usize {
        self.ball.facets.len()
    }
}

/// Build a space from vertices, facet normals, or both (cross-validated).
///
/// Validation order: emptiness, entry dimensions, duplicates, central
/// symmetry, full-dimensionality (vertex path) or boundedness (facet path),
/// then representation consistency.
pub fn build_space(
    dim: usize,
    vertices: Option<Vec<Vector>>,
    facet_normals: Option<Vec<Covector>>,
) -> Result<NormedSpace, SpaceError> {
    if dim == 0 {
        return Err(SpaceError::EmptyInput);
    }
    match (vertices, facet_normals) {
        (None, None) => Err(SpaceError::EmptyInput),
        (Some(v), None) => from_vertices(dim, v),
        (None, Some(a)) => from_facets(dim, a),
        (Some(v), Some(a)) => {
            let space = from_vertices(dim, v)?;
            cross_validate(&space, &a)?;
            Ok(space)
        }
    }
}

fn from_vertices(dim: usize, points: Vec<Vector>) -> Result<NormedSpace, SpaceError> {
    if points.is_empty() {
        return Err(SpaceError::EmptyInput);
    }
    for p in &points {
        if p.dim() != dim {
            return Err(SpaceError::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
    }
    for (i, p) in points.iter().enumerate() {
        if points[..i].contains(p) {
            return Err(SpaceError::RepresentationMismatch {
                detail: format!("duplicate vertex {p:?}"),
            });
        }
    }
    for p in &points {
        if !points.contains(&-p) {
            return Err(SpaceError::NotSymmetric { witness: p.clone() });
        }
    }
    let point_rows = Matrix::from_rows(&points.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
    if let Some(d) = point_rows.nullspace_vector() {
        return Err(SpaceError::NotFullDimensional {
            missing_direction: d,
        });
    }
    let facets = facets_from_points(dim, &points);
    // A symmetric full-dimensional hull always has the origin strictly
    // inside, hence at least one facet with offset 1; this guard is for the
    // invariant, not an expected path.
    if facets.is_empty() {
        return Err(SpaceError::OriginNotInterior);
    }
    // Every input point must be extreme: a hull point is a vertex iff its
    // tight facet normals span the whole space.
    for (i, p) in points.iter().enumerate() {
        let tight: Vec<Vec<Scalar>> = facets
            .iter()
            .filter(|f| f.incident.binary_search(&i).is_ok())
            .map(|f| f.normal.0.clone())
            .collect();
        if tight.is_empty() || Matrix::from_rows(&tight).rank() < dim {
            return Err(SpaceError::RepresentationMismatch {
                detail: format!("input point {p:?} is not a vertex of its convex hull"),
            });
        }
    }
    Ok(NormedSpace {
        dim,
        ball: Polytope {
            vertices: points,
            facets,
        },
    })
}

/// All facets of `conv(points)`, assuming the hull is symmetric and
/// full-dimensional: solve `a·v = 1` on each `dim`-subset with linearly
/// independent points and keep solutions valid on every point.
fn facets_from_points(dim: usize, points: &[Vector]) -> Vec<Facet> {
    let one = Scalar::one();
    let ones = Vector(vec![one.clone(); dim]);
    let mut normals: BTreeSet<Covector> = BTreeSet::new();
    for subset in combinations(points.len(), dim) {
        let m = Matrix::from_rows(&subset.iter().map(|&i| points[i].0.clone()).collect::<Vec<_>>());
        let Ok(inv) = m.inverse() else { continue };
        let a = Covector(inv.apply(&ones).0);
        if points.iter().all(|p| a.apply(p) <= one) {
            normals.insert(a);
        }
    }
    let mut facets: Vec<Facet> = normals
        .into_iter()
        .map(|a| {
            let incident = points
                .iter()
                .enumerate()
                .filter(|(_, p)| a.apply(p) == one)
                .map(|(i, _)| i)
                .collect();
            Facet { normal: a, incident }
        })
        .collect();
    facets.sort_by(|f, g| f.incident.cmp(&g.incident));
    facets
}

fn from_facets(dim: usize, normals: Vec<Covector>) -> Result<NormedSpace, SpaceError> {
    if normals.is_empty() {
        return Err(SpaceError::EmptyInput);
    }
    for a in &normals {
        if a.dim() != dim {
            return Err(SpaceError::DimensionMismatch {
                expected: dim,
                got: a.dim(),
            });
        }
    }
    for (i, a) in normals.iter().enumerate() {
        if normals[..i].contains(a) {
            return Err(SpaceError::RepresentationMismatch {
                detail: format!("duplicate facet normal {a:?}"),
            });
        }
    }
    for a in &normals {
        if !normals.contains(&-a) {
            return Err(SpaceError::NotSymmetric {
                witness: Vector(a.0.clone()),
            });
        }
    }
    // With a symmetric normal list the recession cone is the common kernel,
    // so the intersection is bounded iff the normals span the space.
    let normal_rows = Matrix::from_rows(&normals.iter().map(|a| a.0.clone()).collect::<Vec<_>>());
    if let Some(ray) = normal_rows.nullspace_vector() {
        return Err(SpaceError::Unbounded { ray });
    }
    let one = Scalar::one();
    let ones = Vector(vec![one.clone(); dim]);
    let mut vertex_set: BTreeSet<Vector> = BTreeSet::new();
    for subset in combinations(normals.len(), dim) {
        let m = Matrix::from_rows(&subset.iter().map(|&i| normals[i].0.clone()).collect::<Vec<_>>());
        let Ok(inv) = m.inverse() else { continue };
        let x = inv.apply(&ones);
        if normals.iter().all(|a| a.apply(&x) <= one) {
            vertex_set.insert(x);
        }
    }
    // Lexicographic vertex order: the canonical ids for a derived vertex set.
    let vertices: Vec<Vector> = vertex_set.into_iter().collect();
    let mut facets = Vec::with_capacity(normals.len());
    for a in &normals {
        let incident: Vec<usize> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| a.apply(v) == one)
            .map(|(i, _)| i)
            .collect();
        let tight: Vec<Vec<Scalar>> = incident.iter().map(|&i| vertices[i].0.clone()).collect();
        // An inequality supports a facet iff its tight vertices span dim
        // linear dimensions (their affine hull misses the origin).
        if tight.is_empty() || Matrix::from_rows(&tight).rank() < dim {
            return Err(SpaceError::RepresentationMismatch {
                detail: format!("normal {a:?} does not support a facet of the intersection"),
            });
        }
        facets.push(Facet {
            normal: a.clone(),
            incident,
        });
    }
    facets.sort_by(|f, g| f.incident.cmp(&g.incident));
    Ok(NormedSpace {
        dim,
        ball: Polytope { vertices, facets },
    })
}

fn cross_validate(space: &NormedSpace, given: &[Covector]) -> Result<(), SpaceError> {
    let derived: BTreeSet<&Covector> = space.ball.facets.iter().map(|f| &f.normal).collect();
    let given_set: BTreeSet<&Covector> = given.iter().collect();
    if let Some(a) = given_set.difference(&derived).next() {
        return Err(SpaceError::RepresentationMismatch {
            detail: format!("given normal {a:?} is not a facet of the vertex hull"),
        });
    }
    if let Some(a) = derived.difference(&given_set).next() {
        return Err(SpaceError::RepresentationMismatch {
            detail: format!("hull facet {a:?} is missing from the given normals"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn square_vertices() -> Vec<Vector> {
        [[1, 1], [1, -1], [-1, 1], [-1, -1]]
            .iter()
            .map(|c| Vector::from_ints(c))
            .collect()
    }

    fn square() -> NormedSpace {
        build_space(2, Some(square_vertices()), None).unwrap()
    }

    #[test]
    fn square_has_four_axis_facets() {
        let s = square();
        assert_eq!(s.facet_count(), 4);
        let normals: Vec<&Covector> = s.ball.facets.iter().map(|f| &f.normal).collect();
        for c in [[1, 0], [0, 1], [0, -1], [-1, 0]] {
            assert!(normals.contains(&&Covector::from_ints(&c)));
        }
        // Canonical order sorts by incident id lists.
        let incidents: Vec<&[usize]> = s.ball.facets.iter().map(|f| &f.incident[..]).collect();
        assert_eq!(incidents, vec![&[0, 1][..], &[0, 2], &[1, 3], &[2, 3]]);
    }

    #[test]
    fn square_norm_examples() {
        let s = square();
        assert_eq!(s.norm(&Vector(vec![rat(1, 2), int(-1)])), int(1));
        assert_eq!(s.norm(&Vector::zero(2)), int(0));
        assert_eq!(s.norm(&Vector::from_ints(&[3, -2])), int(3));
    }

    #[test]
    fn square_dual_norm_examples() {
        let s = square();
        assert_eq!(s.dual_norm(&Covector::from_ints(&[1, 0])), int(1));
        assert_eq!(s.dual_norm(&Covector::from_ints(&[1, 1])), int(2));
        assert_eq!(s.dual_norm(&Covector::zero(2)), int(0));
        for f in &s.ball.facets {
            assert_eq!(s.dual_norm(&f.normal), int(1));
        }
    }

    #[test]
    fn square_sphere_membership() {
        let s = square();
        assert!(s.sphere_membership(&Vector(vec![int(1), rat(1, 3)])));
        assert!(!s.sphere_membership(&Vector(vec![rat(1, 2), rat(1, 2)])));
    }

    #[test]
    fn asymmetric_input_rejected_with_witness() {
        let pts = vec![
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[0, 1]),
            Vector::from_ints(&[-1, 0]),
        ];
        assert_eq!(
            build_space(2, Some(pts), None),
            Err(SpaceError::NotSymmetric {
                witness: Vector::from_ints(&[0, 1])
            })
        );
    }

    #[test]
    fn cross_polytope_after_symmetry_fix() {
        let pts = vec![
            Vector::from_ints(&[1, 0]),
            Vector::from_ints(&[0, 1]),
            Vector::from_ints(&[-1, 0]),
            Vector::from_ints(&[0, -1]),
        ];
        let s = build_space(2, Some(pts), None).unwrap();
        assert_eq!(s.facet_count(), 4);
        for c in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert!(s.ball.facets.iter().any(|f| f.normal == Covector::from_ints(&c)));
        }
    }

    #[test]
    fn rebuild_from_vertices_reproduces_facets() {
        let s = square();
        let rebuilt = build_space(2, Some(s.ball.vertices.clone()), None).unwrap();
        assert_eq!(rebuilt.ball.facets, s.ball.facets);
    }

    #[test]
    fn facet_input_derives_lex_sorted_vertices() {
        let normals = vec![
            Covector::from_ints(&[1, 0]),
            Covector::from_ints(&[-1, 0]),
            Covector::from_ints(&[0, 1]),
            Covector::from_ints(&[0, -1]),
        ];
        let s = build_space(2, None, Some(normals)).unwrap();
        let expected: Vec<Vector> = [[-1, -1], [-1, 1], [1, -1], [1, 1]]
            .iter()
            .map(|c| Vector::from_ints(c))
            .collect();
        assert_eq!(s.ball.vertices, expected);
        assert_eq!(s.facet_count(), 4);
        assert_eq!(s.norm(&Vector::from_ints(&[2, 1])), int(2));
    }

    #[test]
    fn both_representations_cross_validated() {
        let normals = vec![
            Covector::from_ints(&[1, 0]),
            Covector::from_ints(&[-1, 0]),
            Covector::from_ints(&[0, 1]),
            Covector::from_ints(&[0, -1]),
        ];
        assert!(build_space(2, Some(square_vertices()), Some(normals.clone())).is_ok());

        let mut extra = normals;
        extra.push(Covector(vec![rat(1, 2), rat(1, 2)]));
        extra.push(Covector(vec![rat(-1, 2), rat(-1, 2)]));
        assert!(matches!(
            build_space(2, Some(square_vertices()), Some(extra)),
            Err(SpaceError::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn unbounded_slab_rejected() {
        let normals = vec![Covector::from_ints(&[1, 0]), Covector::from_ints(&[-1, 0])];
        assert_eq!(
            build_space(2, None, Some(normals)),
            Err(SpaceError::Unbounded {
                ray: Vector::from_ints(&[0, 1])
            })
        );
    }

    #[test]
    fn degenerate_segment_rejected() {
        let pts = vec![Vector::from_ints(&[1, 1]), Vector::from_ints(&[-1, -1])];
        assert!(matches!(
            build_space(2, Some(pts), None),
            Err(SpaceError::NotFullDimensional { .. })
        ));
    }

    #[test]
    fn duplicate_and_interior_points_rejected() {
        let mut dup = square_vertices();
        dup.push(Vector::from_ints(&[1, 1]));
        assert!(matches!(
            build_space(2, Some(dup), None),
            Err(SpaceError::RepresentationMismatch { .. })
        ));

        let mut non_extreme = square_vertices();
        non_extreme.push(Vector::from_ints(&[1, 0]));
        non_extreme.push(Vector::from_ints(&[-1, 0]));
        assert!(matches!(
            build_space(2, Some(non_extreme), None),
            Err(SpaceError::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn redundant_normal_rejected() {
        let normals = vec![
            Covector::from_ints(&[1, 0]),
            Covector::from_ints(&[-1, 0]),
            Covector::from_ints(&[0, 1]),
            Covector::from_ints(&[0, -1]),
            Covector(vec![rat(1, 3), rat(1, 3)]),
            Covector(vec![rat(-1, 3), rat(-1, 3)]),
        ];
        assert!(matches!(
            build_space(2, None, Some(normals)),
            Err(SpaceError::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn empty_inputs_rejected() {
        assert_eq!(build_space(2, None, None), Err(SpaceError::EmptyInput));
        assert_eq!(build_space(2, Some(vec![]), None), Err(SpaceError::EmptyInput));
        assert_eq!(build_space(0, Some(square_vertices()), None), Err(SpaceError::EmptyInput));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let pts = vec![Vector::from_ints(&[1, 0, 0]), Vector::from_ints(&[-1, 0, 0])];
        assert_eq!(
            build_space(2, Some(pts), None),
            Err(SpaceError::DimensionMismatch { expected: 2, got: 3 })
        );
    }
}
