//! Exact vertex enumeration for rational polytopes given by halfspace cuts.
//!
//! The driver here is the max-of-norms unit ball: it is the sup-norm ball
//! (whose vertices are already known in closed form) intersected with
//! finitely many seminorm slabs. [`DdState`] therefore works incrementally:
//! it starts from a polytope with known vertices and known tight
//! constraints and refines the vertex set one halfspace at a time, in the
//! style of the double description method. Adjacency of vertices is decided
//! combinatorially from tight-set bitsets, and crossing points are computed
//! exactly over the rationals.
//!
//! [`vertices_naive`] is the independent oracle: enumerate every
//! `dim`-subset of constraints, solve the tight system, and keep feasible
//! solutions. Exponential, test-only scale.

use crate::linalg::{combinations, Covector, Matrix, Vector};
use crate::scalar::Scalar;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// `normals[i] · x ≤ offsets[i]` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    pub normals: Vec<Covector>,
    pub offsets: Vec<Scalar>,
}

impl HPolytope {
    pub fn new(normals: Vec<Covector>, offsets: Vec<Scalar>) -> Self {
        assert_eq!(normals.len(), offsets.len(), "one offset per normal");
        HPolytope { normals, offsets }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| &a.apply(v) <= b)
    }
}

/// Constraint-index set of a vertex, packed as bitset words.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TightSet(Vec<u64>);

impl TightSet {
    fn with_capacity(bits: usize) -> Self {
        TightSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &TightSet) -> TightSet {
        TightSet(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a & b)
                .collect(),
        )
    }

    fn is_subset_of(&self, other: &TightSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// Incremental vertex enumeration state: a bounded full-dimensional
/// polytope held in double description (constraints + vertices), refined
/// by [`DdState::add_constraint`].
#[derive(Debug, Clone)]
pub struct DdState {
    dim: usize,
    constraints: HPolytope,
    vertices: Vec<Vector>,
    tight: Vec<TightSet>,
}

impl DdState {
    /// Start from a polytope whose double description is already known.
    /// `vertices` must be exactly the vertex set of
    /// `{x : constraints hold}`, which must be bounded with nonempty
    /// interior; tight sets are recomputed here rather than trusted.
    pub fn from_known(dim: usize, vertices: Vec<Vector>, constraints: HPolytope) -> Self {
        let mut state = DdState {
            dim,
            constraints,
            vertices,
            tight: Vec::new(),
        };
        state.recompute_tight_sets();
        state
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Vector> {
        self.vertices
    }

    pub fn constraints(&self) -> &HPolytope {
        &self.constraints
    }

    fn recompute_tight_sets(&mut self) {
        let m = self.constraints.len();
        self.tight = self
            .vertices
            .iter()
            .map(|v| {
                let mut t = TightSet::with_capacity(m);
                for i in 0..m {
                    if self.constraints.normals[i].apply(v) == self.constraints.offsets[i] {
                        t.insert(i);
                    }
                }
                t
            })
            .collect();
    }

    /// Combinatorial adjacency: `u` and `w` share an edge iff no third
    /// vertex is tight on everything they are both tight on. Valid for
    /// bounded full-dimensional polytopes.
    fn adjacent(&self, u: usize, w: usize) -> bool {
        let common = self.tight[u].intersection(&self.tight[w]);
        self.vertices
            .iter()
            .enumerate()
            .all(|(k, _)| k == u || k == w || !common.is_subset_of(&self.tight[k]))
    }

    /// Cut with `a · x ≤ b`. Vertices strictly outside are dropped and each
    /// cut edge contributes its exact crossing point.
    pub fn add_constraint(&mut self, a: Covector, b: Scalar) {
        let slack: Vec<Scalar> = self
            .vertices
            .iter()
            .map(|v| b.clone() - a.apply(v))
            .collect();
        if slack.iter().all(|s| !s.is_negative()) {
            // Nothing cut; the constraint may still be tight somewhere.
            self.constraints.normals.push(a);
            self.constraints.offsets.push(b);
            self.recompute_tight_sets();
            return;
        }
        let mut new_points: BTreeSet<Vec<Scalar>> = BTreeSet::new();
        for u in 0..self.vertices.len() {
            if slack[u].is_negative() {
                continue;
            }
            for w in 0..self.vertices.len() {
                if !slack[w].is_negative() || !self.adjacent(u, w) {
                    continue;
                }
                // slack[u] ≥ 0 > slack[w]; the edge crosses the hyperplane
                // at t = slack_u / (slack_u − slack_w) ∈ [0, 1).
                let t = slack[u].clone() / (slack[u].clone() - slack[w].clone());
                let cross: Vec<Scalar> = (0..self.dim)
                    .map(|i| {
                        self.vertices[u][i].clone()
                            + t.clone() * (self.vertices[w][i].clone() - self.vertices[u][i].clone())
                    })
                    .collect();
                new_points.insert(cross);
            }
        }
        let mut kept: Vec<Vector> = Vec::new();
        for (v, s) in self.vertices.drain(..).zip(&slack) {
            if !s.is_negative() {
                kept.push(v);
            }
        }
        for p in new_points {
            let v = Vector(p);
            if !kept.contains(&v) {
                kept.push(v);
            }
        }
        self.vertices = kept;
        self.constraints.normals.push(a);
        self.constraints.offsets.push(b);
        self.recompute_tight_sets();
    }

    /// Cut with every constraint of `h` in order.
    pub fn add_constraints(&mut self, h: &HPolytope) {
        for (a, b) in h.normals.iter().zip(&h.offsets) {
            self.add_constraint(a.clone(), b.clone());
        }
    }
}

/// Independent oracle: a point is a vertex iff it is feasible and some
/// `dim` of its tight constraints are linearly independent. Enumerates all
/// `dim`-subsets of constraints; exponential, intended for cross-checking
/// [`DdState`] on small instances.
pub fn vertices_naive(dim: usize, h: &HPolytope) -> Vec<Vector> {
    let mut out: BTreeSet<Vec<Scalar>> = BTreeSet::new();
    for subset in combinations(h.len(), dim) {
        let m = Matrix::from_rows(
            &subset
                .iter()
                .map(|&i| h.normals[i].0.clone())
                .collect::<Vec<_>>(),
        );
        let rhs = Vector(subset.iter().map(|&i| h.offsets[i].clone()).collect());
        let Ok(inv) = m.inverse() else { continue };
        let point = inv.apply(&rhs);
        if h.contains(&point) {
            out.insert(point.0);
        }
    }
    out.into_iter().map(Vector).collect()
}

/// The double description of a sup-norm ball `B_E^{|X|}` in stacked
/// coordinates: vertices are all tuples of `E`-ball vertices and each facet
/// normal of `E` lifts to one constraint per point.
pub fn sup_ball_description(
    fs: &crate::function_space::FunctionSpace,
) -> (Vec<Vector>, HPolytope) {
    use crate::operator::{ball_vertex_tuple, ball_vertex_tuple_count};
    let n = fs.points.len();
    let de = fs.value_space.dim;
    let count = ball_vertex_tuple_count(fs);
    let vertices: Vec<Vector> = (0..count).map(|c| ball_vertex_tuple(fs, c)).collect();
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for x in 0..n {
        for facet in &fs.value_space.ball.facets {
            let mut stacked = vec![Scalar::zero(); n * de];
            stacked[x * de..(x + 1) * de].clone_from_slice(&facet.normal.0);
            normals.push(Covector(stacked));
            offsets.push(crate::scalar::int(1));
        }
    }
    (vertices, HPolytope::new(normals, offsets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{square, two_point_square_space};
    use crate::scalar::{int, rat};

    fn square_h() -> HPolytope {
        HPolytope::new(
            vec![
                Covector::from_ints(&[1, 0]),
                Covector::from_ints(&[0, 1]),
                Covector::from_ints(&[-1, 0]),
                Covector::from_ints(&[0, -1]),
            ],
            vec![int(1), int(1), int(1), int(1)],
        )
    }

    #[test]
    fn cutting_a_square_corner_makes_a_pentagon() {
        let mut dd = DdState::from_known(
            2,
            square().ball.vertices.clone(),
            square_h(),
        );
        dd.add_constraint(Covector::from_ints(&[1, 1]), rat(3, 2));
        let mut got: Vec<Vec<Scalar>> = dd.vertices().iter().map(|v| v.0.clone()).collect();
        got.sort();
        let mut want: Vec<Vec<Scalar>> = vec![
            Vector::from_ints(&[1, -1]).0,
            Vector::from_ints(&[-1, 1]).0,
            Vector::from_ints(&[-1, -1]).0,
            Vector(vec![int(1), rat(1, 2)]).0,
            Vector(vec![rat(1, 2), int(1)]).0,
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn non_binding_cut_changes_nothing() {
        let mut dd = DdState::from_known(2, square().ball.vertices.clone(), square_h());
        let before = dd.vertices().to_vec();
        dd.add_constraint(Covector::from_ints(&[1, 1]), int(5));
        assert_eq!(dd.vertices(), &before[..]);
    }

    #[test]
    fn tight_cut_through_a_vertex_keeps_it_once() {
        let mut dd = DdState::from_known(2, square().ball.vertices.clone(), square_h());
        dd.add_constraint(Covector::from_ints(&[1, 1]), int(2));
        assert_eq!(dd.vertices().len(), 4);
    }

    #[test]
    fn dd_matches_naive_oracle_on_a_degenerate_cut_stack() {
        // Octahedron carved out of the cube: highly degenerate (each new
        // vertex is tight on several constraints at once).
        let mut h = HPolytope::new(
            vec![
                Covector::from_ints(&[1, 0, 0]),
                Covector::from_ints(&[0, 1, 0]),
                Covector::from_ints(&[0, 0, 1]),
                Covector::from_ints(&[-1, 0, 0]),
                Covector::from_ints(&[0, -1, 0]),
                Covector::from_ints(&[0, 0, -1]),
            ],
            vec![int(1); 6],
        );
        let cube: Vec<Vector> = (0..8)
            .map(|c| {
                Vector::from_ints(&[
                    if c & 1 == 0 { 1 } else { -1 },
                    if c & 2 == 0 { 1 } else { -1 },
                    if c & 4 == 0 { 1 } else { -1 },
                ])
            })
            .collect();
        let mut dd = DdState::from_known(3, cube, h.clone());
        for sx in [1i64, -1] {
            for sy in [1i64, -1] {
                for sz in [1i64, -1] {
                    let a = Covector::from_ints(&[sx, sy, sz]);
                    dd.add_constraint(a.clone(), int(1));
                    h.normals.push(a);
                    h.offsets.push(int(1));
                }
            }
        }
        let mut got: Vec<Vec<Scalar>> = dd.vertices().iter().map(|v| v.0.clone()).collect();
        got.sort();
        let want: Vec<Vec<Scalar>> = vertices_naive(3, &h).into_iter().map(|v| v.0).collect();
        assert_eq!(got, want);
        // The octahedron has exactly 6 vertices ±e_i.
        assert_eq!(got.len(), 6);
    }

    #[test]
    fn naive_oracle_finds_the_square() {
        let got = vertices_naive(2, &square_h());
        assert_eq!(got.len(), 4);
        for v in &got {
            assert!(square().ball.vertices.contains(v));
        }
    }

    #[test]
    fn sup_ball_description_is_a_valid_double_description() {
        let fs = two_point_square_space();
        let (verts, h) = sup_ball_description(&fs);
        assert_eq!(verts.len(), 16);
        assert_eq!(h.len(), 8);
        for v in &verts {
            assert!(h.contains(v));
        }
        // Oracle agreement in stacked dimension 4.
        let mut got: Vec<Vec<Scalar>> = verts.iter().map(|v| v.0.clone()).collect();
        got.sort();
        let want: Vec<Vec<Scalar>> = vertices_naive(4, &h).into_iter().map(|v| v.0).collect();
        assert_eq!(got, want);
    }
}
