//! Exact linear symmetry groups of polytope balls.
//!
//! A linear map is an isometry of a polyhedral space iff it maps the unit
//! ball onto itself, iff it permutes the ball's vertex set. The group is
//! found by exhaustive search: fix a linearly independent base tuple of
//! vertices, try every ordered tuple of vertices as its image (the matrix
//! is determined by that image), and keep the candidates that permute the
//! vertex set. Exponential in dimension, exact, and fast at fixture scale.

use crate::linalg::{Matrix, Vector};
use crate::polyhedral::NormedSpace;
use std::collections::BTreeMap;

/// Matrix with the given vertices as columns.
fn columns(space: &NormedSpace, ids: &[usize]) -> Matrix {
    let d = space.dim;
    let mut m = Matrix::zero(d, ids.len());
    for (j, &id) in ids.iter().enumerate() {
        for i in 0..d {
            m[(i, j)] = space.vertex(id)[i].clone();
        }
    }
    m
}

/// Greedy linearly independent base of `dim` vertex ids.
fn independent_base(space: &NormedSpace) -> Vec<usize> {
    let d = space.dim;
    let mut ids: Vec<usize> = Vec::with_capacity(d);
    for i in 0..space.ball.vertices.len() {
        let mut trial = ids.clone();
        trial.push(i);
        if columns(space, &trial).rank() == trial.len() {
            ids = trial;
            if ids.len() == d {
                return ids;
            }
        }
    }
    unreachable!("a valid space has full-dimensional vertex span")
}

/// All exact linear isometries of the space, as matrices, in a fixed
/// deterministic order (base-image tuple enumeration order). The identity
/// is always present; the result is closed under inversion and products.
pub fn ball_symmetries(space: &NormedSpace) -> Vec<Matrix> {
    let d = space.dim;
    let verts = &space.ball.vertices;
    let n = verts.len();
    let base = independent_base(space);
    let base_inv = columns(space, &base)
        .inverse()
        .expect("base tuple is linearly independent");
    let index: BTreeMap<&Vector, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();

    let mut out = Vec::new();
    let total = n.checked_pow(d as u32).expect("tuple space fits in usize");
    'tuples: for mut code in 0..total {
        let mut image = Vec::with_capacity(d);
        for _ in 0..d {
            image.push(code % n);
            code /= n;
        }
        let m = &columns(space, &image) * &base_inv;
        // The candidate is a symmetry iff it permutes the vertex set.
        let mut seen = vec![false; n];
        for v in verts {
            let Some(&j) = index.get(&m.apply(v)) else {
                continue 'tuples;
            };
            if seen[j] {
                continue 'tuples;
            }
            seen[j] = true;
        }
        out.push(m);
    }
    out
}
