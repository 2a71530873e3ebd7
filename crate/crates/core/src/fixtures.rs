//! Canonical spaces, point sets, and operators used by the test suite and
//! the CLI `fixtures` subcommand.
//!
//! Every fixture is deterministic: fixed vertex input orders make facet ids
//! reproducible (facets are canonically sorted by incident vertex ids).

use crate::function_space::{FunctionSpace, PointSet};
use crate::linalg::{Matrix, Vector};
use crate::operator::{make_weighted_composition, BlockOperator};
use crate::polyhedral::{build_space, NormedSpace};
use crate::stnorm::FiniteMetric;
use crate::symmetry::ball_symmetries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The sup-norm square: vertices `(±1, ±1)`.
///
/// Facet ids: 0 = `{x=1}`, 1 = `{y=1}`, 2 = `{y=-1}`, 3 = `{x=-1}`.
pub fn square() -> NormedSpace {
    let verts = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
        .iter()
        .map(|c| Vector::from_ints(c))
        .collect();
    build_space(2, Some(verts), None).expect("square fixture is valid")
}

/// Rational hexagon: vertices `(±1,0), (0,±1), (1,1), (-1,-1)`.
///
/// Affinely equivalent to the regular hexagon (same face lattice of 6 edges
/// in a cycle); rational coordinates keep all arithmetic exact.
pub fn hexagon() -> NormedSpace {
    let verts = [[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [-1, -1]]
        .iter()
        .map(|c| Vector::from_ints(c))
        .collect();
    build_space(2, Some(verts), None).expect("hexagon fixture is valid")
}

/// The ℓ1 ball in dimension 3: vertices `±e_i`, eight triangular facets.
pub fn octahedron() -> NormedSpace {
    let verts = [
        [1, 0, 0],
        [-1, 0, 0],
        [0, 1, 0],
        [0, -1, 0],
        [0, 0, 1],
        [0, 0, -1],
    ]
    .iter()
    .map(|c| Vector::from_ints(c))
    .collect();
    build_space(3, Some(verts), None).expect("octahedron fixture is valid")
}

/// Cube with a pyramid glued on top and bottom: vertices `(±1,±1,±1)` and
/// apexes `(0,0,±2)`. Twelve facets: the four vertical cube sides plus four
/// upper and four lower pyramid triangles.
///
/// Vertex ids 0..7 are the cube corners in the order below, 8 the top apex,
/// 9 the bottom apex. Facet ids (canonical order): 0 = `{x=1}`, 1 = `{y=1}`,
/// 2/3 = upper triangles toward +x/+y, 4/5 = lower triangles toward +x/+y,
/// 6 = `{y=-1}`, 7/8 = upper/lower triangles toward -y, 9 = `{x=-1}`,
/// 10/11 = upper/lower triangles toward -x.
pub fn cube_bipyramid() -> NormedSpace {
    let verts = [
        [1, 1, 1],
        [1, 1, -1],
        [1, -1, 1],
        [1, -1, -1],
        [-1, 1, 1],
        [-1, 1, -1],
        [-1, -1, 1],
        [-1, -1, -1],
        [0, 0, 2],
        [0, 0, -2],
    ]
    .iter()
    .map(|c| Vector::from_ints(c))
    .collect();
    build_space(3, Some(verts), None).expect("cube-bipyramid fixture is valid")
}

/// Centrally symmetric `2k`-gon with integer coordinates: the convex hull of
/// `±p_0, ..., ±p_{k-1}` on the upper half of a coarse integer circle.
/// Used for scaling scans; for `k = 2` this is a quadrilateral.
pub fn polygon(k: usize) -> NormedSpace {
    assert!(k >= 2, "need at least 4 vertices for a polygon ball");
    // The points (n^2 - t^2, 2nt) for t = 0..k lie on the strictly convex
    // parabola x = n^2 - y^2/(4n^2), so together with their negatives they
    // are all extreme and hull to a symmetric 2k-gon.
    let n = k as i64;
    let mut verts: Vec<Vector> = Vec::with_capacity(2 * k);
    for t in 0..n {
        verts.push(Vector::from_ints(&[n * n - t * t, 2 * n * t]));
    }
    for t in 0..n {
        verts.push(Vector::from_ints(&[t * t - n * n, -2 * n * t]));
    }
    build_space(2, Some(verts), None).expect("polygon fixture is valid")
}

/// `C({a, b}, square())`: the workhorse two-point function space.
pub fn two_point_square_space() -> FunctionSpace {
    FunctionSpace::new(PointSet::new(["a", "b"]).unwrap(), square())
}

/// A function space over `labels` with the given value space.
pub fn labeled_space(labels: &[&str], value_space: NormedSpace) -> FunctionSpace {
    FunctionSpace::new(PointSet::new(labels.iter().copied()).unwrap(), value_space)
}

/// The identity operator on `C({a, b}, square())`.
pub fn identity_op() -> BlockOperator {
    let fs = two_point_square_space();
    let n = fs.stacked_dim();
    BlockOperator::new(fs.clone(), fs, Matrix::identity(n)).unwrap()
}

/// Point swap `a ↔ b` with identity fibers on `C({a, b}, square())`:
/// a weighted composition with `phi = (b, a)`.
pub fn swap_op() -> BlockOperator {
    let fs = two_point_square_space();
    let id2 = Matrix::identity(2);
    make_weighted_composition(fs.clone(), fs, &[1, 0], &[id2.clone(), id2]).unwrap()
}

/// A coordinate-mixing isometry of `C({a, b}, square())` that is NOT a
/// weighted composition: in stacked coordinates `(a1, a2, b1, b2)` it maps
/// `(a1, a2, b1, b2) ↦ (a1, b2, b1, a2)`, i.e. it swaps the second value
/// coordinate across the two points. Each block row touches both domain
/// points, so no point map `phi` exists — yet it permutes the sup-ball
/// vertices, hence is a surjective isometry. Exists because `square()`
/// fails property (D_w).
pub fn mixing_swap() -> BlockOperator {
    let fs = two_point_square_space();
    let m = Matrix::from_int_rows(&[
        &[1, 0, 0, 0],
        &[0, 0, 0, 1],
        &[0, 0, 1, 0],
        &[0, 1, 0, 0],
    ]);
    BlockOperator::new(fs.clone(), fs, m).unwrap()
}

/// A seeded random weighted composition on `C(labels, space)`, returned
/// with the `(phi, fibers)` it was built from so tests can compare against
/// the ground truth: `phi` is a Fisher–Yates permutation and every fiber
/// is drawn from the finite group of linear ball symmetries.
/// Deterministic in `seed`.
pub fn wc_random_parts(
    labels: &[&str],
    space: NormedSpace,
    seed: u64,
) -> (Vec<usize>, Vec<Matrix>, BlockOperator) {
    let fs = labeled_space(labels, space);
    let syms = ball_symmetries(&fs.value_space);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = fs.points.len();
    let mut phi: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        phi.swap(i, rng.random_range(0..=i));
    }
    let fibers: Vec<Matrix> = (0..n)
        .map(|_| syms[rng.random_range(0..syms.len())].clone())
        .collect();
    let t = make_weighted_composition(fs.clone(), fs, &phi, &fibers)
        .expect("permutation phi and symmetry fibers always assemble");
    (phi, fibers, t)
}

/// [`wc_random_parts`] without the ground truth.
pub fn wc_random(labels: &[&str], space: NormedSpace, seed: u64) -> BlockOperator {
    wc_random_parts(labels, space, seed).2
}

/// A surjective isometry of two-point max-norm spaces (unit distance
/// between the points) that is NOT a weighted composition even at the
/// max-norm layer: with domain points `(a, b)` and codomain points
/// `(p, q)`, `(Tf)(p) = f(a) - f(b)` and `(Tf)(q) = f(a)`. The constants
/// (the kernel of the Lipschitz seminorm) are NOT preserved — `T` kills
/// them at `p` — which is exactly the structure ruled out for spaces
/// satisfying the one-sided star condition.
pub fn difference_isometry() -> BlockOperator {
    let dom = two_point_square_space();
    let cod = labeled_space(&["p", "q"], square());
    let m = Matrix::from_int_rows(&[
        &[1, 0, -1, 0],
        &[0, 1, 0, -1],
        &[1, 0, 0, 0],
        &[0, 1, 0, 0],
    ]);
    BlockOperator::new(dom, cod, m).unwrap()
}

/// The path metric on the labeled points: consecutive points at distance
/// 1, so `d(x_i, x_j) = |i - j|`.
pub fn path_metric(labels: &[&str]) -> FiniteMetric {
    let n = labels.len();
    let mut d = vec![vec![crate::scalar::int(0); n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = crate::scalar::int((i as i64 - j as i64).abs());
        }
    }
    FiniteMetric::new(PointSet::new(labels.iter().copied()).unwrap(), d).unwrap()
}
