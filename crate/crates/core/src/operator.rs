//! Linear operators between function spaces.
//!
//! A [`BlockOperator`] is an exact rational matrix from the stacked
//! coordinates of `C(X, E)` to those of `C(Y, F)`, with a block view
//! `block[y][x]` of shape `dim F × dim E`. Isometry is decided exactly:
//! the unit ball of a finite sup-norm space is the polytope whose vertices
//! are tuples of value-ball vertices, so `T` maps ball onto ball iff every
//! domain vertex tuple lands inside the codomain ball and every codomain
//! vertex tuple pulls back inside the domain ball.

use crate::exec;
use crate::function_space::{FunctionElement, FunctionSpace};
use crate::linalg::{Matrix, Vector};
use crate::polyhedral::NormedSpace;
use crate::scalar::Scalar;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub domain: FunctionSpace,
    pub codomain: FunctionSpace,
    /// Shape `(dim F · |Y|) × (dim E · |X|)`, point-major on both sides.
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("operator shape mismatch: {detail}")]
    ShapeMismatch { detail: String },
    #[error("point map sends {y} to {x}, but the domain has {count} points")]
    BadPointMap { y: usize, x: usize, count: usize },
}

impl BlockOperator {
    pub fn new(
        domain: FunctionSpace,
        codomain: FunctionSpace,
        matrix: Matrix,
    ) -> Result<Self, OperatorError> {
        let rows = codomain.stacked_dim();
        let cols = domain.stacked_dim();
        if matrix.rows != rows || matrix.cols != cols {
            return Err(OperatorError::ShapeMismatch {
                detail: format!(
                    "matrix is {}x{}, spaces need {}x{}",
                    matrix.rows, matrix.cols, rows, cols
                ),
            });
        }
        Ok(BlockOperator {
            domain,
            codomain,
            matrix,
        })
    }

    /// The `dim F × dim E` block mapping values at domain point `x` into
    /// values at codomain point `y`.
    pub fn block(&self, y: usize, x: usize) -> Matrix {
        let df = self.codomain.value_space.dim;
        let de = self.domain.value_space.dim;
        let mut b = Matrix::zero(df, de);
        for i in 0..df {
            for j in 0..de {
                b[(i, j)] = self.matrix[(y * df + i, x * de + j)].clone();
            }
        }
        b
    }

    pub fn apply(&self, f: &FunctionElement) -> FunctionElement {
        let image = self.matrix.apply(&f.to_stacked());
        FunctionElement::from_stacked(&self.codomain, &image)
    }

    /// The inverse operator `T^{-1}: C(Y,F) → C(X,E)`.
    pub fn inverse(&self) -> Result<BlockOperator, crate::linalg::MatrixError> {
        Ok(BlockOperator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.inverse()?,
        })
    }
}

/// Assemble `Tf(y) = fibers[y] · f(phi(y))` as a block matrix: `block[y][x]`
/// is `fibers[y]` when `x = phi(y)` and zero otherwise.
pub fn make_weighted_composition(
    domain: FunctionSpace,
    codomain: FunctionSpace,
    phi: &[usize],
    fibers: &[Matrix],
) -> Result<BlockOperator, OperatorError> {
    let ny = codomain.points.len();
    let nx = domain.points.len();
    let df = codomain.value_space.dim;
    let de = domain.value_space.dim;
    if phi.len() != ny || fibers.len() != ny {
        return Err(OperatorError::ShapeMismatch {
            detail: format!(
                "need {} point-map entries and fiber matrices, got {} and {}",
                ny,
                phi.len(),
                fibers.len()
            ),
        });
    }
    for (y, &x) in phi.iter().enumerate() {
        if x >= nx {
            return Err(OperatorError::BadPointMap { y, x, count: nx });
        }
        if fibers[y].rows != df || fibers[y].cols != de {
            return Err(OperatorError::ShapeMismatch {
                detail: format!(
                    "fiber at codomain point {y} is {}x{}, needs {df}x{de}",
                    fibers[y].rows, fibers[y].cols
                ),
            });
        }
    }
    let mut m = Matrix::zero(ny * df, nx * de);
    for (y, &x) in phi.iter().enumerate() {
        for i in 0..df {
            for j in 0..de {
                m[(y * df + i, x * de + j)] = fibers[y][(i, j)].clone();
            }
        }
    }
    BlockOperator::new(domain, codomain, m)
}

/// Number of vertices of the sup-norm unit ball: value-ball vertex tuples.
pub fn ball_vertex_tuple_count(fs: &FunctionSpace) -> usize {
    fs.value_space
        .ball
        .vertices
        .len()
        .checked_pow(fs.points.len() as u32)
        .expect("vertex tuple space fits in usize")
}

/// The `code`-th vertex of the sup-norm ball, stacked, in mixed-radix
/// order (point 0 is the least significant digit).
pub fn ball_vertex_tuple(fs: &FunctionSpace, mut code: usize) -> Vector {
    let verts = &fs.value_space.ball.vertices;
    let n = verts.len();
    let mut coords = Vec::with_capacity(fs.stacked_dim());
    for _ in 0..fs.points.len() {
        coords.extend(verts[code % n].0.iter().cloned());
        code /= n;
    }
    Vector(coords)
}

fn stacked_norm(fs: &FunctionSpace, stacked: &Vector) -> Scalar {
    let d = fs.value_space.dim;
    (0..fs.points.len())
        .map(|p| fs.value_space.norm(&Vector(stacked.0[p * d..(p + 1) * d].to_vec())))
        .max()
        .expect("point sets are nonempty")
}

fn isometry_directions(t: &BlockOperator) -> Option<(Matrix, usize, usize)> {
    if t.matrix.rows != t.matrix.cols {
        return None;
    }
    let inv = t.matrix.inverse().ok()?;
    Some((
        inv,
        ball_vertex_tuple_count(&t.domain),
        ball_vertex_tuple_count(&t.codomain),
    ))
}

pub fn verify_isometry_seq(t: &BlockOperator) -> bool {
    let Some((inv, dom_count, cod_count)) = isometry_directions(t) else {
        return false;
    };
    let one = Scalar::one();
    exec::seq_first_index(dom_count, |c| {
        stacked_norm(&t.codomain, &t.matrix.apply(&ball_vertex_tuple(&t.domain, c))) > one
    })
    .is_none()
        && exec::seq_first_index(cod_count, |c| {
            stacked_norm(&t.domain, &inv.apply(&ball_vertex_tuple(&t.codomain, c))) > one
        })
        .is_none()
}

#[cfg(feature = "parallel")]
pub fn verify_isometry_par(t: &BlockOperator) -> bool {
    let Some((inv, dom_count, cod_count)) = isometry_directions(t) else {
        return false;
    };
    let one = Scalar::one();
    exec::par_first_index(dom_count, |c| {
        stacked_norm(&t.codomain, &t.matrix.apply(&ball_vertex_tuple(&t.domain, c))) > one
    })
    .is_none()
        && exec::par_first_index(cod_count, |c| {
            stacked_norm(&t.domain, &inv.apply(&ball_vertex_tuple(&t.codomain, c))) > one
        })
        .is_none()
}

/// Exact sup-norm isometry decision. True iff the matrix is a linear
/// bijection mapping the domain unit ball onto the codomain unit ball,
/// decided on ball-vertex tuples in both directions (sufficient by
/// convexity and linearity). Non-square or singular operators are not
/// surjective isometries, hence false.
pub fn verify_isometry(t: &BlockOperator) -> bool {
    #[cfg(feature = "parallel")]
    {
        verify_isometry_par(t)
    }
    #[cfg(not(feature = "parallel"))]
    {
        verify_isometry_seq(t)
    }
}

/// Which unit-ball inclusion a non-isometry violates.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryDirection {
    /// A domain ball vertex maps outside the codomain ball.
    Forward,
    /// A codomain ball vertex pulls back outside the domain ball.
    Backward,
    /// The matrix is not a linear bijection; the witness is stretched to a
    /// kernel vector (norm collapses to zero) when one exists.
    NotInvertible,
}

/// Concrete evidence that an operator is not a surjective sup-norm
/// isometry: an element whose norm changes.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IsometryViolation {
    pub direction: IsometryDirection,
    /// Stacked coordinates of the violating element, on the side named by
    /// `direction` (domain for `Forward`/`NotInvertible`, codomain for
    /// `Backward`).
    pub element: Vector,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub element_norm: Scalar,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub image_norm: Scalar,
}

/// Like [`verify_isometry`], but returns the first violation (in the same
/// deterministic scan order) instead of a bare boolean.
pub fn isometry_witness(t: &BlockOperator) -> Option<IsometryViolation> {
    let Some((inv, dom_count, cod_count)) = isometry_directions(t) else {
        let element = match t.matrix.nullspace_vector() {
            Some(k) => k,
            None => Vector::zero(t.domain.stacked_dim()),
        };
        let image_norm = if t.matrix.rows == t.matrix.cols {
            stacked_norm(&t.codomain, &t.matrix.apply(&element))
        } else {
            Scalar::zero()
        };
        return Some(IsometryViolation {
            direction: IsometryDirection::NotInvertible,
            element_norm: stacked_norm(&t.domain, &element),
            image_norm,
            element,
        });
    };
    let one = Scalar::one();
    if let Some(c) = exec::first_index(dom_count, |c| {
        stacked_norm(&t.codomain, &t.matrix.apply(&ball_vertex_tuple(&t.domain, c))) > one
    }) {
        let element = ball_vertex_tuple(&t.domain, c);
        return Some(IsometryViolation {
            direction: IsometryDirection::Forward,
            element_norm: stacked_norm(&t.domain, &element),
            image_norm: stacked_norm(&t.codomain, &t.matrix.apply(&element)),
            element,
        });
    }
    if let Some(c) = exec::first_index(cod_count, |c| {
        stacked_norm(&t.domain, &inv.apply(&ball_vertex_tuple(&t.codomain, c))) > one
    }) {
        let element = ball_vertex_tuple(&t.codomain, c);
        return Some(IsometryViolation {
            direction: IsometryDirection::Backward,
            element_norm: stacked_norm(&t.codomain, &element),
            image_norm: stacked_norm(&t.domain, &inv.apply(&element)),
            element,
        });
    }
    None
}

/// The sup norm of a stacked element, exposed for report plumbing.
pub fn stacked_sup_norm(fs: &FunctionSpace, stacked: &Vector) -> Scalar {
    stacked_norm(fs, stacked)
}

/// True iff `m` maps the `e`-ball exactly onto the `f`-ball, i.e. is a
/// surjective isometry between the value spaces.
pub fn matrix_is_ball_isometry(e: &NormedSpace, f: &NormedSpace, m: &Matrix) -> bool {
    if m.rows != f.dim || m.cols != e.dim {
        return false;
    }
    let Ok(inv) = m.inverse() else {
        return false;
    };
    let one = Scalar::one();
    e.ball.vertices.iter().all(|v| f.norm(&m.apply(v)) <= one)
        && f.ball.vertices.iter().all(|v| e.norm(&inv.apply(v)) <= one)
}
