//! Dense exact linear algebra.
//!
//! Small hand-rolled kernel over [`Scalar`]: the dimensions in play are tiny
//! (ball dimension times point count), so asymptotics are irrelevant and
//! exactness is everything. Elimination is plain Gauss-Jordan with the first
//! nonzero pivot; no pivot-size heuristics are needed for rationals.

use crate::scalar::{format_scalar, int, parse_scalar, Scalar};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Column vector in `E`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(pub Vec<Scalar>);

/// Linear functional on `E`, kept distinct from `Vector` so that facet
/// normals and ball points cannot be confused at the type level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Covector(pub Vec<Scalar>);

// JSON carries scalars as "p/q" strings; vectors are string arrays and
// matrices are arrays of row arrays.

fn scalars_from_strings<E: serde::de::Error>(items: &[String]) -> Result<Vec<Scalar>, E> {
    items
        .iter()
        .map(|s| parse_scalar(s).map_err(E::custom))
        .collect()
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_scalar))
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        scalars_from_strings(&items).map(Vector)
    }
}

impl Serialize for Covector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(format_scalar))
    }
}

impl<'de> Deserialize<'de> for Covector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        scalars_from_strings(&items).map(Covector)
    }
}

impl Vector {
    pub fn zero(dim: usize) -> Self {
        Vector(vec![Scalar::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> Vector {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Vector::zero(dim);
        v.0[i] = Scalar::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Vector(coords.iter().map(|&c| int(c)).collect())
    }
}

impl Covector {
    pub fn zero(dim: usize) -> Self {
        Covector(vec![Scalar::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> Covector {
        Covector(self.0.iter().map(|x| x * c).collect())
    }

    /// Pairing `⟨a, v⟩ = Σ a_i v_i`. Panics on dimension mismatch; callers
    /// validate dimensions at construction boundaries.
    pub fn apply(&self, v: &Vector) -> Scalar {
        assert_eq!(self.dim(), v.dim(), "covector/vector dimension mismatch");
        self.0
            .iter()
            .zip(v.0.iter())
            .map(|(a, x)| a * x)
            .fold(Scalar::zero(), |acc, t| acc + t)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Covector(coords.iter().map(|&c| int(c)).collect())
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

impl Add for &Covector {
    type Output = Covector;
    fn add(self, rhs: &Covector) -> Covector {
        assert_eq!(self.dim(), rhs.dim(), "covector dimension mismatch");
        Covector(
            self.0
                .iter()
                .zip(rhs.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Neg for &Covector {
    type Output = Covector;
    fn neg(self) -> Covector {
        Covector(self.0.iter().map(|a| -a).collect())
    }
}

impl Index<usize> for Vector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut Scalar {
        &mut self.0[i]
    }
}

impl Index<usize> for Covector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ">")
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq((0..self.rows).map(|i| {
            self.row(i).iter().map(format_scalar).collect::<Vec<_>>()
        }))
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(D::Error::custom("ragged matrix rows"));
            }
            data.extend(scalars_from_strings::<D::Error>(row)?);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    Inconsistent,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    /// Build from row slices. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row.iter().cloned());
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim(), "matrix/vector dimension mismatch");
        // Skipping zero entries keeps block-sparse operator application
        // near its sparsity cost rather than the dense one.
        Vector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(v.0.iter())
                        .filter(|(a, x)| !a.is_zero() && !x.is_zero())
                        .map(|(a, x)| a * x)
                        .fold(Scalar::zero(), |acc, t| acc + t)
                })
                .collect(),
        )
    }

    /// Pullback `aᵀ M` of a functional on the codomain to one on the domain.
    pub fn apply_transpose(&self, a: &Covector) -> Covector {
        assert_eq!(self.rows, a.dim(), "matrix/covector dimension mismatch");
        Covector(
            (0..self.cols)
                .map(|j| {
                    (0..self.rows)
                        .map(|i| &self[(i, j)] * &a.0[i])
                        .fold(Scalar::zero(), |acc, t| acc + t)
                })
                .collect(),
        )
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Row echelon rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().0
    }

    /// Exact inverse by Gauss-Jordan on `[self | I]`.
    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Scalar::one();
        }
        let (_, pivots) = aug.row_reduce();
        // Invertible iff reduction puts a pivot in every left-block column.
        if pivots.len() < n || (0..n).any(|i| pivots[i] != i) {
            return Err(MatrixError::Singular);
        }
        let mut inv = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    /// Solve `self · x = b`. Underdetermined systems return one solution
    /// (free variables pinned to zero).
    pub fn solve(&self, b: &Vector) -> Result<Vector, MatrixError> {
        if self.rows != b.dim() {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} equations, {} right-hand sides",
                self.rows,
                b.dim()
            )));
        }
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b.0[i].clone();
        }
        let (_, pivots) = aug.row_reduce();
        // A pivot in the augmented column means 0 = 1 after reduction.
        if pivots.contains(&self.cols) {
            return Err(MatrixError::Inconsistent);
        }
        let mut x = Vector::zero(self.cols);
        for (r, &c) in pivots.iter().enumerate() {
            x.0[c] = aug[(r, self.cols)].clone();
        }
        Ok(x)
    }

    /// One nonzero kernel vector, or `None` when the kernel is trivial.
    pub fn nullspace_vector(&self) -> Option<Vector> {
        let mut m = self.clone();
        let (rank, pivots) = m.row_reduce();
        if rank == self.cols {
            return None;
        }
        let free = (0..self.cols).find(|j| !pivots.contains(j))?;
        let mut v = Vector::zero(self.cols);
        v.0[free] = Scalar::one();
        for (r, &c) in pivots.iter().enumerate() {
            v.0[c] = -m[(r, free)].clone();
        }
        Some(v)
    }

    /// In-place reduced row echelon form. Returns the rank and the pivot
    /// column of each of the first `rank` rows, in order.
    fn row_reduce(&mut self) -> (usize, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                let t = &self[(r, j)] * &inv;
                self[(r, j)] = t;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let t = &self[(i, j)] - &(&self[(r, j)] * &f);
                        self[(i, j)] = t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (r, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Scalar::zero();
                for k in 0..self.cols {
                    acc += &self[(i, k)] * &rhs[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// All `k`-element index subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
