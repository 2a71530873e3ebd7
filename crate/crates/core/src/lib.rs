//! Exact T-set geometry for polyhedral normed spaces.
//!
//! A finite-dimensional normed space whose unit ball is a polytope has a
//! finite combinatorial skeleton: its maximal norm-additive subsets (T-sets)
//! are exactly the cones over facets. This crate computes that skeleton with
//! exact rational arithmetic and uses it to decompose sup-norm isometries
//! between spaces of vector-valued functions on finite point sets into
//! weighted composition operators, or to produce a concrete certificate of
//! failure.
//!
//! Everything is decided exactly; there are no tolerances anywhere. With the
//! default `parallel` feature the heavy scans run on rayon but return
//! bit-identical results to the sequential fallback.

pub mod dd;
pub mod decompose;
pub mod exec;
pub mod fixtures;
pub mod function_space;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod polyhedral;
pub mod scalar;
pub mod stnorm;
pub mod symmetry;
pub mod tsets;

pub use linalg::{Covector, Matrix, Vector};
pub use polyhedral::NormedSpace;
pub use scalar::Scalar;
