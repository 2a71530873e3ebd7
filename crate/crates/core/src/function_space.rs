//! Sup-norm spaces of vector-valued functions on finite point sets.
//!
//! `C(X, E)` for a finite `X` and polyhedral `E`, with the norm
//! `‖f‖ = max_x ‖f(x)‖`. Its T-sets are the pairs `(S, x)` of a T-set `S`
//! of `E` and a point `x`: the functions whose value at `x` lies in `S` and
//! whose sup norm is attained at `x`. Its extreme dual functionals are
//! `v* ∘ δ_x` for extreme `v*` on `E`.
//!
//! At finite discrete scale every singleton is open, so the only completely
//! regular subspace is the full space: [`bump`] realizes the peaked witness
//! for every `(x, u)`, and spans of bumps exhaust `C(X, E)`. The engine
//! therefore always operates on full product spaces.

use crate::linalg::{Covector, Vector};
use crate::polyhedral::NormedSpace;
use crate::scalar::{random_unit_scalar, rat, Scalar};
use crate::tsets::TSet;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Ordered finite point set with distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSet {
    labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FunctionSpaceError {
    #[error("point set must be nonempty")]
    EmptyPointSet,
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown point label {0:?}")]
    UnknownLabel(String),
    #[error("element has {got} values, the point set has {expected}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("value at {label:?} has dimension {got}, the space has {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        got: usize,
    },
}

impl PointSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, FunctionSpaceError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(FunctionSpaceError::EmptyPointSet);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(FunctionSpaceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(PointSet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize, FunctionSpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| FunctionSpaceError::UnknownLabel(label.to_string()))
    }
}

/// `C(X, E)`: a point set plus a polyhedral value space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpace {
    pub points: PointSet,
    pub value_space: NormedSpace,
}

impl FunctionSpace {
    pub fn new(points: PointSet, value_space: NormedSpace) -> Self {
        FunctionSpace { points, value_space }
    }

    /// Total coordinate dimension `dim E · |X|` of the stacked representation.
    pub fn stacked_dim(&self) -> usize {
        self.points.len() * self.value_space.dim
    }
}

/// An element of `C(X, E)`: one value vector per point, in point order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionElement {
    pub values: Vec<Vector>,
}

impl FunctionElement {
    pub fn new(fs: &FunctionSpace, values: Vec<Vector>) -> Result<Self, FunctionSpaceError> {
        if values.len() != fs.points.len() {
            return Err(FunctionSpaceError::WrongValueCount {
                expected: fs.points.len(),
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if v.dim() != fs.value_space.dim {
                return Err(FunctionSpaceError::DimensionMismatch {
                    label: fs.points.label(i).to_string(),
                    expected: fs.value_space.dim,
                    got: v.dim(),
                });
            }
        }
        Ok(FunctionElement { values })
    }

    pub fn zero(fs: &FunctionSpace) -> Self {
        FunctionElement {
            values: vec![Vector::zero(fs.value_space.dim); fs.points.len()],
        }
    }

    /// The constant function `x ↦ u`.
    pub fn constant(fs: &FunctionSpace, u: &Vector) -> Self {
        FunctionElement {
            values: vec![u.clone(); fs.points.len()],
        }
    }

    pub fn value(&self, point: usize) -> &Vector {
        &self.values[point]
    }

    pub fn add(&self, other: &FunctionElement) -> FunctionElement {
        FunctionElement {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Flatten to one long coordinate vector, point-major.
    pub fn to_stacked(&self) -> Vector {
        Vector(self.values.iter().flat_map(|v| v.0.iter().cloned()).collect())
    }

    /// Rebuild from a stacked vector of length `dim E · |X|`.
    pub fn from_stacked(fs: &FunctionSpace, stacked: &Vector) -> Self {
        let d = fs.value_space.dim;
        assert_eq!(stacked.dim(), fs.stacked_dim(), "stacked length mismatch");
        FunctionElement {
            values: (0..fs.points.len())
                .map(|p| Vector(stacked.0[p * d..(p + 1) * d].to_vec()))
                .collect(),
        }
    }
}

/// A T-set of `C(X, E)`: value T-set `S` of `E` paired with a point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionTSet {
    pub value_tset: TSet,
    pub point: usize,
}

/// An extreme dual functional `v* ∘ δ_x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeFunctional {
    pub covector: Covector,
    pub point: usize,
}

/// `‖f‖ = max_x ‖f(x)‖`, exact.
pub fn sup_norm(fs: &FunctionSpace, f: &FunctionElement) -> Scalar {
    f.values
        .iter()
        .map(|v| fs.value_space.norm(v))
        .max()
        .expect("point sets are nonempty")
}

/// All T-sets `(S, x)`, point-major: id `= x·#facets + facet_id`.
pub fn function_tsets(fs: &FunctionSpace) -> Vec<FunctionTSet> {
    let ts = crate::tsets::tsets(&fs.value_space);
    (0..fs.points.len())
        .flat_map(|p| {
            ts.iter().map(move |t| FunctionTSet {
                value_tset: t.clone(),
                point: p,
            })
        })
        .collect()
}

/// Membership in `(S, x)`: `f(x) ∈ S` and the sup norm is attained at `x`.
pub fn function_tset_contains(fs: &FunctionSpace, f: &FunctionElement, ft: &FunctionTSet) -> bool {
    let at_point = f.value(ft.point);
    crate::tsets::tset_contains(&fs.value_space, &ft.value_tset, at_point)
        && sup_norm(fs, f) == fs.value_space.norm(at_point)
}

pub fn evaluate_functional(f: &FunctionElement, ef: &ExtremeFunctional) -> Scalar {
    ef.covector.apply(f.value(ef.point))
}

/// Peaked element: `u` at `x`, zero elsewhere. The complete-regularity
/// witness at finite discrete scale.
pub fn bump(fs: &FunctionSpace, x: usize, u: &Vector) -> Result<FunctionElement, FunctionSpaceError> {
    if x >= fs.points.len() {
        return Err(FunctionSpaceError::UnknownLabel(format!("#{x}")));
    }
    if u.dim() != fs.value_space.dim {
        return Err(FunctionSpaceError::DimensionMismatch {
            label: fs.points.label(x).to_string(),
            expected: fs.value_space.dim,
            got: u.dim(),
        });
    }
    let mut f = FunctionElement::zero(fs);
    f.values[x] = u.clone();
    Ok(f)
}

/// Seeded sample of members of `(S, x)`: a positive multiple of a random
/// convex combination of the facet's vertices at `x`, values of no larger
/// norm elsewhere. Every returned element is an exact member.
pub fn sample_members(
    fs: &FunctionSpace,
    ft: &FunctionTSet,
    count: usize,
    seed: u64,
) -> Vec<FunctionElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = &fs.value_space;
    let verts: Vec<&Vector> = ft.value_tset.incident.iter().map(|&i| space.vertex(i)).collect();
    (0..count)
        .map(|_| {
            // Random point of the facet: normalized positive weights.
            let mut weights: Vec<Scalar> = (0..verts.len())
                .map(|_| random_unit_scalar(&mut rng, 8) + rat(1, 16))
                .collect();
            let total: Scalar = weights.iter().cloned().sum();
            for w in &mut weights {
                *w /= total.clone();
            }
            let mut peak = Vector::zero(space.dim);
            for (w, v) in weights.iter().zip(&verts) {
                peak = &peak + &v.scale(w);
            }
            // Positive scale keeps the value in the cone.
            let t = random_unit_scalar(&mut rng, 8) + rat(1, 2);
            let peak = peak.scale(&t);
            let peak_norm = space.norm(&peak);

            let mut values = Vec::with_capacity(fs.points.len());
            for p in 0..fs.points.len() {
                if p == ft.point {
                    values.push(peak.clone());
                    continue;
                }
                // Sub-peak noise: random direction scaled under the peak norm.
                let raw = Vector(
                    (0..space.dim)
                        .map(|_| {
                            let n = rng.random_range(-8i64..=8);
                            rat(n, 4)
                        })
                        .collect(),
                );
                let raw_norm = space.norm(&raw);
                if raw_norm.is_zero() {
                    values.push(raw);
                } else {
                    let cap = random_unit_scalar(&mut rng, 8);
                    values.push(raw.scale(&(&peak_norm * &cap / raw_norm)));
                }
            }
            FunctionElement { values }
        })
        .collect()
}
