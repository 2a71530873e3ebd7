//! Norms of the form `max(sup-norm, seminorm)` with constants in the
//! seminorm kernel, the one-sided star property falsifier, and the
//! end-to-end pipeline that reduces such isometries to weighted
//! compositions.
//!
//! The layer's load-bearing fact: for a linear `T` between these spaces,
//! the map `v ↦ T(v̂)(y0)` (send the constant function at `v` through `T`
//! and evaluate at `y0`) is the linear "constants map" `C_{y0} = Σ_x
//! block(y0, x)`. The star property at `(u, y0)` asks for `v` on the unit
//! sphere with `‖C_{y0} v + u‖ > ‖u‖`; since `v ↦ ‖C_{y0} v + u‖` is
//! convex, its maximum over the unit ball sits at a ball vertex, so the
//! vertex scan below decides each sampled `(u, y0)` exactly. Only the
//! quantifier over *all* `u` is sampled, which is why the verdict is named
//! "no counterexample found" rather than "holds".

use crate::dd::{sup_ball_description, DdState};
use crate::decompose::{decompose, verify_decomposition_strong, Decomposition, DecompositionFailure, StrongReport};
use crate::function_space::{sup_norm, FunctionElement, FunctionSpace, PointSet};
use crate::linalg::{Covector, Matrix, Vector};
use crate::operator::{verify_isometry, BlockOperator};
use crate::scalar::{int, random_scalar, Scalar};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Above this many stacked coordinates the max-norm unit ball is not
/// materialized and vertex-exact checks fall back to sampling.
pub const MAX_BALL_VARIABLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("distance table must be {n}×{n}, got row {row} of length {len}")]
    WrongShape { n: usize, row: usize, len: usize },
    #[error("d({i},{j}) ≠ d({j},{i})")]
    NotSymmetric { i: usize, j: usize },
    #[error("d({i},{i}) must be zero")]
    NonzeroDiagonal { i: usize },
    #[error("d({i},{j}) must be positive")]
    NotPositive { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
}

/// A metric on finitely many labeled points, validated on construction
/// (and re-validated when deserialized).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteMetricRaw")]
pub struct FiniteMetric {
    points: PointSet,
    #[serde(with = "crate::scalar::serde_scalar_table")]
    distances: Vec<Vec<Scalar>>,
}

#[derive(Deserialize)]
struct FiniteMetricRaw {
    points: PointSet,
    #[serde(with = "crate::scalar::serde_scalar_table")]
    distances: Vec<Vec<Scalar>>,
}

impl TryFrom<FiniteMetricRaw> for FiniteMetric {
    type Error = MetricError;

    fn try_from(raw: FiniteMetricRaw) -> Result<Self, MetricError> {
        FiniteMetric::new(raw.points, raw.distances)
    }
}

impl FiniteMetric {
    pub fn new(points: PointSet, distances: Vec<Vec<Scalar>>) -> Result<Self, MetricError> {
        let n = points.len();
        if distances.len() != n {
            return Err(MetricError::WrongShape {
                n,
                row: distances.len(),
                len: 0,
            });
        }
        for (row, d) in distances.iter().enumerate() {
            if d.len() != n {
                return Err(MetricError::WrongShape { n, row, len: d.len() });
            }
        }
        for (i, row) in distances.iter().enumerate() {
            if !row[i].is_zero() {
                return Err(MetricError::NonzeroDiagonal { i });
            }
            for (j, d) in row.iter().enumerate() {
                if *d != distances[j][i] {
                    return Err(MetricError::NotSymmetric { i, j });
                }
                if i != j && *d <= Scalar::zero() {
                    return Err(MetricError::NotPositive { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if distances[i][k] > distances[i][j].clone() + distances[j][k].clone() {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(FiniteMetric { points, distances })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> &Scalar {
        &self.distances[i][j]
    }

    pub fn distances(&self) -> &[Vec<Scalar>] {
        &self.distances
    }
}

/// The seminorm of a max-norm specification. Both choices vanish on
/// constant elements, so constants lie in the kernel as required.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Seminorm {
    Lipschitz { metric: FiniteMetric },
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("metric points {metric:?} do not match base points {base:?}")]
    PointMismatch { base: Vec<String>, metric: Vec<String> },
}

/// The normed space `(C(X,E), max(‖·‖_∞, p))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxNormSpec {
    pub base: FunctionSpace,
    pub seminorm: Seminorm,
}

impl MaxNormSpec {
    pub fn new(base: FunctionSpace, seminorm: Seminorm) -> Result<Self, SpecError> {
        if let Seminorm::Lipschitz { metric } = &seminorm {
            if metric.points() != &base.points {
                return Err(SpecError::PointMismatch {
                    base: base.points.labels().to_vec(),
                    metric: metric.points().labels().to_vec(),
                });
            }
        }
        Ok(MaxNormSpec { base, seminorm })
    }

    /// A sup-norm space viewed as a degenerate max-norm space.
    pub fn sup_only(base: FunctionSpace) -> Self {
        MaxNormSpec {
            base,
            seminorm: Seminorm::Zero,
        }
    }
}

/// `max over pairs of ‖f(x)−f(x')‖_E / d(x,x')`; zero when `|X| = 1`.
pub fn lipschitz_seminorm(
    metric: &FiniteMetric,
    value_space: &crate::polyhedral::NormedSpace,
    f: &FunctionElement,
) -> Scalar {
    let n = metric.points().len();
    let mut best = Scalar::zero();
    for x in 0..n {
        for xp in (x + 1)..n {
            let diff = &f.values[x] - &f.values[xp];
            let q = value_space.norm(&diff) / metric.distance(x, xp).clone();
            if q > best {
                best = q;
            }
        }
    }
    best
}

pub fn seminorm_value(spec: &MaxNormSpec, f: &FunctionElement) -> Scalar {
    match &spec.seminorm {
        Seminorm::Lipschitz { metric } => lipschitz_seminorm(metric, &spec.base.value_space, f),
        Seminorm::Zero => Scalar::zero(),
    }
}

/// `‖f‖_A = max(‖f‖_∞, p(f))`, computed exactly.
pub fn max_norm(spec: &MaxNormSpec, f: &FunctionElement) -> Scalar {
    let sup = sup_norm(&spec.base, f);
    let p = seminorm_value(spec, f);
    if p > sup {
        p
    } else {
        sup
    }
}

/// The vertex set of the max-norm unit ball, materialized only while the
/// stacked dimension stays within [`MAX_BALL_VARIABLES`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MaxBall {
    Exact { vertices: Vec<Vector> },
    TooLarge { variables: usize },
}

/// Materialize the max-norm unit ball: the sup-ball (known double
/// description) cut by one slab per point pair and value-space facet,
/// `a · (f(x) − f(x')) ≤ d(x, x')`.
pub fn max_norm_ball(spec: &MaxNormSpec) -> MaxBall {
    let vars = spec.base.stacked_dim();
    if vars > MAX_BALL_VARIABLES {
        return MaxBall::TooLarge { variables: vars };
    }
    let (verts, h) = sup_ball_description(&spec.base);
    let mut dd = DdState::from_known(vars, verts, h);
    if let Seminorm::Lipschitz { metric } = &spec.seminorm {
        let de = spec.base.value_space.dim;
        let n = spec.base.points.len();
        for x in 0..n {
            for xp in (x + 1)..n {
                for facet in &spec.base.value_space.ball.facets {
                    let mut stacked = vec![Scalar::zero(); vars];
                    stacked[x * de..(x + 1) * de].clone_from_slice(&facet.normal.0);
                    for (slot, c) in stacked[xp * de..(xp + 1) * de]
                        .iter_mut()
                        .zip(&facet.normal.0)
                    {
                        *slot = -c.clone();
                    }
                    dd.add_constraint(Covector(stacked), metric.distance(x, xp).clone());
                }
            }
        }
    }
    MaxBall::Exact {
        vertices: dd.into_vertices(),
    }
}

/// A norm-equality violation found by [`verify_max_norm_isometry`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxNormViolation {
    pub f: FunctionElement,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub domain_norm: Scalar,
    #[serde(with = "crate::scalar::serde_scalar")]
    pub codomain_norm: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxNormCheck {
    pub isometric: bool,
    /// True when both unit balls were enumerated, making the verdict a
    /// proof; false when only sampled (too many variables).
    pub exact: bool,
    pub vertex_checks: usize,
    pub sampled: usize,
    pub witness: Option<MaxNormViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum StError {
    #[error("operator endpoints do not match the specs: {detail}")]
    ShapeMismatch { detail: String },
}

fn check_endpoints(
    t: &BlockOperator,
    spec_a: &MaxNormSpec,
    spec_b: &MaxNormSpec,
) -> Result<(), StError> {
    if t.domain != spec_a.base {
        return Err(StError::ShapeMismatch {
            detail: "domain space differs from the first spec's base".into(),
        });
    }
    if t.codomain != spec_b.base {
        return Err(StError::ShapeMismatch {
            detail: "codomain space differs from the second spec's base".into(),
        });
    }
    Ok(())
}

fn random_element<R: rand::Rng>(fs: &FunctionSpace, rng: &mut R) -> FunctionElement {
    FunctionElement {
        values: (0..fs.points.len())
            .map(|_| Vector((0..fs.value_space.dim).map(|_| random_scalar(rng, 8, 4)).collect()))
            .collect(),
    }
}

/// Decide `‖Tf‖_B = ‖f‖_A` for all `f`. When both max-norm balls are
/// materializable the check is exact: `T` maps the `A`-ball into the
/// `B`-ball and `T^{-1}` maps the `B`-ball into the `A`-ball iff the balls
/// correspond, iff the gauge norms agree everywhere. Seeded random
/// elements are checked either way (each one exactly).
pub fn verify_max_norm_isometry(
    t: &BlockOperator,
    spec_a: &MaxNormSpec,
    spec_b: &MaxNormSpec,
    samples: usize,
    seed: u64,
) -> Result<MaxNormCheck, StError> {
    check_endpoints(t, spec_a, spec_b)?;
    let one = int(1);
    // A kernel vector is already a norm violation: ‖Tf‖ = 0 < ‖f‖.
    let inv = match t.matrix.inverse() {
        Ok(m) => m,
        Err(_) => {
            let kernel = t
                .matrix
                .nullspace_vector()
                .expect("rank-deficient square matrix has a kernel vector");
            let f = FunctionElement::from_stacked(&t.domain, &kernel);
            let domain_norm = max_norm(spec_a, &f);
            return Ok(MaxNormCheck {
                isometric: false,
                exact: true,
                vertex_checks: 0,
                sampled: 0,
                witness: Some(MaxNormViolation {
                    codomain_norm: max_norm(spec_b, &t.apply(&f)),
                    f,
                    domain_norm,
                }),
            });
        }
    };
    let mut vertex_checks = 0;
    let balls = (max_norm_ball(spec_a), max_norm_ball(spec_b));
    let exact = matches!(
        &balls,
        (MaxBall::Exact { .. }, MaxBall::Exact { .. })
    );
    if let (MaxBall::Exact { vertices: va }, MaxBall::Exact { vertices: vb }) = &balls {
        for v in va {
            vertex_checks += 1;
            let f = FunctionElement::from_stacked(&t.domain, v);
            let image_norm = max_norm(spec_b, &t.apply(&f));
            if image_norm > one {
                let domain_norm = max_norm(spec_a, &f);
                return Ok(MaxNormCheck {
                    isometric: false,
                    exact,
                    vertex_checks,
                    sampled: 0,
                    witness: Some(MaxNormViolation {
                        f,
                        domain_norm,
                        codomain_norm: image_norm,
                    }),
                });
            }
        }
        for w in vb {
            vertex_checks += 1;
            let g = FunctionElement::from_stacked(&t.codomain, w);
            let pre = FunctionElement::from_stacked(&t.domain, &inv.apply(w));
            let pre_norm = max_norm(spec_a, &pre);
            if pre_norm > one {
                // ‖T(pre)‖ = ‖g‖ = 1 < ‖pre‖: report in domain terms.
                return Ok(MaxNormCheck {
                    isometric: false,
                    exact,
                    vertex_checks,
                    sampled: 0,
                    witness: Some(MaxNormViolation {
                        codomain_norm: max_norm(spec_b, &g),
                        f: pre,
                        domain_norm: pre_norm,
                    }),
                });
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let f = random_element(&t.domain, &mut rng);
        let domain_norm = max_norm(spec_a, &f);
        let codomain_norm = max_norm(spec_b, &t.apply(&f));
        if domain_norm != codomain_norm {
            return Ok(MaxNormCheck {
                isometric: false,
                exact,
                vertex_checks,
                sampled: i + 1,
                witness: Some(MaxNormViolation {
                    f,
                    domain_norm,
                    codomain_norm,
                }),
            });
        }
    }
    Ok(MaxNormCheck {
        isometric: true,
        exact,
        vertex_checks,
        sampled: samples,
        witness: None,
    })
}

/// The constants map `C_{y0} = Σ_x block(y0, x)`: the value of `T(v̂)` at
/// `y0` as a linear function of `v`.
pub fn constants_map(t: &BlockOperator, y0: usize) -> Matrix {
    let df = t.codomain.value_space.dim;
    let de = t.domain.value_space.dim;
    let mut c = Matrix::zero(df, de);
    for x in 0..t.domain.points.len() {
        let b = t.block(y0, x);
        for i in 0..df {
            for j in 0..de {
                c[(i, j)] = c[(i, j)].clone() + b[(i, j)].clone();
            }
        }
    }
    c
}

/// Outcome of the star-property falsifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StVerdict {
    /// Every sampled `(u, y0)` admitted a witness `v`; the witness for the
    /// final pair is carried as evidence of shape.
    NoCounterexampleFound { pairs_checked: usize },
    /// At this `(u, y0)` NO `v` in the unit ball satisfies
    /// `‖T(v̂)(y0) + u‖ > ‖u‖` — exact for this pair, since the maximum of
    /// a convex function over the ball is attained at a vertex.
    Counterexample { u: Vector, y0: usize },
}

/// The sampled `u`-values: codomain value-ball vertices scaled by
/// `{1/2, 1, 2, 4}`, then `samples` seeded random vectors.
fn st_samples(t: &BlockOperator, samples: usize, seed: u64) -> Vec<Vector> {
    let mut us: Vec<Vector> = Vec::new();
    for scale_num_den in [(1i64, 2i64), (1, 1), (2, 1), (4, 1)] {
        let s = crate::scalar::rat(scale_num_den.0, scale_num_den.1);
        for v in &t.codomain.value_space.ball.vertices {
            us.push(v.scale(&s));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let df = t.codomain.value_space.dim;
    for _ in 0..samples {
        us.push(Vector(
            (0..df).map(|_| random_scalar(&mut rng, 8, 4)).collect(),
        ));
    }
    us
}

/// Does some unit vector `v` push `u` strictly outward through the
/// constants map at `y0`? Exact per `(u, y0)`: scans ball vertices (which
/// decide the question) and vertex midpoints (additional witness
/// candidates; any strict candidate in the ball normalizes to one on the
/// sphere by convexity of `t ↦ ‖t·z + u‖`).
fn st_holds_at(t: &BlockOperator, c: &Matrix, u: &Vector) -> bool {
    let f_space = &t.codomain.value_space;
    let e_verts = &t.domain.value_space.ball.vertices;
    let bound = f_space.norm(u);
    let strict = |v: &Vector| f_space.norm(&(&c.apply(v) + u)) > bound;
    if e_verts.iter().any(&strict) {
        return true;
    }
    let half = crate::scalar::rat(1, 2);
    for (i, a) in e_verts.iter().enumerate() {
        for b in e_verts.iter().skip(i + 1) {
            let mid = (a + b).scale(&half);
            if !mid.is_zero() && strict(&mid) {
                return true;
            }
        }
    }
    false
}

/// Public per-pair decision (used by report replay): does the star
/// property hold at `(u, y0)`?
pub fn st_property_holds_at(t: &BlockOperator, y0: usize, u: &Vector) -> bool {
    st_holds_at(t, &constants_map(t, y0), u)
}

pub fn st_falsify_seq(t: &BlockOperator, samples: usize, seed: u64) -> StVerdict {
    let us = st_samples(t, samples, seed);
    let ny = t.codomain.points.len();
    let cs: Vec<Matrix> = (0..ny).map(|y| constants_map(t, y)).collect();
    let hit = crate::exec::seq_first_index(us.len() * ny, |idx| {
        !st_holds_at(t, &cs[idx % ny], &us[idx / ny])
    });
    match hit {
        Some(idx) => StVerdict::Counterexample {
            u: us[idx / ny].clone(),
            y0: idx % ny,
        },
        None => StVerdict::NoCounterexampleFound {
            pairs_checked: us.len() * ny,
        },
    }
}

#[cfg(feature = "parallel")]
pub fn st_falsify_par(t: &BlockOperator, samples: usize, seed: u64) -> StVerdict {
    let us = st_samples(t, samples, seed);
    let ny = t.codomain.points.len();
    let cs: Vec<Matrix> = (0..ny).map(|y| constants_map(t, y)).collect();
    let hit = crate::exec::par_first_index(us.len() * ny, |idx| {
        !st_holds_at(t, &cs[idx % ny], &us[idx / ny])
    });
    match hit {
        Some(idx) => StVerdict::Counterexample {
            u: us[idx / ny].clone(),
            y0: idx % ny,
        },
        None => StVerdict::NoCounterexampleFound {
            pairs_checked: us.len() * ny,
        },
    }
}

/// Falsifier for the star property of `T`: sample `u`, decide each
/// `(u, y0)` exactly, report the first failing pair in deterministic
/// order (sample-major, then codomain point).
pub fn st_falsify(t: &BlockOperator, samples: usize, seed: u64) -> StVerdict {
    #[cfg(feature = "parallel")]
    {
        st_falsify_par(t, samples, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        st_falsify_seq(t, samples, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StDirection {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum PipelineError {
    #[error("operator endpoints do not match the specs")]
    Shape(#[from] StError),
    #[error("operator is not a max-norm isometry")]
    NotMaxNormIsometry { witness: Option<Box<MaxNormViolation>> },
    #[error("star property falsified ({direction:?}) at codomain point {y0} with u = {u:?}")]
    StFalsified {
        direction: StDirection,
        u: Vector,
        y0: usize,
    },
    /// The star gates passed but the operator is not a sup-norm isometry.
    /// Mathematically this cannot happen for a genuine max-norm isometry
    /// whose star checks are exhaustive; reaching it means a sampling
    /// false-negative (or a bug) and is reported as such.
    #[error("star gates passed but the sup-norm isometry assertion failed")]
    SupIsometryAssertionFailed,
    #[error("decomposition failed: {0}")]
    Decomposition(#[from] DecompositionFailure),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub max_norm_check: MaxNormCheck,
    pub st_forward: StVerdict,
    pub st_inverse: StVerdict,
    pub sup_isometry: bool,
    pub decomposition: Decomposition,
    pub strong: StrongReport,
}

/// The full reduction: max-norm isometry in, weighted composition out.
///
/// Gate order: (1) `T` is a max-norm isometry; (2) star falsifiers on `T`
/// and `T^{-1}` find nothing; (3) hard assertion that `T` is then a plain
/// sup-norm isometry; (4) decomposition and its strong verification.
pub fn theorem_app_pipeline(
    t: &BlockOperator,
    spec_a: &MaxNormSpec,
    spec_b: &MaxNormSpec,
    samples: usize,
    seed: u64,
) -> Result<PipelineReport, PipelineError> {
    let max_norm_check = verify_max_norm_isometry(t, spec_a, spec_b, samples, seed)?;
    if !max_norm_check.isometric {
        return Err(PipelineError::NotMaxNormIsometry {
            witness: max_norm_check.witness.map(Box::new),
        });
    }
    let st_forward = st_falsify(t, samples, seed);
    if let StVerdict::Counterexample { u, y0 } = st_forward {
        return Err(PipelineError::StFalsified {
            direction: StDirection::Forward,
            u,
            y0,
        });
    }
    let t_inv = t
        .inverse()
        .expect("max-norm isometry verification guarantees invertibility");
    let st_inverse = st_falsify(&t_inv, samples, seed);
    if let StVerdict::Counterexample { u, y0 } = st_inverse {
        return Err(PipelineError::StFalsified {
            direction: StDirection::Inverse,
            u,
            y0,
        });
    }
    if !verify_isometry(t) {
        return Err(PipelineError::SupIsometryAssertionFailed);
    }
    let decomposition = decompose(t)?;
    let strong = verify_decomposition_strong(t, &decomposition);
    Ok(PipelineReport {
        max_norm_check,
        st_forward,
        st_inverse,
        sup_isometry: true,
        decomposition,
        strong,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        difference_isometry, identity_op, labeled_space, path_metric, square, swap_op,
        two_point_square_space, wc_random,
    };
    use crate::scalar::rat;

    fn two_point_spec(d_num: i64, d_den: i64) -> MaxNormSpec {
        let base = two_point_square_space();
        let d = rat(d_num, d_den);
        let metric = FiniteMetric::new(
            base.points.clone(),
            vec![vec![int(0), d.clone()], vec![d, int(0)]],
        )
        .unwrap();
        MaxNormSpec::new(base, Seminorm::Lipschitz { metric }).unwrap()
    }

    fn elem(fs: &FunctionSpace, rows: &[&[i64]]) -> FunctionElement {
        FunctionElement::new(
            fs,
            rows.iter().map(|r| Vector::from_ints(r)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn metric_validation_catches_each_axiom() {
        let pts = PointSet::new(["a", "b", "c"]).unwrap();
        let ok = |d: Vec<Vec<Scalar>>| FiniteMetric::new(pts.clone(), d);
        assert!(matches!(
            ok(vec![vec![int(0), int(1)], vec![int(1), int(0)]]),
            Err(MetricError::WrongShape { .. })
        ));
        assert!(matches!(
            ok(vec![
                vec![int(0), int(1), int(1)],
                vec![int(2), int(0), int(1)],
                vec![int(1), int(1), int(0)],
            ]),
            Err(MetricError::NotSymmetric { .. })
        ));
        assert!(matches!(
            ok(vec![
                vec![int(1), int(1), int(1)],
                vec![int(1), int(0), int(1)],
                vec![int(1), int(1), int(0)],
            ]),
            Err(MetricError::NonzeroDiagonal { i: 0 })
        ));
        assert!(matches!(
            ok(vec![
                vec![int(0), int(0), int(1)],
                vec![int(0), int(0), int(1)],
                vec![int(1), int(1), int(0)],
            ]),
            Err(MetricError::NotPositive { .. })
        ));
        assert!(matches!(
            ok(vec![
                vec![int(0), int(1), int(5)],
                vec![int(1), int(0), int(1)],
                vec![int(5), int(1), int(0)],
            ]),
            Err(MetricError::TriangleViolation { .. })
        ));
        assert!(path_metric(&["a", "b", "c"]).distance(0, 2) == &int(2));
    }

    #[test]
    fn lipschitz_examples() {
        let fs = two_point_square_space();
        let metric = path_metric(&["a", "b"]);
        let f = elem(&fs, &[&[1, 0], &[0, 0]]);
        assert_eq!(lipschitz_seminorm(&metric, &fs.value_space, &f), int(1));
        let c = FunctionElement::constant(&fs, &Vector::from_ints(&[3, -2]));
        assert_eq!(lipschitz_seminorm(&metric, &fs.value_space, &c), int(0));
        let fs3 = labeled_space(&["a", "b", "c"], square());
        let metric3 = path_metric(&["a", "b", "c"]);
        let f3 = elem(&fs3, &[&[0, 0], &[1, 0], &[2, 0]]);
        assert_eq!(lipschitz_seminorm(&metric3, &fs3.value_space, &f3), int(1));
    }

    #[test]
    fn max_norm_examples() {
        let spec = two_point_spec(1, 1);
        let u = Vector::from_ints(&[2, 1]);
        let c = FunctionElement::constant(&spec.base, &u);
        assert_eq!(max_norm(&spec, &c), spec.base.value_space.norm(&u));
        let f = elem(&spec.base, &[&[1, 0], &[0, 0]]);
        assert_eq!(max_norm(&spec, &f), int(1));
        let spec_half = two_point_spec(1, 2);
        let g = elem(&spec_half.base, &[&[1, 0], &[-1, 0]]);
        assert_eq!(max_norm(&spec_half, &g), int(4));
    }

    #[test]
    fn max_norm_dominates_sup_norm() {
        let spec = two_point_spec(1, 2);
        let f = elem(&spec.base, &[&[1, 1], &[-1, 0]]);
        assert!(max_norm(&spec, &f) >= sup_norm(&spec.base, &f));
    }

    #[test]
    fn max_ball_of_sup_only_spec_is_the_sup_ball() {
        let spec = MaxNormSpec::sup_only(two_point_square_space());
        match max_norm_ball(&spec) {
            MaxBall::Exact { vertices } => assert_eq!(vertices.len(), 16),
            MaxBall::TooLarge { .. } => panic!("4 variables is within range"),
        }
    }

    #[test]
    fn max_ball_with_tight_metric_shrinks() {
        // d = 1/2 cuts deep: vertices where f(a) and f(b) sit on opposite
        // ball corners are no longer feasible.
        let spec = two_point_spec(1, 2);
        let MaxBall::Exact { vertices } = max_norm_ball(&spec) else {
            panic!("4 variables is within range");
        };
        assert!(!vertices.is_empty());
        let one = int(1);
        for v in &vertices {
            let f = FunctionElement::from_stacked(&spec.base, v);
            assert_eq!(max_norm(&spec, &f), one, "ball vertex not on the sphere: {v:?}");
        }
        // The all-ones sup-ball vertex  ((1,1),(1,1)) survives (constant),
        // but ((1,1),(-1,-1)) must be gone.
        let constant = Vector::from_ints(&[1, 1, 1, 1]);
        let split = Vector::from_ints(&[1, 1, -1, -1]);
        assert!(vertices.contains(&constant));
        assert!(!vertices.contains(&split));
    }

    #[test]
    fn too_many_variables_falls_back() {
        let spec = MaxNormSpec::sup_only(labeled_space(
            &["a", "b", "c", "d", "e", "f", "g"],
            square(),
        ));
        assert_eq!(
            max_norm_ball(&spec),
            MaxBall::TooLarge { variables: 14 }
        );
    }

    #[test]
    fn identity_is_a_max_norm_isometry() {
        let spec = two_point_spec(1, 1);
        let check = verify_max_norm_isometry(&identity_op(), &spec, &spec, 25, 0).unwrap();
        assert!(check.isometric);
        assert!(check.exact);
        assert!(check.vertex_checks > 0);
        assert_eq!(check.witness, None);
    }

    #[test]
    fn metric_preserving_swap_is_a_max_norm_isometry() {
        let spec = two_point_spec(1, 1);
        let check = verify_max_norm_isometry(&swap_op(), &spec, &spec, 25, 1).unwrap();
        assert!(check.isometric && check.exact);
    }

    #[test]
    fn scaling_one_point_is_not_an_isometry_and_yields_a_witness() {
        let spec = two_point_spec(1, 1);
        let fs = spec.base.clone();
        let mut m = Matrix::identity(4);
        m[(0, 0)] = int(2);
        m[(1, 1)] = int(2);
        let t = BlockOperator::new(fs.clone(), fs, m).unwrap();
        let check = verify_max_norm_isometry(&t, &spec, &spec, 25, 2).unwrap();
        assert!(!check.isometric);
        let w = check.witness.expect("violation carries a witness");
        assert_ne!(w.domain_norm, w.codomain_norm);
    }

    #[test]
    fn singular_operator_reports_kernel_witness() {
        let spec = two_point_spec(1, 1);
        let fs = spec.base.clone();
        let mut m = Matrix::identity(4);
        m[(3, 3)] = int(0);
        let t = BlockOperator::new(fs.clone(), fs, m).unwrap();
        let check = verify_max_norm_isometry(&t, &spec, &spec, 10, 3).unwrap();
        assert!(!check.isometric);
        let w = check.witness.unwrap();
        assert_eq!(w.codomain_norm, int(0));
        assert!(w.domain_norm > int(0));
    }

    #[test]
    fn difference_operator_is_a_max_norm_isometry_but_not_sup() {
        let spec_a = two_point_spec(1, 1);
        let cod = labeled_space(&["p", "q"], square());
        let metric_b = path_metric(&["p", "q"]);
        let spec_b =
            MaxNormSpec::new(cod, Seminorm::Lipschitz { metric: metric_b }).unwrap();
        let t = difference_isometry();
        let check = verify_max_norm_isometry(&t, &spec_a, &spec_b, 50, 4).unwrap();
        assert!(check.isometric, "witness: {:?}", check.witness);
        assert!(check.exact);
        assert!(!verify_isometry(&t));
    }

    #[test]
    fn endpoint_mismatch_is_an_error() {
        let spec = two_point_spec(1, 1);
        let other = MaxNormSpec::sup_only(labeled_space(&["p", "q"], square()));
        assert!(matches!(
            verify_max_norm_isometry(&identity_op(), &other, &spec, 5, 0),
            Err(StError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn st_falsifier_passes_identity_and_wc() {
        match st_falsify(&identity_op(), 32, 0) {
            StVerdict::NoCounterexampleFound { pairs_checked } => {
                // 4 vertices × 4 scales + 32 randoms, each at 2 points.
                assert_eq!(pairs_checked, (16 + 32) * 2);
            }
            StVerdict::Counterexample { u, y0 } => {
                panic!("identity falsified at ({u:?}, {y0})")
            }
        }
        let t = wc_random(&["a", "b", "c"], square(), 11);
        assert!(matches!(
            st_falsify(&t, 64, 5),
            StVerdict::NoCounterexampleFound { .. }
        ));
    }

    #[test]
    fn zero_constants_column_is_falsified_at_the_first_sample() {
        let t = difference_isometry();
        // C_p = I + (−I) = 0, so the very first u fails at y0 = 0.
        match st_falsify(&t, 8, 0) {
            StVerdict::Counterexample { u, y0 } => {
                assert_eq!(y0, 0);
                assert_eq!(u, t.codomain.value_space.ball.vertices[0].scale(&rat(1, 2)));
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn st_falsify_is_deterministic_and_scheduler_independent() {
        let t = wc_random(&["a", "b"], square(), 3);
        let v1 = st_falsify_seq(&t, 40, 9);
        let v2 = st_falsify_seq(&t, 40, 9);
        assert_eq!(v1, v2);
        #[cfg(feature = "parallel")]
        assert_eq!(v1, st_falsify_par(&t, 40, 9));
        let d = difference_isometry();
        let c1 = st_falsify_seq(&d, 40, 9);
        #[cfg(feature = "parallel")]
        assert_eq!(c1, st_falsify_par(&d, 40, 9));
        assert!(matches!(c1, StVerdict::Counterexample { .. }));
    }

    #[test]
    fn pipeline_identity_succeeds() {
        let spec = two_point_spec(1, 1);
        let report = theorem_app_pipeline(&identity_op(), &spec, &spec, 16, 0).unwrap();
        assert!(report.sup_isometry);
        assert_eq!(report.decomposition.phi, vec![0, 1]);
        assert!(report.strong.all_hold());
    }

    #[test]
    fn pipeline_metric_preserving_swap_succeeds() {
        let spec = two_point_spec(1, 1);
        let report = theorem_app_pipeline(&swap_op(), &spec, &spec, 16, 0).unwrap();
        assert_eq!(report.decomposition.phi, vec![1, 0]);
        assert_eq!(
            report.decomposition.fibers,
            vec![Matrix::identity(2), Matrix::identity(2)]
        );
        assert!(report.strong.phi_bijective);
    }

    #[test]
    fn pipeline_rejects_the_difference_isometry_via_the_star_gate() {
        let spec_a = two_point_spec(1, 1);
        let spec_b = MaxNormSpec::new(
            labeled_space(&["p", "q"], square()),
            Seminorm::Lipschitz {
                metric: path_metric(&["p", "q"]),
            },
        )
        .unwrap();
        match theorem_app_pipeline(&difference_isometry(), &spec_a, &spec_b, 16, 0) {
            Err(PipelineError::StFalsified {
                direction: StDirection::Forward,
                y0: 0,
                ..
            }) => {}
            other => panic!("expected forward star falsification, got {other:?}"),
        }
    }

    #[test]
    fn pipeline_rejects_non_isometries_at_the_first_gate() {
        let spec = two_point_spec(1, 1);
        let fs = spec.base.clone();
        let mut m = Matrix::identity(4);
        m[(0, 0)] = rat(1, 2);
        let t = BlockOperator::new(fs.clone(), fs, m).unwrap();
        assert!(matches!(
            theorem_app_pipeline(&t, &spec, &spec, 16, 0),
            Err(PipelineError::NotMaxNormIsometry { witness: Some(_) })
        ));
    }

    #[test]
    fn pipeline_wc_random_with_sup_only_specs_round_trips() {
        let t = wc_random(&["a", "b"], square(), 21);
        let spec = MaxNormSpec::sup_only(t.domain.clone());
        let report = theorem_app_pipeline(&t, &spec, &spec, 16, 0).unwrap();
        assert!(report.strong.all_hold());
        assert_eq!(
            crate::decompose::synthesize(&t, &report.decomposition).matrix,
            t.matrix
        );
    }
}
