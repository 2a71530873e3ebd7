//! Versioned JSON document formats for spaces, elements, operators, and
//! max-norm specifications.
//!
//! Every file carries `"format": 1` and renders rationals as `"p/q"`
//! strings. Deserialization never trusts the document: spaces are rebuilt
//! (and cross-validated when both vertices and facets are present),
//! metrics re-checked, operators re-shaped. A file that parses but fails
//! validation is a [`IoError`], which the CLI maps to its input-error exit
//! code.

use crate::function_space::{FunctionElement, FunctionSpace, PointSet};
use crate::linalg::{Covector, Matrix, Vector};
use crate::scalar::parse_scalars;
use crate::operator::BlockOperator;
use crate::polyhedral::{build_space, NormedSpace};
use crate::scalar::format_scalar;
use crate::stnorm::{FiniteMetric, MaxNormSpec, Seminorm};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {got} (this tool reads format {FORMAT_VERSION})")]
    Format { got: u32 },
    #[error("bad rational: {0}")]
    Scalar(#[from] crate::scalar::ScalarParseError),
    #[error("invalid space: {0}")]
    Space(#[from] crate::polyhedral::SpaceError),
    #[error("invalid point set or element: {0}")]
    Function(#[from] crate::function_space::FunctionSpaceError),
    #[error("invalid operator: {0}")]
    Operator(#[from] crate::operator::OperatorError),
    #[error("invalid metric: {0}")]
    Metric(#[from] crate::stnorm::MetricError),
    #[error("invalid max-norm spec: {0}")]
    Spec(#[from] crate::stnorm::SpecError),
    #[error("{0}")]
    Invalid(String),
}

fn check_format(got: u32) -> Result<(), IoError> {
    if got == FORMAT_VERSION {
        Ok(())
    } else {
        Err(IoError::Format { got })
    }
}

fn rows_to_strings<T: AsRef<[crate::scalar::Scalar]>>(rows: &[T]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| r.as_ref().iter().map(format_scalar).collect())
        .collect()
}

impl AsRef<[crate::scalar::Scalar]> for Vector {
    fn as_ref(&self) -> &[crate::scalar::Scalar] {
        &self.0
    }
}

impl AsRef<[crate::scalar::Scalar]> for Covector {
    fn as_ref(&self) -> &[crate::scalar::Scalar] {
        &self.0
    }
}

/// `{"format": 1, "dim": n, "vertices": [["p/q", ...], ...], "facets": [...]}`.
/// At least one of `vertices`/`facets` must be present; with both, the
/// representations are cross-validated against each other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDoc {
    pub format: u32,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<Vec<String>>>,
}

impl SpaceDoc {
    pub fn from_space(space: &NormedSpace) -> Self {
        SpaceDoc {
            format: FORMAT_VERSION,
            dim: space.dim,
            vertices: Some(rows_to_strings(&space.ball.vertices)),
            facets: Some(rows_to_strings(
                &space
                    .ball
                    .facets
                    .iter()
                    .map(|f| f.normal.clone())
                    .collect::<Vec<_>>(),
            )),
        }
    }

    pub fn to_space(&self) -> Result<NormedSpace, IoError> {
        check_format(self.format)?;
        let vertices = self
            .vertices
            .as_ref()
            .map(|rows| {
                rows.iter()
                    .map(|r| parse_scalars(r).map(Vector))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let facets = self
            .facets
            .as_ref()
            .map(|rows| {
                rows.iter()
                    .map(|r| parse_scalars(r).map(Covector))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(build_space(self.dim, vertices, facets)?)
    }
}

/// A labeled point set together with its value space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionSpaceDoc {
    pub points: Vec<String>,
    pub space: SpaceDoc,
}

impl FunctionSpaceDoc {
    pub fn from_function_space(fs: &FunctionSpace) -> Self {
        FunctionSpaceDoc {
            points: fs.points.labels().to_vec(),
            space: SpaceDoc::from_space(&fs.value_space),
        }
    }

    pub fn to_function_space(&self) -> Result<FunctionSpace, IoError> {
        let points = PointSet::new(self.points.iter().cloned())?;
        Ok(FunctionSpace::new(points, self.space.to_space()?))
    }
}

/// `{"format": 1, "points": [...], "space": {...}, "values": {label: [...]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub format: u32,
    pub points: Vec<String>,
    pub space: SpaceDoc,
    pub values: BTreeMap<String, Vec<String>>,
}

impl ElementDoc {
    pub fn from_element(fs: &FunctionSpace, f: &FunctionElement) -> Self {
        ElementDoc {
            format: FORMAT_VERSION,
            points: fs.points.labels().to_vec(),
            space: SpaceDoc::from_space(&fs.value_space),
            values: fs
                .points
                .labels()
                .iter()
                .zip(&f.values)
                .map(|(l, v)| (l.clone(), v.0.iter().map(format_scalar).collect()))
                .collect(),
        }
    }

    pub fn to_element(&self) -> Result<(FunctionSpace, FunctionElement), IoError> {
        check_format(self.format)?;
        let fs = FunctionSpaceDoc {
            points: self.points.clone(),
            space: self.space.clone(),
        }
        .to_function_space()?;
        let mut values = Vec::with_capacity(self.points.len());
        for label in &self.points {
            let raw = self.values.get(label).ok_or_else(|| {
                IoError::Invalid(format!("no value listed for point {label:?}"))
            })?;
            values.push(Vector(parse_scalars(raw)?));
        }
        if self.values.len() != self.points.len() {
            return Err(IoError::Invalid(
                "values map lists labels outside the point set".into(),
            ));
        }
        let f = FunctionElement::new(&fs, values)?;
        Ok((fs, f))
    }
}

/// `{"format": 1, "domain": {...}, "codomain": {...}, "matrix": [["p/q", ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub format: u32,
    pub domain: FunctionSpaceDoc,
    pub codomain: FunctionSpaceDoc,
    pub matrix: Vec<Vec<String>>,
}

impl OperatorDoc {
    pub fn from_operator(t: &BlockOperator) -> Self {
        OperatorDoc {
            format: FORMAT_VERSION,
            domain: FunctionSpaceDoc::from_function_space(&t.domain),
            codomain: FunctionSpaceDoc::from_function_space(&t.codomain),
            matrix: (0..t.matrix.rows)
                .map(|i| t.matrix.row(i).iter().map(format_scalar).collect())
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<BlockOperator, IoError> {
        check_format(self.format)?;
        let domain = self.domain.to_function_space()?;
        let codomain = self.codomain.to_function_space()?;
        let rows = self
            .matrix
            .iter()
            .map(|r| parse_scalars(r))
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Err(IoError::Invalid("operator matrix is empty".into()));
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err(IoError::Invalid("operator matrix is ragged".into()));
        }
        let matrix = Matrix::from_rows(&rows);
        Ok(BlockOperator::new(domain, codomain, matrix)?)
    }
}

/// Metric as a nested label map: `{"a": {"b": "1"}, ...}`. Missing pairs
/// and the diagonal default to the metric axioms' forced values only where
/// forced (the diagonal); off-diagonal distances must be listed at least
/// once in either orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricDoc {
    pub points: Vec<String>,
    pub distances: BTreeMap<String, BTreeMap<String, String>>,
}

impl MetricDoc {
    pub fn from_metric(m: &FiniteMetric) -> Self {
        let labels = m.points().labels();
        let mut distances: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        for (i, a) in labels.iter().enumerate() {
            for (j, b) in labels.iter().enumerate() {
                if i < j {
                    distances
                        .entry(a.clone())
                        .or_default()
                        .insert(b.clone(), format_scalar(m.distance(i, j)));
                }
            }
        }
        MetricDoc {
            points: labels.to_vec(),
            distances,
        }
    }

    pub fn to_metric(&self) -> Result<FiniteMetric, IoError> {
        let points = PointSet::new(self.points.iter().cloned())?;
        let n = points.len();
        let mut table = vec![vec![crate::scalar::int(0); n]; n];
        let mut seen = vec![vec![false; n]; n];
        for (a, row) in &self.distances {
            let i = points.index_of(a)?;
            for (b, raw) in row {
                let j = points.index_of(b)?;
                let d = crate::scalar::parse_scalar(raw)?;
                if seen[i][j] && table[i][j] != d {
                    return Err(IoError::Invalid(format!(
                        "conflicting distances between {a:?} and {b:?}"
                    )));
                }
                table[i][j] = d.clone();
                table[j][i] = d;
                seen[i][j] = true;
                seen[j][i] = true;
            }
        }
        for (i, row) in seen.iter().enumerate() {
            for (j, &listed) in row.iter().enumerate() {
                if i != j && !listed {
                    return Err(IoError::Invalid(format!(
                        "no distance listed between {:?} and {:?}",
                        points.label(i),
                        points.label(j)
                    )));
                }
            }
        }
        Ok(FiniteMetric::new(points, table)?)
    }
}

/// Seminorm tag in spec files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SeminormDoc {
    Lipschitz { metric: MetricDoc },
    Zero,
}

/// Max-norm space file: the function-space fields plus a seminorm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxNormSpecDoc {
    pub format: u32,
    pub points: Vec<String>,
    pub space: SpaceDoc,
    pub seminorm: SeminormDoc,
}

impl MaxNormSpecDoc {
    pub fn from_spec(spec: &MaxNormSpec) -> Self {
        MaxNormSpecDoc {
            format: FORMAT_VERSION,
            points: spec.base.points.labels().to_vec(),
            space: SpaceDoc::from_space(&spec.base.value_space),
            seminorm: match &spec.seminorm {
                Seminorm::Lipschitz { metric } => SeminormDoc::Lipschitz {
                    metric: MetricDoc::from_metric(metric),
                },
                Seminorm::Zero => SeminormDoc::Zero,
            },
        }
    }

    pub fn to_spec(&self) -> Result<MaxNormSpec, IoError> {
        check_format(self.format)?;
        let base = FunctionSpaceDoc {
            points: self.points.clone(),
            space: self.space.clone(),
        }
        .to_function_space()?;
        let seminorm = match &self.seminorm {
            SeminormDoc::Lipschitz { metric } => Seminorm::Lipschitz {
                metric: metric.to_metric()?,
            },
            SeminormDoc::Zero => Seminorm::Zero,
        };
        Ok(MaxNormSpec::new(base, seminorm)?)
    }
}

/// Weighted-composition build request: `phi` maps each codomain label to a
/// domain label; `fibers` holds one matrix per codomain label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WcSpecDoc {
    pub format: u32,
    pub domain: FunctionSpaceDoc,
    pub codomain: FunctionSpaceDoc,
    pub phi: BTreeMap<String, String>,
    pub fibers: BTreeMap<String, Vec<Vec<String>>>,
}

impl WcSpecDoc {
    pub fn to_operator(&self) -> Result<BlockOperator, IoError> {
        check_format(self.format)?;
        let domain = self.domain.to_function_space()?;
        let codomain = self.codomain.to_function_space()?;
        let mut phi = Vec::with_capacity(codomain.points.len());
        let mut fibers = Vec::with_capacity(codomain.points.len());
        for y in 0..codomain.points.len() {
            let label = codomain.points.label(y);
            let target = self.phi.get(label).ok_or_else(|| {
                IoError::Invalid(format!("phi is missing codomain point {label:?}"))
            })?;
            let x = domain.points.index_of(target)?;
            phi.push(x);
            let raw = self.fibers.get(label).ok_or_else(|| {
                IoError::Invalid(format!("fibers are missing codomain point {label:?}"))
            })?;
            let rows = raw
                .iter()
                .map(|r| parse_scalars(r))
                .collect::<Result<Vec<_>, _>>()?;
            if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
                return Err(IoError::Invalid(format!(
                    "fiber at {label:?} is empty or ragged"
                )));
            }
            fibers.push(Matrix::from_rows(&rows));
        }
        Ok(crate::operator::make_weighted_composition(
            domain, codomain, &phi, &fibers,
        )?)
    }
}

/// Parse any document type from a JSON string.
pub fn from_json_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(s)?)
}

/// Canonical pretty rendering with a trailing newline; deterministic for
/// identical inputs (all maps are ordered).
pub fn to_json_string<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}
