//! One function per subcommand. Each returns an [`Outcome`] (verdict,
//! exit code, detail payload) or a [`Failure`] that aborts before a report
//! exists. With `--verify-witness`, every emitted witness or certificate is
//! re-checked through the library's public predicates; a replay failure is
//! an internal error (exit 70).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use tset_core::decompose::{
    decompose, recover_functional, structural_decompose, synthesize, verify_decomposition_strong,
    DecompositionFailure,
};
use tset_core::fixtures;
use tset_core::io::{
    from_json_str, to_json_string, MaxNormSpecDoc, OperatorDoc, SpaceDoc, WcSpecDoc,
};
use tset_core::operator::{
    isometry_witness, stacked_sup_norm, verify_isometry, BlockOperator, IsometryDirection,
};
use tset_core::stnorm::{
    max_norm, st_falsify, st_property_holds_at, theorem_app_pipeline, MaxNormSpec, PipelineError,
    StDirection, StVerdict,
};
use tset_core::symmetry::ball_symmetries;
use tset_core::tsets::{
    discrepancy_matrix, discrepant, gamma, has_property_d, has_property_dw, tsets,
    DiscrepancyReport, DiscrepancyVerdict, PropertyD, PropertyDw,
};
use tset_core::NormedSpace;

use crate::report::{
    read_input, sha256_hex, Failure, InputFile, InputRecord, EXIT_INTERNAL, EXIT_NOT_ISOMETRY,
    EXIT_OK, EXIT_PHI_DISAGREEMENT, EXIT_PROPERTY_FALSE, EXIT_ST_FALSIFIED,
};

/// Global flags, resolved once in `main` and shared by all commands.
pub struct Ctx {
    pub space: Option<PathBuf>,
    pub space2: Option<PathBuf>,
    pub op: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub verify_witness: bool,
}

/// What a command decided; `main` wraps it into the report envelope.
pub struct Outcome {
    pub verdict: String,
    pub exit_code: i32,
    pub detail: serde_json::Value,
    pub witness_verified: Option<bool>,
}

fn outcome(verdict: &str, exit_code: i32, detail: serde_json::Value) -> Outcome {
    Outcome {
        verdict: verdict.to_string(),
        exit_code,
        detail,
        witness_verified: None,
    }
}

/// Run the replay closure when `--verify-witness` is set. A replay error
/// aborts the run with exit 70; success is recorded in the report.
fn with_replay(
    ctx: &Ctx,
    mut out: Outcome,
    replay: impl FnOnce() -> Result<(), String>,
) -> Result<Outcome, Failure> {
    if ctx.verify_witness {
        replay().map_err(|m| Failure::Internal(format!("witness replay failed: {m}")))?;
        out.witness_verified = Some(true);
    }
    Ok(out)
}

fn value<T: Serialize>(t: &T) -> serde_json::Value {
    serde_json::to_value(t).expect("report payloads serialize")
}

fn require<'a>(opt: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    opt.as_deref()
        .ok_or_else(|| Failure::Usage(format!("missing required --{flag} FILE")))
}

fn record(inputs: &mut BTreeMap<String, InputRecord>, flag: &str, file: &InputFile) {
    inputs.insert(
        flag.to_string(),
        InputRecord {
            path: file.path.display().to_string(),
            sha256: file.sha256.clone(),
        },
    );
}

fn load_space(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<NormedSpace, Failure> {
    let path = require(&ctx.space, "space")?;
    let file = read_input(path)?;
    record(inputs, "space", &file);
    let doc: SpaceDoc = from_json_str(&file.text)?;
    Ok(doc.to_space()?)
}

fn load_operator(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<BlockOperator, Failure> {
    let path = require(&ctx.op, "op")?;
    let file = read_input(path)?;
    record(inputs, "op", &file);
    let doc: OperatorDoc = from_json_str(&file.text)?;
    Ok(doc.to_operator()?)
}

fn load_max_spec(
    opt: &Option<PathBuf>,
    flag: &str,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<MaxNormSpec, Failure> {
    let path = require(opt, flag)?;
    let file = read_input(path)?;
    record(inputs, flag, &file);
    let doc: MaxNormSpecDoc = from_json_str(&file.text)?;
    Ok(doc.to_spec()?)
}

pub fn space_analyze(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<Outcome, Failure> {
    let space = load_space(ctx, inputs)?;
    let symmetries = ball_symmetries(&space);
    let facets: Vec<serde_json::Value> = space
        .ball
        .facets
        .iter()
        .enumerate()
        .map(|(id, f)| json!({"id": id, "normal": value(&f.normal), "incident": f.incident}))
        .collect();
    let detail = json!({
        "dim": space.dim,
        "vertex_count": space.ball.vertices.len(),
        "facet_count": space.ball.facets.len(),
        "vertices": value(&space.ball.vertices),
        "facets": facets,
        "symmetry_order": symmetries.len(),
    });
    let out = outcome("valid", EXIT_OK, detail);
    with_replay(ctx, out, || {
        for m in &symmetries {
            for v in &space.ball.vertices {
                if !space.ball.vertices.contains(&m.apply(v)) {
                    return Err("claimed symmetry does not permute the ball vertices".into());
                }
            }
        }
        Ok(())
    })
}

fn replay_report(space: &NormedSpace, report: &DiscrepancyReport) -> Result<(), String> {
    let fresh = discrepant(space, report.pair.0, report.pair.1).map_err(|e| e.to_string())?;
    if &fresh != report {
        return Err(format!("discrepancy report for pair {:?} does not replay", report.pair));
    }
    Ok(())
}

pub fn space_tsets(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<Outcome, Failure> {
    let space = load_space(ctx, inputs)?;
    let ts = tsets(&space);
    let gammas: Vec<_> = ts.iter().map(|t| gamma(&space, t)).collect();
    let matrix = discrepancy_matrix(&space);
    let d = has_property_d(&space);
    let dw = has_property_dw(&space);
    let detail = json!({
        "tset_count": ts.len(),
        "tsets": value(&ts),
        "gammas": value(&gammas),
        "discrepancy_matrix": value(&matrix),
        "property_d": value(&d),
        "property_dw": value(&dw),
    });
    let out = outcome("analyzed", EXIT_OK, detail);
    with_replay(ctx, out, || {
        for report in &matrix {
            replay_report(&space, report)?;
        }
        Ok(())
    })
}

pub fn check_d(ctx: &Ctx, inputs: &mut BTreeMap<String, InputRecord>) -> Result<Outcome, Failure> {
    let space = load_space(ctx, inputs)?;
    let d = has_property_d(&space);
    match &d {
        PropertyD::Holds => {
            let out = outcome("holds", EXIT_OK, json!({"property_d": value(&d)}));
            with_replay(ctx, out, || {
                let n = space.ball.facets.len();
                for r in 0..n {
                    for s in r + 1..n {
                        let rep = discrepant(&space, r, s).map_err(|e| e.to_string())?;
                        if rep.verdict == DiscrepancyVerdict::NotDiscrepant {
                            return Err(format!("pair ({r}, {s}) is not discrepant after all"));
                        }
                    }
                }
                Ok(())
            })
        }
        PropertyD::Fails { report } => {
            let detail = json!({"property_d": value(&d), "pair": report.pair});
            let out = outcome("fails", EXIT_PROPERTY_FALSE, detail);
            with_replay(ctx, out, || {
                replay_report(&space, report)?;
                if report.verdict != DiscrepancyVerdict::NotDiscrepant {
                    return Err("failing pair replays as discrepant".into());
                }
                Ok(())
            })
        }
    }
}

pub fn check_dw(ctx: &Ctx, inputs: &mut BTreeMap<String, InputRecord>) -> Result<Outcome, Failure> {
    let space = load_space(ctx, inputs)?;
    let dw = has_property_dw(&space);
    match &dw {
        PropertyDw::Holds { witness } => {
            let detail = json!({"property_dw": value(&dw), "witness": witness});
            let out = outcome("holds", EXIT_OK, detail);
            let witness = *witness;
            with_replay(ctx, out, || {
                for s in 0..space.ball.facets.len() {
                    if s == witness {
                        continue;
                    }
                    let rep = discrepant(&space, witness, s).map_err(|e| e.to_string())?;
                    if rep.verdict == DiscrepancyVerdict::NotDiscrepant {
                        return Err(format!("witness {witness} is not discrepant from {s}"));
                    }
                }
                Ok(())
            })
        }
        PropertyDw::Fails { blockers } => {
            let out = outcome("fails", EXIT_PROPERTY_FALSE, json!({"property_dw": value(&dw)}));
            with_replay(ctx, out, || {
                if blockers.len() != space.ball.facets.len() {
                    return Err("one blocking report per candidate expected".into());
                }
                for (r, blocker) in blockers.iter().enumerate() {
                    if blocker.pair.0 != r && blocker.pair.1 != r {
                        return Err(format!("blocker for candidate {r} names pair {:?}", blocker.pair));
                    }
                    replay_report(&space, blocker)?;
                    if blocker.verdict != DiscrepancyVerdict::NotDiscrepant {
                        return Err(format!("blocker for candidate {r} replays as discrepant"));
                    }
                }
                Ok(())
            })
        }
    }
}

pub fn op_verify(ctx: &Ctx, inputs: &mut BTreeMap<String, InputRecord>) -> Result<Outcome, Failure> {
    let t = load_operator(ctx, inputs)?;
    match isometry_witness(&t) {
        None => {
            let out = outcome(
                "isometry",
                EXIT_OK,
                json!({"isometric": true, "witness": null}),
            );
            with_replay(ctx, out, || {
                if verify_isometry(&t) {
                    Ok(())
                } else {
                    Err("witness-free operator fails verify_isometry".into())
                }
            })
        }
        Some(w) => {
            let detail = json!({"isometric": false, "witness": value(&w)});
            let out = outcome("not-isometry", EXIT_NOT_ISOMETRY, detail);
            with_replay(ctx, out, || {
                match w.direction {
                    IsometryDirection::Forward => {
                        if stacked_sup_norm(&t.domain, &w.element) != w.element_norm {
                            return Err("recorded domain norm does not replay".into());
                        }
                        let image = t.matrix.apply(&w.element);
                        if stacked_sup_norm(&t.codomain, &image) != w.image_norm {
                            return Err("recorded image norm does not replay".into());
                        }
                    }
                    IsometryDirection::Backward => {
                        let inv = t.inverse().map_err(|e| e.to_string())?;
                        if stacked_sup_norm(&t.codomain, &w.element) != w.element_norm {
                            return Err("recorded codomain norm does not replay".into());
                        }
                        let preimage = inv.matrix.apply(&w.element);
                        if stacked_sup_norm(&t.domain, &preimage) != w.image_norm {
                            return Err("recorded preimage norm does not replay".into());
                        }
                    }
                    IsometryDirection::NotInvertible => {
                        let square = t.matrix.rows == t.matrix.cols;
                        if square && t.matrix.rank() == t.matrix.cols {
                            return Err("matrix replays as invertible".into());
                        }
                        if square && !w.element.is_zero() {
                            let image = t.matrix.apply(&w.element);
                            if !image.is_zero() {
                                return Err("kernel witness has a nonzero image".into());
                            }
                        }
                        return Ok(());
                    }
                }
                if w.element_norm == w.image_norm {
                    return Err("witness norms are equal; no violation".into());
                }
                Ok(())
            })
        }
    }
}

pub fn op_decompose(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<Outcome, Failure> {
    let t = load_operator(ctx, inputs)?;
    match decompose(&t) {
        Ok(d) => {
            let strong = verify_decomposition_strong(&t, &d);
            let synthesis_matches = synthesize(&t, &d).matrix == t.matrix;
            let structural_agrees = structural_decompose(&t).as_ref() == Ok(&d);
            let detail = json!({
                "decomposition": value(&d),
                "strong": value(&strong),
                "synthesis_matches": synthesis_matches,
                "structural_agrees": structural_agrees,
            });
            if !(strong.all_hold() && synthesis_matches && structural_agrees) {
                // Unreachable for a genuine decomposition; never silently OK.
                return Ok(outcome("internal-inconsistency", EXIT_INTERNAL, detail));
            }
            let out = outcome("decomposed", EXIT_OK, detail);
            with_replay(ctx, out, || {
                for cert in &d.certificates {
                    let (x, functional) =
                        recover_functional(&t, cert.facet_id, cert.y).map_err(|e| e.to_string())?;
                    if x != cert.x || functional != cert.functional {
                        return Err(format!(
                            "certificate (facet {}, y={}) does not replay",
                            cert.facet_id, cert.y
                        ));
                    }
                    if d.phi[cert.y] != cert.x {
                        return Err(format!("certificate at y={} contradicts phi", cert.y));
                    }
                }
                Ok(())
            })
        }
        Err(failure) => {
            let (verdict, code) = match &failure {
                DecompositionFailure::NotIsometry => ("not-isometry", EXIT_NOT_ISOMETRY),
                DecompositionFailure::PhiDisagreement { .. } => {
                    ("phi-disagreement", EXIT_PHI_DISAGREEMENT)
                }
                _ => ("decomposition-failed", EXIT_INTERNAL),
            };
            let out = outcome(verdict, code, json!({"failure": value(&failure)}));
            with_replay(ctx, out, || match &failure {
                DecompositionFailure::NotIsometry => {
                    if isometry_witness(&t).is_some() {
                        Ok(())
                    } else {
                        Err("operator replays as an isometry".into())
                    }
                }
                DecompositionFailure::PhiDisagreement { y, conflicts } => {
                    let mut xs: Vec<usize> = conflicts.iter().map(|&(_, x)| x).collect();
                    xs.sort_unstable();
                    xs.dedup();
                    if xs.len() < 2 {
                        return Err("conflicts do not name two source points".into());
                    }
                    for &(facet_id, x) in conflicts {
                        let (fresh_x, _) =
                            recover_functional(&t, facet_id, *y).map_err(|e| e.to_string())?;
                        if fresh_x != x {
                            return Err(format!(
                                "conflict (facet {facet_id}, x={x}) does not replay"
                            ));
                        }
                    }
                    Ok(())
                }
                _ => Ok(()),
            })
        }
    }
}

pub fn op_make_wc(
    ctx: &Ctx,
    inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<Outcome, Failure> {
    let path = require(&ctx.op, "op")?;
    let file = read_input(path)?;
    record(inputs, "op", &file);
    let doc: WcSpecDoc = from_json_str(&file.text)?;
    let t = doc.to_operator()?;
    let out_path = ctx
        .out
        .as_ref()
        .ok_or_else(|| Failure::Usage("op-make-wc needs --out FILE for the operator".into()))?;
    let rendered = to_json_string(&OperatorDoc::from_operator(&t));
    std::fs::write(out_path, &rendered)
        .map_err(|e| Failure::Data(format!("cannot write {}: {e}", out_path.display())))?;
    let detail = json!({
        "written": out_path.display().to_string(),
        "sha256": sha256_hex(rendered.as_bytes()),
        "domain_points": t.domain.points.labels(),
        "codomain_points": t.codomain.points.labels(),
        "isometric": verify_isometry(&t),
    });
    let out = outcome("written", EXIT_OK, detail);
    with_replay(ctx, out, || {
        let text = std::fs::read_to_string(out_path).map_err(|e| e.to_string())?;
        let doc: OperatorDoc = from_json_str(&text).map_err(|e| e.to_string())?;
        let back = doc.to_operator().map_err(|e| e.to_string())?;
        if back == t {
            Ok(())
        } else {
            Err("written operator file does not round-trip".into())
        }
    })
}

pub fn st_check(ctx: &Ctx, inputs: &mut BTreeMap<String, InputRecord>) -> Result<Outcome, Failure> {
    let t = load_operator(ctx, inputs)?;
    let verdict = st_falsify(&t, ctx.samples, ctx.seed);
    match &verdict {
        StVerdict::NoCounterexampleFound { .. } => {
            let out = outcome("no-counterexample", EXIT_OK, json!({"st": value(&verdict)}));
            with_replay(ctx, out, || Ok(()))
        }
        StVerdict::Counterexample { u, y0 } => {
            let out = outcome("falsified", EXIT_ST_FALSIFIED, json!({"st": value(&verdict)}));
            with_replay(ctx, out, || {
                if st_property_holds_at(&t, *y0, u) {
                    Err(format!("star property replays as holding at y0={y0}"))
                } else {
                    Ok(())
                }
            })
        }
    }
}

pub fn pipeline(ctx: &Ctx, inputs: &mut BTreeMap<String, InputRecord>) -> Result<Outcome, Failure> {
    let t = load_operator(ctx, inputs)?;
    let spec_a = load_max_spec(&ctx.space, "space", inputs)?;
    let spec_b = load_max_spec(&ctx.space2, "space2", inputs)?;
    match theorem_app_pipeline(&t, &spec_a, &spec_b, ctx.samples, ctx.seed) {
        Ok(rep) => {
            let out = outcome("decomposed", EXIT_OK, value(&rep));
            with_replay(ctx, out, || {
                if !rep.strong.all_hold() {
                    return Err("strong verification does not hold".into());
                }
                if synthesize(&t, &rep.decomposition).matrix != t.matrix {
                    return Err("decomposition does not re-synthesize the operator".into());
                }
                if !rep.sup_isometry {
                    return Err("pipeline reported success without the sup-norm gate".into());
                }
                Ok(())
            })
        }
        Err(PipelineError::Shape(e)) => Err(Failure::Data(e.to_string())),
        Err(e @ PipelineError::NotMaxNormIsometry { .. }) => {
            let out = outcome("not-isometry", EXIT_NOT_ISOMETRY, json!({"error": value(&e)}));
            with_replay(ctx, out, || {
                let PipelineError::NotMaxNormIsometry { witness: Some(w) } = &e else {
                    return Ok(());
                };
                if max_norm(&spec_a, &w.f) != w.domain_norm {
                    return Err("recorded domain max-norm does not replay".into());
                }
                if max_norm(&spec_b, &t.apply(&w.f)) != w.codomain_norm {
                    return Err("recorded codomain max-norm does not replay".into());
                }
                if w.domain_norm == w.codomain_norm {
                    return Err("witness norms are equal; no violation".into());
                }
                Ok(())
            })
        }
        Err(e @ PipelineError::StFalsified { .. }) => {
            let out = outcome("st-falsified", EXIT_ST_FALSIFIED, json!({"error": value(&e)}));
            with_replay(ctx, out, || {
                let PipelineError::StFalsified { direction, u, y0 } = &e else {
                    unreachable!("guarded by the arm pattern");
                };
                let holds = match direction {
                    StDirection::Forward => st_property_holds_at(&t, *y0, u),
                    StDirection::Inverse => {
                        let inv = t.inverse().map_err(|e| e.to_string())?;
                        st_property_holds_at(&inv, *y0, u)
                    }
                };
                if holds {
                    Err(format!("star property replays as holding at y0={y0}"))
                } else {
                    Ok(())
                }
            })
        }
        Err(PipelineError::SupIsometryAssertionFailed) => Ok(outcome(
            "internal-inconsistency",
            EXIT_INTERNAL,
            json!({"error": "star gates passed but the sup-norm isometry assertion failed"}),
        )),
        Err(PipelineError::Decomposition(failure)) => {
            let (verdict, code) = match &failure {
                DecompositionFailure::NotIsometry => ("not-isometry", EXIT_NOT_ISOMETRY),
                DecompositionFailure::PhiDisagreement { .. } => {
                    ("phi-disagreement", EXIT_PHI_DISAGREEMENT)
                }
                _ => ("decomposition-failed", EXIT_INTERNAL),
            };
            Ok(outcome(verdict, code, json!({"failure": value(&failure)})))
        }
    }
}

pub fn fixtures_cmd(
    ctx: &Ctx,
    name: &str,
    _inputs: &mut BTreeMap<String, InputRecord>,
) -> Result<Outcome, Failure> {
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::Data(format!("cannot create {}: {e}", dir.display())))?;
    enum Kind {
        Space,
        Operator,
    }
    let (kind, rendered) = match name {
        "square" => (Kind::Space, to_json_string(&SpaceDoc::from_space(&fixtures::square()))),
        "hexagon" => (Kind::Space, to_json_string(&SpaceDoc::from_space(&fixtures::hexagon()))),
        "octahedron" => (
            Kind::Space,
            to_json_string(&SpaceDoc::from_space(&fixtures::octahedron())),
        ),
        "cube_bipyramid" => (
            Kind::Space,
            to_json_string(&SpaceDoc::from_space(&fixtures::cube_bipyramid())),
        ),
        "identity_op" => (
            Kind::Operator,
            to_json_string(&OperatorDoc::from_operator(&fixtures::identity_op())),
        ),
        "swap_op" => (
            Kind::Operator,
            to_json_string(&OperatorDoc::from_operator(&fixtures::swap_op())),
        ),
        "mixing_swap" => (
            Kind::Operator,
            to_json_string(&OperatorDoc::from_operator(&fixtures::mixing_swap())),
        ),
        "wc_random" => {
            let t = fixtures::wc_random(&["a", "b", "c"], fixtures::square(), ctx.seed);
            (Kind::Operator, to_json_string(&OperatorDoc::from_operator(&t)))
        }
        _ => {
            return Err(Failure::Usage(format!(
                "unknown fixture {name:?}; known: square, hexagon, octahedron, \
                 cube_bipyramid, identity_op, swap_op, mixing_swap, wc_random"
            )))
        }
    };
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, &rendered)
        .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))?;
    let detail = json!({
        "name": name,
        "written": path.display().to_string(),
        "sha256": sha256_hex(rendered.as_bytes()),
    });
    let out = outcome("written", EXIT_OK, detail);
    with_replay(ctx, out, || {
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        match kind {
            Kind::Space => {
                let doc: SpaceDoc = from_json_str(&text).map_err(|e| e.to_string())?;
                doc.to_space().map_err(|e| e.to_string())?;
            }
            Kind::Operator => {
                let doc: OperatorDoc = from_json_str(&text).map_err(|e| e.to_string())?;
                doc.to_operator().map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    })
}
