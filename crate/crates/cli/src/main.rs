//! `tset` — exact T-set geometry and isometry decomposition for polyhedral
//! normed spaces, from the command line.
//!
//! Every run prints one report to standard output (JSON by default) and
//! exits with a semantic code:
//!
//! | code | meaning                                                    |
//! |------|------------------------------------------------------------|
//! | 0    | success; a queried property holds                          |
//! | 2    | the queried property is false                              |
//! | 3    | decomposition failed: facet transports disagree (phi)      |
//! | 4    | the operator is not an isometry for the relevant norm      |
//! | 5    | a star-property counterexample was found                   |
//! | 64   | usage error                                                |
//! | 65   | an input file could not be read, parsed, or validated      |
//! | 70   | internal inconsistency (e.g. a witness failed to replay)   |

mod commands;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use report::{OutputFormat, Report, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "tset",
    version,
    about = "Exact T-set geometry and isometry decomposition for polyhedral normed spaces"
)]
struct Cli {
    /// Space file; for `pipeline`, the domain max-norm spec file.
    #[arg(long, global = true, value_name = "FILE")]
    space: Option<PathBuf>,

    /// Codomain max-norm spec file (`pipeline` only).
    #[arg(long, global = true, value_name = "FILE")]
    space2: Option<PathBuf>,

    /// Operator file; for `op-make-wc`, a weighted-composition spec file.
    #[arg(long, global = true, value_name = "FILE")]
    op: Option<PathBuf>,

    /// Seed for all randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Random sample count for star-property and max-norm checks.
    #[arg(long, global = true, default_value_t = 256)]
    samples: usize,

    /// For `op-make-wc`, the operator file to write; for `fixtures`, the
    /// directory to write into (default "."). Other commands copy their
    /// report here in addition to standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Re-check every emitted witness/certificate; exit 70 on any replay
    /// failure.
    #[arg(long, global = true)]
    verify_witness: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a space file and summarize its unit ball.
    SpaceAnalyze,
    /// List T-sets, their Γ functionals, and the discrepancy matrix.
    SpaceTsets,
    /// Decide property (D): every pair of T-sets is discrepant.
    CheckD,
    /// Decide property (D_w): some T-set is discrepant from all others.
    CheckDw,
    /// Check whether an operator is a surjective sup-norm isometry.
    OpVerify,
    /// Decompose a sup-norm isometry into a weighted composition.
    OpDecompose,
    /// Build an operator file from a weighted-composition spec.
    OpMakeWc,
    /// Search for a star-property counterexample on an operator.
    StCheck,
    /// Full reduction: max-norm isometry, star gates, decomposition.
    Pipeline,
    /// Write a named example input file (see --help for names).
    Fixtures {
        /// One of: square, hexagon, octahedron, cube_bipyramid,
        /// identity_op, swap_op, mixing_swap, wc_random.
        name: String,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::SpaceAnalyze => "space-analyze",
            Cmd::SpaceTsets => "space-tsets",
            Cmd::CheckD => "check-d",
            Cmd::CheckDw => "check-dw",
            Cmd::OpVerify => "op-verify",
            Cmd::OpDecompose => "op-decompose",
            Cmd::OpMakeWc => "op-make-wc",
            Cmd::StCheck => "st-check",
            Cmd::Pipeline => "pipeline",
            Cmd::Fixtures { .. } => "fixtures",
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let started = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let ctx = commands::Ctx {
        space: cli.space.clone(),
        space2: cli.space2.clone(),
        op: cli.op.clone(),
        seed: cli.seed,
        samples: cli.samples,
        out: cli.out.clone(),
        verify_witness: cli.verify_witness,
    };
    let mut inputs = BTreeMap::new();
    let result = match &cli.command {
        Cmd::SpaceAnalyze => commands::space_analyze(&ctx, &mut inputs),
        Cmd::SpaceTsets => commands::space_tsets(&ctx, &mut inputs),
        Cmd::CheckD => commands::check_d(&ctx, &mut inputs),
        Cmd::CheckDw => commands::check_dw(&ctx, &mut inputs),
        Cmd::OpVerify => commands::op_verify(&ctx, &mut inputs),
        Cmd::OpDecompose => commands::op_decompose(&ctx, &mut inputs),
        Cmd::OpMakeWc => commands::op_make_wc(&ctx, &mut inputs),
        Cmd::StCheck => commands::st_check(&ctx, &mut inputs),
        Cmd::Pipeline => commands::pipeline(&ctx, &mut inputs),
        Cmd::Fixtures { name } => commands::fixtures_cmd(&ctx, name, &mut inputs),
    };
    let outcome = match result {
        Ok(outcome) => outcome,
        Err(failure) => {
            eprintln!("tset: {}", failure.message());
            return failure.exit_code();
        }
    };

    let report = Report {
        format: tset_core::io::FORMAT_VERSION,
        command: cli.command.name().to_string(),
        argv: std::env::args().skip(1).collect(),
        inputs,
        seed: cli.seed,
        samples: cli.samples,
        verdict: outcome.verdict,
        exit_code: outcome.exit_code,
        detail: outcome.detail,
        witness_verified: outcome.witness_verified,
        timing_ms: started.elapsed().as_millis(),
    };
    let rendered = report.render(cli.format);
    print!("{rendered}");

    // --out doubles as a report sink for the read-only commands; the two
    // writer commands already used it for their artifact.
    let writes_artifact = matches!(cli.command, Cmd::OpMakeWc | Cmd::Fixtures { .. });
    if let Some(out) = &cli.out {
        if !writes_artifact {
            if let Err(e) = std::fs::write(out, &rendered) {
                eprintln!("tset: cannot write report to {}: {e}", out.display());
                return report::EXIT_INTERNAL;
            }
        }
    }
    report.exit_code
}
