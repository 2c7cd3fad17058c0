//! `ffverify`: run individual theorem verifiers or the full suite, emit
//! JSON or text reports, and export the group tables.
//!
//! Exit codes: 0 when every dispatched check passes, 1 when any report
//! carries violations, 2 on usage errors and budget refusals.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ffverify_core::budget::Budget;
use ffverify_core::flanders::{
    affine_span_gl, classify_maximal, exceptional_census, rank_one_sum_check, rectangular_check,
    split_lemma_check, verify_rank_bound, Mode,
};
use ffverify_core::groups::{
    certify_alpha, certify_phi, certify_psi_bar, certify_to_perm, Context,
};
use ffverify_core::mat::enumerate_gl;
use ffverify_core::suite::run_all;
use ffverify_core::{Error, FieldP, VerificationReport};

#[derive(Parser)]
#[command(name = "ffverify", version, about = "Exhaustive verification of bounded-rank matrix subspace theorems and the affine preservers of GL2(F2)")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for parallel sweeps (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for the randomized sampling inside certificates; exhaustive
    /// results never depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write reports to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Include wall-clock timings in reports (breaks byte-for-byte
    /// determinism across runs).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a single theorem verifier.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Exhaustive censuses.
    Census {
        #[command(subcommand)]
        target: CensusTarget,
    },
    /// Isomorphism certificates for the groups attached to Mat_2(F2).
    Iso {
        #[command(subcommand)]
        target: IsoTarget,
    },
    /// Dump group tables and the quadratic form space as JSON.
    Export {
        #[command(subcommand)]
        target: ExportTarget,
    },
    /// Run the entire suite in its documented order.
    All,
}

#[derive(Args)]
struct Params {
    /// Matrix row count n (for split-lemma: the left factor dimension).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Column count p for rectangular shapes (for split-lemma: the right
    /// factor dimension).
    #[arg(long)]
    p: Option<usize>,
    /// Field size q (2, 3, or 5).
    #[arg(long, default_value_t = 2)]
    q: u8,
    /// Bounded rank r.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Sweep over linear subspaces only, or all affine subspaces.
    #[arg(long, default_value = "affine")]
    mode: String,
}

impl Params {
    fn field(&self) -> Result<FieldP, Error> {
        match self.q {
            2 => Ok(FieldP::F2),
            3 => Ok(FieldP::F3),
            5 => Ok(FieldP::F5),
            other => Err(Error::Parse(format!("unsupported field size {other}; use 2, 3, or 5"))),
        }
    }

    fn mode(&self) -> Result<Mode, Error> {
        self.mode.parse()
    }
}

#[derive(Subcommand)]
enum VerifyTarget {
    /// Flanders classification of maximal bounded-rank subspaces.
    Flanders(Params),
    /// Flanders dimension bound at dimension n*r + 1.
    Bound(Params),
    /// The splitting lemma for product subspaces (--n and --p are the
    /// two factor dimensions).
    SplitLemma(Params),
    /// The rank-one sum lemma (kernels or images coincide).
    RankOne(Params),
    /// The rectangular corollary: column type only when n > p.
    Rectangular(Params),
    /// Affine span of GL_n(F_q).
    SpanGl(Params),
}

#[derive(Subcommand)]
enum CensusTarget {
    /// All 2-dimensional bounded-rank affine subspaces of Mat_2(F2),
    /// with the exceptional singular plane located.
    Exceptional,
}

#[derive(Subcommand)]
enum IsoTarget {
    /// Sp(b) acting on the six Arf-1 quadratic forms.
    PsiBar,
    /// Sp(b) conjugated onto the affine stabilizers of GL_2(F2).
    Phi,
    /// The affine stabilizers acting on the six invertible matrices.
    Perm,
    /// Linear parts landing in the symplectic group of the polar of det.
    Alpha,
    /// All four certificates.
    All,
}

#[derive(Subcommand)]
enum ExportTarget {
    /// The invertible n x n matrices over F_q.
    Glq(Params),
    /// The 720 elements of Sp_4(F2).
    Sp4,
    /// The 720 affine bijections of Mat_2(F2) stabilizing GL_2(F2).
    Ag2,
    /// The 16 quadratic forms with the canonical polar form on F2^4.
    Qspace,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        // may fail if a pool already exists; harmless for a CLI binary
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    match run(&cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Error> {
    let budget = Budget::from_env();
    let mut lines: Vec<String> = Vec::new();
    let mut all_pass = true;

    fn render(
        reports: Vec<VerificationReport>,
        cli: &Cli,
        lines: &mut Vec<String>,
        all_pass: &mut bool,
    ) {
        for r in reports {
            *all_pass &= r.pass;
            let r = if cli.timings { r } else { r.without_timing() };
            lines.push(match cli.format {
                Format::Json => r.to_json(),
                Format::Text => r.to_text(),
            });
        }
    }
    match &cli.cmd {
        Cmd::Verify { target } => {
            let report = match target {
                VerifyTarget::Flanders(p) => {
                    classify_maximal(p.n, p.field()?, p.r, p.mode()?, &budget)?
                }
                VerifyTarget::Bound(p) => {
                    verify_rank_bound(p.n, p.field()?, p.r, p.mode()?, &budget)?
                }
                VerifyTarget::SplitLemma(p) => {
                    split_lemma_check(p.n, p.p.unwrap_or(1), p.field()?, &budget)?
                }
                VerifyTarget::RankOne(p) => rank_one_sum_check(p.n, p.field()?, &budget)?,
                VerifyTarget::Rectangular(p) => {
                    let cols = p.p.ok_or_else(|| {
                        Error::Parse("rectangular requires --p (column count)".into())
                    })?;
                    rectangular_check(p.n, cols, p.field()?, p.r, &budget)?
                }
                VerifyTarget::SpanGl(p) => affine_span_gl(p.n, p.field()?, &budget)?,
            };
            render(vec![report], cli, &mut lines, &mut all_pass);
        }
        Cmd::Census { target: CensusTarget::Exceptional } => {
            render(vec![exceptional_census(&budget)?], cli, &mut lines, &mut all_pass);
        }
        Cmd::Iso { target } => {
            let ctx = Context::build(&budget)?;
            let reports = match target {
                IsoTarget::PsiBar => vec![certify_psi_bar(&ctx)?],
                IsoTarget::Phi => vec![certify_phi(&ctx, cli.seed)?],
                IsoTarget::Perm => vec![certify_to_perm(&ctx)?],
                IsoTarget::Alpha => vec![certify_alpha(&ctx)?],
                IsoTarget::All => vec![
                    certify_psi_bar(&ctx)?,
                    certify_phi(&ctx, cli.seed)?,
                    certify_to_perm(&ctx)?,
                    certify_alpha(&ctx)?,
                ],
            };
            render(reports, cli, &mut lines, &mut all_pass);
        }
        Cmd::Export { target } => {
            lines.push(export(target, &budget)?.to_string());
        }
        Cmd::All => {
            render(run_all(&budget, cli.seed)?, cli, &mut lines, &mut all_pass);
        }
    }

    let body = lines.join("\n") + "\n";
    match &cli.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| Error::Parse(format!("cannot write output: {e}")))?
        }
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| Error::Parse(format!("cannot write output: {e}")))?;
        }
    }
    Ok(all_pass)
}

fn export(target: &ExportTarget, budget: &Budget) -> Result<serde_json::Value, Error> {
    Ok(match target {
        ExportTarget::Glq(p) => {
            let field = p.field()?;
            let mats: Vec<String> =
                enumerate_gl(p.n, field, budget)?.map(|m| m.to_text()).collect();
            json!({ "schema": 1, "object": "gl", "n": p.n, "q": p.q, "count": mats.len(), "elements": mats })
        }
        ExportTarget::Sp4 => {
            let ctx = Context::build(budget)?;
            let mats: Vec<Vec<String>> = ctx
                .sp_b
                .elements()
                .iter()
                .map(|m| m.to_hex_rows().expect("F2 matrices have hex rows"))
                .collect();
            json!({ "schema": 1, "object": "sp4_f2", "count": mats.len(), "elements": mats })
        }
        ExportTarget::Ag2 => {
            let ctx = Context::build(budget)?;
            let maps: Vec<serde_json::Value> = ctx
                .ag2
                .elements()
                .iter()
                .map(|u| {
                    json!({
                        "linear": u.linear().to_hex_rows().expect("F2 matrices have hex rows"),
                        "translation": u.translation(),
                    })
                })
                .collect();
            json!({ "schema": 1, "object": "ag2_f2", "count": maps.len(), "elements": maps })
        }
        ExportTarget::Qspace => {
            let ctx = Context::build(budget)?;
            let forms: Vec<serde_json::Value> = ctx
                .qspace
                .forms()
                .iter()
                .map(|q| {
                    json!({
                        "representing": q.representing().to_text(),
                        "diagonal": q.diagonal(),
                        "arf": q.arf().expect("forms in the space are regular"),
                    })
                })
                .collect();
            json!({ "schema": 1, "object": "qspace", "count": forms.len(), "elements": forms })
        }
    })
}
