use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use tetrakit::classify::{classify_triple, TripleKind};
use tetrakit::config::RunConfig;
use tetrakit::dilation::{
    build_dilation, recover_fundamental_from_dilation, verify_model_identities, verify_moments, DilationModel,
};
use tetrakit::domains::{
    gamma_boundary, gamma_membership, sample_near_boundary, sample_tetrablock, tetrablock_boundary,
    tetrablock_membership_with, Criterion, Point2, Point3, SampleMode,
};
use tetrakit::json::to_canonical_string;
use tetrakit::linalg::defect;
use tetrakit::suite::{run_suite, SuiteKind};
use tetrakit::tetra::{solve_fundamental_pair, w_sweep_with, OperatorTriple, SpectralBattery};
use tetrakit::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tetrakit",
    version,
    about = "Tetrablock and symmetrized-bidisc operator checks"
)]
struct Cli {
    /// RunConfig JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Membership and battery tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Domain membership of a point.
    Point {
        #[command(subcommand)]
        action: PointAction,
    },
    /// Operator triple checks.
    Triple {
        #[command(subcommand)]
        action: TripleAction,
    },
    /// Isometric dilation models.
    Dilate {
        #[command(subcommand)]
        action: DilateAction,
    },
    /// Batch property suite.
    Suite {
        #[arg(long)]
        suite: SuiteKind,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Also write the summary here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample points of the tetrablock.
    Sample {
        #[arg(long, value_enum, default_value = "interior")]
        mode: SampleArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Subcommand)]
enum PointAction {
    Check {
        #[arg(long, value_enum, default_value = "tetrablock")]
        set: SetArg,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Exit status follows the open set instead of its closure.
        #[arg(long)]
        open: bool,
        /// Comma-separated criterion ids (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<String>,
    },
}

#[derive(Subcommand)]
enum TripleAction {
    /// Spectral-set battery.
    Check {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Fundamental operators F1, F2.
    Fundamental {
        #[arg(long)]
        file: Option<PathBuf>,
    },
    Classify {
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DilateAction {
    Build {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    Verify {
        /// Defaults to depth - 1.
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Tetrablock,
    Be,
    Gamma,
    Bgamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleArg {
    Interior,
    Boundary,
    Exterior,
    NearBoundary,
}

/// 0: in the set / not refuted; 1: not in the set / refuted.
struct Outcome {
    json: String,
    code: u8,
}

fn emit<T: Serialize>(value: &T, pass: bool) -> Result<Outcome> {
    Ok(Outcome {
        json: to_canonical_string(value)?,
        code: if pass { 0 } else { 1 },
    })
}

fn read_input(file: &Option<PathBuf>) -> Result<String> {
    match file {
        Some(p) => Ok(std::fs::read_to_string(p)?),
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(file: &Option<PathBuf>) -> Result<T> {
    Ok(serde_json::from_str(&read_input(file)?)?)
}

fn parse_criteria(ids: &[String]) -> Result<Vec<Criterion>> {
    if ids.is_empty() {
        return Ok(Criterion::ALL.to_vec());
    }
    ids.iter()
        .map(|id| {
            Ok(serde_json::from_value(serde_json::Value::String(
                id.trim().to_string(),
            ))?)
        })
        .collect()
}

fn point_check(
    cfg: &RunConfig,
    set: SetArg,
    file: &Option<PathBuf>,
    open: bool,
    criteria: &[String],
) -> Result<Outcome> {
    match set {
        SetArg::Tetrablock => {
            let x: Point3 = parse(file)?;
            let v = tetrablock_membership_with(&x, &parse_criteria(criteria)?, cfg.tol, cfg.grids())?;
            let pass = if open { v.in_open } else { v.in_closed };
            emit(&v, pass)
        }
        SetArg::Be => {
            let x: Point3 = parse(file)?;
            let b = tetrablock_boundary(&x, cfg.tol);
            emit(&b, b.on_boundary)
        }
        SetArg::Gamma => {
            let q: Point2 = parse(file)?;
            let v = gamma_membership(&q, cfg.tol);
            let pass = if open { v.in_open } else { v.in_closed };
            emit(&v, pass)
        }
        SetArg::Bgamma => {
            let q: Point2 = parse(file)?;
            let on = gamma_boundary(&q, cfg.tol);
            emit(&json!({ "onBoundary": on }), on)
        }
    }
}

fn triple(cfg: &RunConfig, action: &TripleAction) -> Result<Outcome> {
    match action {
        TripleAction::Check { file } => {
            let t: OperatorTriple = parse(file)?;
            let r = SpectralBattery::new(cfg.battery()).run(&t)?;
            emit(&r, !r.verdict.is_refuted())
        }
        TripleAction::Fundamental { file } => {
            let t: OperatorTriple = parse(file)?;
            let dd = match defect(&t.p, cfg.clamp_for(&t.p)) {
                Ok(dd) => dd,
                Err(e @ Error::NotAContraction { .. }) => {
                    return emit(&json!({ "error": e.to_string() }), false);
                }
                Err(e) => return Err(e),
            };
            let mut fp = solve_fundamental_pair(&t, &dd)?;
            if cfg.theta_grid != tetrakit::gamma::SWEEP_THETA_GRID {
                fp.w_sweep_max = w_sweep_with(&fp.f1, &fp.f2, cfg.theta_grid);
            }
            emit(&fp, true)
        }
        TripleAction::Classify { file } => {
            let t: OperatorTriple = parse(file)?;
            let c = classify_triple(&t, &SpectralBattery::new(cfg.battery()))?;
            emit(&c, c.kind != TripleKind::None)
        }
    }
}

fn dilate(cfg: &RunConfig, action: &DilateAction) -> Result<Outcome> {
    match action {
        DilateAction::Build { depth, file } => {
            let t: OperatorTriple = parse(file)?;
            let dd = defect(&t.p, cfg.clamp_for(&t.p))?;
            let fp = solve_fundamental_pair(&t, &dd)?;
            let m = build_dilation(&t, &fp, depth.unwrap_or(cfg.depth))?;
            if !m.conditions_ok {
                eprintln!("fundamental operators fail the commutativity conditions; no model built");
                return emit(
                    &json!({
                        "conditionsOK": false,
                        "commutator": m.commutator_residual,
                        "normalDifference": m.normal_difference,
                    }),
                    false,
                );
            }
            emit(&m, true)
        }
        DilateAction::Verify { max_degree, file } => {
            let m: DilationModel = parse(file)?;
            let t = m.h_triple()?;
            let d = max_degree.unwrap_or(m.depth.saturating_sub(1));
            let moments = verify_moments(&m, &t, d)?;
            let ids = verify_model_identities(&m);
            let worst_id = ids.values().fold(0.0f64, |a, &b| a.max(b));
            let rec = recover_fundamental_from_dilation(&m, &t, None)?;
            let scale = 1.0 + m.f1.norm() + m.f2.norm();
            let pass = m.conditions_ok && moments < 1e-10 * scale.powi(d as i32) && worst_id < 1e-8 * scale * scale;
            emit(
                &json!({
                    "maxDegree": d,
                    "momentResidual": moments,
                    "identities": ids,
                    "recoveredEquationResiduals": rec.equation_residuals,
                    "conditionsOK": m.conditions_ok,
                    "ok": pass,
                }),
                pass,
            )
        }
    }
}

fn sample(cfg: &RunConfig, mode: SampleArg, count: usize) -> Result<Outcome> {
    let pts = match mode {
        SampleArg::Interior => sample_tetrablock(count, SampleMode::Interior, cfg.seed),
        SampleArg::Boundary => sample_tetrablock(count, SampleMode::Boundary, cfg.seed),
        SampleArg::Exterior => sample_tetrablock(count, SampleMode::Exterior, cfg.seed),
        SampleArg::NearBoundary => sample_near_boundary(count, cfg.seed),
    };
    emit(&pts, true)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    cfg.validate()?;
    match &cli.command {
        Command::Point {
            action:
                PointAction::Check {
                    set,
                    file,
                    open,
                    criteria,
                },
        } => point_check(&cfg, *set, file, *open, criteria),
        Command::Triple { action } => triple(&cfg, action),
        Command::Dilate { action } => dilate(&cfg, action),
        Command::Suite { suite, n, out } => {
            let start = Instant::now();
            let s = run_suite(*suite, *n, &cfg)?;
            eprintln!(
                "suite {suite}: {} cases, {} failed, {:.2}s",
                s.cases,
                s.failed,
                start.elapsed().as_secs_f64()
            );
            let o = emit(&s, s.ok())?;
            if let Some(p) = out {
                std::fs::write(p, &o.json)?;
            }
            Ok(o)
        }
        Command::Sample { mode, count } => sample(&cfg, *mode, *count),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            print!("{}", o.json);
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
