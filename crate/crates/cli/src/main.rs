//! `herzlab`: run one experiment or the whole battery from a config file.
//!
//! Exit codes: 0 when every report passes, 1 when any fails, 2 on usage or
//! configuration errors.

use clap::{Args, Parser, Subcommand};
use herzlab::harness::{self, ConfigError, ConfigFile, ExperimentKind, ExperimentReport};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "herzlab", version, about = "Herz-space experiments for the Hardy-Henon heat equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment configuration file (`key = value` lines).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set meyer.t_min=0.02` or `--set t_min=0.02`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write CSV traces into this directory.
    #[arg(long)]
    csv_dir: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ProblemFlags {
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
}

#[derive(Args, Clone, Default)]
struct SolveFlags {
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iter: Option<String>,
}

#[derive(Args, Clone, Default)]
struct NormFlags {
    /// zero, gaussian, ball, annulus, smooth_ball, smooth_annulus, power_log,
    /// truncated_power or file.
    #[arg(long)]
    func: Option<String>,
    #[arg(long)]
    width: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    j: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    decay: Option<String>,
    #[arg(long)]
    log_exp: Option<String>,
    #[arg(long)]
    path: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
    /// Use the ball form of the quasi-norm (s < 0 only).
    #[arg(long)]
    ball: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Critical exponents, criticality case and hypothesis checks.
    Classify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemFlags,
    },
    /// One Herz quasi-norm.
    Norm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        norm: NormFlags,
    },
    /// Heat smoothing rates.
    Smoothing(Common),
    /// Time-uniform Duhamel bound.
    Meyer(Common),
    /// Herz and Lorentz embeddings.
    Embed(Common),
    /// Membership thresholds.
    Membership(Common),
    /// Continuity of the heat semigroup at t = 0.
    Continuity(Common),
    /// Real interpolation and the K-functional.
    Interp(Common),
    /// Distance from the annulus indicator to smooth candidates.
    Density(Common),
    /// Picard iteration for the mild solution.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemFlags,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Two-branch uniqueness probe.
    Unique {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        problem: ProblemFlags,
        #[command(flatten)]
        solve: SolveFlags,
    },
    /// Every experiment listed under `experiments` (default: the battery).
    Suite(Common),
}

fn flag_pairs(problem: &ProblemFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("n", problem.n.clone()),
        ("alpha", problem.alpha.clone()),
        ("gamma", problem.gamma.clone()),
        ("s", problem.s.clone()),
        ("q", problem.q.clone()),
        ("r", problem.r.clone()),
    ]
}

fn solve_pairs(solve: &SolveFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("eps", solve.eps.clone()),
        ("horizon", solve.horizon.clone()),
        ("tol", solve.tol.clone()),
        ("max_iter", solve.max_iter.clone()),
    ]
}

fn norm_pairs(f: &NormFlags) -> Vec<(&'static str, Option<String>)> {
    vec![
        ("func", f.func.clone()),
        ("width", f.width.clone()),
        ("amplitude", f.amplitude.clone()),
        ("radius", f.radius.clone()),
        ("j", f.j.clone()),
        ("decay", f.decay.clone()),
        ("log_exp", f.log_exp.clone()),
        ("path", f.path.clone()),
        ("n", f.n.clone()),
        ("s", f.s.clone()),
        ("q", f.q.clone()),
        ("r", f.r.clone()),
        ("ball", f.ball.then(|| "true".to_string())),
    ]
}

enum Failure {
    Usage(String),
    Config(ConfigError),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

/// Loads the config and applies `--set` and subcommand flags, scoped to
/// `kind` unless the key already names one.
fn load(common: &Common, kind: Option<ExperimentKind>, flags: &[(&str, Option<String>)]) -> Result<ConfigFile, Failure> {
    let mut file = match &common.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    for kv in &common.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::Usage(format!("`--set {kv}` is not KEY=VALUE")))?;
        let k = k.trim();
        let key = match kind {
            Some(kind) if !k.contains('.') && kind.accepts(k) => format!("{kind}.{k}"),
            _ => k.to_string(),
        };
        file.set(&key, v.trim());
    }
    if let Some(kind) = kind {
        for (k, v) in flags {
            if let Some(v) = v {
                file.set(&format!("{kind}.{k}"), v);
            }
        }
    }
    file.validate()?;
    Ok(file)
}

fn emit(reports: &[ExperimentReport], common: &Common, as_list: bool) -> Result<bool, Failure> {
    let json = if as_list {
        serde_json::to_string_pretty(reports).expect("reports serialize")
    } else {
        reports[0].to_json()
    };
    match &common.out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    if let Some(dir) = &common.csv_dir {
        for r in reports {
            r.write_traces(Path::new(dir)).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        }
    }
    for r in reports {
        let status = if r.pass { "pass" } else { "FAIL" };
        eprintln!("{status} {} ({} ms)", r.kind, r.runtime_ms);
        for c in r.failed_checks() {
            eprintln!("  failed: {} (measured {:e}, target {:e})", c.name, c.measured, c.target);
        }
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (kind, common, flags) = match cli.command {
        Command::Suite(common) => {
            let file = load(&common, None, &[])?;
            let reports = harness::run_suite(&file)?;
            return emit(&reports, &common, true);
        }
        Command::Classify { common, problem } => (ExperimentKind::Classify, common, flag_pairs(&problem)),
        Command::Norm { common, norm } => (ExperimentKind::Norm, common, norm_pairs(&norm)),
        Command::Solve { common, problem, solve } => {
            (ExperimentKind::Solve, common, [flag_pairs(&problem), solve_pairs(&solve)].concat())
        }
        Command::Unique { common, problem, solve } => {
            (ExperimentKind::Uniqueness, common, [flag_pairs(&problem), solve_pairs(&solve)].concat())
        }
        Command::Smoothing(c) => (ExperimentKind::SmoothingRate, c, vec![]),
        Command::Meyer(c) => (ExperimentKind::Meyer, c, vec![]),
        Command::Embed(c) => (ExperimentKind::Embeddings, c, vec![]),
        Command::Membership(c) => (ExperimentKind::Membership, c, vec![]),
        Command::Continuity(c) => (ExperimentKind::Continuity, c, vec![]),
        Command::Interp(c) => (ExperimentKind::Interpolation, c, vec![]),
        Command::Density(c) => (ExperimentKind::DensityBound, c, vec![]),
    };
    let file = load(&common, Some(kind), &flags)?;
    let report = harness::run(&file.experiment(kind)?)?;
    emit(&[report], &common, false)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
