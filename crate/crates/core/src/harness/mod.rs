//! Config-driven experiments, each producing a JSON-serializable
//! [`ExperimentReport`] with explicit checks.

pub mod config;
mod functional;
mod report;
mod semigroup;
mod spaces;

pub use config::{ConfigError, ConfigFile, ExperimentConfig};
pub use report::{Anchor, Check, ExperimentReport, Quantity, Relation, Trace, SCHEMA_VERSION};

use crate::exponents::{ExtRat, HerzIndex, ProblemParams, Rational};
use crate::functions::RadialFunction;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    Classify,
    SmoothingRate,
    Meyer,
    Embeddings,
    Membership,
    Continuity,
    Interpolation,
    DensityBound,
    Uniqueness,
    /// One norm evaluation.
    Norm,
    /// One Picard solve.
    Solve,
}

const COMMON: [(&str, &str); 1] = [("seed", "0")];

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        Self::Classify,
        Self::SmoothingRate,
        Self::Meyer,
        Self::Embeddings,
        Self::Membership,
        Self::Continuity,
        Self::Interpolation,
        Self::DensityBound,
        Self::Uniqueness,
        Self::Norm,
        Self::Solve,
    ];

    /// Kinds run by `suite` unless `experiments` says otherwise.
    pub const BATTERY: [ExperimentKind; 9] = [
        Self::Classify,
        Self::SmoothingRate,
        Self::Meyer,
        Self::Embeddings,
        Self::Membership,
        Self::Continuity,
        Self::Interpolation,
        Self::DensityBound,
        Self::Uniqueness,
    ];

    /// Config prefix and CLI subcommand.
    pub fn name(self) -> &'static str {
        match self {
            Self::Classify => "classify",
            Self::SmoothingRate => "smoothing",
            Self::Meyer => "meyer",
            Self::Embeddings => "embed",
            Self::Membership => "membership",
            Self::Continuity => "continuity",
            Self::Interpolation => "interp",
            Self::DensityBound => "density",
            Self::Uniqueness => "unique",
            Self::Norm => "norm",
            Self::Solve => "solve",
        }
    }

    /// Declared keys with their defaults, `tolerance` included.
    pub fn keys(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Self::Classify => functional::CLASSIFY_KEYS,
            Self::Norm => functional::NORM_KEYS,
            Self::Solve => functional::SOLVE_KEYS,
            Self::Uniqueness => functional::UNIQUE_KEYS,
            Self::SmoothingRate => semigroup::SMOOTHING_KEYS,
            Self::Meyer => semigroup::MEYER_KEYS,
            Self::Continuity => semigroup::CONTINUITY_KEYS,
            Self::Embeddings => spaces::EMBED_KEYS,
            Self::Membership => spaces::MEMBERSHIP_KEYS,
            Self::Interpolation => spaces::INTERP_KEYS,
            Self::DensityBound => spaces::DENSITY_KEYS,
        }
    }

    pub fn accepts(self, key: &str) -> bool {
        COMMON.iter().chain(self.keys()).any(|(k, _)| *k == key)
    }

    pub(crate) fn all_keys(self) -> impl Iterator<Item = &'static (&'static str, &'static str)> {
        COMMON.iter().chain(self.keys())
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| ConfigError::UnknownKind(s.into()))
    }
}

impl Serialize for ExperimentKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Runs one experiment. Configuration problems are errors; numerical
/// failures become a failing report carrying the message.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport, ConfigError> {
    let start = Instant::now();
    let result = match cfg.kind {
        ExperimentKind::Classify => functional::run_classify(cfg),
        ExperimentKind::Norm => functional::run_norm(cfg),
        ExperimentKind::Solve => functional::run_solve(cfg),
        ExperimentKind::Uniqueness => functional::run_uniqueness(cfg),
        ExperimentKind::SmoothingRate => semigroup::run_smoothing_rate(cfg),
        ExperimentKind::Meyer => semigroup::run_meyer(cfg),
        ExperimentKind::Continuity => semigroup::run_continuity(cfg),
        ExperimentKind::Embeddings => spaces::run_embeddings(cfg),
        ExperimentKind::Membership => spaces::run_membership(cfg),
        ExperimentKind::Interpolation => spaces::run_interpolation(cfg),
        ExperimentKind::DensityBound => spaces::run_density_bound(cfg),
    };
    let mut report = match result {
        Ok(r) => r,
        Err(Failure::Config(e)) => return Err(e),
        Err(Failure::Numerical(msg)) => {
            let mut r = ExperimentReport::new(cfg, &[]);
            r.pass = false;
            r.details = serde_json::json!({ "error": msg });
            r
        }
    };
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Every experiment listed in the file, validated up front, run in parallel
/// and returned in file order.
pub fn run_suite(file: &ConfigFile) -> Result<Vec<ExperimentReport>, ConfigError> {
    let configs = file.experiments()?.into_iter().map(|k| file.experiment(k)).collect::<Result<Vec<_>, _>>()?;
    configs.par_iter().map(run).collect()
}

/// Why an experiment could not produce its own report.
#[derive(Debug)]
pub(crate) enum Failure {
    Config(ConfigError),
    Numerical(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Numerical(e.to_string())
            }
        }
    )*};
}

numerical_from!(
    crate::norms::NormError,
    crate::heat::HeatError,
    crate::solver::SolverError,
    crate::functions::FunctionError,
    crate::exponents::ExtRatError,
    crate::exponents::ExponentError
);

pub(crate) type Outcome = Result<ExperimentReport, Failure>;

pub(crate) fn rational(cfg: &ExperimentConfig, key: &str) -> Result<Rational, ConfigError> {
    let v: ExtRat = cfg.get(key)?;
    v.finite().ok_or_else(|| cfg.error(key, "must be finite"))
}

pub(crate) fn dimension(cfg: &ExperimentConfig) -> Result<u32, ConfigError> {
    cfg.checked("n", |n: &u32| *n >= 1, "must be >= 1")
}

pub(crate) fn herz_index(cfg: &ExperimentConfig, s: &str, q: &str, r: &str) -> Result<HerzIndex, ConfigError> {
    HerzIndex::new(rational(cfg, s)?, cfg.get(q)?, cfg.get(r)?).map_err(|e| cfg.error(q, e))
}

pub(crate) fn problem(cfg: &ExperimentConfig) -> Result<ProblemParams, ConfigError> {
    let index = herz_index(cfg, "s", "q", "r")?;
    ProblemParams::new(dimension(cfg)?, rational(cfg, "alpha")?, rational(cfg, "gamma")?, index)
        .map_err(|e| cfg.error("alpha", e))
}

/// Builds the function named by `func` from its parameter keys.
pub(crate) fn function(cfg: &ExperimentConfig) -> Result<RadialFunction, ConfigError> {
    let name: String = cfg.get("func")?;
    let pos = |k: &str| cfg.checked(k, |v: &f64| *v > 0.0, "must be > 0");
    let f = match name.as_str() {
        "zero" => RadialFunction::Zero,
        "gaussian" => RadialFunction::gaussian(pos("width")?, cfg.get("amplitude")?),
        "ball" => RadialFunction::BallIndicator(pos("radius")?),
        "annulus" => RadialFunction::AnnulusIndicator(cfg.get("j")?),
        "smooth_ball" => RadialFunction::SmoothBall { radius: pos("radius")?, width: pos("width")? },
        "smooth_annulus" => RadialFunction::smooth_annulus(pos("width")?),
        "power_log" => RadialFunction::PowerLogCutoff {
            decay: cfg.checked("decay", |v: &f64| *v >= 0.0, "must be >= 0")?,
            log_exp: cfg.checked("log_exp", |v: &f64| *v >= 0.0, "must be >= 0")?,
            cutoff: cfg.checked("cutoff", |v: &f64| *v > 0.0 && *v < 1.0, "must lie in (0, 1)")?,
        },
        "truncated_power" => RadialFunction::truncated_power(cfg.get("decay")?, pos("radius")?),
        "file" => {
            let path: String = cfg.get("path")?;
            let s = crate::functions::read_sampled(std::path::Path::new(&path)).map_err(|e| cfg.error("path", e))?;
            RadialFunction::Sampled(std::sync::Arc::new(s))
        }
        other => return Err(cfg.error("func", format!("unknown function `{other}`"))),
    };
    let amplitude: f64 = cfg.get("amplitude")?;
    let f = if name == "gaussian" { f } else { f.scaled(amplitude) };
    f.validate().map_err(|e| cfg.error("func", e))?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_and_declare_tolerance() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
            assert!(k.accepts("tolerance"), "{k}");
            assert!(k.accepts("seed"));
            ExperimentConfig::defaults(k);
        }
    }

    #[test]
    fn function_builder_rejects_unknown_names() {
        let file: ConfigFile = "norm.func = sinc".parse().unwrap();
        let cfg = file.experiment(ExperimentKind::Norm).unwrap();
        assert!(matches!(function(&cfg), Err(ConfigError::Invalid { key, .. }) if key == "norm.func"));
    }
}
