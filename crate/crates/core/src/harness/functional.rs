//! Experiments on the exponent lattice, single norms, and the Picard solver.

use super::report::{Anchor, Check, ExperimentReport, Relation, Trace};
use super::{dimension, function, herz_index, problem, ExperimentConfig, Outcome};
use crate::exponents::{
    check_inclusions, check_uniqueness_hypotheses, classify, fmt_rational, int, ratio_to_f64, scaling_exponent,
    sigma_delta, ExtRat, HerzIndex, ProblemParams, Rational, UniquenessClass,
};
use crate::functions::{annular_decompose, RadialFunction};
use crate::heat::heat_apply;
use crate::norms::{herz_norm, herz_norm_ball, herz_norm_of};
use crate::quadrature::{geomspace, QuadratureSpec};
use crate::solver::{fixed_point_residual, picard_solve_with, uniqueness_probe, PicardOptions, ProbeVerdict};
use serde_json::json;

pub(crate) const CRITICAL: Anchor = Anchor {
    id: "critical-exponents",
    statement: "critical exponents q_c = n(alpha-1)/(2+gamma), Q_c = n alpha/(n+gamma) and the criticality cases",
};
pub(crate) const INCLUSIONS: Anchor = Anchor {
    id: "herz-inclusions",
    statement: "test functions lie in K^s_{q,r} and K^s_{q,r} lies in L^1_loc exactly on the stated regularity ranges",
};
pub(crate) const UNIQUENESS: Anchor = Anchor {
    id: "unconditional-uniqueness",
    statement: "mild solutions are unique in the bare Herz class under the subcritical or critical hypotheses",
};
pub(crate) const GRONWALL: Anchor = Anchor {
    id: "gronwall-difference",
    statement: "the difference of two mild solutions obeys a singular Gronwall inequality with kernel (t-tau)^(delta-1)",
};
pub(crate) const MILD: Anchor = Anchor {
    id: "mild-solution",
    statement: "u(t) = e^{t Delta} u0 + int_0^t e^{(t-tau) Delta} |x|^gamma |u|^{alpha-1} u dtau",
};
pub(crate) const HERZ: Anchor = Anchor {
    id: "herz-norm",
    statement: "||f|| = ( sum_j [2^{js} ||f chi_{A_j}||_q]^r )^{1/r} over dyadic annuli A_j",
};
pub(crate) const BALL: Anchor = Anchor {
    id: "herz-ball-form",
    statement: "for s < 0 the Herz quasi-norm is equivalent to its form over balls B(2^j)",
};

const PROBLEM_KEYS: [(&str, &str); 6] = [("n", "3"), ("alpha", "2"), ("gamma", "0"), ("s", "0"), ("q", "3"), ("r", "1")];

pub(crate) const CLASSIFY_KEYS: &[(&str, &str)] = &[
    PROBLEM_KEYS[0],
    PROBLEM_KEYS[1],
    PROBLEM_KEYS[2],
    PROBLEM_KEYS[3],
    PROBLEM_KEYS[4],
    PROBLEM_KEYS[5],
    ("tolerance", "1e-12"),
];

pub(crate) const NORM_KEYS: &[(&str, &str)] = &[
    ("func", "gaussian"),
    ("width", "1"),
    ("amplitude", "1"),
    ("radius", "1"),
    ("j", "0"),
    ("decay", "1"),
    ("log_exp", "1"),
    ("cutoff", "0.0009765625"),
    ("path", ""),
    ("n", "3"),
    ("s", "0"),
    ("q", "2"),
    ("r", "1"),
    ("ball", "false"),
    ("j_min", "-60"),
    ("j_max", "40"),
    ("radial_points", "16"),
    ("tolerance", "1e-12"),
];

pub(crate) const SOLVE_KEYS: &[(&str, &str)] = &[
    PROBLEM_KEYS[0],
    PROBLEM_KEYS[1],
    PROBLEM_KEYS[2],
    PROBLEM_KEYS[3],
    PROBLEM_KEYS[4],
    PROBLEM_KEYS[5],
    ("eps", "1e-3"),
    ("width", "1"),
    ("horizon", "0.1"),
    ("tol", "1e-12"),
    ("max_iter", "12"),
    ("time_nodes", "16"),
    ("t_min_fraction", "1e-3"),
    ("radial_points", "16"),
    ("residual_factor", "5"),
    ("tolerance", "1e-12"),
];

pub(crate) const UNIQUE_KEYS: &[(&str, &str)] = &[
    PROBLEM_KEYS[0],
    PROBLEM_KEYS[1],
    PROBLEM_KEYS[2],
    PROBLEM_KEYS[3],
    PROBLEM_KEYS[4],
    PROBLEM_KEYS[5],
    ("eps", "1e-3"),
    ("width", "1"),
    ("horizon", "0.1"),
    ("tol", "1e-12"),
    ("max_iter", "12"),
    ("time_nodes", "16"),
    ("t_min_fraction", "1e-3"),
    ("radial_points", "16"),
    ("perturbation", "1e-4"),
    ("perturbation_annulus", "0"),
    ("diff_factor", "10"),
    ("control", "true"),
    ("q_tilde", "mid"),
    ("tolerance", "0.1"),
];

fn rat_str(v: &Rational) -> String {
    fmt_rational(v)
}

pub(crate) fn run_classify(cfg: &ExperimentConfig) -> Outcome {
    let p = problem(cfg)?;
    let mut rep = ExperimentReport::new(cfg, &[CRITICAL, INCLUSIONS, UNIQUENESS]);
    let crit = classify(&p)?;
    rep.measure("q_c", crit.q_c.to_f64());
    rep.measure("Q_c", crit.big_q_c.to_f64());
    let sd = sigma_delta(&p);
    rep.check(Check::flag("sigma/delta equivalences hold", sd.is_ok(), true));
    let (sigma, delta) = sd?;
    rep.measure("sigma", ratio_to_f64(&sigma));
    rep.measure("delta", ratio_to_f64(&delta));
    let bounded = check_uniqueness_hypotheses(&p, UniquenessClass::Bounded)?;
    let continuous = check_uniqueness_hypotheses(&p, UniquenessClass::Continuous)?;
    if bounded.verdict {
        rep.check(Check::new("delta under bounded-class hypotheses", ratio_to_f64(&delta), Relation::AtLeast, f64::MIN_POSITIVE));
    }
    let (test_fns, loc_int) = check_inclusions(&p.index, p.n);
    rep.details = json!({
        "case": crit.case,
        "q_c": crit.q_c,
        "Q_c": crit.big_q_c,
        "regularity": rat_str(&p.regularity()),
        "clause_trace": crit.clause_trace,
        "sigma": rat_str(&sigma),
        "delta": rat_str(&delta),
        "scaling_exponent": rat_str(&scaling_exponent(&p.index, p.n)),
        "contains_test_functions": test_fns,
        "locally_integrable": loc_int,
        "hypotheses": [bounded, continuous],
    });
    Ok(rep)
}

fn quad_with(cfg: &ExperimentConfig) -> Result<QuadratureSpec, super::ConfigError> {
    let m = cfg.checked("radial_points", |m: &usize| *m >= 4, "must be >= 4")?;
    Ok(QuadratureSpec { radial_points_per_annulus: m, ..QuadratureSpec::default() })
}

pub(crate) fn run_norm(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let index = herz_index(cfg, "s", "q", "r")?;
    let f = function(cfg)?;
    let window = (cfg.get::<i32>("j_min")?, cfg.get::<i32>("j_max")?);
    if window.0 > window.1 {
        return Err(cfg.error("j_min", "must not exceed j_max").into());
    }
    let ball: bool = cfg.get("ball")?;
    let quad = quad_with(cfg)?;
    let profile = annular_decompose(&f, index.q, n, window, &quad)?;
    let s = ratio_to_f64(&index.s);
    let nv = if ball {
        if index.s >= int(0) {
            return Err(cfg.error("s", "the ball form needs s < 0").into());
        }
        herz_norm_ball(&profile, s, index.r)?
    } else {
        herz_norm(&profile, s, index.r)?
    };
    let mut rep = ExperimentReport::new(cfg, if ball { &[HERZ, BALL] } else { &[HERZ] });
    rep.measure("value", nv.value);
    rep.measure("lower", nv.lower);
    rep.measure("upper", nv.upper);
    let (test_fns, loc_int) = check_inclusions(&index, n);
    rep.details = json!({
        "norm": nv,
        "index": index,
        "contains_test_functions": test_fns,
        "locally_integrable": loc_int,
    });
    let mut trace = Trace::new("profile", &["j", "value", "lower", "upper"]);
    for (j, c) in &profile.coeffs {
        trace.push(vec![*j as f64, c.value, c.lower, c.upper]);
    }
    rep.traces.push(trace);
    Ok(rep)
}

struct SolveSetup {
    params: ProblemParams,
    u0: RadialFunction,
    horizon: f64,
    tol: f64,
    max_iter: usize,
    quad: QuadratureSpec,
    opts: PicardOptions,
}

fn solve_setup(cfg: &ExperimentConfig) -> Result<SolveSetup, super::ConfigError> {
    let params = problem(cfg)?;
    let eps: f64 = cfg.get("eps")?;
    let width = cfg.checked("width", |w: &f64| *w > 0.0, "must be > 0")?;
    let opts = PicardOptions {
        time_nodes: cfg.checked("time_nodes", |k: &usize| *k >= 2, "must be >= 2")?,
        t_min_fraction: cfg.checked("t_min_fraction", |f: &f64| *f > 0.0 && *f < 1.0, "must lie in (0, 1)")?,
        ..PicardOptions::default()
    };
    Ok(SolveSetup {
        params,
        u0: RadialFunction::gaussian(width, eps),
        horizon: cfg.checked("horizon", |t: &f64| *t > 0.0, "must be > 0")?,
        tol: cfg.checked("tol", |t: &f64| *t > 0.0, "must be > 0")?,
        max_iter: cfg.get("max_iter")?,
        quad: quad_with(cfg)?,
        opts,
    })
}

pub(crate) fn run_solve(cfg: &ExperimentConfig) -> Outcome {
    let st = solve_setup(cfg)?;
    let factor: f64 = cfg.get("residual_factor")?;
    let run = picard_solve_with(&st.u0, &st.params, st.horizon, &st.quad, st.max_iter, st.tol, &st.opts)?;
    let mut rep = ExperimentReport::new(cfg, &[MILD]);
    rep.check(Check::flag("converged", run.converged, true));
    if run.converged {
        let res = fixed_point_residual(&run, &st.u0, &st.quad, &st.opts)?;
        rep.check(Check::new("max fixed-point residual", res.iter().cloned().fold(0.0, f64::max), Relation::AtMost, factor * st.tol));
    }
    if let Some(max_ratio) = run.contraction_ratios.iter().cloned().reduce(f64::max) {
        rep.measure("max contraction ratio", max_ratio);
    }
    rep.measure("iterations", run.iterations() as f64);
    let mut trace = Trace::new("history", &["iterate", "time", "value", "lower", "upper"]);
    for (k, row) in run.herz_history.iter().enumerate() {
        for (t, nv) in run.time_grid.iter().zip(row) {
            trace.push(vec![k as f64, *t, nv.value, nv.lower, nv.upper]);
        }
    }
    rep.traces.push(trace);
    rep.details = serde_json::to_value(&run).expect("runs serialize");
    Ok(rep)
}

/// `1/q̃` at the midpoint of the admissible window
/// `s/n + 1/q − 2/(n(α−1)) < s/n + 1/q̃ < 1/q_c`, or the configured value.
fn auxiliary_exponent(cfg: &ExperimentConfig, p: &ProblemParams) -> Result<(ExtRat, Rational, Rational), super::ConfigError> {
    let n = int(p.n as i128);
    let v = p.regularity();
    let inv_qc = (int(2) + p.gamma) / (n * (p.alpha - int(1)));
    let lo = v - int(2) / (n * (p.alpha - int(1)));
    let window_lo = lo - p.index.s / n;
    let window_hi = inv_qc - p.index.s / n;
    let raw: String = cfg.get("q_tilde")?;
    let inv = if raw == "mid" {
        (window_lo + window_hi) / int(2)
    } else {
        let q: ExtRat = cfg.get("q_tilde")?;
        q.recip_finite()
    };
    if !(inv > window_lo && inv < window_hi) {
        return Err(cfg.error("q_tilde", "1/q~ must lie strictly inside the admissible window"));
    }
    if !(inv > int(0) && inv <= int(1)) {
        return Err(cfg.error("q_tilde", "admissible window gives no q~ in [1, inf)"));
    }
    Ok((ExtRat::Finite(inv).recip().expect("inv > 0"), window_lo, window_hi))
}

pub(crate) fn run_uniqueness(cfg: &ExperimentConfig) -> Outcome {
    let st = solve_setup(cfg)?;
    let amp: f64 = cfg.get("perturbation")?;
    let j: i32 = cfg.get("perturbation_annulus")?;
    let diff_factor: f64 = cfg.get("diff_factor")?;
    let control: bool = cfg.get("control")?;
    let slack = cfg.tolerance()?;
    let p = st.params;
    let mut rep = ExperimentReport::new(cfg, &[UNIQUENESS, GRONWALL, MILD]);

    let bounded = check_uniqueness_hypotheses(&p, UniquenessClass::Bounded)?;
    let continuous = check_uniqueness_hypotheses(&p, UniquenessClass::Continuous)?;
    rep.check(Check::flag("a uniqueness hypothesis set holds", bounded.verdict || continuous.verdict, true));

    let pert = RadialFunction::AnnulusIndicator(j).scaled(amp);
    let probe = uniqueness_probe(&st.u0, &p, st.horizon, &pert, &st.quad, st.max_iter, st.tol, &st.opts)?;
    let converged = probe.branch_outcomes.iter().all(|o| *o == crate::solver::PicardOutcome::Converged);
    rep.check(Check::flag("both branches converged", converged, true));
    let max_diff = probe.diff_norms.iter().map(|d| d.value).fold(0.0, f64::max);
    rep.check(Check::new("max converged difference", max_diff, Relation::AtMost, diff_factor * st.tol));
    match probe.early_exponent {
        Some(e) => rep.check(Check::new("early-time difference exponent", e, Relation::AtLeast, probe.delta - slack)),
        None => rep.check(Check::flag("early-time exponent available", false, true)),
    };
    rep.check(Check::flag("verdict consistent", probe.verdict == ProbeVerdict::Consistent, true));
    let zero = if control {
        let z = uniqueness_probe(&st.u0, &p, st.horizon, &RadialFunction::Zero, &st.quad, st.max_iter, st.tol, &st.opts)?;
        let m = z.diff_norms.iter().map(|d| d.value).fold(0.0, f64::max);
        rep.check(Check::new("zero-perturbation difference", m, Relation::AtMost, st.tol));
        Some(z)
    } else {
        None
    };

    // sup_τ τ^β ‖e^{τΔ}u₀‖ at the auxiliary index (s, q̃, r)
    let (q_tilde, lo, hi) = auxiliary_exponent(cfg, &p)?;
    let aux = HerzIndex { s: p.index.s, q: q_tilde, r: p.index.r };
    let beta = int(p.n as i128) / int(2) * (p.index.q.recip_finite() - q_tilde.recip_finite());
    let b = ratio_to_f64(&beta);
    let times = geomspace(st.horizon * st.opts.t_min_fraction, st.horizon, st.opts.time_nodes);
    let mut aux_sup = 0.0f64;
    let mut trace = Trace::new("difference", &["time", "diff", "first_step_diff", "envelope", "aux_scaled_norm"]);
    for (i, &t) in times.iter().enumerate() {
        let u = heat_apply(&st.u0, t, p.n, &st.quad)?;
        let v = t.powf(b) * herz_norm_of(&u, &aux, p.n, crate::functions::DEFAULT_WINDOW, &st.quad)?.value;
        aux_sup = aux_sup.max(v);
        trace.push(vec![t, probe.diff_norms[i].value, probe.first_step_diff[i], probe.gronwall_envelope[i], v]);
    }
    rep.measure("delta", probe.delta);
    rep.measure("initial difference", probe.initial_difference);
    rep.measure("auxiliary q~", q_tilde.to_f64());
    rep.measure("sup tau^beta ||e^{tau Delta} u0|| at q~", aux_sup);
    rep.traces.push(trace);
    rep.details = json!({
        "probe": probe,
        "control": zero,
        "hypotheses": [bounded, continuous],
        "q_tilde": q_tilde,
        "q_tilde_window": [rat_str(&lo), rat_str(&hi)],
        "beta": rat_str(&beta),
    });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::super::{run, ConfigFile, ExperimentKind};
    use super::*;

    #[test]
    fn classify_double_critical() {
        let file: ConfigFile = "classify.alpha = 3\nclassify.r = 1".parse().unwrap();
        let rep = run(&file.experiment(ExperimentKind::Classify).unwrap()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.details["case"], "DoubleCritical");
        assert_eq!(rep.details["delta"], "0");
    }

    #[test]
    fn standing_assumption_violation_is_a_config_error() {
        let file: ConfigFile = "classify.alpha = 1".parse().unwrap();
        assert!(run(&file.experiment(ExperimentKind::Classify).unwrap()).is_err());
    }

    #[test]
    fn divergent_norm_is_a_result() {
        let file: ConfigFile = "norm.s = -3/2\nnorm.q = 2\nnorm.r = 1".parse().unwrap();
        let rep = run(&file.experiment(ExperimentKind::Norm).unwrap()).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.details["norm"]["status"], "Divergent");
    }

    #[test]
    fn auxiliary_midpoint() {
        let cfg = ExperimentConfig::defaults(ExperimentKind::Uniqueness);
        let p = problem(&cfg).unwrap();
        let (q, lo, hi) = auxiliary_exponent(&cfg, &p).unwrap();
        assert_eq!(q, ExtRat::integer(6));
        assert_eq!((lo, hi), (crate::exponents::rat(-1, 3), crate::exponents::rat(2, 3)));
    }
}
