//! Heat-semigroup experiments: smoothing rates, the time-uniform Duhamel
//! bound, and continuity at `t = 0`.

use super::report::{Anchor, Check, ExperimentReport, Relation, Trace};
use super::{dimension, herz_index, rational, ConfigError, ExperimentConfig, Outcome};
use crate::exponents::{
    check_continuity_hypotheses, check_decay_hypotheses, check_duhamel_hypotheses, check_smoothing_hypotheses,
    fmt_rational, ratio_to_f64, DuhamelTuple, ExtRat, HerzIndex, SmoothingTuple,
};
use crate::functions::{Interpolation, RadialFunction, Sampled, DEFAULT_WINDOW};
use crate::heat::{duhamel_on_grid, heat_apply, log_grid, SpaceTimeFunction};
use crate::norms::herz_norm_of;
use crate::quadrature::{geomspace, linear_fit, QuadratureSpec};
use rayon::prelude::*;
use serde_json::json;
use std::sync::Arc;

pub(crate) const SMOOTHING: Anchor = Anchor {
    id: "herz-heat-smoothing",
    statement: "||e^{t Delta} f|| in K^nu_{q,r} is at most C t^{-(n/2)[(mu/n+1/p)-(nu/n+1/q)]} ||f|| in K^mu_{p,r0}",
};
pub(crate) const MEYER: Anchor = Anchor {
    id: "herz-meyer",
    statement: "sup_t ||int_0^t e^{(t-tau) Delta} f(tau) dtau|| in K^nu_{q,inf} is at most C sup_tau ||f(tau)|| in K^mu_{p,r}",
};
pub(crate) const CONTINUITY: Anchor = Anchor {
    id: "heat-continuity",
    statement: "e^{t Delta} f -> f in K^s_{q,r} as t -> 0 when q < inf, or q = inf and r <= 1",
};
pub(crate) const DECAY: Anchor = Anchor {
    id: "small-time-decay",
    statement: "t^beta ||e^{t Delta} f|| in the smaller-regularity space tends to 0 for f in the closure of test functions",
};

pub(crate) const SMOOTHING_KEYS: &[(&str, &str)] = &[
    ("n", "3"),
    ("tuples", "0 0 1 3 1 1; 1 0 2 3 2 inf; 1/2 -1/2 2 4 2 inf; 0 0 2 2 2 2"),
    ("t_min", "1e-3"),
    ("t_max", "1e-1"),
    ("t_points", "9"),
    ("width_min", "0.25"),
    ("width_max", "4"),
    ("widths_per_octave", "4"),
    ("band", "10"),
    ("tolerance", "0.05"),
];

pub(crate) const MEYER_KEYS: &[(&str, &str)] = &[
    ("n", "3"),
    ("mu", "1"),
    ("nu", "0"),
    ("p", "3/2"),
    ("q", "3"),
    ("r", "1"),
    ("sources", "gaussian, oscillating_ball"),
    ("width", "1e-2"),
    ("t_min", "1e-2"),
    ("t_max", "10"),
    ("t_points", "7"),
    ("grid_j_min", "-14"),
    ("grid_j_max", "8"),
    ("per_octave", "16"),
    ("panels", "2"),
    ("band", "10"),
    ("tolerance", "0.1"),
];

pub(crate) const CONTINUITY_KEYS: &[(&str, &str)] = &[
    ("n", "3"),
    ("s", "0"),
    ("q", "2"),
    ("r", "2"),
    ("radius", "1"),
    ("width", "0.5"),
    ("times", "1e-1, 1e-2, 1e-3, 1e-4"),
    ("target_s", "0"),
    ("target_q", "4"),
    ("target_r", "2"),
    ("decay_radius", "4"),
    ("decay_width", "2"),
    ("decay_factor", "1.5"),
    ("tolerance", "1e-2"),
];

/// Slope of `ln y` against `ln x` with the two extreme points dropped.
fn trimmed_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len();
    let (lx, ly): (Vec<f64>, Vec<f64>) = if k > 4 {
        (x[1..k - 1].iter().map(|v| v.ln()).collect(), y[1..k - 1].iter().map(|v| v.ln()).collect())
    } else {
        (x.iter().map(|v| v.ln()).collect(), y.iter().map(|v| v.ln()).collect())
    };
    linear_fit(&lx, &ly).0
}

fn band(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    max / min
}

fn time_grid(cfg: &ExperimentConfig) -> Result<Vec<f64>, ConfigError> {
    let lo = cfg.checked("t_min", |t: &f64| *t > 0.0, "must be > 0")?;
    let hi = cfg.checked("t_max", |t: &f64| *t > lo, "must exceed t_min")?;
    let k = cfg.checked("t_points", |k: &usize| *k >= 3, "must be >= 3")?;
    Ok(geomspace(lo, hi, k))
}

pub(crate) fn run_smoothing_rate(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let rows: Vec<Vec<ExtRat>> = cfg.groups("tuples", 6)?;
    let times = time_grid(cfg)?;
    let w_lo = cfg.checked("width_min", |w: &f64| *w > 0.0, "must be > 0")?;
    let w_hi = cfg.checked("width_max", |w: &f64| *w >= w_lo, "must be >= width_min")?;
    let per_octave = cfg.checked("widths_per_octave", |k: &usize| *k >= 1, "must be >= 1")?;
    // sub-dyadic spacing keeps the family sup close to dilation invariant
    let octaves = (w_hi / w_lo).log2();
    let widths = geomspace(w_lo, w_hi, (octaves * per_octave as f64).round() as usize + 1);
    let max_band: f64 = cfg.get("band")?;
    let tol = cfg.tolerance()?;
    let quad = QuadratureSpec::default();
    let mut rep = ExperimentReport::new(cfg, &[SMOOTHING]);
    let mut per_tuple = Vec::new();
    let mut trace = Trace::new("ratios", &["tuple", "t", "ratio", "scaled"]);

    for (i, row) in rows.iter().enumerate() {
        let fin = |v: &ExtRat| v.finite().ok_or_else(|| cfg.error("tuples", "mu and nu must be finite"));
        let tuple = SmoothingTuple { n, mu: fin(&row[0])?, nu: fin(&row[1])?, p: row[2], q: row[3], r: row[4], r0: row[5] };
        let label = format!(
            "({}, {}, {}, {}, {}, {})",
            fmt_rational(&tuple.mu),
            fmt_rational(&tuple.nu),
            tuple.p,
            tuple.q,
            tuple.r,
            tuple.r0
        );
        let hyp = check_smoothing_hypotheses(&tuple);
        if !hyp.verdict {
            rep.check(Check::flag(format!("{label} hypotheses"), false, true));
            per_tuple.push(json!({ "tuple": tuple, "hypotheses": hyp }));
            continue;
        }
        let rate = ratio_to_f64(&tuple.rate());
        let src = HerzIndex::new(tuple.mu, tuple.p, tuple.r0)?;
        let tgt = HerzIndex::new(tuple.nu, tuple.q, tuple.r)?;
        // sup over the dilation family f(x / (c sqrt t)) at each t
        let ratios: Vec<(f64, f64)> = times
            .par_iter()
            .map(|&t| -> Result<(f64, f64), super::Failure> {
                let mut best = (0.0f64, 0.0);
                for &c in &widths {
                    let f = RadialFunction::gaussian(c * t.sqrt(), 1.0);
                    let den = herz_norm_of(&f, &src, n, DEFAULT_WINDOW, &quad)?;
                    let u = heat_apply(&f, t, n, &quad)?;
                    let num = herz_norm_of(&u, &tgt, n, DEFAULT_WINDOW, &quad)?;
                    let ratio = num.value / den.value;
                    if ratio > best.0 {
                        best = (ratio, c);
                    }
                }
                Ok(best)
            })
            .collect::<Result<_, _>>()?;
        let r: Vec<f64> = ratios.iter().map(|x| x.0).collect();
        let scaled: Vec<f64> = r.iter().zip(&times).map(|(v, t)| v * t.powf(rate)).collect();
        for ((t, v), s) in times.iter().zip(&r).zip(&scaled) {
            trace.push(vec![i as f64, *t, *v, *s]);
        }
        let slope = trimmed_slope(&times, &r);
        rep.check(Check::new(format!("{label} slope"), slope, Relation::Within(tol), -rate));
        rep.check(Check::new(format!("{label} band of ratio t^rate"), band(&scaled), Relation::AtMost, max_band));
        per_tuple.push(json!({
            "tuple": tuple,
            "rate": fmt_rational(&tuple.rate()),
            "hypotheses": hyp,
            "times": times,
            "ratios": r,
            "maximizing_width_factor": ratios.iter().map(|x| x.1).collect::<Vec<_>>(),
        }));
    }
    rep.traces.push(trace);
    rep.details = json!({ "family": "gaussians of width c sqrt(t)", "tuples": per_tuple });
    Ok(rep)
}

fn meyer_tuple(cfg: &ExperimentConfig) -> Result<DuhamelTuple, ConfigError> {
    Ok(DuhamelTuple {
        n: dimension(cfg)?,
        mu: rational(cfg, "mu")?,
        nu: rational(cfg, "nu")?,
        p: cfg.get("p")?,
        q: cfg.get("q")?,
        r: cfg.get("r")?,
    })
}

/// Amplitude of the oscillating source: positive, one period per decade.
fn oscillation(tau: f64) -> f64 {
    1.0 + 0.5 * (2.0 * std::f64::consts::PI * tau.log10()).sin()
}

pub(crate) fn run_meyer(cfg: &ExperimentConfig) -> Outcome {
    let tuple = meyer_tuple(cfg)?;
    let hyp = check_duhamel_hypotheses(&tuple);
    if !hyp.verdict {
        return Err(cfg.error("mu", format!("exponents violate the Duhamel bound hypotheses: {:?}", hyp.failed_clauses())).into());
    }
    let n = tuple.n;
    let src = HerzIndex::new(tuple.mu, tuple.p, tuple.r)?;
    let tgt = HerzIndex::new(tuple.nu, tuple.q, ExtRat::INFINITY)?;
    let times = time_grid(cfg)?;
    let width = cfg.checked("width", |w: &f64| *w > 0.0, "must be > 0")?;
    let (j_lo, j_hi) = (cfg.get::<i32>("grid_j_min")?, cfg.get::<i32>("grid_j_max")?);
    if j_lo >= j_hi {
        return Err(cfg.error("grid_j_min", "must be below grid_j_max").into());
    }
    let per_octave = cfg.checked("per_octave", |m: &usize| *m >= 4, "must be >= 4")?;
    let panels = cfg.checked("panels", |m: &usize| *m >= 1, "must be >= 1")?;
    let max_band: f64 = cfg.get("band")?;
    let tol = cfg.tolerance()?;
    let sources: Vec<String> = cfg.list("sources")?;
    let quad = QuadratureSpec::default();
    let radii = log_grid(j_lo, j_hi, per_octave);
    let t_max = *times.last().unwrap();

    let mut rep = ExperimentReport::new(cfg, &[MEYER]);
    let mut trace = Trace::new("ratios", &["source", "t", "duhamel_norm", "source_sup", "ratio"]);
    let mut per_source = Vec::new();
    for (si, name) in sources.iter().enumerate() {
        let (stf, amplitude): (SpaceTimeFunction, Box<dyn Fn(f64) -> f64>) = match name.as_str() {
            "zero" => (SpaceTimeFunction::constant(RadialFunction::Zero), Box::new(|_| 0.0)),
            "gaussian" => (SpaceTimeFunction::constant(RadialFunction::gaussian(width, 1.0)), Box::new(|_| 1.0)),
            "oscillating_ball" => {
                let g = RadialFunction::SmoothBall { radius: 2.0 * width, width };
                let ts = geomspace(t_max * 1e-6, t_max, 193);
                let slices = ts.iter().map(|&t| g.clone().scaled(oscillation(t))).collect();
                let stf = SpaceTimeFunction::new(ts, slices)?;
                let interp = stf.clone();
                (stf, Box::new(move |tau: f64| interp.weights(tau).iter().map(|&(k, w)| w * oscillation(interp.times[k])).sum()))
            }
            other => return Err(cfg.error("sources", format!("unknown source `{other}`")).into()),
        };
        let base = match name.as_str() {
            "oscillating_ball" => RadialFunction::SmoothBall { radius: 2.0 * width, width },
            _ => stf.slices[0].clone(),
        };
        let base_norm = herz_norm_of(&base, &src, n, DEFAULT_WINDOW, &quad)?.value;
        if base_norm == 0.0 {
            rep.measure(format!("{name}: vacuous (zero source)"), 0.0);
            per_source.push(json!({ "source": name, "vacuous": true }));
            continue;
        }
        let mut ratios = Vec::new();
        for &t in &times {
            // sup over τ < t of the piecewise-linear amplitude
            let mut sup = amplitude(t).abs();
            for &tk in stf.times.iter().filter(|&&tk| tk < t) {
                sup = sup.max(amplitude(tk).abs());
            }
            let sup_norm = sup * base_norm;
            let vals = duhamel_on_grid(&stf, t, n, 0.0, &quad, 1.0, panels, &radii);
            let w = RadialFunction::Sampled(Arc::new(Sampled::with_interpolation(
                radii.clone(),
                vals,
                Interpolation::LogCubic,
            )?));
            let num = herz_norm_of(&w, &tgt, n, DEFAULT_WINDOW, &quad)?.value;
            let ratio = num / sup_norm;
            trace.push(vec![si as f64, t, num, sup_norm, ratio]);
            ratios.push(ratio);
        }
        let slope = trimmed_slope(&times, &ratios);
        rep.check(Check::new(format!("{name}: band max/min"), band(&ratios), Relation::AtMost, max_band));
        rep.check(Check::new(format!("{name}: drift slope"), slope, Relation::Within(tol), 0.0));
        per_source.push(json!({ "source": name, "times": times, "ratios": ratios }));
    }
    rep.traces.push(trace);
    rep.details = json!({ "tuple": tuple, "hypotheses": hyp, "sources": per_source });
    Ok(rep)
}

pub(crate) fn run_continuity(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let index = herz_index(cfg, "s", "q", "r")?;
    let target = herz_index(cfg, "target_s", "target_q", "target_r")?;
    let radius = cfg.checked("radius", |v: &f64| *v > 0.0, "must be > 0")?;
    let width = cfg.checked("width", |v: &f64| *v > 0.0 && *v < radius, "must lie in (0, radius)")?;
    let mut times: Vec<f64> = cfg.list("times")?;
    if times.len() < 2 || times.iter().any(|t| !(*t > 0.0)) {
        return Err(cfg.error("times", "need at least two positive times").into());
    }
    times.sort_by(|a, b| b.total_cmp(a));
    let decay_radius = cfg.checked("decay_radius", |v: &f64| *v > 0.0, "must be > 0")?;
    let decay_width =
        cfg.checked("decay_width", |v: &f64| *v > 0.0 && *v < decay_radius, "must lie in (0, decay_radius)")?;
    let factor: f64 = cfg.get("decay_factor")?;
    let tol = cfg.tolerance()?;
    let quad = QuadratureSpec::default();

    let cont = check_continuity_hypotheses(&index);
    if !cont.verdict {
        return Err(cfg.error("q", "continuity at t = 0 needs q < inf, or q = inf and r <= 1").into());
    }
    let (decay, beta) = check_decay_hypotheses(n, &index, &target);
    let f = RadialFunction::SmoothBall { radius, width };
    // the decay is asymptotic in t / (feature scale)^2, so it gets a wider profile
    let g = RadialFunction::SmoothBall { radius: decay_radius, width: decay_width };
    let f_norm = herz_norm_of(&f, &index, n, DEFAULT_WINDOW, &quad)?.value;
    let b = ratio_to_f64(&beta);

    let rows: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| -> Result<(f64, f64), super::Failure> {
            let u = heat_apply(&f, t, n, &quad)?;
            let diff = herz_norm_of(&u.minus(&f), &index, n, DEFAULT_WINDOW, &quad)?.value;
            let v = heat_apply(&g, t, n, &quad)?;
            let scaled = t.powf(b) * herz_norm_of(&v, &target, n, DEFAULT_WINDOW, &quad)?.value;
            Ok((diff, scaled))
        })
        .collect::<Result<_, _>>()?;
    let diffs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let scaled: Vec<f64> = rows.iter().map(|r| r.1).collect();

    let mut rep = ExperimentReport::new(cfg, &[CONTINUITY, DECAY]);
    let decreasing = f_norm == 0.0 || diffs.windows(2).all(|w| w[1] < w[0]);
    rep.check(Check::flag("difference strictly decreasing", decreasing, true));
    let rel = if f_norm == 0.0 { 0.0 } else { diffs.last().unwrap() / f_norm };
    rep.check(Check::new("final relative difference", rel, Relation::AtMost, tol));
    rep.check(Check::flag("decay hypotheses hold", decay.verdict, true));
    // per-decade ratio of the scaled norms, normalised for uneven spacing
    let worst = times
        .windows(2)
        .zip(scaled.windows(2))
        .map(|(t, v)| (v[0] / v[1]).powf(1.0 / (t[0] / t[1]).log10()))
        .fold(f64::INFINITY, f64::min);
    if scaled.iter().any(|v| *v > 0.0) {
        rep.check(Check::new("t^beta norm decay per decade", worst, Relation::AtLeast, factor));
    }
    let mut trace = Trace::new("difference", &["t", "difference", "scaled_target_norm"]);
    for ((t, d), s) in times.iter().zip(&diffs).zip(&scaled) {
        trace.push(vec![*t, *d, *s]);
    }
    rep.traces.push(trace);
    rep.details = json!({
        "f_norm": f_norm,
        "times": times,
        "differences": diffs,
        "beta": fmt_rational(&beta),
        "scaled_norms": scaled,
        "hypotheses": [cont, decay],
    });
    Ok(rep)
}
