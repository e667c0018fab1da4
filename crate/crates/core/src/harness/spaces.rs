//! Experiments on the spaces themselves: embeddings, membership thresholds,
//! real interpolation, and the density gap for `q = ∞`.

use super::report::{Anchor, Check, ExperimentReport, Relation, Trace};
use super::{dimension, rational, ConfigError, ExperimentConfig, Failure, Outcome};
use crate::exponents::{fmt_rational, int, ratio_to_f64, ExtRat, HerzIndex, Rational};
use crate::functions::{
    annular_decompose, bump_chain_profile, unit_ball_volume, AnnularProfile, BumpChain, RadialFunction, DEFAULT_WINDOW,
};
use crate::norms::{
    herz_norm, herz_norm_of, interpolation_norm, k_functional, k_functional_lower, k_split_norm, lorentz_norm,
    lorentz_norm_of_measures, weighted_lebesgue_norm, InterpolationCouple, NormValue,
};
use crate::quadrature::QuadratureSpec;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub(crate) const MONOTONE_R: Anchor = Anchor {
    id: "herz-monotone-r",
    statement: "K^s_{q,r1} embeds in K^s_{q,r2} with norm one when r1 <= r2",
};
pub(crate) const SOBOLEV: Anchor = Anchor {
    id: "herz-sobolev-chain",
    statement: "K^{s1}_{q1,r} embeds in K^{s2}_{q2,r} when s1/n+1/q1 = s2/n+1/q2 and q1 >= q2",
};
pub(crate) const WEIGHTED: Anchor = Anchor {
    id: "herz-weighted-lebesgue",
    statement: "K^s_{q,q} coincides with the power-weighted Lebesgue space of || |x|^s f ||_{L^q}",
};
pub(crate) const HERZ_LORENTZ: Anchor = Anchor {
    id: "herz-lorentz-embedding",
    statement: "Herz and power-weighted Lorentz spaces on the same regularity line embed into each other",
};
pub(crate) const LORENTZ: Anchor = Anchor {
    id: "weighted-lorentz",
    statement: "||f|| in L^{p,r}_s is the Lorentz quasi-norm of |x|^s f built from the decreasing rearrangement",
};
pub(crate) const GAUSSIAN: Anchor = Anchor {
    id: "gaussian-membership",
    statement: "the Gaussian lies in K^s_{q,r} iff s/n+1/q > 0, or s/n+1/q = 0 and r = inf",
};
pub(crate) const POWER_LOG: Anchor = Anchor {
    id: "power-log-membership",
    statement: "|x|^{-a} (log 1/|x|)^{-b} near the origin lies in K^s_{q,r} iff a < s+n/q, or a = s+n/q and b > 1/r",
};
pub(crate) const BUMPS: Anchor = Anchor {
    id: "bump-chain-membership",
    statement: "|x|^{-s} times the indicator of the shrinking bump chain E_b lies in K^s_{q,r} iff b > q/r (r < inf), and in L^{q,r}_s iff b > 1",
};
pub(crate) const K_FUNCTIONAL: Anchor = Anchor {
    id: "k-functional",
    statement: "K(t, f) = inf over f = f0 + f1 of ||f0|| in X0 plus t ||f1|| in X1",
};
pub(crate) const INTERPOLATION: Anchor = Anchor {
    id: "herz-real-interpolation",
    statement: "(K^{s0}_{q,r0}, K^{s1}_{q,r1})_{theta,r} = K^s_{q,r} with s = (1-theta)s0 + theta s1",
};
pub(crate) const DENSITY: Anchor = Anchor {
    id: "density-gap",
    statement: "for q = inf the indicator of A_1 stays at distance at least min(1, 2^s)/2 from continuous functions",
};
pub(crate) const RETRACTION: Anchor = Anchor {
    id: "annular-retraction",
    statement: "splitting f into its annular pieces and summing them back returns f",
};

pub(crate) const EMBED_KEYS: &[(&str, &str)] = &[
    ("n", "3"),
    ("profiles", "50"),
    ("annuli", "12"),
    ("lorentz_s", "-1"),
    ("lorentz_s_tilde", "0"),
    ("lorentz_p", "2"),
    ("lorentz_r", "2"),
    ("reverse_s", "1"),
    ("reverse_s_tilde", "0"),
    ("holder_q1", "4"),
    ("holder_q2", "2"),
    ("holder_s2", "0"),
    ("holder_r", "2"),
    ("holder_max", "4"),
    ("weighted_s", "-1, 1/2, 1"),
    ("weighted_q", "2"),
    ("c_max", "10"),
    ("tolerance", "1e-9"),
];

pub(crate) const MEMBERSHIP_KEYS: &[(&str, &str)] = &[
    ("n", "3"),
    ("gaussian_cases", "0 2 1; -3/2 2 1; -3/2 2 inf; -1 2 1; -2 2 inf"),
    ("power_log_s", "0"),
    ("power_log_q", "2"),
    ("power_log_r", "1"),
    ("power_log_cases", "3/2 1/2; 3/2 1; 3/2 2; 1 1; 2 1"),
    ("power_log_j_min", "-160"),
    ("bump_s", "1"),
    ("bump_q", "2"),
    ("bump_cases", "1 1; 4 1; 1/2 2; 1 2; 2 2; 0 inf"),
    ("bump_j_max", "200"),
    ("lorentz_r", "2"),
    ("lorentz_betas", "1/2, 1, 2"),
    ("tolerance", "1e-9"),
];

pub(crate) const INTERP_KEYS: &[(&str, &str)] = &[
    ("s0", "-1"),
    ("s1", "1"),
    ("q", "2"),
    ("r0", "2"),
    ("r1", "2"),
    ("theta", "1/2"),
    ("r", "2"),
    ("n", "3"),
    ("profiles", "20"),
    ("annuli", "20"),
    ("band", "16"),
    ("brute_annuli", "8"),
    ("fraction_annuli", "4"),
    ("fraction_points", "21"),
    ("brute_t", "0.25, 1, 4"),
    ("greedy_factor", "2"),
    ("tolerance", "1e-9"),
];

pub(crate) const DENSITY_KEYS: &[(&str, &str)] = &[
    ("s_values", "-1, 0, 1"),
    ("n", "3"),
    ("r", "inf"),
    ("amplitudes", "0.25, 0.5, 0.75, 1"),
    ("widths", "0.05, 0.1, 0.2"),
    ("tolerance", "1e-6"),
];

fn rng(cfg: &ExperimentConfig) -> Result<ChaCha8Rng, ConfigError> {
    Ok(ChaCha8Rng::seed_from_u64(cfg.seed()?))
}

/// Log-uniform coefficients in `[1e-3, 1]` on `k` annuli starting at `j0`.
fn random_profile(rng: &mut ChaCha8Rng, q: ExtRat, n: u32, j0: i32, k: usize) -> AnnularProfile {
    let vals: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.gen_range(-3.0..0.0))).collect();
    AnnularProfile::from_values(q, n, j0, &vals)
}

fn norm_at(f: &RadialFunction, s: Rational, q: ExtRat, r: ExtRat, n: u32, quad: &QuadratureSpec) -> Result<NormValue, Failure> {
    Ok(herz_norm_of(f, &HerzIndex::new(s, q, r)?, n, DEFAULT_WINDOW, quad)?)
}

/// `q` on the regularity line through `(s̃, p)` at smoothness `s`.
fn matched_exponent(cfg: &ExperimentConfig, s: Rational, s_tilde: Rational, p: ExtRat, n: u32) -> Result<ExtRat, ConfigError> {
    let inv = p.recip_finite() + (s_tilde - s) / int(n as i128);
    if !(inv > Rational::zero() && inv <= int(1)) {
        return Err(cfg.error("lorentz_p", "the matched Herz exponent falls outside [1, inf)"));
    }
    Ok(ExtRat::Finite(inv).recip().expect("nonzero"))
}

pub(crate) fn run_embeddings(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let profiles: usize = cfg.get("profiles")?;
    let annuli = cfg.checked("annuli", |k: &usize| *k >= 1, "must be >= 1")?;
    let c_max: f64 = cfg.get("c_max")?;
    let tol = cfg.tolerance()?;
    let quad = QuadratureSpec::default();
    let mut rng = rng(cfg)?;
    let mut rep = ExperimentReport::new(cfg, &[MONOTONE_R, SOBOLEV, WEIGHTED, HERZ_LORENTZ, LORENTZ]);

    // r1 = 1 against r2 = ∞ on random profiles
    let mut violations = 0usize;
    for _ in 0..profiles {
        let s = [-1.0, 0.0, 0.5][rng.gen_range(0..3)];
        let p = random_profile(&mut rng, ExtRat::integer(2), n, -(annuli as i32) / 2, annuli);
        let l1 = herz_norm(&p, s, ExtRat::one())?.value;
        let linf = herz_norm(&p, s, ExtRat::INFINITY)?.value;
        if linf > l1 * (1.0 + tol) {
            violations += 1;
        }
    }
    rep.check(Check::new("r-monotonicity violations", violations as f64, Relation::AtMost, 0.0));

    // Herz <-> Lorentz on a monotone radial family
    let family: Vec<(String, RadialFunction)> = [0.25, 1.0, 4.0]
        .iter()
        .map(|&r| (format!("ball({r})"), RadialFunction::BallIndicator(r)))
        .chain([0.5, 1.0, 2.0].iter().map(|&w| (format!("gaussian({w})"), RadialFunction::gaussian(w, 1.0))))
        .collect();
    let p: ExtRat = cfg.get("lorentz_p")?;
    let lr: ExtRat = cfg.get("lorentz_r")?;
    let direction = |s_key: &str, st_key: &str, herz_over_lorentz: bool| -> Result<(f64, Vec<f64>, ExtRat), Failure> {
        let s = rational(cfg, s_key)?;
        let st = rational(cfg, st_key)?;
        let q = matched_exponent(cfg, s, st, p, n)?;
        let mut ratios = Vec::new();
        for (_, f) in &family {
            let h = norm_at(f, s, q, lr, n, &quad)?.value;
            let l = lorentz_norm(f, ratio_to_f64(&st), p, lr, n, &quad)?.value;
            ratios.push(if herz_over_lorentz { h / l } else { l / h });
        }
        Ok((ratios.iter().cloned().fold(0.0, f64::max), ratios, q))
    };
    let (c1, r1, q1) = direction("lorentz_s", "lorentz_s_tilde", true)?;
    rep.check(Check::new("Lorentz into Herz (s < s~): fitted C", c1, Relation::AtMost, c_max));
    let (c2, r2, q2) = direction("reverse_s", "reverse_s_tilde", false)?;
    rep.check(Check::new("Herz into Lorentz (s > s~): fitted C", c2, Relation::AtMost, c_max));
    let (c_lit, r_lit, _) = direction("lorentz_s", "lorentz_s_tilde", false)?;
    rep.measure("Herz into Lorentz read with s < s~: max ratio (not asserted)", c_lit);

    // Sobolev-type chain with the per-annulus Hölder constant
    let q1h: ExtRat = cfg.get("holder_q1")?;
    let q2h: ExtRat = cfg.get("holder_q2")?;
    if q1h < q2h {
        return Err(cfg.error("holder_q1", "must be >= holder_q2").into());
    }
    let s2 = rational(cfg, "holder_s2")?;
    let gap = q2h.recip_finite() - q1h.recip_finite();
    let s1 = s2 + int(n as i128) * gap;
    let hr: ExtRat = cfg.get("holder_r")?;
    let hc = (unit_ball_volume(n) * (1.0 - 2f64.powi(-(n as i32)))).powf(ratio_to_f64(&gap));
    let holder_max: f64 = cfg.get("holder_max")?;
    let mut holder = 0.0f64;
    for (_, f) in &family {
        let lhs = norm_at(f, s2, q2h, hr, n, &quad)?.value;
        let rhs = norm_at(f, s1, q1h, hr, n, &quad)?.value;
        holder = holder.max(lhs / rhs);
    }
    rep.check(Check::new("Sobolev chain ratio vs Hölder constant", holder, Relation::AtMost, hc * (1.0 + tol)));
    rep.check(Check::new("Hölder constant", hc, Relation::AtMost, holder_max));

    // K^s_{q,q} against direct weighted Lebesgue quadrature
    let wq: ExtRat = cfg.get("weighted_q")?;
    if wq.is_infinite() {
        return Err(cfg.error("weighted_q", "must be finite").into());
    }
    let mut weighted = Vec::new();
    for s in cfg.list::<ExtRat>("weighted_s")? {
        let s = s.finite().ok_or_else(|| cfg.error("weighted_s", "must be finite"))?;
        let sf = ratio_to_f64(&s);
        let f = RadialFunction::gaussian(1.0, 1.0);
        let h = norm_at(&f, s, wq, wq, n, &quad)?.value;
        let l = weighted_lebesgue_norm(&f, sf, wq.to_f64(), n).value;
        let ratio = h / l;
        let bound = sf.abs().exp2();
        rep.check(Check::new(format!("weighted Lebesgue s={} |log2 ratio| vs |s|", fmt_rational(&s)), ratio.log2().abs(), Relation::AtMost, bound.log2()));
        weighted.push(json!({ "s": fmt_rational(&s), "herz": h, "lebesgue": l }));
    }
    rep.details = json!({
        "monotone_violations": violations,
        "family": family.iter().map(|(name, _)| name).collect::<Vec<_>>(),
        "lorentz_into_herz": { "q": q1, "ratios": r1, "C": c1 },
        "herz_into_lorentz": { "q": q2, "ratios": r2, "C": c2 },
        "herz_into_lorentz_literal": { "ratios": r_lit, "max": c_lit },
        "holder": { "s1": fmt_rational(&s1), "constant": hc, "max_ratio": holder },
        "weighted_lebesgue": weighted,
    });
    Ok(rep)
}

fn verdict(finite: bool) -> &'static str {
    if finite {
        "finite"
    } else {
        "divergent"
    }
}

pub(crate) fn run_membership(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let nn = int(n as i128);
    let quad = QuadratureSpec::default();
    let mut rep = ExperimentReport::new(cfg, &[GAUSSIAN, POWER_LOG, BUMPS, LORENTZ]);
    let mut rows = Vec::new();
    let mut record = |rep: &mut ExperimentReport, family: &str, label: String, expected: bool, nv: &NormValue| {
        let measured = !nv.is_divergent();
        rep.check(Check::flag(format!("{family} {label}: {}", verdict(expected)), measured, expected));
        rows.push(json!({ "family": family, "case": label, "expected": verdict(expected), "measured": verdict(measured), "norm": nv }));
    };

    let gaussian = RadialFunction::gaussian(1.0, 1.0);
    for row in cfg.groups::<ExtRat>("gaussian_cases", 3)? {
        let s = row[0].finite().ok_or_else(|| cfg.error("gaussian_cases", "s must be finite"))?;
        let idx = HerzIndex::new(s, row[1], row[2]).map_err(|e| cfg.error("gaussian_cases", e))?;
        let v = idx.regularity(n);
        let expected = v > Rational::zero() || (v.is_zero() && idx.r.is_infinite());
        let nv = herz_norm_of(&gaussian, &idx, n, DEFAULT_WINDOW, &quad)?;
        record(&mut rep, "gaussian", format!("(s, q, r) = ({}, {}, {})", fmt_rational(&s), idx.q, idx.r), expected, &nv);
    }

    let pl = HerzIndex::new(rational(cfg, "power_log_s")?, cfg.get("power_log_q")?, cfg.get("power_log_r")?)
        .map_err(|e| cfg.error("power_log_q", e))?;
    let a_crit = pl.s + nn * pl.q.recip_finite();
    let j_min: i32 = cfg.checked("power_log_j_min", |j: &i32| *j < -30, "must be < -30")?;
    for row in cfg.groups::<ExtRat>("power_log_cases", 2)? {
        let a = row[0].finite().ok_or_else(|| cfg.error("power_log_cases", "a must be finite"))?;
        let b = row[1].finite().ok_or_else(|| cfg.error("power_log_cases", "beta must be finite"))?;
        let expected = a < a_crit || (a == a_crit && (pl.r.is_infinite() || ExtRat::Finite(b) > pl.r.recip()?));
        let f = RadialFunction::power_log(ratio_to_f64(&a), ratio_to_f64(&b));
        let profile = annular_decompose(&f, pl.q, n, (j_min, 0), &quad)?;
        let nv = herz_norm(&profile, ratio_to_f64(&pl.s), pl.r)?;
        record(&mut rep, "power-log", format!("(a, beta) = ({}, {})", fmt_rational(&a), fmt_rational(&b)), expected, &nv);
    }

    let bs = rational(cfg, "bump_s")?;
    let bq: ExtRat = cfg.get("bump_q")?;
    if bq.is_infinite() {
        return Err(cfg.error("bump_q", "must be finite").into());
    }
    let j_max = cfg.checked("bump_j_max", |j: &i32| *j >= 40, "must be >= 40")?;
    for row in cfg.groups::<ExtRat>("bump_cases", 2)? {
        let beta = row[0].finite().ok_or_else(|| cfg.error("bump_cases", "beta must be finite"))?;
        let r = row[1];
        let expected = if r.is_infinite() { beta >= Rational::zero() } else { ExtRat::Finite(beta) > bq.try_div(&r)? };
        let chain = BumpChain::new(beta)?;
        let profile = bump_chain_profile(&chain, ratio_to_f64(&bs), bq, n, j_max)?;
        let nv = herz_norm(&profile, ratio_to_f64(&bs), r)?;
        record(&mut rep, "bump-chain Herz", format!("(beta, r) = ({}, {r})", fmt_rational(&beta)), expected, &nv);
    }
    let lr: ExtRat = cfg.get("lorentz_r")?;
    for beta in cfg.list::<ExtRat>("lorentz_betas")? {
        let beta = beta.finite().ok_or_else(|| cfg.error("lorentz_betas", "must be finite"))?;
        let chain = BumpChain::new(beta)?;
        // |x|^s · |x|^{-s} χ_E is the plain indicator, one piece per ball
        let pieces: Vec<(f64, f64)> = (1..=j_max as u32).map(|k| (1.0, chain.ball_measure(k, n))).collect();
        let nv = lorentz_norm_of_measures(&pieces, bq, lr, true)?;
        record(&mut rep, "bump-chain Lorentz", format!("beta = {}", fmt_rational(&beta)), beta > int(1), &nv);
    }
    rep.details = json!({ "cases": rows });
    Ok(rep)
}

/// Smallest `‖f0‖ + t‖f1‖` over every whole-annulus assignment and, for
/// short profiles, over a uniform grid of split fractions.
fn brute_k(profile: &AnnularProfile, couple: &InterpolationCouple, t: f64, fractions: Option<usize>) -> f64 {
    let k = profile.coeffs.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << k) {
        let l: Vec<f64> = (0..k).map(|i| ((mask >> i) & 1) as f64).collect();
        best = best.min(k_split_norm(profile, couple, t, &l));
    }
    if let Some(m) = fractions {
        let mut idx = vec![0usize; k];
        loop {
            let l: Vec<f64> = idx.iter().map(|&i| i as f64 / (m - 1) as f64).collect();
            best = best.min(k_split_norm(profile, couple, t, &l));
            let mut d = 0;
            while d < k && idx[d] == m - 1 {
                idx[d] = 0;
                d += 1;
            }
            if d == k {
                break;
            }
            idx[d] += 1;
        }
    }
    best
}

pub(crate) fn run_interpolation(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let q: ExtRat = cfg.get("q")?;
    let couple = InterpolationCouple::new(rational(cfg, "s0")?, rational(cfg, "s1")?, cfg.get("r0")?, cfg.get("r1")?, q)
        .map_err(|e| cfg.error("s1", e))?;
    let theta = ratio_to_f64(&rational(cfg, "theta")?);
    if !(theta > 0.0 && theta < 1.0) {
        return Err(cfg.error("theta", "must lie in (0, 1)").into());
    }
    let r: ExtRat = cfg.get("r")?;
    let profiles: usize = cfg.checked("profiles", |k: &usize| *k >= 1, "must be >= 1")?;
    let annuli: usize = cfg.checked("annuli", |k: &usize| *k >= 1, "must be >= 1")?;
    let c: f64 = cfg.get("band")?;
    let brute_annuli = cfg.checked("brute_annuli", |k: &usize| (1..=16).contains(k), "must lie in 1..=16")?;
    let frac_annuli = cfg.checked("fraction_annuli", |k: &usize| *k <= brute_annuli, "must not exceed brute_annuli")?;
    let frac_points = cfg.checked("fraction_points", |k: &usize| *k >= 2, "must be >= 2")?;
    let ts: Vec<f64> = cfg.list("brute_t")?;
    let factor: f64 = cfg.get("greedy_factor")?;
    let tol = cfg.tolerance()?;
    let s_theta = couple.interpolated_s(theta);
    let mut rng = rng(cfg)?;
    let mut rep = ExperimentReport::new(cfg, &[K_FUNCTIONAL, INTERPOLATION, RETRACTION]);

    let mut trace = Trace::new("ratios", &["profile", "interpolation_norm", "herz_norm", "ratio"]);
    let mut ratios = Vec::new();
    for i in 0..profiles {
        let p = random_profile(&mut rng, q, n, -(annuli as i32) / 2, annuli);
        let a = interpolation_norm(&p, &couple, theta, r)?.value;
        let b = herz_norm(&p, s_theta, r)?.value;
        trace.push(vec![i as f64, a, b, a / b]);
        ratios.push(a / b);
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    rep.check(Check::new("smallest ratio", lo, Relation::AtLeast, 1.0 / c));
    rep.check(Check::new("largest ratio", hi, Relation::AtMost, c));

    // single-annulus profiles reduce both sides to the same scalar
    let singles: Vec<f64> = [(-3, 0.7), (0, 1.0), (2, 0.01), (5, 3.0)]
        .iter()
        .map(|&(j, v)| -> Result<f64, Failure> {
            let p = AnnularProfile::from_values(q, n, j, &[v]);
            Ok(interpolation_norm(&p, &couple, theta, r)?.value / herz_norm(&p, s_theta, r)?.value)
        })
        .collect::<Result<_, _>>()?;
    let spread = singles.iter().cloned().fold(0.0, f64::max) / singles.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    rep.check(Check::new("single-annulus ratio spread", spread, Relation::AtMost, tol));
    let zero = AnnularProfile::from_values(q, n, 0, &[0.0; 4]);
    let z = interpolation_norm(&zero, &couple, theta, r)?.value + herz_norm(&zero, s_theta, r)?.value;
    rep.check(Check::new("zero profile norms", z, Relation::AtMost, 0.0));

    // threshold-split K-functional against exhaustive search
    let mut worst_gap = 0.0f64;
    let mut lower_ok = true;
    for k in 1..=brute_annuli {
        let p = random_profile(&mut rng, q, n, -(k as i32) / 2, k);
        for &t in &ts {
            let greedy = k_functional(&p, &couple, t).value;
            let brute = brute_k(&p, &couple, t, (k <= frac_annuli).then_some(frac_points));
            worst_gap = worst_gap.max(greedy / brute);
            lower_ok &= k_functional_lower(&p, &couple, t) <= brute * (1.0 + tol);
        }
    }
    rep.check(Check::new("greedy over brute-force K", worst_gap, Relation::AtMost, factor));
    rep.check(Check::flag("K lower bound below brute force", lower_ok, true));
    rep.traces.push(trace);
    rep.details = json!({
        "couple": couple,
        "theta": theta,
        "s_theta": s_theta,
        "ratios": ratios,
        "single_annulus_ratios": singles,
        "greedy_gap": worst_gap,
    });
    Ok(rep)
}

pub(crate) fn run_density_bound(cfg: &ExperimentConfig) -> Outcome {
    let n = dimension(cfg)?;
    let r: ExtRat = cfg.get("r")?;
    let amps: Vec<f64> = cfg.list("amplitudes")?;
    let widths: Vec<f64> = cfg.list("widths")?;
    if widths.iter().any(|w| !(*w > 0.0 && *w < 0.5)) {
        return Err(cfg.error("widths", "widths must lie in (0, 1/2)").into());
    }
    let tol = cfg.tolerance()?;
    let quad = QuadratureSpec::default();
    let target = RadialFunction::AnnulusIndicator(1);
    let mut candidates: Vec<(String, RadialFunction)> = vec![("zero".into(), RadialFunction::Zero)];
    for &w in &widths {
        let inner = RadialFunction::smooth_annulus(w);
        let outer = RadialFunction::SmoothBall { radius: 2.0 + w, width: w }.minus(&RadialFunction::SmoothBall { radius: 1.0, width: w });
        for &c in &amps {
            candidates.push((format!("inner(w={w}, c={c})"), inner.clone().scaled(c)));
            candidates.push((format!("outer(w={w}, c={c})"), outer.clone().scaled(c)));
        }
    }
    let mut rep = ExperimentReport::new(cfg, &[DENSITY, RETRACTION]);
    let mut per_s = Vec::new();
    let mut trace = Trace::new("minima", &["s", "bound", "minimum"]);
    for s in cfg.list::<ExtRat>("s_values")? {
        let s = s.finite().ok_or_else(|| cfg.error("s_values", "must be finite"))?;
        let sf = ratio_to_f64(&s);
        let idx = HerzIndex::new(s, ExtRat::INFINITY, r)?;
        let mut best = (f64::INFINITY, String::new());
        let mut zero_norm = f64::NAN;
        for (name, g) in &candidates {
            let d = herz_norm_of(&target.minus(g), &idx, n, (-8, 8), &quad)?.value;
            if name == "zero" {
                zero_norm = d;
            }
            if d < best.0 {
                best = (d, name.clone());
            }
        }
        let bound = 1f64.min(sf.exp2()) / 2.0;
        rep.check(Check::new(format!("s={} g=0 distance", fmt_rational(&s)), zero_norm, Relation::Within(1e-12 * sf.exp2()), sf.exp2()));
        rep.check(Check::new(format!("s={} family minimum", fmt_rational(&s)), best.0, Relation::AtLeast, bound - tol));
        trace.push(vec![sf, bound, best.0]);
        per_s.push(json!({ "s": fmt_rational(&s), "bound": bound, "minimum": best.0, "argmin": best.1 }));
    }
    rep.traces.push(trace);
    rep.details = json!({ "candidates": candidates.len(), "results": per_s });
    Ok(rep)
}
