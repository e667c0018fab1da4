use super::{aggregate, check_r, herz_norm, NormError, NormStatus, NormValue, NormWindow, Tail, Term};
use crate::exponents::ExtRat;
use crate::functions::{annular_decompose, effective_radius, DEFAULT_WINDOW, sphere_area, unit_ball_volume, RadialField, RadialFunction};
use crate::quadrature::{integrate_adaptive, QuadratureSpec};

const MONOTONE_RANGE: (f64, f64) = (1.0 / (1u64 << 60) as f64, (1u64 << 40) as f64);

/// `f*(t)` for a radial nonincreasing `f`: `f((t/v_n)^{1/n})`.
pub fn rearrangement(f: &RadialFunction, t: f64, n: u32) -> Result<f64, NormError> {
    if !(t > 0.0) {
        return Err(NormError::InvalidExponent(format!("measure t = {t} must be > 0")));
    }
    if !f.is_nonincreasing_on(MONOTONE_RANGE.0, MONOTONE_RANGE.1, 2001) {
        return Err(NormError::NonMonotone("rearrangement fast path needs |f| nonincreasing in r".into()));
    }
    Ok(f.eval((t / unit_ball_volume(n)).powf(1.0 / n as f64)).abs())
}

fn check_p(p: ExtRat) -> Result<f64, NormError> {
    if p.is_infinite() {
        return Err(NormError::InvalidExponent("Lorentz exponent p must be finite".into()));
    }
    if p <= ExtRat::zero() {
        return Err(NormError::InvalidExponent(format!("p = {p} must be > 0")));
    }
    Ok(p.to_f64())
}

/// `‖|x|^s f‖_{L^{p,r}} = (∫₀^∞ [t^{1/p} g*(t)]^r dt/t)^{1/r}`, `g = |x|^s f`.
///
/// For radially nonincreasing `g` the substitution `t = v_n ρ^n` turns the
/// integral into a dyadic sum handled like a Herz norm; otherwise `g*` is
/// built from sorted thin shells.
pub fn lorentz_norm(
    f: &RadialFunction,
    weight_s: f64,
    p: ExtRat,
    r: ExtRat,
    n: u32,
    quad: &QuadratureSpec,
) -> Result<NormValue, NormError> {
    let pf = check_p(p)?;
    check_r(r)?;
    let g = f.clone().with_power_weight(weight_s);
    let v = unit_ball_volume(n);
    let nf = n as f64;
    if g.is_nonincreasing_on(MONOTONE_RANGE.0, MONOTONE_RANGE.1, 2001) {
        let inv_r = 1.0 / r.to_f64();
        let h = g.with_power_weight(nf / pf - nf * inv_r);
        let profile = annular_decompose(&h, r, n, DEFAULT_WINDOW, quad)?;
        let mut nv = herz_norm(&profile, 0.0, r)?;
        let c = v.powf(1.0 / pf - inv_r);
        nv.value *= c;
        nv.lower *= c;
        nv.upper *= c;
        nv.note = if nv.note.is_empty() { "monotone fast path".into() } else { format!("monotone fast path; {}", nv.note) };
        return Ok(nv);
    }
    let coarse = shell_norm(&g, pf, r, n, 64);
    let fine = shell_norm(&g, pf, r, n, 128);
    let diff = (fine - coarse).abs();
    Ok(NormValue {
        value: fine,
        lower: (fine - diff).max(0.0),
        upper: fine + diff,
        window: NormWindow::Annuli(DEFAULT_WINDOW.0, DEFAULT_WINDOW.1),
        note: "sorted-shell distribution function; mass outside the window neglected".into(),
        status: NormStatus::Finite,
        growth: None,
    })
}

fn shell_norm(g: &RadialFunction, p: f64, r: ExtRat, n: u32, per_annulus: usize) -> f64 {
    let v = unit_ball_volume(n);
    let nf = n as f64;
    let mut shells: Vec<(f64, f64)> = Vec::new();
    for j in -60..=40 {
        let (lo, hi) = (2f64.powi(j - 1), 2f64.powi(j));
        for i in 0..per_annulus {
            let a = lo * (hi / lo).powf(i as f64 / per_annulus as f64);
            let b = lo * (hi / lo).powf((i + 1) as f64 / per_annulus as f64);
            let h = g.eval((a * b).sqrt()).abs();
            if h > 0.0 {
                shells.push((h, v * (b.powf(nf) - a.powf(nf))));
            }
        }
    }
    lorentz_of_steps(&mut shells, p, r)
}

/// Lorentz quasi-norm of the step function with the given `(height, measure)`
/// pieces.
fn lorentz_of_steps(steps: &mut [(f64, f64)], p: f64, r: ExtRat) -> f64 {
    steps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut t = 0.0;
    if r.is_infinite() {
        let mut sup = 0.0f64;
        for &(h, m) in steps.iter() {
            t += m;
            sup = sup.max(t.powf(1.0 / p) * h);
        }
        return sup;
    }
    let rf = r.to_f64();
    let mut acc = 0.0;
    for &(h, m) in steps.iter() {
        let t1 = t + m;
        acc += h.powf(rf) * (p / rf) * (t1.powf(rf / p) - t.powf(rf / p));
        t = t1;
    }
    acc.powf(1.0 / rf)
}

/// Lorentz quasi-norm of a step function given piece by piece in the order
/// an enumeration would discover them, e.g. one piece per ball of a chain.
/// With `open_ended` the list is a truncation of an infinite family and the
/// widening heuristic decides divergence from the last 20 pieces.
pub fn lorentz_norm_of_measures(pieces: &[(f64, f64)], p: ExtRat, r: ExtRat, open_ended: bool) -> Result<NormValue, NormError> {
    let pf = check_p(p)?;
    check_r(r)?;
    let k = pieces.len();
    let norm_of = |m: usize| lorentz_of_steps(&mut pieces[..m].to_vec(), pf, r);
    let value = norm_of(k);
    let window = NormWindow::Annuli(1, k as i32);
    if !open_ended || k < 21 {
        return Ok(NormValue {
            value,
            lower: value,
            upper: value,
            window,
            note: String::new(),
            status: NormStatus::Finite,
            growth: None,
        });
    }
    // the p-th power grows additively in the measure for constant heights
    let terms: Vec<Term> = (0..k)
        .map(|m| {
            let inc = norm_of(m + 1).powf(pf) - if m == 0 { 0.0 } else { norm_of(m).powf(pf) };
            Term { value: inc.max(0.0), lower: inc.max(0.0), upper: inc.max(0.0) }
        })
        .collect();
    let agg = aggregate(1, &terms, Tail::Zero, Tail::Unknown, ExtRat::one());
    if agg.is_divergent() {
        return Ok(agg);
    }
    Ok(NormValue {
        value,
        lower: value,
        upper: agg.upper.powf(1.0 / pf),
        window,
        note: agg.note,
        status: NormStatus::Finite,
        growth: agg.growth,
    })
}

/// `‖|x|^s f‖_{L^q}` by direct adaptive quadrature in `log r`.
pub fn weighted_lebesgue_norm(f: &RadialFunction, s: f64, q: f64, n: u32) -> NormValue {
    let lo = 2f64.powi(-60);
    let hi = effective_radius(f).unwrap_or(2f64.powi(40)).min(2f64.powi(40));
    let mut breaks: Vec<f64> = f.breakpoints(lo, hi).into_iter().map(f64::ln).collect();
    breaks.extend((-60..=40).map(|j| j as f64 * std::f64::consts::LN_2).filter(|&u| u < hi.ln()));
    breaks.push(lo.ln());
    breaks.push(hi.ln());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let nf = n as f64;
    let res = integrate_adaptive(
        |u| {
            let rho = u.exp();
            (rho.powf(s) * f.eval(rho)).abs().powf(q) * rho.powf(nf)
        },
        &breaks,
        0.0,
        1e-12,
        20_000,
    );
    let omega = sphere_area(n);
    let to_norm = |x: f64| (omega * x.max(0.0)).powf(1.0 / q);
    NormValue {
        value: to_norm(res.value),
        lower: to_norm(res.value - res.error),
        upper: to_norm(res.value + res.error),
        window: NormWindow::Annuli(DEFAULT_WINDOW.0, DEFAULT_WINDOW.1),
        note: "direct quadrature over [2^-60, 2^40]".into(),
        status: NormStatus::Finite,
        growth: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrangement_examples() {
        let v3 = unit_ball_volume(3);
        let b = RadialFunction::BallIndicator(1.0);
        assert_eq!(rearrangement(&b, v3 / 2.0, 3).unwrap(), 1.0);
        assert_eq!(rearrangement(&b, 2.0 * v3, 3).unwrap(), 0.0);
        let g = RadialFunction::gaussian(1.0, 1.0);
        for t in [0.1, 1.0, 10.0] {
            let expect = (-(t / v3).powf(2.0 / 3.0)).exp();
            assert!((rearrangement(&g, t, 3).unwrap() - expect).abs() < 1e-14);
        }
        assert!(matches!(rearrangement(&RadialFunction::AnnulusIndicator(0), 1.0, 3), Err(NormError::NonMonotone(_))));
    }

    #[test]
    fn ball_indicator_lorentz_closed_form() {
        let quad = QuadratureSpec::default();
        let v3 = unit_ball_volume(3);
        let rad = 1.5f64;
        let (p, r) = (3.0f64, 2.0f64);
        let nv = lorentz_norm(&RadialFunction::BallIndicator(rad), 0.0, ExtRat::integer(3), ExtRat::integer(2), 3, &quad)
            .unwrap();
        let expect = (p / r).powf(1.0 / r) * (v3 * rad.powi(3)).powf(1.0 / p);
        assert!((nv.value / expect - 1.0).abs() < 1e-11, "{} vs {expect}", nv.value);
        let nv = lorentz_norm(&RadialFunction::BallIndicator(rad), 0.0, ExtRat::integer(3), ExtRat::Infinity, 3, &quad)
            .unwrap();
        assert!((nv.value / (v3 * rad.powi(3)).powf(1.0 / p) - 1.0).abs() < 1e-12);
        assert!(lorentz_norm(&RadialFunction::BallIndicator(1.0), 0.0, ExtRat::Infinity, ExtRat::one(), 3, &quad).is_err());
    }

    #[test]
    fn shell_path_agrees_with_monotone_path() {
        let quad = QuadratureSpec::default();
        let f = RadialFunction::AnnulusIndicator(1);
        let v3 = unit_ball_volume(3);
        let nv = lorentz_norm(&f, 0.0, ExtRat::integer(2), ExtRat::integer(2), 3, &quad).unwrap();
        let expect = (v3 * 7.0).sqrt();
        assert!((nv.value / expect - 1.0).abs() < 1e-9, "{nv:?}");
    }

    #[test]
    fn truncated_power_grows_logarithmically() {
        let quad = QuadratureSpec::default();
        let norm = |lo: f64| {
            let f = RadialFunction::truncated_power(1.5, 1.0).minus(&RadialFunction::truncated_power(1.5, lo));
            lorentz_norm(&f, 0.0, ExtRat::integer(2), ExtRat::integer(2), 3, &quad).unwrap().value
        };
        // ‖·‖^r is linear in log(1/lo)
        let (a, b, c) = (norm(2f64.powi(-10)), norm(2f64.powi(-20)), norm(2f64.powi(-30)));
        let (d1, d2) = (b * b - a * a, c * c - b * b);
        assert!((d1 / d2 - 1.0).abs() < 1e-3, "{d1} {d2}");
    }

    #[test]
    fn measure_chain_divergence() {
        let chain = |beta: f64| -> Vec<(f64, f64)> { (1..=300).map(|k| (1.0, (k as f64).powf(-beta))).collect() };
        let p = ExtRat::integer(2);
        assert!(lorentz_norm_of_measures(&chain(0.5), p, ExtRat::integer(2), true).unwrap().is_divergent());
        let nv = lorentz_norm_of_measures(&chain(2.0), p, ExtRat::integer(2), true).unwrap();
        assert!(nv.is_finite());
    }

    #[test]
    fn weighted_lebesgue_of_ball() {
        let nv = weighted_lebesgue_norm(&RadialFunction::BallIndicator(1.0), 0.0, 2.0, 3);
        assert!((nv.value / unit_ball_volume(3).sqrt() - 1.0).abs() < 1e-10);
    }
}
