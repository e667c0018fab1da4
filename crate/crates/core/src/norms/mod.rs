//! Herz, Lorentz and real-interpolation quasi-norms.

mod interp;
mod lorentz;

pub use interp::{interpolation_norm, k_functional, k_functional_lower, k_split_norm, InterpolationCouple};
pub use lorentz::{lorentz_norm, lorentz_norm_of_measures, rearrangement, weighted_lebesgue_norm};

use crate::exponents::{ratio_to_f64, ExtRat, HerzIndex};
use crate::functions::{annular_decompose, AnnularProfile, FunctionError, RadialField, TailModel};
use crate::quadrature::QuadratureSpec;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("function is not radially nonincreasing: {0}")]
    NonMonotone(String),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormStatus {
    Finite,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormWindow {
    Annuli(i32, i32),
    TRange(f64, f64),
}

/// A computed quasi-norm with a two-sided band and truncation metadata.
/// Infinite entries serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub window: NormWindow,
    pub note: String,
    pub status: NormStatus,
    /// Partial-aggregate growth factor from the last window widening.
    pub growth: Option<f64>,
}

impl NormValue {
    pub fn is_divergent(&self) -> bool {
        self.status == NormStatus::Divergent
    }

    pub fn is_finite(&self) -> bool {
        self.status == NormStatus::Finite
    }

    fn divergent(window: NormWindow, note: String, growth: Option<f64>) -> Self {
        Self {
            value: f64::INFINITY,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            window,
            note,
            status: NormStatus::Divergent,
            growth,
        }
    }

    fn zero(window: NormWindow) -> Self {
        Self { value: 0.0, lower: 0.0, upper: 0.0, window, note: String::new(), status: NormStatus::Finite, growth: None }
    }
}

/// Factor by which a windowed partial aggregate must grow, twice in a row,
/// for a norm with an unknown tail to be reported divergent.
pub const DIVERGENCE_FACTOR: f64 = 1.01;

fn check_r(r: ExtRat) -> Result<(), NormError> {
    if r <= ExtRat::zero() {
        return Err(NormError::InvalidExponent(format!("r = {r} must be > 0")));
    }
    Ok(())
}

/// One term of a dyadic aggregate: `value` with bounds, already weighted.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Continuation of a weighted term sequence beyond the computed range.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Tail {
    Zero,
    /// Ratio between consecutive weighted terms moving outward.
    Geometric(f64),
    Unknown,
}

/// `(Σ_j t_j^r)^{1/r}` or `sup_j t_j` over terms indexed from `j0`, with the
/// two tails accounted for analytically or by the widening heuristic.
pub(crate) fn aggregate(j0: i32, terms: &[Term], below: Tail, above: Tail, r: ExtRat) -> NormValue {
    let window = NormWindow::Annuli(j0, j0 + terms.len() as i32 - 1);
    if terms.is_empty() {
        return NormValue::zero(window);
    }
    let rf = r.to_f64();
    let inf = r.is_infinite();
    let pow = |x: f64| if inf { x } else { x.powf(rf) };
    let combine = |a: f64, b: f64| if inf { a.max(b) } else { a + b };
    let root = |x: f64| if inf { x } else { x.powf(1.0 / rf) };
    let mut notes = Vec::new();

    // analytic geometric tails
    let mut tail_sum = [0.0f64; 3];
    for (tail, edge, name) in [(below, terms[0], "below"), (above, *terms.last().unwrap(), "above")] {
        if let Tail::Geometric(mut x) = tail {
            // ratios are products of powers of two; snap rounding noise at 1
            if (x - 1.0).abs() < 1e-12 {
                x = 1.0;
            }
            if edge.upper == 0.0 {
                continue;
            }
            let diverges = if inf { x > 1.0 } else { x >= 1.0 };
            if diverges {
                return NormValue::divergent(
                    window,
                    format!("geometric tail {name} the window with weighted ratio {x:.6} does not sum"),
                    Some(x),
                );
            }
            let xr = pow(x);
            for (k, e) in [edge.value, edge.lower, edge.upper].into_iter().enumerate() {
                let t = if inf { e * x } else { pow(e) * xr / (1.0 - xr) };
                tail_sum[k] = combine(tail_sum[k], t);
            }
            notes.push(format!("geometric tail {name} (ratio {x:.4})"));
        }
    }

    let unknown_below = matches!(below, Tail::Unknown);
    let unknown_above = matches!(above, Tail::Unknown);
    let partial = |skip: usize| -> f64 {
        let lo = if unknown_below { skip.min(terms.len()) } else { 0 };
        let hi = if unknown_above { terms.len().saturating_sub(skip) } else { terms.len() };
        terms[lo..hi.max(lo)].iter().fold(0.0, |acc, t| combine(acc, pow(t.value)))
    };
    let sum = |f: fn(&Term) -> f64| terms.iter().fold(0.0, |acc, t| combine(acc, pow(f(t))));
    let (mut v, mut lo, mut hi) = (sum(|t| t.value), sum(|t| t.lower), sum(|t| t.upper));
    let mut growth = None;
    if unknown_below || unknown_above {
        // widen by a fixed share of the window so slow (harmonic) growth
        // stays visible on long windows
        let step = (terms.len() / 8).max(10);
        let (p2, p1, p0) = (partial(2 * step), partial(step), partial(0));
        let g1 = if p2 > 0.0 { p1 / p2 } else if p1 > 0.0 { f64::INFINITY } else { 1.0 };
        let g2 = if p1 > 0.0 { p0 / p1 } else if p0 > 0.0 { f64::INFINITY } else { 1.0 };
        growth = Some(g2);
        if g1 > DIVERGENCE_FACTOR && g2 > DIVERGENCE_FACTOR {
            return NormValue::divergent(
                window,
                format!("partial aggregate keeps growing under widening: x{g1:.4} then x{g2:.4}"),
                growth,
            );
        }
        // remainder bound from the last two increments; the squared
        // denominator also covers slowly (polynomially) decaying increments
        let (d1, d2) = (p1 - p2, p0 - p1);
        let extra = if inf || d2 <= 0.0 {
            0.0
        } else if d1 > d2 {
            let rho = d2 / d1;
            d2 / ((1.0 - rho) * (1.0 - rho))
        } else {
            10.0 * d2
        };
        hi += extra;
        notes.push(format!("unknown tail: widening growth x{g1:.4} then x{g2:.4}, extrapolated remainder {extra:.3e}"));
    }
    v = combine(v, tail_sum[0]);
    lo = combine(lo, tail_sum[1]);
    hi = combine(hi, tail_sum[2]);
    NormValue {
        value: root(v),
        lower: root(lo),
        upper: root(hi),
        window,
        note: notes.join("; "),
        status: NormStatus::Finite,
        growth,
    }
}

fn weighted_tail(model: TailModel, weight_ratio: f64) -> Tail {
    match model {
        TailModel::Zero => Tail::Zero,
        TailModel::Geometric { ratio } => Tail::Geometric(ratio * weight_ratio),
        TailModel::Unknown => Tail::Unknown,
    }
}

fn weighted_terms(profile: &AnnularProfile, s: f64) -> Vec<Term> {
    (profile.window.0..=profile.window.1)
        .map(|j| {
            let w = (j as f64 * s).exp2();
            match profile.coeffs.get(&j) {
                Some(c) => Term { value: w * c.value, lower: w * c.lower, upper: w * c.upper },
                None => Term { value: 0.0, lower: 0.0, upper: 0.0 },
            }
        })
        .collect()
}

/// `‖f‖_{K̇^s_{q,r}} = (Σ_j [2^{js} ‖f χ_{A_j}‖_q]^r)^{1/r}` from a profile.
pub fn herz_norm(profile: &AnnularProfile, s: f64, r: ExtRat) -> Result<NormValue, NormError> {
    check_r(r)?;
    let terms = weighted_terms(profile, s);
    let below = weighted_tail(profile.tail_below, (-s).exp2());
    let above = weighted_tail(profile.tail_above, s.exp2());
    Ok(aggregate(profile.window.0, &terms, below, above, r))
}

/// Herz quasi-norm computed against balls: `(Σ_j [2^{js}‖f χ_{B(2^j)}‖_q]^r)^{1/r}`.
/// Only meaningful for `s < 0`.
/// Decomposes `f` over `window` and aggregates at `index`.
pub fn herz_norm_of<F: RadialField + ?Sized>(
    f: &F,
    index: &HerzIndex,
    n: u32,
    window: (i32, i32),
    quad: &QuadratureSpec,
) -> Result<NormValue, NormError> {
    let profile = annular_decompose(f, index.q, n, window, quad)?;
    herz_norm(&profile, ratio_to_f64(&index.s), index.r)
}

pub fn herz_norm_ball(profile: &AnnularProfile, s: f64, r: ExtRat) -> Result<NormValue, NormError> {
    check_r(r)?;
    if !(s < 0.0) {
        return Err(NormError::InvalidExponent(format!("ball characterisation needs s < 0, got {s}")));
    }
    let inf_q = profile.q.is_infinite();
    let qf = profile.q.to_f64();
    let (j0, j1) = profile.window;
    let mut note = Vec::new();
    // mass of f below the window, in units of the first coefficient
    let below_factor = match profile.tail_below {
        TailModel::Zero => 0.0,
        TailModel::Geometric { ratio } if inf_q => {
            if ratio > 1.0 {
                return Ok(NormValue::divergent(
                    NormWindow::Annuli(j0, j1),
                    "not locally bounded at the origin".into(),
                    Some(ratio),
                ));
            }
            ratio
        }
        TailModel::Geometric { ratio } => {
            let rq = ratio.powf(qf);
            if rq >= 1.0 {
                return Ok(NormValue::divergent(
                    NormWindow::Annuli(j0, j1),
                    "not locally L^q at the origin".into(),
                    Some(ratio),
                ));
            }
            rq / (1.0 - rq)
        }
        TailModel::Unknown => {
            note.push("unknown tail below the window ignored".to_string());
            0.0
        }
    };
    let mut acc = [0.0f64; 3];
    let first = profile.coeffs.get(&j0).map_or([0.0; 3], |c| [c.value, c.lower, c.upper]);
    for k in 0..3 {
        acc[k] = if inf_q { first[k] * below_factor } else { first[k].powf(qf) * below_factor };
    }
    let mut terms = Vec::with_capacity((j1 - j0 + 1) as usize);
    for j in j0..=j1 {
        let c = profile.coeffs.get(&j).map_or([0.0; 3], |c| [c.value, c.lower, c.upper]);
        let mut b = [0.0; 3];
        for k in 0..3 {
            if inf_q {
                acc[k] = acc[k].max(c[k]);
                b[k] = acc[k];
            } else {
                acc[k] += c[k].powf(qf);
                b[k] = acc[k].powf(1.0 / qf);
            }
        }
        let w = (j as f64 * s).exp2();
        terms.push(Term { value: w * b[0], lower: w * b[1], upper: w * b[2] });
    }
    let below = match profile.tail_below {
        TailModel::Zero => Tail::Zero,
        TailModel::Geometric { ratio } => Tail::Geometric(ratio * (-s).exp2()),
        TailModel::Unknown => Tail::Zero,
    };
    // above the window the ball coefficients stay at least at their last value
    let above = match profile.tail_above {
        TailModel::Zero => Tail::Geometric(s.exp2()),
        TailModel::Geometric { ratio } if ratio < 1.0 => {
            note.push("ball coefficients above the window taken constant".into());
            Tail::Geometric(s.exp2())
        }
        TailModel::Geometric { ratio } => Tail::Geometric(ratio * s.exp2()),
        TailModel::Unknown => Tail::Unknown,
    };
    let mut nv = aggregate(j0, &terms, below, above, r);
    if !note.is_empty() {
        nv.note = if nv.note.is_empty() { note.join("; ") } else { format!("{}; {}", nv.note, note.join("; ")) };
    }
    Ok(nv)
}

/// Ratio bound between the ball and annulus forms of the Herz quasi-norm
/// when `s < 0`.
pub fn ball_annulus_constant(s: f64, q: ExtRat, r: ExtRat) -> f64 {
    if q >= r {
        if r.is_infinite() {
            1.0
        } else {
            let rf = r.to_f64();
            (1.0 / (1.0 - (s * rf).exp2())).powf(1.0 / rf)
        }
    } else {
        let qf = q.to_f64();
        (1.0 / (1.0 - (s * qf).exp2())).powf(1.0 / qf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{annular_decompose, unit_ball_volume, RadialFunction};
    use crate::quadrature::QuadratureSpec;

    fn q(v: i128) -> ExtRat {
        ExtRat::integer(v)
    }

    #[test]
    fn annulus_indicator_single_term() {
        let p = annular_decompose(&RadialFunction::AnnulusIndicator(0), q(2), 3, (-60, 40), &QuadratureSpec::default())
            .unwrap();
        let expect = (unit_ball_volume(3) * 0.875).sqrt();
        for s in [-2.0, 0.0, 1.5] {
            let nv = herz_norm(&p, s, q(5)).unwrap();
            assert!((nv.value / expect - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn ball_indicator_closed_form() {
        let p = annular_decompose(&RadialFunction::BallIndicator(1.0), q(2), 3, (-60, 40), &QuadratureSpec::default())
            .unwrap();
        let c = (unit_ball_volume(3) * 0.875).sqrt();
        for (s, r) in [(0.0, 1.0), (-1.0, 2.0), (1.0, 3.0)] {
            let e = s + 1.5;
            let expect = (c.powf(r) / (1.0 - (-e * r).exp2())).powf(1.0 / r);
            let nv = herz_norm(&p, s, ExtRat::integer(r as i128)).unwrap();
            assert!((nv.value / expect - 1.0).abs() < 1e-12, "s={s} r={r} {} vs {expect}", nv.value);
            assert!(nv.lower <= nv.value && nv.value <= nv.upper);
        }
    }

    #[test]
    fn gaussian_membership_boundary() {
        let g = RadialFunction::gaussian(1.0, 1.0);
        let p = annular_decompose(&g, q(2), 3, (-60, 40), &QuadratureSpec::default()).unwrap();
        assert!(herz_norm(&p, 0.0, q(1)).unwrap().is_finite());
        assert!(herz_norm(&p, -1.5, q(1)).unwrap().is_divergent());
        assert!(herz_norm(&p, -1.5, ExtRat::Infinity).unwrap().is_finite());
        assert!(herz_norm(&p, -2.0, ExtRat::Infinity).unwrap().is_divergent());
    }

    #[test]
    fn rejects_nonpositive_r() {
        let p = AnnularProfile::from_values(q(2), 3, 0, &[1.0]);
        assert!(herz_norm(&p, 0.0, ExtRat::zero()).is_err());
        assert!(herz_norm_ball(&p, 0.0, q(1)).is_err());
    }

    #[test]
    fn ball_variant_dominates_annulus_variant() {
        let p = AnnularProfile::from_values(q(2), 3, 0, &[1.0]);
        let a = herz_norm(&p, -1.0, q(2)).unwrap().value;
        let b = herz_norm_ball(&p, -1.0, q(2)).unwrap().value;
        assert!(b >= a);
        assert!(b / a <= (4.0f64 / 3.0).sqrt() * (1.0 + 1e-12));
        let z = AnnularProfile::from_values(q(2), 3, 0, &[0.0, 0.0]);
        assert_eq!(herz_norm(&z, -1.0, q(2)).unwrap().value, 0.0);
        assert_eq!(herz_norm_ball(&z, -1.0, q(2)).unwrap().value, 0.0);
    }

    #[test]
    fn unknown_tail_widening() {
        // j^{-1/2} grows without bound, j^{-2} converges
        let slow: Vec<f64> = (1..=300).map(|j| (j as f64).powf(-0.5)).collect();
        let fast: Vec<f64> = (1..=300).map(|j| (j as f64).powf(-2.0)).collect();
        let mut p = AnnularProfile::from_values(q(2), 3, 1, &slow);
        p.tail_above = TailModel::Unknown;
        assert!(herz_norm(&p, 0.0, q(1)).unwrap().is_divergent());
        let mut p = AnnularProfile::from_values(q(2), 3, 1, &fast);
        p.tail_above = TailModel::Unknown;
        let nv = herz_norm(&p, 0.0, q(1)).unwrap();
        assert!(nv.is_finite());
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(nv.lower <= zeta2 && zeta2 <= nv.upper * (1.0 + 1e-6), "{nv:?}");
        // the harmonic boundary: divergent in l^1, convergent in l^2
        let harmonic: Vec<f64> = (1..=200).map(|j| 1.0 / j as f64).collect();
        let mut p = AnnularProfile::from_values(q(2), 3, 1, &harmonic);
        p.tail_above = TailModel::Unknown;
        assert!(herz_norm(&p, 0.0, q(1)).unwrap().is_divergent());
        assert!(herz_norm(&p, 0.0, q(2)).unwrap().is_finite());
    }
}
