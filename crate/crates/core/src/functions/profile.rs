use super::{annulus_bounds, sphere_area, unit_ball_volume, Decay, FunctionError, RadialField, RadialFunction};
use crate::exponents::{ExtRat, Rational};
use crate::quadrature::{clean_breaks, GaussLegendre, QuadratureSpec};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnularCoeff {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

impl AnnularCoeff {
    pub fn exact(v: f64) -> Self {
        Self { value: v, lower: v, upper: v }
    }
}

/// How the coefficients continue outside the computed window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TailModel {
    Zero,
    /// `coeff_{j±1} = ratio · coeff_j` moving away from the window.
    Geometric { ratio: f64 },
    Unknown,
}

/// The sequence `j ↦ ‖f χ_{A_j}‖_{L^q}` over a window of annuli.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnularProfile {
    pub q: ExtRat,
    pub n: u32,
    pub coeffs: BTreeMap<i32, AnnularCoeff>,
    pub window: (i32, i32),
    pub tail_below: TailModel,
    pub tail_above: TailModel,
}

impl AnnularProfile {
    /// Exact coefficients starting at annulus `j0`, zero outside.
    pub fn from_values(q: ExtRat, n: u32, j0: i32, values: &[f64]) -> Self {
        let coeffs: BTreeMap<i32, AnnularCoeff> =
            values.iter().enumerate().map(|(k, &v)| (j0 + k as i32, AnnularCoeff::exact(v))).collect();
        let window = (j0, j0 + values.len().max(1) as i32 - 1);
        Self { q, n, coeffs, window, tail_below: TailModel::Zero, tail_above: TailModel::Zero }
    }

    pub fn value(&self, j: i32) -> f64 {
        self.coeffs.get(&j).map_or(0.0, |c| c.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.coeffs.values().map(|c| c.value).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|c| c.upper == 0.0)
            && !matches!(self.tail_below, TailModel::Unknown)
            && !matches!(self.tail_above, TailModel::Unknown)
    }
}

fn tail_from(decay: Decay, q: ExtRat, n: u32, below: bool) -> TailModel {
    let nq = n as f64 / q.to_f64();
    match decay {
        Decay::Vanishing => TailModel::Zero,
        Decay::Unknown => TailModel::Unknown,
        Decay::Power(a) => {
            let e = a + nq;
            TailModel::Geometric { ratio: if below { (-e).exp2() } else { e.exp2() } }
        }
    }
}

const MAX_PANELS: usize = 512;

/// Composite Gauss–Legendre on `[a, b]` doubling the panel count until two
/// successive sums agree to `rtol`. Returns the finer sum and the difference.
fn gl_doubling(gl: &GaussLegendre, a: f64, b: f64, rtol: f64, h: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let composite = |k: usize| -> f64 {
        let w = (b - a) / k as f64;
        (0..k).map(|i| gl.integrate(a + i as f64 * w, a + (i + 1) as f64 * w, h)).sum()
    };
    let mut k = 1;
    let mut prev = composite(k);
    loop {
        k *= 2;
        let cur = composite(k);
        let diff = (cur - prev).abs();
        if diff <= rtol * cur.abs() || cur == 0.0 && prev == 0.0 || k >= MAX_PANELS {
            return (cur, diff);
        }
        prev = cur;
    }
}

fn annulus_coeff<F: RadialField + ?Sized>(f: &F, j: i32, q: ExtRat, n: u32, quad: &QuadratureSpec) -> AnnularCoeff {
    let (lo, hi) = annulus_bounds(j);
    let breaks = clean_breaks(f.breakpoints(lo, hi), lo, hi);
    let gl = GaussLegendre::new(quad.radial_points_per_annulus.max(4));
    if q.is_infinite() {
        let gl64 = GaussLegendre::new(64);
        let mut sup = 0.0f64;
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            sup = sup.max(f.eval(a).abs()).max(f.eval(b * (1.0 - 1e-13)).abs());
            for (u, _) in gl64.mapped(a.ln(), b.ln()) {
                sup = sup.max(f.eval(u.exp()).abs());
            }
        }
        return AnnularCoeff::exact(sup);
    }
    let qf = q.to_f64();
    // scale of |f| on the annulus, so that |f/M|^q neither under- nor overflows
    let mut m = 0.0f64;
    for w in breaks.windows(2) {
        m = m.max(f.eval(w[0]).abs());
        for (u, _) in gl.mapped(w[0].ln(), w[1].ln()) {
            m = m.max(f.eval(u.exp()).abs());
        }
    }
    if m == 0.0 || !m.is_finite() {
        // second look on a finer sample before declaring the annulus empty
        let gl64 = GaussLegendre::new(64);
        for w in breaks.windows(2) {
            for (u, _) in gl64.mapped(w[0].ln(), w[1].ln()) {
                m = m.max(f.eval(u.exp()).abs());
            }
        }
        if m == 0.0 {
            return AnnularCoeff::exact(0.0);
        }
    }
    let nf = n as f64;
    let h = |u: f64| {
        let rho = u.exp();
        (f.eval(rho).abs() / m).powf(qf) * (rho / hi).powf(nf)
    };
    let (mut total, mut err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (v, e) = gl_doubling(&gl, w[0].ln(), w[1].ln(), quad.rel_tol, &h);
        total += v;
        err += e;
    }
    let omega = sphere_area(n);
    let scale = m * (j as f64 * nf / qf).exp2();
    let to_coeff = |i: f64| scale * (omega * i.max(0.0)).powf(1.0 / qf);
    let value = to_coeff(total);
    let rounding = 4.0 * f64::EPSILON * value;
    AnnularCoeff {
        value,
        lower: (to_coeff(total - err) - rounding).max(0.0),
        upper: to_coeff(total + err) + rounding,
    }
}

/// Per-annulus `L^q` norms of `f` over `window`, with the tail model inferred
/// from the function's asymptotics. `0 < q < 1` gives the quasi-norms.
pub fn annular_decompose<F: RadialField + ?Sized>(
    f: &F,
    q: ExtRat,
    n: u32,
    window: (i32, i32),
    quad: &QuadratureSpec,
) -> Result<AnnularProfile, FunctionError> {
    if window.0 > window.1 {
        return Err(FunctionError::InvalidParameter(format!("empty window [{}, {}]", window.0, window.1)));
    }
    if q <= ExtRat::zero() {
        return Err(FunctionError::InvalidParameter(format!("q = {q} must be > 0")));
    }
    let coeffs: Vec<AnnularCoeff> =
        (window.0..=window.1).into_par_iter().map(|j| annulus_coeff(f, j, q, n, quad)).collect();
    let asym = f.asymptotics();
    Ok(AnnularProfile {
        q,
        n,
        coeffs: (window.0..=window.1).zip(coeffs).collect(),
        window,
        tail_below: tail_from(asym.origin, q, n, true),
        tail_above: tail_from(asym.infinity, q, n, false),
    })
}

/// The `S` operator: `j ↦ f χ_{A_j}` over the window.
pub fn decompose_functions(f: &RadialFunction, window: (i32, i32)) -> BTreeMap<i32, RadialFunction> {
    (window.0..=window.1).map(|j| (j, f.clone().restricted(j))).collect()
}

/// The `R` operator: `Σ_j f_j χ_{A_j}`.
pub fn reconstruct(parts: &BTreeMap<i32, RadialFunction>) -> RadialFunction {
    let mut terms: Vec<RadialFunction> = parts
        .iter()
        .filter(|(_, f)| !matches!(f, RadialFunction::Zero))
        .map(|(&j, f)| match f {
            RadialFunction::Constant(c) => RadialFunction::AnnulusIndicator(j).scaled(*c),
            RadialFunction::AnnularRestriction { base, j: k } if *k == j => (**base).clone().restricted(j),
            other => other.clone().restricted(j),
        })
        .collect();
    match terms.len() {
        0 => RadialFunction::Zero,
        1 => terms.pop().unwrap(),
        _ => RadialFunction::Sum(terms),
    }
}

/// `E_β`: the union over `k ≥ 1` of balls of radius `k^{−β/n}` centred at
/// `(2^{k−1}+1) e₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BumpChain {
    #[serde(serialize_with = "crate::exponents::ser_rational")]
    pub beta: Rational,
}

impl BumpChain {
    pub fn new(beta: Rational) -> Result<Self, FunctionError> {
        if beta < Rational::from_integer(0) {
            return Err(FunctionError::InvalidParameter("beta must be >= 0".into()));
        }
        Ok(Self { beta })
    }

    fn beta_f64(&self) -> f64 {
        crate::exponents::ratio_to_f64(&self.beta)
    }

    pub fn ball_radius(&self, k: u32, n: u32) -> f64 {
        (k as f64).powf(-self.beta_f64() / n as f64)
    }

    pub fn ball_center(&self, k: u32) -> f64 {
        2f64.powi(k as i32 - 1) + 1.0
    }

    pub fn ball_measure(&self, k: u32, n: u32) -> f64 {
        unit_ball_volume(n) * (k as f64).powf(-self.beta_f64())
    }
}

/// Two-sided bounds on `‖|x|^{−s} χ_{E_β} χ_{A_j}‖_{L^q}` for `1 ≤ j ≤ j_max`.
///
/// For `j ≥ 2` the `j`-th ball lies in the closure of `A_j`; the first ball
/// straddles `A_1` and `A_2` and is bracketed rather than split.
pub fn bump_chain_profile(
    e: &BumpChain,
    weight_s: f64,
    q: ExtRat,
    n: u32,
    j_max: i32,
) -> Result<AnnularProfile, FunctionError> {
    if j_max < 3 {
        return Err(FunctionError::InvalidParameter("j_max must be >= 3".into()));
    }
    if q < ExtRat::one() {
        return Err(FunctionError::InvalidParameter(format!("q = {q} must be >= 1")));
    }
    let w = |r: f64| r.powf(-weight_s);
    let wrange = |a: f64, b: f64| (w(a).min(w(b)), w(a).max(w(b)));
    let inf = q.is_infinite();
    let qf = if inf { f64::INFINITY } else { q.to_f64() };
    let mass_pow = |m: f64| if inf { 1.0 } else { m.powf(1.0 / qf) };
    let ball = |k: u32| {
        let (c, rho) = (e.ball_center(k), e.ball_radius(k, n));
        (c - rho, c + rho, e.ball_measure(k, n))
    };
    let mut coeffs = BTreeMap::new();
    for j in 1..=j_max {
        let k = j as u32;
        let c = match k {
            1 => {
                let (lo, hi, m) = ball(1);
                if inf {
                    AnnularCoeff::exact(wrange(lo, 2.0).1)
                } else {
                    let upper = mass_pow(m) * wrange(lo, hi).1;
                    AnnularCoeff { value: 0.5 * upper, lower: 0.0, upper }
                }
            }
            2 => {
                let (lo1, hi1, m1) = ball(1);
                let (lo2, hi2, m2) = ball(2);
                if inf {
                    AnnularCoeff::exact(wrange(2.0, hi1.max(hi2)).1)
                } else {
                    let lower = mass_pow(m2) * wrange(lo2, hi2).0;
                    let upper = mass_pow(m1 + m2) * wrange(lo1.min(lo2), hi1.max(hi2)).1;
                    AnnularCoeff { value: 0.5 * (lower + upper), lower, upper }
                }
            }
            _ => {
                let (lo, hi, m) = ball(k);
                let (wmin, wmax) = wrange(lo, hi);
                if inf {
                    AnnularCoeff::exact(wmax)
                } else {
                    let (lower, upper) = (mass_pow(m) * wmin, mass_pow(m) * wmax);
                    AnnularCoeff { value: 0.5 * (lower + upper), lower, upper }
                }
            }
        };
        coeffs.insert(j, c);
    }
    Ok(AnnularProfile { q, n, coeffs, window: (1, j_max), tail_below: TailModel::Zero, tail_above: TailModel::Unknown })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::int;

    fn q(v: i128) -> ExtRat {
        ExtRat::integer(v)
    }

    #[test]
    fn ball_indicator_profile_matches_annulus_volumes() {
        let p = annular_decompose(&RadialFunction::BallIndicator(1.0), q(2), 3, (-40, 2), &QuadratureSpec::default())
            .unwrap();
        let v3 = unit_ball_volume(3);
        for j in -40..=2 {
            let expect =
                if j <= 0 { (v3 * 2f64.powi(3 * j) * (1.0 - 0.125)).sqrt() } else { 0.0 };
            let got = p.value(j);
            assert!((got - expect).abs() <= 1e-13 * expect.max(1e-300), "j={j} got={got} expect={expect}");
            let c = p.coeffs[&j];
            assert!(c.lower <= c.value && c.value <= c.upper);
        }
        assert_eq!(p.tail_below, TailModel::Geometric { ratio: 2f64.powf(-1.5) });
        assert_eq!(p.tail_above, TailModel::Zero);
    }

    #[test]
    fn gaussian_sup_profile() {
        let p = annular_decompose(&RadialFunction::gaussian(1.0, 1.0), ExtRat::Infinity, 3, (-10, 5), &QuadratureSpec::default())
            .unwrap();
        for j in -10..=5 {
            let expect = (-(4f64.powi(j - 1))).exp();
            assert!((p.value(j) - expect).abs() <= 1e-12 * expect.max(1e-300));
        }
    }

    #[test]
    fn dilation_shifts_profile() {
        let f = RadialFunction::gaussian(1.0, 1.0).plus(&RadialFunction::truncated_power(0.7, 3.0));
        let quad = QuadratureSpec::default();
        let base = annular_decompose(&f, q(3), 3, (-20, 6), &quad).unwrap();
        let dil = annular_decompose(&f.clone().dilated(2.0), q(3), 3, (-21, 5), &quad).unwrap();
        for j in -21..=5 {
            let expect = 2f64.powf(-1.0) * base.value(j + 1);
            assert!((dil.value(j) - expect).abs() <= 1e-10 * expect, "j={j}");
        }
    }

    #[test]
    fn restriction_and_reconstruction() {
        let f = RadialFunction::BallIndicator(1.0);
        let parts = decompose_functions(&f, (-20, 1));
        let g = reconstruct(&parts);
        for k in 0..400 {
            let r = 2f64.powf(-20.0 + 21.0 * k as f64 / 399.0);
            assert_eq!(f.eval(r), g.eval(r), "r={r}");
        }
        let single: BTreeMap<_, _> = [(0, RadialFunction::Constant(1.0))].into();
        assert_eq!(reconstruct(&single), RadialFunction::AnnulusIndicator(0));
        assert_eq!(reconstruct(&BTreeMap::new()), RadialFunction::Zero);
    }

    #[test]
    fn bump_chain_brackets() {
        let e = BumpChain::new(int(0)).unwrap();
        let p = bump_chain_profile(&e, 0.0, q(2), 3, 40).unwrap();
        let c = unit_ball_volume(3).sqrt();
        for j in 3..=40 {
            let k = p.coeffs[&j];
            assert!((k.lower - c).abs() < 1e-12 && (k.upper - c).abs() < 1e-12);
        }
        let e = BumpChain::new(int(2)).unwrap();
        let p = bump_chain_profile(&e, 0.0, q(2), 3, 40).unwrap();
        for j in 3..=40 {
            assert!((p.value(j) * j as f64 - c).abs() < 1e-12);
        }
        let p1 = p.coeffs[&1];
        assert!(p1.lower == 0.0 && p1.upper > 0.0);
        assert!(bump_chain_profile(&e, 0.0, q(2), 3, 2).is_err());
    }

    #[test]
    fn monotone_under_domination() {
        let quad = QuadratureSpec::default();
        let f = RadialFunction::gaussian(1.0, 0.5);
        let g = RadialFunction::gaussian(1.2, 1.0);
        let pf = annular_decompose(&f, q(2), 3, (-10, 4), &quad).unwrap();
        let pg = annular_decompose(&g, q(2), 3, (-10, 4), &quad).unwrap();
        for j in -10..=4 {
            assert!(pf.value(j) <= pg.value(j) * (1.0 + 1e-12));
        }
    }
}
