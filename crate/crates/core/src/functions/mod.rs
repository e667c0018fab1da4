//! Radial test functions on `ℝⁿ` and their dyadic annular decomposition.

mod profile;
mod sampled;

pub use profile::{
    annular_decompose, bump_chain_profile, decompose_functions, reconstruct, AnnularCoeff, AnnularProfile,
    BumpChain, TailModel,
};
pub use sampled::{read_sampled, write_sampled, Interpolation, Sampled};

use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionError {
    #[error("function is singular at the origin")]
    Singular,
    #[error("radius {0} outside the domain (0, inf)")]
    OutOfDomain(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid sampled grid: {0}")]
    InvalidSampled(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Leading-order behaviour `|f(r)| ≍ r^a` near the origin or at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// Identically zero near the end (compact support, or faster than any power).
    Vanishing,
    Power(f64),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Asymptotics {
    pub origin: Decay,
    pub infinity: Decay,
}

/// Anything that can be evaluated as a radial function: analytic variants
/// and lazily evolved fields alike.
pub trait RadialField: Sync {
    /// Value at radius `r > 0`.
    fn eval(&self, r: f64) -> f64;
    /// Points in `(lo, hi)` where the function is not smooth or changes
    /// scale abruptly.
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64>;
    fn asymptotics(&self) -> Asymptotics;
    /// Radius beyond which the function vanishes, if any.
    fn support_radius(&self) -> Option<f64>;

    fn singular_at_origin(&self) -> bool {
        match self.asymptotics().origin {
            Decay::Power(a) => a < 0.0,
            Decay::Unknown => true,
            Decay::Vanishing => false,
        }
    }
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: u32) -> f64 {
    // π^{n/2} / Γ(n/2 + 1), with Γ at integers and half-integers by recursion
    let half = n as f64 / 2.0;
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { std::f64::consts::PI.sqrt() / 2.0 };
    let mut x = if n.is_multiple_of(2) { 1.0 } else { 1.5 };
    while x < half + 1.0 - 1e-9 {
        gamma *= x;
        x += 1.0;
    }
    std::f64::consts::PI.powf(half) / gamma
}

/// Surface area of the unit sphere `S^{n−1}`.
pub fn sphere_area(n: u32) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C^∞` in between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Annulus window wide enough that every shipped analytic variant's tail
/// beyond it is below double precision.
pub const DEFAULT_WINDOW: (i32, i32) = (-60, 40);

pub(crate) fn annulus_bounds(j: i32) -> (f64, f64) {
    (2f64.powi(j - 1), 2f64.powi(j))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    Zero,
    Constant(f64),
    /// `amplitude · e^{−(r/width)²}`.
    Gaussian { width: f64, amplitude: f64 },
    /// `r^{−decay} (log 1/r)^{−log_exp}` on `r < cutoff`, zero elsewhere.
    PowerLogCutoff { decay: f64, log_exp: f64, cutoff: f64 },
    AnnulusIndicator(i32),
    /// Indicator of the open ball `r < R`.
    BallIndicator(f64),
    /// `1` on `r ≤ radius − width`, `0` on `r ≥ radius`, smooth in between.
    SmoothBall { radius: f64, width: f64 },
    /// `r^gamma · base(r)`.
    PowerWeightProduct { base: Arc<RadialFunction>, gamma: f64 },
    /// `|base|^{alpha−1} base`.
    SignedPower { base: Arc<RadialFunction>, alpha: f64 },
    /// `base(lambda · r)`.
    Dilated { base: Arc<RadialFunction>, lambda: f64 },
    Scaled { base: Arc<RadialFunction>, factor: f64 },
    /// `base · χ_{A_j}`.
    AnnularRestriction { base: Arc<RadialFunction>, j: i32 },
    Sum(Vec<RadialFunction>),
    Product(Vec<RadialFunction>),
    Sampled(Arc<Sampled>),
}

impl RadialFunction {
    pub fn gaussian(width: f64, amplitude: f64) -> Self {
        Self::Gaussian { width, amplitude }
    }

    /// `|x|^{−exponent}` truncated to the ball `r < radius`.
    pub fn truncated_power(exponent: f64, radius: f64) -> Self {
        Self::BallIndicator(radius).with_power_weight(-exponent)
    }

    /// Default support radius of the extremal power-log functions.
    pub const POWER_LOG_CUTOFF: f64 = 1.0 / 1024.0;

    pub fn power_log(decay: f64, log_exp: f64) -> Self {
        Self::PowerLogCutoff { decay, log_exp, cutoff: Self::POWER_LOG_CUTOFF }
    }

    /// Smoothed indicator of `A_1 = {1 ≤ r < 2}` with transition width `w`.
    pub fn smooth_annulus(width: f64) -> Self {
        Self::SmoothBall { radius: 2.0, width }.minus(&Self::SmoothBall { radius: 1.0, width })
    }

    pub fn with_power_weight(self, gamma: f64) -> Self {
        if gamma == 0.0 {
            return self;
        }
        Self::PowerWeightProduct { base: Arc::new(self), gamma }
    }

    pub fn scaled(self, factor: f64) -> Self {
        if factor == 1.0 {
            return self;
        }
        Self::Scaled { base: Arc::new(self), factor }
    }

    pub fn dilated(self, lambda: f64) -> Self {
        Self::Dilated { base: Arc::new(self), lambda }
    }

    pub fn restricted(self, j: i32) -> Self {
        Self::AnnularRestriction { base: Arc::new(self), j }
    }

    pub fn signed_power(self, alpha: f64) -> Self {
        Self::SignedPower { base: Arc::new(self), alpha }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::Sum(vec![self.clone(), other.clone()])
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::Sum(vec![self.clone(), other.clone().scaled(-1.0)])
    }

    pub fn validate(&self) -> Result<(), FunctionError> {
        let bad = |m: &str| Err(FunctionError::InvalidParameter(m.into()));
        match self {
            Self::Gaussian { width, .. } if !(*width > 0.0) => bad("gaussian width must be > 0"),
            Self::PowerLogCutoff { decay, log_exp, cutoff } => {
                if !(*decay >= 0.0 && *log_exp >= 0.0) {
                    bad("power-log exponents must be >= 0")
                } else if !(*cutoff > 0.0 && *cutoff < 1.0) {
                    bad("power-log cutoff must lie in (0, 1)")
                } else {
                    Ok(())
                }
            }
            Self::BallIndicator(r) if !(*r > 0.0) => bad("ball radius must be > 0"),
            Self::SmoothBall { radius, width } if !(*width > 0.0 && *width <= *radius) => {
                bad("smooth ball needs 0 < width <= radius")
            }
            Self::Dilated { lambda, .. } if !(*lambda > 0.0) => bad("dilation factor must be > 0"),
            Self::SignedPower { alpha, .. } if !(*alpha > 0.0) => bad("power must be > 0"),
            Self::PowerWeightProduct { base, .. }
            | Self::SignedPower { base, .. }
            | Self::Dilated { base, .. }
            | Self::Scaled { base, .. }
            | Self::AnnularRestriction { base, .. } => base.validate(),
            Self::Sum(v) | Self::Product(v) => v.iter().try_for_each(|f| f.validate()),
            _ => Ok(()),
        }
    }

    /// Pointwise value; `r = 0` is rejected for variants singular there.
    pub fn evaluate(&self, r: f64) -> Result<f64, FunctionError> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(FunctionError::OutOfDomain(r));
        }
        if r == 0.0 {
            if self.singular_at_origin() {
                return Err(FunctionError::Singular);
            }
            return Ok(self.eval(f64::MIN_POSITIVE));
        }
        Ok(self.eval(r))
    }

    /// Whether the function is nonincreasing on `[lo, hi]`, checked on a
    /// geometric sample.
    pub fn is_nonincreasing_on(&self, lo: f64, hi: f64, samples: usize) -> bool {
        let mut prev = f64::INFINITY;
        for i in 0..samples {
            let r = lo * (hi / lo).powf(i as f64 / (samples - 1) as f64);
            let v = self.eval(r).abs();
            if v > prev * (1.0 + 1e-12) + 1e-300 {
                return false;
            }
            prev = v;
        }
        // every breakpoint must also be approached monotonically
        for b in self.breakpoints(lo, hi) {
            let (a, c) = (self.eval(b * (1.0 - 1e-9)).abs(), self.eval(b * (1.0 + 1e-9)).abs());
            if c > a * (1.0 + 1e-9) + 1e-300 {
                return false;
            }
        }
        true
    }
}

fn merge_origin(a: Decay, b: Decay) -> Decay {
    match (a, b) {
        (Decay::Unknown, _) | (_, Decay::Unknown) => Decay::Unknown,
        (Decay::Vanishing, x) | (x, Decay::Vanishing) => x,
        (Decay::Power(x), Decay::Power(y)) => Decay::Power(x.min(y)),
    }
}

fn merge_infinity(a: Decay, b: Decay) -> Decay {
    match (a, b) {
        (Decay::Unknown, _) | (_, Decay::Unknown) => Decay::Unknown,
        (Decay::Vanishing, x) | (x, Decay::Vanishing) => x,
        (Decay::Power(x), Decay::Power(y)) => Decay::Power(x.max(y)),
    }
}

fn product_decay(a: Decay, b: Decay) -> Decay {
    match (a, b) {
        (Decay::Vanishing, _) | (_, Decay::Vanishing) => Decay::Vanishing,
        (Decay::Unknown, _) | (_, Decay::Unknown) => Decay::Unknown,
        (Decay::Power(x), Decay::Power(y)) => Decay::Power(x + y),
    }
}

fn map_power(d: Decay, f: impl Fn(f64) -> f64) -> Decay {
    match d {
        Decay::Power(a) => Decay::Power(f(a)),
        other => other,
    }
}

impl RadialField for RadialFunction {
    fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Gaussian { width, amplitude } => {
                let x = r / width;
                amplitude * (-x * x).exp()
            }
            Self::PowerLogCutoff { decay, log_exp, cutoff } => {
                if r >= *cutoff {
                    0.0
                } else {
                    r.powf(-decay) * (-r.ln()).powf(-log_exp)
                }
            }
            Self::AnnulusIndicator(j) => {
                let (a, b) = annulus_bounds(*j);
                if r >= a && r < b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::BallIndicator(radius) => {
                if r < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Self::SmoothBall { radius, width } => smooth_step((radius - r) / width),
            Self::PowerWeightProduct { base, gamma } => {
                let v = base.eval(r);
                if v == 0.0 {
                    0.0
                } else {
                    r.powf(*gamma) * v
                }
            }
            Self::SignedPower { base, alpha } => {
                let v = base.eval(r);
                if v == 0.0 {
                    0.0
                } else {
                    v.signum() * v.abs().powf(*alpha)
                }
            }
            Self::Dilated { base, lambda } => base.eval(lambda * r),
            Self::Scaled { base, factor } => factor * base.eval(r),
            Self::AnnularRestriction { base, j } => {
                let (a, b) = annulus_bounds(*j);
                if r >= a && r < b {
                    base.eval(r)
                } else {
                    0.0
                }
            }
            Self::Sum(v) => v.iter().map(|f| f.eval(r)).sum(),
            Self::Product(v) => v.iter().map(|f| f.eval(r)).product(),
            Self::Sampled(s) => s.eval(r),
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let inside = |x: f64| x > lo && x < hi;
        let mut out = Vec::new();
        match self {
            Self::Zero | Self::Constant(_) | Self::Gaussian { .. } => {}
            Self::PowerLogCutoff { cutoff, .. } => out.push(*cutoff),
            Self::AnnulusIndicator(j) => {
                let (a, b) = annulus_bounds(*j);
                out.extend([a, b]);
            }
            Self::BallIndicator(r) => out.push(*r),
            Self::SmoothBall { radius, width } => out.extend([radius - width, radius - 0.5 * width, *radius]),
            Self::PowerWeightProduct { base, .. }
            | Self::SignedPower { base, .. }
            | Self::Scaled { base, .. } => out = base.breakpoints(lo, hi),
            Self::Dilated { base, lambda } => {
                out = base.breakpoints(lo * lambda, hi * lambda).into_iter().map(|x| x / lambda).collect()
            }
            Self::AnnularRestriction { base, j } => {
                let (a, b) = annulus_bounds(*j);
                out = base.breakpoints(lo.max(a), hi.min(b));
                out.extend([a, b]);
            }
            Self::Sum(v) | Self::Product(v) => {
                for f in v {
                    out.extend(f.breakpoints(lo, hi));
                }
            }
            Self::Sampled(s) => out.extend(s.radii.iter().copied()),
        }
        out.retain(|&x| inside(x));
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn asymptotics(&self) -> Asymptotics {
        use Decay::*;
        let both = |o, i| Asymptotics { origin: o, infinity: i };
        match self {
            Self::Zero => both(Vanishing, Vanishing),
            Self::Constant(c) if *c == 0.0 => both(Vanishing, Vanishing),
            Self::Constant(_) => both(Power(0.0), Power(0.0)),
            Self::Gaussian { amplitude, .. } if *amplitude == 0.0 => both(Vanishing, Vanishing),
            Self::Gaussian { .. } => both(Power(0.0), Vanishing),
            Self::PowerLogCutoff { decay, log_exp, .. } => {
                if *log_exp == 0.0 {
                    both(Power(-decay), Vanishing)
                } else {
                    both(Unknown, Vanishing)
                }
            }
            Self::AnnulusIndicator(_) | Self::AnnularRestriction { .. } => both(Vanishing, Vanishing),
            Self::BallIndicator(_) | Self::SmoothBall { .. } => both(Power(0.0), Vanishing),
            Self::PowerWeightProduct { base, gamma } => {
                let a = base.asymptotics();
                both(map_power(a.origin, |x| x + gamma), map_power(a.infinity, |x| x + gamma))
            }
            Self::SignedPower { base, alpha } => {
                let a = base.asymptotics();
                both(map_power(a.origin, |x| x * alpha), map_power(a.infinity, |x| x * alpha))
            }
            Self::Dilated { base, .. } => base.asymptotics(),
            Self::Scaled { factor, .. } if *factor == 0.0 => both(Vanishing, Vanishing),
            Self::Scaled { base, .. } => base.asymptotics(),
            Self::Sum(v) => v.iter().fold(both(Vanishing, Vanishing), |acc, f| {
                let a = f.asymptotics();
                both(merge_origin(acc.origin, a.origin), merge_infinity(acc.infinity, a.infinity))
            }),
            Self::Product(v) => v.iter().fold(both(Power(0.0), Power(0.0)), |acc, f| {
                let a = f.asymptotics();
                both(product_decay(acc.origin, a.origin), product_decay(acc.infinity, a.infinity))
            }),
            Self::Sampled(s) => {
                let origin = if s.values[0] == 0.0 { Vanishing } else { Power(0.0) };
                both(origin, Vanishing)
            }
        }
    }

    fn support_radius(&self) -> Option<f64> {
        match self {
            Self::Zero => Some(0.0),
            Self::Constant(c) => (*c == 0.0).then_some(0.0),
            Self::Gaussian { .. } => None,
            Self::PowerLogCutoff { cutoff, .. } => Some(*cutoff),
            Self::AnnulusIndicator(j) | Self::AnnularRestriction { j, .. } => Some(annulus_bounds(*j).1),
            Self::BallIndicator(r) => Some(*r),
            Self::SmoothBall { radius, .. } => Some(*radius),
            Self::PowerWeightProduct { base, .. } | Self::SignedPower { base, .. } | Self::Scaled { base, .. } => {
                base.support_radius()
            }
            Self::Dilated { base, lambda } => base.support_radius().map(|r| r / lambda),
            Self::Sum(v) => v.iter().try_fold(0.0f64, |m, f| f.support_radius().map(|r| m.max(r))),
            Self::Product(v) => v.iter().filter_map(|f| f.support_radius()).reduce(f64::min),
            Self::Sampled(s) => Some(*s.radii.last().unwrap()),
        }
    }
}

/// Radius beyond which `|f|` is below double-precision underflow, or the
/// exact support radius when there is one.
pub fn effective_radius(f: &RadialFunction) -> Option<f64> {
    if let Some(r) = f.support_radius() {
        return Some(r);
    }
    match f {
        RadialFunction::Gaussian { width, .. } => Some(width * 27.5),
        RadialFunction::PowerWeightProduct { base, .. }
        | RadialFunction::SignedPower { base, .. }
        | RadialFunction::Scaled { base, .. } => effective_radius(base),
        RadialFunction::Dilated { base, lambda } => effective_radius(base).map(|r| r / lambda),
        RadialFunction::Sum(v) => v.iter().try_fold(0.0f64, |m, f| effective_radius(f).map(|r| m.max(r))),
        RadialFunction::Product(v) => v.iter().filter_map(effective_radius).reduce(f64::min),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - pi).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - pi * pi / 2.0).abs() < 1e-14);
        assert!((unit_ball_volume(5) - 8.0 * pi * pi / 15.0).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * pi).abs() < 1e-14);
    }

    #[test]
    fn evaluate_examples() {
        let g = RadialFunction::gaussian(1.0, 1.0);
        assert!((g.evaluate(0.5).unwrap() - (-0.25f64).exp()).abs() < 1e-16);
        assert_eq!(RadialFunction::AnnulusIndicator(0).evaluate(0.75).unwrap(), 1.0);
        assert_eq!(RadialFunction::AnnulusIndicator(0).evaluate(1.0).unwrap(), 0.0);
        assert_eq!(RadialFunction::AnnulusIndicator(0).evaluate(0.5).unwrap(), 1.0);
        let pl = RadialFunction::power_log(1.0, 1.0);
        assert_eq!(pl.evaluate(2f64.powi(-9)).unwrap(), 0.0);
        assert_eq!(pl.evaluate(0.0), Err(FunctionError::Singular));
        assert_eq!(RadialFunction::truncated_power(1.5, 1.0).evaluate(0.0), Err(FunctionError::Singular));
        assert_eq!(g.evaluate(0.0).unwrap(), 1.0);
        assert!(matches!(g.evaluate(-1.0), Err(FunctionError::OutOfDomain(_))));
    }

    #[test]
    fn signed_power_is_odd() {
        let u = RadialFunction::BallIndicator(1.0).scaled(-1.0);
        let n = u.clone().signed_power(3.0);
        assert_eq!(n.eval(0.5), -1.0);
        assert_eq!(n.eval(1.5), 0.0);
        let w = RadialFunction::gaussian(1.0, -2.0).signed_power(2.0);
        assert!((w.eval(0.0001) + 4.0).abs() < 1e-6);
    }

    #[test]
    fn smooth_ball_shape() {
        let f = RadialFunction::SmoothBall { radius: 1.0, width: 0.2 };
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert!((f.eval(0.9) - 0.5).abs() < 1e-15);
        assert!(f.is_nonincreasing_on(0.01, 2.0, 400));
        assert!(!RadialFunction::AnnulusIndicator(0).is_nonincreasing_on(0.1, 2.0, 100));
    }

    #[test]
    fn asymptotics_compose() {
        let f = RadialFunction::truncated_power(1.5, 4096.0);
        assert_eq!(f.asymptotics().origin, Decay::Power(-1.5));
        assert_eq!(f.asymptotics().infinity, Decay::Vanishing);
        let g = RadialFunction::gaussian(1.0, 1.0).plus(&f);
        assert_eq!(g.asymptotics().origin, Decay::Power(-1.5));
        assert!(RadialFunction::power_log(1.0, 1.0).singular_at_origin());
        assert_eq!(g.support_radius(), None);
        assert_eq!(effective_radius(&g), Some(4096.0));
    }

    #[test]
    fn validation() {
        assert!(RadialFunction::gaussian(0.0, 1.0).validate().is_err());
        assert!(RadialFunction::PowerLogCutoff { decay: 1.0, log_exp: 1.0, cutoff: 2.0 }.validate().is_err());
        assert!(RadialFunction::smooth_annulus(0.1).validate().is_ok());
    }
}
