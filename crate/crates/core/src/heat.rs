//! The heat semigroup on radial functions, the Hardy–Hénon nonlinearity and
//! the Duhamel time integral.

use crate::exponents::ExtRat;
use crate::functions::{
    effective_radius, sphere_area, Asymptotics, Decay, FunctionError, Interpolation, RadialField, RadialFunction,
    Sampled,
};
use crate::quadrature::{integrate_adaptive, GaussLegendre, QuadResult, QuadratureSpec};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeatError {
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("invalid quadrature: {0}")]
    Quadrature(String),
    #[error("space-time function: {0}")]
    SpaceTime(String),
    #[error("singular exponent {0} must lie in (0, 1]")]
    SingularExponent(f64),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

/// `e^{−z} ∫_{S^{n−1}} e^{z ω₁} dω`: the spherical average of the kernel with
/// the exponential growth divided out, bounded on `z ≥ 0`.
pub fn spherical_factor(z: f64, n: u32, angular_points: usize) -> f64 {
    match n {
        1 => 1.0 + (-2.0 * z).exp(),
        3 => {
            if z < 1e-6 {
                4.0 * PI * (1.0 - z + 2.0 * z * z / 3.0)
            } else {
                2.0 * PI * -(-2.0 * z).exp_m1() / z
            }
        }
        _ => spherical_factor_quadrature(z, n, angular_points),
    }
}

/// General-`n` form `|S^{n−2}| ∫₀^π e^{−z(1−cos θ)} sin^{n−2}θ dθ`, truncated
/// where the exponential drops below `e^{−46}`.
pub fn spherical_factor_quadrature(z: f64, n: u32, angular_points: usize) -> f64 {
    assert!(n >= 2, "angular quadrature needs n >= 2");
    let upper = if z > 23.0 { (1.0 - 46.0 / z).acos() } else { PI };
    let gl = GaussLegendre::new(angular_points);
    let panels = 4;
    let h = upper / panels as f64;
    let integrand = |th: f64| {
        let half = (0.5 * th).sin();
        (-2.0 * z * half * half).exp() * th.sin().powi(n as i32 - 2)
    };
    let total: f64 = (0..panels).map(|k| gl.integrate(k as f64 * h, (k + 1) as f64 * h, integrand)).sum();
    sphere_area(n - 1) * total
}

/// `K_n(t, r, ρ)` such that `(e^{tΔ}f)(r) = ∫₀^∞ K_n(t, r, ρ) f(ρ) ρ^{n−1} dρ`.
pub fn heat_kernel(t: f64, r: f64, rho: f64, n: u32, angular_points: usize) -> f64 {
    let d = r - rho;
    (4.0 * PI * t).powf(-0.5 * n as f64)
        * (-d * d / (4.0 * t)).exp()
        * spherical_factor(r * rho / (2.0 * t), n, angular_points)
}

const MAX_BREAKS: usize = 64;

/// `(e^{tΔ}f)(r)` by adaptive quadrature over `|ρ − r| ≤ √(2800 t)`, where the
/// kernel has fallen below `e^{−700}` of its peak.
pub fn heat_value<F: RadialField + ?Sized>(f: &F, t: f64, r: f64, n: u32, quad: &QuadratureSpec) -> QuadResult {
    let reach = (2800.0 * t).sqrt();
    let lo = (r - reach).max(0.0);
    let mut hi = r + reach;
    if let Some(supp) = f.support_radius() {
        hi = hi.min(supp);
    }
    if !(hi > lo) {
        return QuadResult { value: 0.0, error: 0.0, converged: true };
    }
    let mut breaks = f.breakpoints(lo, hi);
    if breaks.len() > MAX_BREAKS {
        let step = breaks.len().div_ceil(MAX_BREAKS);
        breaks = breaks.into_iter().step_by(step).collect();
    }
    let width = (4.0 * t).sqrt();
    breaks.extend([r - 3.0 * width, r, r + 3.0 * width]);
    if lo == 0.0 && f.singular_at_origin() {
        breaks.extend((1..60).map(|k| (-(k as f64)).exp2() * hi.min(1.0)));
    }
    breaks.retain(|&x| x > lo && x < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let nm1 = n as i32 - 1;
    let m = quad.angular_points;
    let integrand = |rho: f64| {
        let v = f.eval(rho);
        if v == 0.0 {
            0.0
        } else {
            heat_kernel(t, r, rho, n, m) * v * rho.powi(nm1)
        }
    };
    integrate_adaptive(integrand, &breaks, 0.0, quad.rel_tol.max(1e-14), 4000)
}

/// `e^{tΔ}f` evaluated on demand, one quadrature per point.
pub struct HeatEvolved<'a, F: RadialField + ?Sized> {
    pub f: &'a F,
    pub t: f64,
    pub n: u32,
    pub quad: QuadratureSpec,
}

impl<'a, F: RadialField + ?Sized> HeatEvolved<'a, F> {
    pub fn new(f: &'a F, t: f64, n: u32, quad: QuadratureSpec) -> Result<Self, HeatError> {
        if !(t > 0.0) {
            return Err(HeatError::NonPositiveTime(t));
        }
        Ok(Self { f, t, n, quad })
    }
}

impl<F: RadialField + ?Sized> RadialField for HeatEvolved<'_, F> {
    fn eval(&self, r: f64) -> f64 {
        heat_value(self.f, self.t, r, self.n, &self.quad).value
    }

    fn breakpoints(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    fn asymptotics(&self) -> Asymptotics {
        let a = self.f.asymptotics();
        let origin = if a.origin == Decay::Vanishing && a.infinity == Decay::Vanishing && self.f.support_radius() == Some(0.0) {
            Decay::Vanishing
        } else {
            Decay::Power(0.0)
        };
        let infinity = a.infinity;
        Asymptotics { origin, infinity }
    }

    fn support_radius(&self) -> Option<f64> {
        (self.f.support_radius() == Some(0.0)).then_some(0.0)
    }
}

/// Log-uniform radii `2^{k/m}` for `k ∈ [m j_lo, m j_hi]`.
pub fn log_grid(j_lo: i32, j_hi: i32, per_octave: usize) -> Vec<f64> {
    let m = per_octave as i32;
    (m * j_lo..=m * j_hi).map(|k| (k as f64 / m as f64).exp2()).collect()
}

/// Octave window `(j_lo, j_hi)` of the standard output grid for `e^{tΔ}f`:
/// ten octaves below the diffusion length, and up to where the kernel tail
/// from the (effective) support drops below `e^{−70}`.
pub fn standard_window(f: &RadialFunction, t: f64) -> (i32, i32) {
    let j_lo = (0.5 * t.log2()).floor() as i32 - 10;
    let j_hi = match effective_radius(f) {
        Some(r) => (r + (280.0 * t).sqrt()).log2().ceil() as i32,
        None => 30,
    };
    (j_lo, j_hi.max(j_lo + 1))
}

/// `e^{tΔ}f` at the given radii; parallel over radii.
pub fn heat_apply_on<F: RadialField + ?Sized>(
    f: &F,
    t: f64,
    n: u32,
    quad: &QuadratureSpec,
    radii: &[f64],
) -> Result<Vec<QuadResult>, HeatError> {
    if !(t > 0.0) {
        return Err(HeatError::NonPositiveTime(t));
    }
    quad.validate().map_err(HeatError::Quadrature)?;
    Ok(radii.par_iter().map(|&r| heat_value(f, t, r, n, quad)).collect())
}

/// `e^{tΔ}f` sampled on the standard log-radius grid with
/// `radial_points_per_annulus` points per octave.
pub fn heat_apply(f: &RadialFunction, t: f64, n: u32, quad: &QuadratureSpec) -> Result<RadialFunction, HeatError> {
    if !(t > 0.0) {
        return Err(HeatError::NonPositiveTime(t));
    }
    f.validate()?;
    let (j_lo, j_hi) = standard_window(f, t);
    let radii = log_grid(j_lo, j_hi, quad.radial_points_per_annulus);
    let values = heat_apply_on(f, t, n, quad, &radii)?.into_iter().map(|q| q.value).collect();
    Ok(RadialFunction::Sampled(Arc::new(Sampled::with_interpolation(radii, values, Interpolation::LogCubic)?)))
}

/// `|x|^γ |u|^{α−1} u`, with the weight kept symbolic.
pub fn nonlinearity(u: &RadialFunction, alpha: ExtRat, gamma: ExtRat) -> RadialFunction {
    u.clone().signed_power(alpha.to_f64()).with_power_weight(gamma.to_f64())
}

/// Matrix of `g ↦ e^{ℓΔ}(ρ^γ g)` on a log-uniform grid, where `g` is known at
/// the grid radii, interpolated by local cubics in `ln ρ` between them,
/// constant below the grid and zero above it. Rows are stored as banded
/// slices.
#[derive(Debug, Clone)]
pub struct GridPropagator {
    rows: Vec<(usize, Vec<f64>)>,
}

/// Lagrange cardinal weights of the four-point stencil at offset `x ∈ [0, 1]`
/// from its second node.
fn cubic_weights(x: f64) -> [f64; 4] {
    [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ]
}

impl GridPropagator {
    /// `radii` must be log-uniform with at least four points.
    pub fn new(radii: &[f64], lag: f64, n: u32, gamma: f64, angular_points: usize) -> Self {
        let g = radii.len();
        assert!(g >= 4, "propagator grid needs four points");
        let h = (radii[1] / radii[0]).ln();
        let b = gamma + n as f64;
        let sigma = (2.0 * lag).sqrt();
        let reach = (800.0 * lag).sqrt();
        let gl = GaussLegendre::new(8);
        let rows = radii
            .par_iter()
            .map(|&r| {
                let kern = |rho: f64| heat_kernel(lag, r, rho, n, angular_points);
                let (lo, hi) = (r - reach, r + reach);
                let mut row = vec![0.0; g];
                // below the grid: constant value of node 0, ρ = r₀ y^{1/b}
                if lo < radii[0] {
                    let r0 = radii[0];
                    let panels = ((r0 / sigma).ceil() as usize).clamp(1, 256);
                    let w = 1.0 / panels as f64;
                    let mut acc = 0.0;
                    for k in 0..panels {
                        acc += gl.integrate(k as f64 * w, (k + 1) as f64 * w, |y| kern(r0 * y.powf(1.0 / b)));
                    }
                    row[0] += acc * r0.powf(b) / b;
                }
                for c in 0..g - 1 {
                    let (a, e) = (radii[c].max(lo), radii[c + 1].min(hi));
                    if !(e > a) {
                        continue;
                    }
                    let start = c.saturating_sub(1).min(g - 4);
                    let u0 = radii[c].ln();
                    let panels = (((e - a) / sigma).ceil() as usize).clamp(1, 4096);
                    let w = (e - a) / panels as f64;
                    let mut acc = [0.0; 4];
                    for k in 0..panels {
                        for (rho, wt) in gl.mapped(a + k as f64 * w, a + (k + 1) as f64 * w) {
                            let x = (rho.ln() - u0) / h + (c - start) as f64 - 1.0;
                            let base = wt * kern(rho) * rho.powf(b - 1.0);
                            for (slot, l) in acc.iter_mut().zip(cubic_weights(x)) {
                                *slot += base * l;
                            }
                        }
                    }
                    for (k, v) in acc.into_iter().enumerate() {
                        row[start + k] += v;
                    }
                }
                let first = row.iter().position(|v| *v != 0.0).unwrap_or(0);
                let last = row.iter().rposition(|v| *v != 0.0).map_or(first, |p| p + 1);
                (first, row[first..last].to_vec())
            })
            .collect();
        Self { rows }
    }

    /// Stored entries.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|(_, r)| r.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|(start, row)| row.iter().zip(&v[*start..]).map(|(a, b)| a * b).sum()).collect()
    }

    /// `out += weight · (self · v)`.
    pub fn apply_add(&self, v: &[f64], weight: f64, out: &mut [f64]) {
        for (o, (start, row)) in out.iter_mut().zip(&self.rows) {
            *o += weight * row.iter().zip(&v[*start..]).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

/// A radial function of time known at finitely many times; linear in `τ`
/// between them and constant beyond both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeFunction {
    pub times: Vec<f64>,
    pub slices: Vec<RadialFunction>,
}

impl SpaceTimeFunction {
    pub fn new(times: Vec<f64>, slices: Vec<RadialFunction>) -> Result<Self, HeatError> {
        if times.is_empty() || times.len() != slices.len() {
            return Err(HeatError::SpaceTime(format!("{} times for {} slices", times.len(), slices.len())));
        }
        if times.iter().any(|t| !(*t > 0.0)) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(HeatError::SpaceTime("times must be positive and strictly increasing".into()));
        }
        Ok(Self { times, slices })
    }

    pub fn constant(f: RadialFunction) -> Self {
        Self { times: vec![1.0], slices: vec![f] }
    }

    /// Interpolation weights `[(slice, weight)]` at time `tau`.
    pub fn weights(&self, tau: f64) -> Vec<(usize, f64)> {
        let k = self.times.len();
        if tau <= self.times[0] {
            return vec![(0, 1.0)];
        }
        if tau >= self.times[k - 1] {
            return vec![(k - 1, 1.0)];
        }
        let i = self.times.partition_point(|&x| x <= tau) - 1;
        let w = (tau - self.times[i]) / (self.times[i + 1] - self.times[i]);
        if w == 0.0 {
            vec![(i, 1.0)]
        } else {
            vec![(i, 1.0 - w), (i + 1, w)]
        }
    }

    pub fn at(&self, tau: f64) -> RadialFunction {
        let parts: Vec<RadialFunction> =
            self.weights(tau).into_iter().map(|(i, w)| self.slices[i].clone().scaled(w)).collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            RadialFunction::Sum(parts)
        }
    }

    pub fn effective_radius(&self) -> Option<f64> {
        self.slices.iter().try_fold(0.0f64, |m, f| effective_radius(f).map(|r| m.max(r)))
    }
}

/// Nodes `(τ, t − τ, weight)` of the graded rule for `∫₀^t g(τ) dτ` under
/// `τ = t(1 − w^{1/κ})`, `P` equal panels in `w`, Gauss–Legendre of order `m`.
/// The lag `t − τ` is computed directly to keep its relative accuracy.
pub fn graded_nodes(t: f64, kappa: f64, panels: usize, m: usize) -> Vec<(f64, f64, f64)> {
    let gl = GaussLegendre::new(m);
    let h = 1.0 / panels as f64;
    let mut out = Vec::with_capacity(panels * m);
    for p in 0..panels {
        for (w, wt) in gl.mapped(p as f64 * h, (p + 1) as f64 * h) {
            let lag = t * w.powf(1.0 / kappa);
            let jac = t / kappa * w.powf(1.0 / kappa - 1.0);
            out.push((t - lag, lag, wt * jac));
        }
    }
    out
}

/// `∫₀^t e^{(t−τ)Δ}F(τ)dτ` at `radii` on the graded rule with `panels` panels.
pub fn duhamel_on(
    f: &SpaceTimeFunction,
    t: f64,
    n: u32,
    quad: &QuadratureSpec,
    kappa: f64,
    panels: usize,
    radii: &[f64],
) -> Result<Vec<f64>, HeatError> {
    let mut acc = vec![0.0; radii.len()];
    for (tau, lag, wt) in graded_nodes(t, kappa, panels, quad.time_points) {
        let ftau = f.at(tau);
        let vals = heat_apply_on(&ftau, lag, n, quad, radii)?;
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += wt * v.value;
        }
    }
    Ok(acc)
}

/// [`duhamel_on`] with every slice sampled on `radii` and propagated by
/// [`GridPropagator`]s; `radii` must be a log-uniform grid.
#[allow(clippy::too_many_arguments)]
pub fn duhamel_on_grid(
    f: &SpaceTimeFunction,
    t: f64,
    n: u32,
    gamma: f64,
    quad: &QuadratureSpec,
    kappa: f64,
    panels: usize,
    radii: &[f64],
) -> Vec<f64> {
    let samples: Vec<Vec<f64>> = f.slices.iter().map(|g| radii.iter().map(|&r| g.eval(r)).collect()).collect();
    let nodes = graded_nodes(t, kappa, panels, quad.time_points);
    let parts: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|&(tau, lag, wt)| {
            let mut mix = vec![0.0; radii.len()];
            for (k, w) in f.weights(tau) {
                for (m, v) in mix.iter_mut().zip(&samples[k]) {
                    *m += w * v;
                }
            }
            let mut out = vec![0.0; radii.len()];
            GridPropagator::new(radii, lag, n, gamma, quad.angular_points).apply_add(&mix, wt, &mut out);
            out
        })
        .collect();
    let mut acc = vec![0.0; radii.len()];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc
}

#[derive(Debug, Clone)]
pub struct DuhamelOutput {
    pub function: RadialFunction,
    /// Largest pointwise change between the `P` and `2P` panel rules.
    pub richardson: f64,
}

/// `∫₀^t e^{(t−τ)Δ}F(τ)dτ` on the standard grid, on the graded mesh matched to
/// `singular_exponent`, with a mesh-halving error estimate.
pub fn duhamel(
    f: &SpaceTimeFunction,
    t: f64,
    n: u32,
    quad: &QuadratureSpec,
    singular_exponent: f64,
) -> Result<DuhamelOutput, HeatError> {
    if !(t > 0.0) {
        return Err(HeatError::NonPositiveTime(t));
    }
    let kappa = quad.grading_exponent.unwrap_or(singular_exponent);
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(HeatError::SingularExponent(kappa));
    }
    let reach = f.effective_radius().unwrap_or(f64::INFINITY);
    let j_lo = (0.5 * t.log2()).floor() as i32 - 10;
    let j_hi = if reach.is_finite() { (reach + (280.0 * t).sqrt()).log2().ceil() as i32 } else { 30 };
    let radii = log_grid(j_lo, j_hi.max(j_lo + 1), quad.radial_points_per_annulus);
    let coarse = duhamel_on(f, t, n, quad, kappa, 2, &radii)?;
    let fine = duhamel_on(f, t, n, quad, kappa, 4, &radii)?;
    let richardson = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DuhamelOutput { function: RadialFunction::Sampled(Arc::new(Sampled::with_interpolation(radii, fine, Interpolation::LogCubic)?)), richardson })
}

/// Pointwise Duhamel integral at one radius.
pub fn duhamel_at(
    f: &SpaceTimeFunction,
    t: f64,
    r: f64,
    n: u32,
    quad: &QuadratureSpec,
    kappa: f64,
    panels: usize,
) -> Result<f64, HeatError> {
    Ok(duhamel_on(f, t, n, quad, kappa, panels, &[r])?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_factor_general_matches_closed_forms() {
        for z in [0.0, 1e-3, 0.5, 3.0, 40.0, 1e4] {
            let closed = spherical_factor(z, 3, 32);
            let quad = spherical_factor_quadrature(z, 3, 32);
            assert!((closed - quad).abs() <= 1e-12 * closed, "z={z}: {closed} vs {quad}");
        }
        // n = 2: 2π e^{−z} I₀(z) → 2π at z = 0
        assert!((spherical_factor_quadrature(0.0, 2, 32) - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn kernel_is_symmetric() {
        for n in [1, 2, 3, 4] {
            for (r, rho) in [(0.3, 1.7), (2.0, 2.5), (0.01, 4.0)] {
                let a = heat_kernel(0.2, r, rho, n, 32);
                let b = heat_kernel(0.2, rho, r, n, 32);
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn nonlinearity_examples() {
        let a2 = ExtRat::integer(2);
        let zero = ExtRat::integer(0);
        let ball = RadialFunction::BallIndicator(1.0);
        let u = nonlinearity(&ball, a2, zero);
        assert_eq!(u.eval(0.5), 1.0);
        let neg = ball.clone().scaled(-1.0);
        assert_eq!(nonlinearity(&neg, ExtRat::integer(3), zero).eval(0.5), -1.0);
        let w = nonlinearity(&RadialFunction::AnnulusIndicator(0), a2, ExtRat::integer(-1));
        assert!((w.eval(0.75) - 1.0 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn space_time_interpolates_linearly() {
        let f = SpaceTimeFunction::new(vec![1.0, 2.0], vec![RadialFunction::Constant(1.0), RadialFunction::Constant(3.0)])
            .unwrap();
        assert_eq!(f.at(0.5).eval(1.0), 1.0);
        assert!((f.at(1.25).eval(1.0) - 1.5).abs() < 1e-15);
        assert_eq!(f.at(5.0).eval(1.0), 3.0);
        assert!(SpaceTimeFunction::new(vec![2.0, 1.0], vec![RadialFunction::Zero, RadialFunction::Zero]).is_err());
    }

    #[test]
    fn graded_rule_integrates_singularity() {
        // ∫₀^t (t−τ)^{κ−1} dτ = t^κ/κ
        let (t, kappa) = (0.3f64, 0.4f64);
        let s: f64 = graded_nodes(t, kappa, 2, 16).iter().map(|(_, lag, w)| w * lag.powf(kappa - 1.0)).sum();
        assert!((s / (t.powf(kappa) / kappa) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn propagator_matches_heat_of_gaussian() {
        let radii = log_grid(-12, 4, 16);
        let g: Vec<f64> = radii.iter().map(|r| (-r * r).exp()).collect();
        for lag in [1e-8, 1e-4, 1e-2, 0.1] {
            let p = GridPropagator::new(&radii, lag, 3, 0.0, 32);
            let out = p.apply(&g);
            for (i, &r) in radii.iter().enumerate().filter(|(_, r)| **r > 0.01 && **r < 4.0) {
                let w = 1.0 + 4.0 * lag;
                let expect = w.powf(-1.5) * (-r * r / w).exp();
                // cubic representation error, relative to sup g = 1
                assert!((out[i] - expect).abs() < 2e-6, "lag={lag} r={r}: {} vs {expect}", out[i]);
            }
        }
    }

    #[test]
    fn rejects_bad_time() {
        let q = QuadratureSpec::default();
        assert!(heat_apply(&RadialFunction::BallIndicator(1.0), 0.0, 3, &q).is_err());
        assert!(HeatEvolved::new(&RadialFunction::Zero, -1.0, 3, q).is_err());
    }
}
