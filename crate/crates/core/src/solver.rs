//! Picard iteration for the mild Hardy–Hénon problem
//! `u(t) = e^{tΔ}u₀ + ∫₀^t e^{(t−τ)Δ}(|x|^γ|u|^{α−1}u)(τ)dτ`, and the
//! two-branch uniqueness probe.

use crate::exponents::{ratio_to_f64, sigma_delta, ExponentError, ProblemParams};
use crate::functions::{effective_radius, Interpolation, RadialField, RadialFunction, Sampled};
use crate::heat::{graded_nodes, heat_apply_on, log_grid, GridPropagator, HeatError, SpaceTimeFunction};
use crate::norms::{herz_norm_of, NormError, NormValue};
use crate::quadrature::{geomspace, linear_fit, QuadratureSpec};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("horizon T = {0} must be positive")]
    Horizon(f64),
    #[error("tolerance {0} must be positive")]
    Tolerance(f64),
    #[error(transparent)]
    Heat(#[from] HeatError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Discretization knobs of the Picard map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardOptions {
    /// Number of geometric time nodes in `[T·t_min_fraction, T]`.
    pub time_nodes: usize,
    pub t_min_fraction: f64,
    /// Graded panels per Duhamel integral.
    pub duhamel_panels: usize,
    /// Consecutive ratios above 1 that stop the iteration.
    pub divergence_streak: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { time_nodes: 16, t_min_fraction: 1e-3, duhamel_panels: 1, divergence_streak: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PicardOutcome {
    Converged,
    MaxIterations,
    NonContractive,
}

/// Radial grid shared by every iterate: `2^{k/m}` over `[2^{j_lo}, 2^{j_hi}]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverGrid {
    pub j_lo: i32,
    pub j_hi: i32,
    pub per_octave: usize,
    #[serde(skip)]
    pub radii: Vec<f64>,
}

impl SolverGrid {
    /// Four octaves below the shortest diffusion length, up to where the
    /// kernel tail from the data's support is below `e^{−70}`.
    pub fn for_problem(u0: &RadialFunction, times: &[f64], per_octave: usize) -> Self {
        let t_min = times[0];
        let t_max = *times.last().unwrap();
        let j_lo = (0.5 * t_min.log2()).floor() as i32 - 4;
        let reach = effective_radius(u0).unwrap_or(1024.0).max(2f64.powi(j_lo + 1));
        let j_hi = ((reach + (280.0 * t_max).sqrt()).log2().ceil() as i32).max(j_lo + 2);
        Self { j_lo, j_hi, per_octave, radii: log_grid(j_lo, j_hi, per_octave) }
    }

    /// Annuli wholly covered by the grid.
    pub fn window(&self) -> (i32, i32) {
        (self.j_lo + 1, self.j_hi)
    }

    pub fn function(&self, values: Vec<f64>) -> RadialFunction {
        RadialFunction::Sampled(Arc::new(
            Sampled::with_interpolation(self.radii.clone(), values, Interpolation::LogCubic)
                .expect("grid radii are valid"),
        ))
    }

    pub fn sample(&self, f: &RadialFunction) -> Vec<f64> {
        self.radii.iter().map(|&r| f.eval(r)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardRun {
    pub params: ProblemParams,
    pub horizon: f64,
    pub time_grid: Vec<f64>,
    pub grid: SolverGrid,
    #[serde(skip)]
    pub iterates: Vec<SpaceTimeFunction>,
    #[serde(skip)]
    values: Vec<Vec<Vec<f64>>>,
    /// `herz_history[k][i]`: norm of iterate `k` at time `i`.
    pub herz_history: Vec<Vec<NormValue>>,
    /// `sup_t ‖u^{k+1}(t) − u^k(t)‖` for each applied Picard step.
    pub differences: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub outcome: PicardOutcome,
    pub tol: f64,
    /// Grading exponent of the Duhamel time mesh.
    pub grading: f64,
}

impl PicardRun {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }

    pub fn last_values(&self) -> &[Vec<f64>] {
        self.values.last().unwrap()
    }

    pub fn iterate_values(&self, k: usize) -> &[Vec<f64>] {
        &self.values[k]
    }

    /// CSV with columns `iterate,time,value,lower,upper`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("iterate,time,value,lower,upper\n");
        for (k, row) in self.herz_history.iter().enumerate() {
            for (t, nv) in self.time_grid.iter().zip(row) {
                writeln!(out, "{k},{t:e},{:e},{:e},{:e}", nv.value, nv.lower, nv.upper).unwrap();
            }
        }
        out
    }

    pub fn write_history_csv(&self, path: &Path) -> Result<(), SolverError> {
        std::fs::write(path, self.history_csv()).map_err(|e| SolverError::Io(e.to_string()))
    }
}

/// Grading exponent matched to the `(t−τ)^{δ−1}` singularity, or 1 when δ is
/// not in `(0, 1]`.
pub fn grading_for(params: &ProblemParams) -> Result<f64, SolverError> {
    let (_, delta) = sigma_delta(params)?;
    let d = ratio_to_f64(&delta);
    Ok(if d > 0.0 && d <= 1.0 { d } else { 1.0 })
}

/// One Duhamel quadrature node at a fixed grid time.
struct Node {
    slices: Vec<(usize, f64)>,
    weight: f64,
    propagator: GridPropagator,
}

struct Setup<'a> {
    params: &'a ProblemParams,
    quad: &'a QuadratureSpec,
    opts: &'a PicardOptions,
    times: Vec<f64>,
    grid: SolverGrid,
    base: Vec<Vec<f64>>,
    kappa: f64,
    nodes: Vec<Vec<Node>>,
}

impl Setup<'_> {
    fn norm(&self, values: &[f64]) -> Result<NormValue, SolverError> {
        let f = self.grid.function(values.to_vec());
        Ok(herz_norm_of(&f, &self.params.index, self.params.n, self.grid.window(), self.quad)?)
    }

    /// `u ↦ e^{tΔ}u₀ + ∫₀^t e^{(t−τ)Δ}N(u(τ))dτ` at every grid time, with
    /// `|u|^{α−1}u` linear in `τ` between grid times and the weight `|x|^γ`
    /// folded into the propagators.
    fn picard_map(&self, u: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let alpha = ratio_to_f64(&self.params.alpha);
        let forcing: Vec<Vec<f64>> =
            u.iter().map(|v| v.iter().map(|x| x.signum() * x.abs().powf(alpha)).collect()).collect();
        let g = self.grid.radii.len();
        self.base
            .iter()
            .zip(&self.nodes)
            .map(|(b, nodes)| {
                let mut out = b.clone();
                let mut mix = vec![0.0; g];
                for node in nodes {
                    mix.iter_mut().for_each(|m| *m = 0.0);
                    for &(k, w) in &node.slices {
                        for (m, f) in mix.iter_mut().zip(&forcing[k]) {
                            *m += w * f;
                        }
                    }
                    node.propagator.apply_add(&mix, node.weight, &mut out);
                }
                out
            })
            .collect()
    }
}

fn setup<'a>(
    u0: &RadialFunction,
    params: &'a ProblemParams,
    horizon: f64,
    quad: &'a QuadratureSpec,
    opts: &'a PicardOptions,
) -> Result<Setup<'a>, SolverError> {
    if !(horizon > 0.0) {
        return Err(SolverError::Horizon(horizon));
    }
    quad.validate().map_err(HeatError::Quadrature)?;
    u0.validate().map_err(HeatError::from)?;
    let times = geomspace(horizon * opts.t_min_fraction, horizon, opts.time_nodes);
    let grid = SolverGrid::for_problem(u0, &times, quad.radial_points_per_annulus);
    let base = times
        .iter()
        .map(|&t| Ok(heat_apply_on(u0, t, params.n, quad, &grid.radii)?.into_iter().map(|q| q.value).collect()))
        .collect::<Result<Vec<Vec<f64>>, SolverError>>()?;
    let kappa = quad.grading_exponent.unwrap_or(grading_for(params)?);
    let stf = SpaceTimeFunction { times: times.clone(), slices: vec![RadialFunction::Zero; times.len()] };
    let gamma = ratio_to_f64(&params.gamma);
    let nodes = times
        .iter()
        .map(|&t| {
            graded_nodes(t, kappa, opts.duhamel_panels, quad.time_points)
                .into_iter()
                .map(|(tau, lag, weight)| Node {
                    slices: stf.weights(tau),
                    weight,
                    propagator: GridPropagator::new(&grid.radii, lag, params.n, gamma, quad.angular_points),
                })
                .collect()
        })
        .collect();
    Ok(Setup { params, quad, opts, times, grid, base, kappa, nodes })
}

fn iterate(
    s: &Setup,
    start: Vec<Vec<f64>>,
    max_iter: usize,
    tol: f64,
) -> Result<PicardRun, SolverError> {
    if !(tol > 0.0) {
        return Err(SolverError::Tolerance(tol));
    }
    let history_row = |u: &[Vec<f64>]| u.iter().map(|v| s.norm(v)).collect::<Result<Vec<_>, _>>();
    let mut values = vec![start];
    let mut herz_history = vec![history_row(&values[0])?];
    let mut differences: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut streak = 0;
    let mut outcome = PicardOutcome::MaxIterations;
    for _ in 0..max_iter {
        let next = s.picard_map(values.last().unwrap());
        let mut sup = 0.0f64;
        for (a, b) in next.iter().zip(values.last().unwrap()) {
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            sup = sup.max(s.norm(&d)?.value);
        }
        if let Some(&prev) = differences.last() {
            let ratio = if prev > 0.0 { sup / prev } else { 0.0 };
            ratios.push(ratio);
            streak = if ratio > 1.0 { streak + 1 } else { 0 };
        }
        herz_history.push(history_row(&next)?);
        values.push(next);
        differences.push(sup);
        if sup < tol {
            outcome = PicardOutcome::Converged;
            break;
        }
        if streak >= s.opts.divergence_streak {
            outcome = PicardOutcome::NonContractive;
            break;
        }
    }
    let iterates = values
        .iter()
        .map(|u| SpaceTimeFunction {
            times: s.times.clone(),
            slices: u.iter().map(|v| s.grid.function(v.clone())).collect(),
        })
        .collect();
    Ok(PicardRun {
        params: *s.params,
        horizon: *s.times.last().unwrap(),
        time_grid: s.times.clone(),
        grid: s.grid.clone(),
        iterates,
        values,
        herz_history,
        differences,
        contraction_ratios: ratios,
        converged: outcome == PicardOutcome::Converged,
        outcome,
        tol,
        grading: s.kappa,
    })
}

/// Picard iteration from `u⁰(t) = e^{tΔ}u₀`, recomputing every iterate over
/// the whole time grid.
pub fn picard_solve(
    u0: &RadialFunction,
    params: &ProblemParams,
    horizon: f64,
    quad: &QuadratureSpec,
    max_iter: usize,
    tol: f64,
) -> Result<PicardRun, SolverError> {
    picard_solve_with(u0, params, horizon, quad, max_iter, tol, &PicardOptions::default())
}

pub fn picard_solve_with(
    u0: &RadialFunction,
    params: &ProblemParams,
    horizon: f64,
    quad: &QuadratureSpec,
    max_iter: usize,
    tol: f64,
    opts: &PicardOptions,
) -> Result<PicardRun, SolverError> {
    let s = setup(u0, params, horizon, quad, opts)?;
    let start = s.base.clone();
    iterate(&s, start, max_iter, tol)
}

/// `‖u − (e^{tΔ}u₀ + Duhamel(N(u)))‖` at each grid time for the last iterate.
pub fn fixed_point_residual(run: &PicardRun, u0: &RadialFunction, quad: &QuadratureSpec, opts: &PicardOptions) -> Result<Vec<f64>, SolverError> {
    let s = setup(u0, &run.params, run.horizon, quad, opts)?;
    let last = run.last_values();
    let image = s.picard_map(last);
    image
        .iter()
        .zip(last)
        .map(|(a, b)| Ok(s.norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())?.value))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProbeVerdict {
    /// Both branches converge to the same limit with the expected early decay.
    Consistent,
    Violated,
    /// A branch failed to contract.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct DifferenceReport {
    pub times: Vec<f64>,
    /// `‖u₁(t) − u₂(t)‖` between the converged branches.
    pub diff_norms: Vec<NormValue>,
    /// Same difference after one Picard step.
    pub first_step_diff: Vec<f64>,
    pub initial_difference: f64,
    pub delta: f64,
    /// Log-log slope of `first_step_diff` over the early half of the grid.
    pub early_exponent: Option<f64>,
    pub fitted_constant: Option<f64>,
    /// `C t^δ ‖p‖` with the smallest `C` dominating the early differences.
    pub gronwall_envelope: Vec<f64>,
    pub tol: f64,
    pub branch_outcomes: [PicardOutcome; 2],
    pub branch_iterations: [usize; 2],
    pub verdict: ProbeVerdict,
}

/// Solves twice, the second time from `e^{tΔ}u₀ + p` as zeroth iterate, and
/// compares the limits and the early-time behaviour of the difference.
#[allow(clippy::too_many_arguments)]
pub fn uniqueness_probe(
    u0: &RadialFunction,
    params: &ProblemParams,
    horizon: f64,
    perturbation: &RadialFunction,
    quad: &QuadratureSpec,
    max_iter: usize,
    tol: f64,
    opts: &PicardOptions,
) -> Result<DifferenceReport, SolverError> {
    let s = setup(u0, params, horizon, quad, opts)?;
    let p = s.grid.sample(perturbation);
    let initial_difference = s.norm(&p)?.value;
    let perturbed: Vec<Vec<f64>> = s.base.iter().map(|b| b.iter().zip(&p).map(|(x, y)| x + y).collect()).collect();
    let (one, two) = rayon::join(|| iterate(&s, s.base.clone(), max_iter, tol), || iterate(&s, perturbed, max_iter, tol));
    let (one, two) = (one?, two?);
    let last1 = one.last_values();
    let last2 = two.last_values();
    let diff_norms = last1
        .iter()
        .zip(last2)
        .map(|(a, b)| s.norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let step = |r: &PicardRun| if r.values.len() > 1 { 1 } else { 0 };
    let (a1, a2) = (one.iterate_values(step(&one)), two.iterate_values(step(&two)));
    let first_step_diff = a1
        .iter()
        .zip(a2)
        .map(|(a, b)| Ok(s.norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())?.value))
        .collect::<Result<Vec<f64>, SolverError>>()?;
    let delta = ratio_to_f64(&sigma_delta(params)?.1);

    // early half of the grid without its first node
    let early: Vec<usize> = (1..=s.times.len() / 2).filter(|&i| first_step_diff[i] > 0.0).collect();
    let (early_exponent, fitted_constant) = if initial_difference > 0.0 && early.len() >= 3 {
        let x: Vec<f64> = early.iter().map(|&i| s.times[i].ln()).collect();
        let y: Vec<f64> = early.iter().map(|&i| first_step_diff[i].ln()).collect();
        let (slope, _) = linear_fit(&x, &y);
        let c = early
            .iter()
            .map(|&i| first_step_diff[i] / (s.times[i].powf(delta) * initial_difference))
            .fold(0.0, f64::max);
        (Some(slope), Some(c))
    } else {
        (None, None)
    };
    let gronwall_envelope =
        s.times.iter().map(|t| fitted_constant.unwrap_or(0.0) * t.powf(delta) * initial_difference).collect();
    let verdict = if !(one.converged && two.converged) {
        ProbeVerdict::Inconclusive
    } else {
        let limits_agree = diff_norms.iter().all(|d| d.value <= 10.0 * tol);
        let early_ok = early_exponent.is_none_or(|e| e >= delta - 0.1);
        if limits_agree && early_ok {
            ProbeVerdict::Consistent
        } else {
            ProbeVerdict::Violated
        }
    };
    Ok(DifferenceReport {
        times: s.times.clone(),
        diff_norms,
        first_step_diff,
        initial_difference,
        delta,
        early_exponent,
        fitted_constant,
        gronwall_envelope,
        tol,
        branch_outcomes: [one.outcome, two.outcome],
        branch_iterations: [one.iterations(), two.iterations()],
        verdict,
    })
}
