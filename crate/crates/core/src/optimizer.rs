//! Gradient ascent on piecewise-constant controls.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::kernels::{gradient_profile, second_variation, HessianGrid};
use crate::montecarlo::{random_control, SamplingConfig};
use crate::pauli::Unitary2;
use crate::propagator::{objective, objective_of, propagate, PiecewiseControl};
use crate::system::{special_control, ControlSystem};

/// A run counts as a success when it ends above this fidelity.
pub const SUCCESS_LEVEL: f64 = 1.0 - 1e-2;
const MAX_HALVINGS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub step_size: f64,
    pub max_iters: usize,
    pub grad_tolerance: f64,
    pub n_segments: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            step_size: 0.1,
            max_iters: 2000,
            grad_tolerance: 1e-8,
            n_segments: 100,
            seed: 0,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !(self.grad_tolerance > 0.0) {
            return Err(LandscapeError::InvalidConfig(
                "step_size and grad_tolerance must be positive".into(),
            ));
        }
        if self.n_segments == 0 {
            return Err(LandscapeError::InvalidConfig("n_segments must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentTrace {
    pub initial: PiecewiseControl,
    pub terminal: PiecewiseControl,
    /// `J` before the first step and after every accepted step.
    pub j_history: Vec<f64>,
    /// Max |δJ/δf| over the segment midpoints at the terminal control.
    pub terminal_grad_norm: f64,
    pub converged: bool,
    /// Converged without taking a step.
    pub critical_start: bool,
}

impl AscentTrace {
    pub fn final_j(&self) -> f64 {
        *self.j_history.last().expect("history holds the initial value")
    }

    pub fn iterations(&self) -> usize {
        self.j_history.len() - 1
    }
}

fn midpoint_gradient(sys: &ControlSystem, w: &Unitary2, f: &PiecewiseControl) -> Result<Vec<f64>> {
    let traj = propagate(sys, f);
    Ok(gradient_profile(&traj, w, &f.midpoints())?.values)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `f ← f + η ∇J` with `∇J` sampled at segment midpoints; `η` starts at
/// `step_size` every iteration and is halved until `J` increases.
pub fn gradient_ascent(
    sys: &ControlSystem,
    w: &Unitary2,
    horizon: f64,
    init: &PiecewiseControl,
    cfg: &AscentConfig,
) -> Result<AscentTrace> {
    cfg.validate()?;
    if (init.horizon() - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(LandscapeError::InvalidControl(format!(
            "initial control has horizon {}, expected {horizon}",
            init.horizon()
        )));
    }
    let mut f = init.clone();
    let mut j = objective_of(sys, w, &f);
    let mut history = vec![j];
    let mut grad = midpoint_gradient(sys, w, &f)?;
    let mut grad_norm = max_abs(&grad);
    let mut converged = grad_norm < cfg.grad_tolerance;
    let critical_start = converged;

    let mut iter = 0;
    while !converged && iter < cfg.max_iters {
        iter += 1;
        let direction = PiecewiseControl::new(horizon, grad)?;
        let mut eta = cfg.step_size;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = f.add_scaled(&direction, eta)?;
            let j_trial = objective_of(sys, w, &trial);
            if j_trial > j {
                accepted = Some((trial, j_trial));
                break;
            }
            eta *= 0.5;
        }
        let Some((next, j_next)) = accepted else {
            // No step size increases J: stalled at round-off level.
            break;
        };
        f = next;
        j = j_next;
        history.push(j);
        grad = midpoint_gradient(sys, w, &f)?;
        grad_norm = max_abs(&grad);
        converged = grad_norm < cfg.grad_tolerance;
    }
    Ok(AscentTrace {
        initial: init.clone(),
        terminal: f,
        j_history: history,
        terminal_grad_norm: grad_norm,
        converged,
        critical_start,
    })
}

/// Second variation at `f` along random directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianProbe {
    pub values: Vec<f64>,
}

impl HessianProbe {
    pub fn negative_definite(&self) -> bool {
        self.values.iter().all(|v| *v < 0.0)
    }
}

/// `(g, Hess g)` for `n_directions` standard-normal directions on the
/// segment grid of `f`, with `nodes_per_segment` kernel nodes per segment.
pub fn hessian_probe(
    sys: &ControlSystem,
    w: &Unitary2,
    f: &PiecewiseControl,
    n_directions: usize,
    nodes_per_segment: usize,
    seed: u64,
) -> Result<HessianProbe> {
    let traj = propagate(sys, f);
    let grid = HessianGrid::uniform(&traj, w, nodes_per_segment)?;
    let sampling = SamplingConfig {
        n_segments: f.n_segments(),
        n_samples: n_directions.max(1),
        seed,
        amplitude_scale: 1.0,
        horizon: f.horizon(),
    };
    let values = (0..n_directions as u64)
        .map(|k| second_variation(&grid, &random_control(&sampling, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(HessianProbe { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub start: u64,
    pub initial_j: f64,
    pub final_j: f64,
    pub iterations: usize,
    pub converged: bool,
    pub critical_start: bool,
    pub terminal_grad_norm: f64,
    pub j_history: Vec<f64>,
    /// Present for runs that end below the success level.
    pub terminal_probe: Option<HessianProbe>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultistartSummary {
    pub best_j: f64,
    pub success_fraction: f64,
    pub runs: Vec<RunSummary>,
}

impl MultistartSummary {
    /// Runs that stopped at a small gradient below the success level with a
    /// negative Hessian form in every probed direction.
    pub fn suspected_traps(&self) -> Vec<&RunSummary> {
        self.runs
            .iter()
            .filter(|r| {
                r.converged
                    && r.final_j < SUCCESS_LEVEL
                    && r.terminal_probe.as_ref().is_some_and(|p| p.negative_definite())
            })
            .collect()
    }
}

/// Number of random directions in the terminal probe of unsuccessful runs.
pub const PROBE_DIRECTIONS: usize = 10;

/// Gradient ascent from `n_starts` controls `f0 + N(0, 1)` drawn with the
/// Monte Carlo generator under `cfg.seed`. Runs execute in parallel.
pub fn multistart(
    sys: &ControlSystem,
    w: &Unitary2,
    horizon: f64,
    n_starts: usize,
    cfg: &AscentConfig,
) -> Result<MultistartSummary> {
    cfg.validate()?;
    if n_starts == 0 {
        return Err(LandscapeError::InvalidConfig("n_starts must be at least 1".into()));
    }
    let f0 = special_control(sys)?;
    let sampling = SamplingConfig {
        n_segments: cfg.n_segments,
        n_samples: n_starts,
        seed: cfg.seed,
        amplitude_scale: 1.0,
        horizon,
    };
    sampling.validate()?;
    let runs = (0..n_starts as u64)
        .into_par_iter()
        .map(|k| {
            let init = random_control(&sampling, k).shifted(f0);
            let trace = gradient_ascent(sys, w, horizon, &init, cfg)?;
            let final_j = trace.final_j();
            let terminal_probe = if final_j < SUCCESS_LEVEL {
                Some(hessian_probe(sys, w, &trace.terminal, PROBE_DIRECTIONS, 4, cfg.seed ^ k)?)
            } else {
                None
            };
            Ok(RunSummary {
                start: k,
                initial_j: trace.j_history[0],
                final_j,
                iterations: trace.iterations(),
                converged: trace.converged,
                critical_start: trace.critical_start,
                terminal_grad_norm: trace.terminal_grad_norm,
                j_history: trace.j_history,
                terminal_probe,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best_j = runs.iter().map(|r| r.final_j).fold(f64::NEG_INFINITY, f64::max);
    let successes = runs.iter().filter(|r| r.final_j > SUCCESS_LEVEL).count();
    Ok(MultistartSummary {
        best_j,
        success_fraction: successes as f64 / runs.len() as f64,
        runs,
    })
}

/// `J` of the terminal control of a trace, recomputed from scratch.
pub fn terminal_objective(sys: &ControlSystem, w: &Unitary2, trace: &AscentTrace) -> f64 {
    objective(w, &propagate(sys, &trace.terminal).final_unitary())
}
