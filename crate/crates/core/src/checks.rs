//! Randomized self-checks: analytic derivatives against finite differences,
//! and the frame and rotation invariances.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernels::{second_variation, segment_gradient, HessianGrid};
use crate::montecarlo::rotation_invariance_check;
use crate::pauli::{max_abs, sigma_z, Mat2, PauliCoefficients, Unitary2};
use crate::propagator::{objective_of, propagate, PiecewiseControl};
use crate::system::{canonical_frame, special_drift, ControlSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub instances: usize,
    /// Replaces every per-check default tolerance.
    pub tolerance: Option<f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 10,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Largest error over all instances.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// A random system, target, horizon and control.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub system: ControlSystem,
    pub target: Unitary2,
    pub control: PiecewiseControl,
}

pub fn random_unitary<R: Rng>(rng: &mut R) -> Unitary2 {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|x| x / n);
    let m = Mat2::new(
        Complex64::new(a, b),
        Complex64::new(c, d),
        Complex64::new(-c, d),
        Complex64::new(a, -b),
    );
    Unitary2::from_matrix_unchecked(m).scale_phase(rng.random_range(-PI..PI))
}

fn random_pauli<R: Rng>(rng: &mut R) -> PauliCoefficients {
    PauliCoefficients::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

pub fn random_system<R: Rng>(rng: &mut R) -> ControlSystem {
    loop {
        if let Ok(sys) = ControlSystem::from_pauli(random_pauli(rng), random_pauli(rng)) {
            // Keep well away from commuting pairs and degenerate couplings.
            if crate::pauli::commutator_norm(sys.h0(), sys.v()) > 0.1 && canonical_frame(&sys).is_ok() {
                return sys;
            }
        }
    }
}

/// Random instance with `n_segments` segments, `T ∈ [0.1, π]` and
/// amplitudes uniform in `[-1, 1]`.
pub fn random_instance<R: Rng>(rng: &mut R, n_segments: usize) -> Instance {
    let system = random_system(rng);
    let target = random_unitary(rng);
    let horizon = rng.random_range(0.1..PI);
    let amplitudes = (0..n_segments).map(|_| rng.random_range(-1.0..1.0)).collect();
    Instance {
        system,
        target,
        control: PiecewiseControl::new(horizon, amplitudes).expect("valid random control"),
    }
}

const GRADIENT_STEP: f64 = 1e-5;
const HESSIAN_STEP: f64 = 1e-3;
/// Kernel nodes per control segment in the Hessian check.
pub const HESSIAN_NODES_PER_SEGMENT: usize = 96;

/// `max |analytic − fd| / max |fd|` over the segment amplitudes.
pub fn gradient_error(inst: &Instance) -> f64 {
    let traj = propagate(&inst.system, &inst.control);
    let analytic = segment_gradient(&traj, &inst.target);
    let n = inst.control.n_segments();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (j, a) in analytic.iter().enumerate() {
        let mut bump = vec![0.0; n];
        bump[j] = 1.0;
        let e = PiecewiseControl::new(inst.control.horizon(), bump).expect("unit bump");
        let j_at = |s: f64| objective_of(&inst.system, &inst.target, &inst.control.add_scaled(&e, s).expect("same grid"));
        let fd = (j_at(GRADIENT_STEP) - j_at(-GRADIENT_STEP)) / (2.0 * GRADIENT_STEP);
        worst = worst.max((a - fd).abs());
        scale = scale.max(fd.abs());
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

/// Relative error of `(g, Hess g)` against a second central difference
/// along `direction`.
pub fn hessian_error(inst: &Instance, direction: &PiecewiseControl) -> Result<f64> {
    let traj = propagate(&inst.system, &inst.control);
    let grid = HessianGrid::uniform(&traj, &inst.target, HESSIAN_NODES_PER_SEGMENT)?;
    let analytic = second_variation(&grid, direction)?;
    let j_at = |s: f64| -> Result<f64> {
        Ok(objective_of(&inst.system, &inst.target, &inst.control.add_scaled(direction, s)?))
    };
    let fd = (j_at(HESSIAN_STEP)? - 2.0 * j_at(0.0)? + j_at(-HESSIAN_STEP)?) / (HESSIAN_STEP * HESSIAN_STEP);
    Ok((analytic - fd).abs() / fd.abs().max(analytic.abs()).max(f64::MIN_POSITIVE))
}

fn finish(name: &str, worst: f64, default_tol: f64, cfg: &CheckConfig) -> CheckResult {
    let tolerance = cfg.tolerance.unwrap_or(default_tol);
    CheckResult {
        name: name.into(),
        worst,
        tolerance,
        passed: worst <= tolerance,
    }
}

pub fn run_checks(cfg: &CheckConfig) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let instances: Vec<Instance> = (0..cfg.instances.max(1)).map(|_| random_instance(&mut rng, 20)).collect();
    let mut results = Vec::new();

    let worst = instances.iter().map(gradient_error).fold(0.0, f64::max);
    results.push(finish("gradient-fd", worst, 1e-6, cfg));

    let mut worst = 0.0f64;
    for inst in &instances {
        let amps = (0..inst.control.n_segments()).map(|_| rng.sample(StandardNormal)).collect();
        let g = PiecewiseControl::new(inst.control.horizon(), amps)?;
        worst = worst.max(hessian_error(inst, &g)?);
    }
    results.push(finish("hessian-fd", worst, 1e-4, cfg));

    let mut worst = 0.0f64;
    for inst in &instances {
        let frame = canonical_frame(&inst.system)?;
        let drift = special_drift(&inst.system)?;
        let s = frame.s.matrix();
        let rotated = s * drift.matrix() * s.adjoint();
        let expected = sigma_z() * Complex64::from(frame.h);
        worst = worst.max(max_abs(&(rotated - expected)));
    }
    results.push(finish("canonical-frame", worst, 1e-10, cfg));

    let mut worst = 0.0f64;
    for inst in &instances {
        let w = Unitary2::z_rotation(rng.random_range(0.0..PI)).scale_phase(rng.random_range(-PI..PI));
        let (a1, a2) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let (j1, j2) = rotation_invariance_check(&w, &inst.control, a1, a2)?;
        worst = worst.max((j1 - j2).abs());
    }
    results.push(finish("rotation-invariance", worst, 1e-10, cfg));

    let mut worst = 0.0f64;
    for inst in &instances {
        let u = propagate(&inst.system, &inst.control).final_unitary();
        worst = worst.max(u.unitarity_deviation());
    }
    results.push(finish("unitarity", worst, 1e-12, cfg));

    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let results = run_checks(&CheckConfig {
            instances: 3,
            ..CheckConfig::default()
        })
        .unwrap();
        for r in &results {
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn tight_tolerance_fails() {
        let results = run_checks(&CheckConfig {
            instances: 2,
            tolerance: Some(1e-15),
            ..CheckConfig::default()
        })
        .unwrap();
        assert!(results.iter().any(|r| !r.passed));
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(random_unitary(&mut rng).unitarity_deviation() < 1e-14);
        }
    }
}
