//! Trap-freedom classification at the special control and saddle witnesses.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::kernels::{l_functional, second_variation, y_angles, HessianGrid, YAngles};
use crate::pauli::{HermitianOp2, PauliCoefficients, Unitary2};
use crate::propagator::{propagate, PiecewiseControl};
use crate::system::{canonical_frame, gate_angles, special_time, ControlSystem, GateAngles};

/// Slack on the `α_W < π/(2d)` comparison.
const THRESHOLD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrapCase {
    /// `[H̃0 + f0 Ṽ, W] ≠ 0`: trap-free for every `T`.
    NoncommutingAllT,
    /// `α_W ∈ (0, π/(2d))`: trap-free for every `T`.
    CommutingSmallAlphaAllT,
    /// `α_W ∈ [π/(2d), π/d]`: trap-free for `T > π/d − α_W`.
    CommutingThreshold,
    /// `W ∝ I`.
    DegenerateTarget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapVerdict {
    pub case: TrapCase,
    pub alpha_w: Option<f64>,
    pub beta_w: Option<f64>,
    /// Operator norm of the special drift, which is also the canonical `h`.
    pub d: f64,
    pub min_trap_free_t: f64,
    pub t0: f64,
    pub commutator_norm: f64,
    pub horizon: f64,
    /// `T > min_trap_free_t`, or no threshold at all. `false` means no
    /// guarantee, not that a trap exists.
    pub trap_free_at_horizon: bool,
}

/// The JSON form of a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub case: TrapCase,
    pub alpha_w: Option<f64>,
    pub beta_w: Option<f64>,
    pub d: f64,
    pub t0: f64,
    pub min_trap_free_t: f64,
}

impl TrapVerdict {
    pub fn record(&self) -> VerdictRecord {
        VerdictRecord {
            case: self.case,
            alpha_w: self.alpha_w,
            beta_w: self.beta_w,
            d: self.d,
            t0: self.t0,
            min_trap_free_t: self.min_trap_free_t,
        }
    }
}

pub fn classify(sys: &ControlSystem, w: &Unitary2, horizon: f64) -> Result<TrapVerdict> {
    if !(horizon > 0.0) {
        return Err(LandscapeError::InvalidControl(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let angles = gate_angles(w, sys)?;
    let t0 = special_time(sys)?;
    let d = angles.d();
    let mut verdict = TrapVerdict {
        case: TrapCase::NoncommutingAllT,
        alpha_w: None,
        beta_w: None,
        d,
        min_trap_free_t: 0.0,
        t0,
        commutator_norm: 0.0,
        horizon,
        trap_free_at_horizon: true,
    };
    match angles {
        GateAngles::Noncommuting { commutator_norm, .. } => {
            verdict.commutator_norm = commutator_norm;
        }
        GateAngles::PurePhase(a) => {
            verdict.case = TrapCase::DegenerateTarget;
            verdict.alpha_w = Some(a.alpha_w);
            verdict.beta_w = Some(a.beta_w);
        }
        GateAngles::Commuting(a) => {
            verdict.alpha_w = Some(a.alpha_w);
            verdict.beta_w = Some(a.beta_w);
            if a.alpha_w < PI / (2.0 * d) - THRESHOLD_TOL {
                verdict.case = TrapCase::CommutingSmallAlphaAllT;
            } else {
                verdict.case = TrapCase::CommutingThreshold;
                verdict.min_trap_free_t = (PI / d - a.alpha_w).max(0.0);
                verdict.trap_free_at_horizon = horizon > verdict.min_trap_free_t;
            }
        }
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalStatus {
    NotCritical,
    /// `cos φ cos θ = 0`: `J = 0` at the special control.
    GlobalMinimum,
    /// `J = 1` at the special control.
    GlobalMaximum,
    /// Critical with `0 < J < 1`: a maximum or a saddle.
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub l_sigma_x: f64,
    pub l_sigma_y: f64,
    pub j0: f64,
    pub angles: YAngles,
    pub status: CriticalStatus,
}

impl CriticalPointReport {
    pub fn is_critical(&self) -> bool {
        self.status != CriticalStatus::NotCritical
    }
}

const CRITICAL_TOL: f64 = 1e-9;

/// Gradient coefficients at the special control, read in the canonical frame.
pub fn critical_point_test(sys: &ControlSystem, w: &Unitary2, horizon: f64) -> Result<CriticalPointReport> {
    let frame = canonical_frame(sys)?;
    let u = HermitianOp2::from_pauli(PauliCoefficients::z()).expm(frame.canonical_time(horizon));
    let y = frame.gate_to_frame(w).adjoint() * u;
    let angles = y_angles(&y);
    let lx = l_functional(&y, &HermitianOp2::from_pauli(PauliCoefficients::x()));
    let ly = l_functional(&y, &HermitianOp2::from_pauli(PauliCoefficients::y()));
    let j0 = (0.25 * y.trace().norm_sqr()).min(1.0);
    let status = if lx.abs().max(ly.abs()) > CRITICAL_TOL {
        CriticalStatus::NotCritical
    } else if j0 < CRITICAL_TOL {
        CriticalStatus::GlobalMinimum
    } else if j0 > 1.0 - CRITICAL_TOL {
        CriticalStatus::GlobalMaximum
    } else {
        CriticalStatus::Candidate
    };
    Ok(CriticalPointReport {
        l_sigma_x: lx,
        l_sigma_y: ly,
        j0,
        angles,
        status,
    })
}

/// `D = sin 2(φ_W + T − s) · sin 2s`, canonical units.
pub fn discriminant(phi_w: f64, horizon: f64, s: f64) -> f64 {
    (2.0 * (phi_w + horizon - s)).sin() * (2.0 * s).sin()
}

/// `D = cos²(2s + φ) − cos²φ`; equal to [`discriminant`] when `φ = −φ_W − T`.
pub fn discriminant_from_phi(phi: f64, s: f64) -> f64 {
    (2.0 * s + phi).cos().powi(2) - phi.cos().powi(2)
}

/// `G(λ, μ) = λ² cos φ + 2λμ cos(2s + φ) + μ² cos φ`.
pub fn two_bump_form(phi: f64, s: f64, lambda: f64, mu: f64) -> f64 {
    let c = phi.cos();
    lambda * lambda * c + 2.0 * lambda * mu * (2.0 * s + phi).cos() + mu * mu * c
}

/// Two bumps of width `epsilon` and height `1/epsilon` centred at `t1` and
/// `t2`, weighted by `(λ, μ)`, on which the second variation takes opposite
/// signs for `pos_pair` and `neg_pair`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleWitness {
    pub t1: f64,
    pub t2: f64,
    pub epsilon: f64,
    pub pos_pair: (f64, f64),
    pub neg_pair: (f64, f64),
    pub pos_value: f64,
    pub neg_value: f64,
    pub discriminant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessOutcome {
    Found(SaddleWitness),
    NoneFound,
}

impl WitnessOutcome {
    pub fn witness(&self) -> Option<&SaddleWitness> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            WitnessOutcome::NoneFound => None,
        }
    }
}

const WITNESS_LEVELS: u32 = 10;
const WITNESS_BASE_SEGMENTS: usize = 20;
const NODES_PER_BUMP: usize = 8;
const PAIRS: [(f64, f64); 2] = [(1.0, 1.0), (1.0, -1.0)];

/// Searches for a two-bump perturbation around the special control on which
/// the second variation is indefinite.
///
/// The bump separation is `T − ε` when `φ_W < π/2` and `ε` otherwise; if
/// neither has `D > 0` the separation maximizing `D` on the `ε` lattice is
/// used. `ε` starts at `T/20` and is halved until the realized signs agree
/// with the small-`ε` limit `h²·(−2v² cos φ)·G(λ, μ)`.
pub fn saddle_witness(sys: &ControlSystem, w: &Unitary2, horizon: f64) -> Result<WitnessOutcome> {
    let angles = match gate_angles(w, sys)? {
        GateAngles::Noncommuting { commutator_norm, .. } => {
            return Err(LandscapeError::NotCritical {
                norm: commutator_norm,
            })
        }
        GateAngles::Commuting(a) | GateAngles::PurePhase(a) => a,
    };
    if !(horizon > 0.0) {
        return Err(LandscapeError::InvalidControl(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let frame = canonical_frame(sys)?;
    let h = frame.h;
    let phi_w = angles.phi_w();
    let t_c = h * horizon;
    let phi = -phi_w - t_c;
    let cos_phi = phi.cos();
    // J at the special control is 0 or 1: a global extremum, never a trap.
    if cos_phi.abs() < CRITICAL_TOL || cos_phi.abs() > 1.0 - CRITICAL_TOL {
        return Ok(WitnessOutcome::NoneFound);
    }
    let prefactor = -2.0 * frame.coupling_norm().powi(2) * cos_phi * h * h;

    let f0 = PiecewiseControl::constant(horizon, 1, frame.f0)?;
    let traj = propagate(sys, &f0);

    for level in 0..=WITNESS_LEVELS {
        let n = WITNESS_BASE_SEGMENTS << level;
        let eps = horizon / n as f64;
        let Some(m) = choose_separation(phi_w, t_c, h * eps, n) else {
            continue;
        };
        let s_c = h * eps * m as f64;
        let d_value = discriminant(phi_w, t_c, s_c);

        let mut nodes = bump_nodes(eps, 0);
        let last = nodes[nodes.len() - 1];
        nodes.extend(bump_nodes(eps, m).into_iter().filter(|t| *t > last));
        let grid = HessianGrid::build(&traj, w, &nodes)?;

        let mut realized = [0.0; 2];
        let mut agree = true;
        for (k, &(lambda, mu)) in PAIRS.iter().enumerate() {
            let mut amps = vec![0.0; n];
            amps[0] = lambda / eps;
            amps[m] += mu / eps;
            let value = second_variation(&grid, &PiecewiseControl::new(horizon, amps)?)?;
            let limit = prefactor * two_bump_form(phi, s_c, lambda, mu);
            realized[k] = value;
            agree &= value != 0.0 && value.signum() == limit.signum();
        }
        if !agree || realized[0].signum() == realized[1].signum() {
            continue;
        }
        let (pos, neg) = if realized[0] > 0.0 { (0, 1) } else { (1, 0) };
        return Ok(WitnessOutcome::Found(SaddleWitness {
            t1: 0.5 * eps,
            t2: (m as f64 + 0.5) * eps,
            epsilon: eps,
            pos_pair: PAIRS[pos],
            neg_pair: PAIRS[neg],
            pos_value: realized[pos],
            neg_value: realized[neg],
            discriminant: d_value,
        }));
    }
    Ok(WitnessOutcome::NoneFound)
}

/// Bump index offset `m` (separation `m·ε`) with `D > 0`, canonical units.
fn choose_separation(phi_w: f64, t_c: f64, eps_c: f64, n: usize) -> Option<usize> {
    let preferred = if phi_w < FRAC_PI_2 { n - 1 } else { 1 };
    if discriminant(phi_w, t_c, eps_c * preferred as f64) > 0.0 {
        return Some(preferred);
    }
    (1..n)
        .map(|m| (m, discriminant(phi_w, t_c, eps_c * m as f64)))
        .filter(|&(_, d)| d > 0.0)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(m, _)| m)
}

fn bump_nodes(eps: f64, m: usize) -> Vec<f64> {
    let start = m as f64 * eps;
    (0..=NODES_PER_BUMP)
        .map(|k| start + eps * k as f64 / NODES_PER_BUMP as f64)
        .collect()
}
