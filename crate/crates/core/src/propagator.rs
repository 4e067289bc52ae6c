//! Exact propagation under piecewise-constant controls.

use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::pauli::{HermitianOp2, Unitary2};
use crate::system::ControlSystem;

/// A real control on `[0, T]` that is constant on `N` uniform segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseControl {
    horizon: f64,
    amplitudes: Vec<f64>,
}

impl PiecewiseControl {
    pub fn new(horizon: f64, amplitudes: Vec<f64>) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(LandscapeError::InvalidControl(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        if amplitudes.is_empty() {
            return Err(LandscapeError::InvalidControl(
                "at least one segment is required".into(),
            ));
        }
        if let Some(bad) = amplitudes.iter().find(|a| !a.is_finite()) {
            return Err(LandscapeError::InvalidControl(format!(
                "amplitude {bad} is not finite"
            )));
        }
        Ok(Self {
            horizon,
            amplitudes,
        })
    }

    pub fn constant(horizon: f64, n_segments: usize, value: f64) -> Result<Self> {
        Self::new(horizon, vec![value; n_segments])
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn n_segments(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn segment_width(&self) -> f64 {
        self.horizon / self.amplitudes.len() as f64
    }

    /// `[start, end]` of segment `i`.
    pub fn segment_bounds(&self, i: usize) -> (f64, f64) {
        let dt = self.segment_width();
        (i as f64 * dt, (i + 1) as f64 * dt)
    }

    pub fn midpoints(&self) -> Vec<f64> {
        let dt = self.segment_width();
        (0..self.n_segments())
            .map(|i| (i as f64 + 0.5) * dt)
            .collect()
    }

    /// `(T/N)·Σ|a_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.segment_width() * self.amplitudes.iter().map(|a| a.abs()).sum::<f64>()
    }

    /// `∫ f dt`.
    pub fn integral(&self) -> f64 {
        self.segment_width() * self.amplitudes.iter().sum::<f64>()
    }

    /// Index of the segment containing `t`; the right endpoint belongs to the last segment.
    pub fn segment_index(&self, t: f64) -> usize {
        let i = (t / self.segment_width()).floor();
        (i.max(0.0) as usize).min(self.n_segments() - 1)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        self.amplitudes[self.segment_index(t)]
    }

    /// The same function on `factor·N` segments.
    pub fn refine(&self, factor: usize) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| std::iter::repeat_n(a, factor.max(1)))
            .collect();
        Self {
            horizon: self.horizon,
            amplitudes,
        }
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            horizon: self.horizon,
            amplitudes: self.amplitudes.iter().map(|a| a + c).collect(),
        }
    }

    /// `f + s·g` for `g` on the same segmentation.
    pub fn add_scaled(&self, g: &PiecewiseControl, s: f64) -> Result<Self> {
        if g.n_segments() != self.n_segments() || g.horizon != self.horizon {
            return Err(LandscapeError::InvalidControl(format!(
                "segmentation mismatch: {} segments on T = {} vs {} on T = {}",
                self.n_segments(),
                self.horizon,
                g.n_segments(),
                g.horizon
            )));
        }
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&g.amplitudes)
            .map(|(a, b)| a + s * b)
            .collect();
        Ok(Self {
            horizon: self.horizon,
            amplitudes,
        })
    }
}

/// Propagators at every segment boundary, `U_0 = I` through `U_T`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    system: ControlSystem,
    control: PiecewiseControl,
    unitaries: Vec<Unitary2>,
}

impl Trajectory {
    pub fn system(&self) -> &ControlSystem {
        &self.system
    }

    pub fn control(&self) -> &PiecewiseControl {
        &self.control
    }

    pub fn horizon(&self) -> f64 {
        self.control.horizon()
    }

    pub fn unitaries(&self) -> &[Unitary2] {
        &self.unitaries
    }

    pub fn final_unitary(&self) -> Unitary2 {
        *self.unitaries.last().expect("trajectory has at least U_0")
    }

    /// `U_t` for any `t ∈ [0, T]`: the nearest stored boundary propagated by
    /// the exact residual exponential of the segment containing `t`.
    pub fn unitary_at(&self, t: f64) -> Result<Unitary2> {
        let horizon = self.horizon();
        let slack = 1e-12 * horizon.max(1.0);
        if !(t >= -slack && t <= horizon + slack) {
            return Err(LandscapeError::TimeOutOfRange { t, horizon });
        }
        let t = t.clamp(0.0, horizon);
        let n = self.control.n_segments();
        let dt = self.control.segment_width();
        let k = ((t / dt).round() as usize).min(n);
        let residual = t - k as f64 * dt;
        let segment = if residual > 0.0 && k < n {
            k
        } else if residual < 0.0 && k > 0 {
            k - 1
        } else {
            return Ok(self.unitaries[k]);
        };
        let hamiltonian = self.system.hamiltonian(self.control.amplitudes()[segment]);
        Ok(hamiltonian.expm(residual) * self.unitaries[k])
    }

    /// Interaction-picture coupling `V_t = U_t† V U_t`.
    pub fn interaction_v(&self, t: f64) -> Result<HermitianOp2> {
        Ok(self.system.v().conjugate_by(&self.unitary_at(t)?))
    }
}

pub fn propagate(sys: &ControlSystem, f: &PiecewiseControl) -> Trajectory {
    propagate_from(sys, f, Unitary2::identity())
}

/// Propagation starting from `initial` instead of the identity.
pub fn propagate_from(sys: &ControlSystem, f: &PiecewiseControl, initial: Unitary2) -> Trajectory {
    let dt = f.segment_width();
    let mut unitaries = Vec::with_capacity(f.n_segments() + 1);
    unitaries.push(initial);
    let mut u = initial;
    for &a in f.amplitudes() {
        u = sys.hamiltonian(a).expm(dt) * u;
        unitaries.push(u);
    }
    Trajectory {
        system: *sys,
        control: f.clone(),
        unitaries,
    }
}

/// `U_T` alone, without storing the intermediate propagators.
pub fn final_unitary(sys: &ControlSystem, f: &PiecewiseControl) -> Unitary2 {
    let dt = f.segment_width();
    f.amplitudes()
        .iter()
        .fold(Unitary2::identity(), |u, &a| sys.hamiltonian(a).expm(dt) * u)
}

pub fn interaction_v(traj: &Trajectory, t: f64) -> Result<HermitianOp2> {
    traj.interaction_v(t)
}

/// Gate fidelity `J = |Tr(W† U_T)|² / 4`.
pub fn objective(w: &Unitary2, u_t: &Unitary2) -> f64 {
    let tr = w
        .matrix()
        .iter()
        .zip(u_t.matrix().iter())
        .map(|(a, b)| a.conj() * b)
        .sum::<num_complex::Complex64>();
    (0.25 * tr.norm_sqr()).min(1.0)
}

/// `J_W[f]` for a control on a system.
pub fn objective_of(sys: &ControlSystem, w: &Unitary2, f: &PiecewiseControl) -> f64 {
    objective(w, &final_unitary(sys, f))
}
