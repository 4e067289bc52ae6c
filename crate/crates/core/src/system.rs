//! The controlled qubit `i dU/dt = (H0 + f(t) V) U` and its canonical form.
//!
//! After removing traces and shifting the control by the special value `f0`,
//! a unitary change of basis `S` and a rescaling of time by `h` bring every
//! non-trivial system to `σz + g(t)(vx σx + vy σy)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::pauli::{
    commutator_norm, spectral_norm, HermitianOp2, Mat2, PauliCoefficients, Unitary2,
};

/// Threshold on commutator norms below which two operators are treated as commuting.
pub const COMMUTING_TOL: f64 = 1e-8;
const DENOMINATOR_TOL: f64 = 1e-12;
const PURE_PHASE_TOL: f64 = 1e-10;

/// Free Hamiltonian `H0` and interaction `V` with `[H0, V] != 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSystem {
    h0: HermitianOp2,
    v: HermitianOp2,
}

impl ControlSystem {
    pub fn new(h0: HermitianOp2, v: HermitianOp2) -> Result<Self> {
        let norm = commutator_norm(&h0, &v);
        if !(norm > COMMUTING_TOL) {
            return Err(LandscapeError::CommutingHamiltonians { norm });
        }
        Ok(Self { h0, v })
    }

    pub fn from_pauli(h0: PauliCoefficients, v: PauliCoefficients) -> Result<Self> {
        Self::new(HermitianOp2::from_pauli(h0), HermitianOp2::from_pauli(v))
    }

    /// `(σz, vx σx + vy σy)`.
    pub fn canonical(vx: f64, vy: f64) -> Result<Self> {
        Self::from_pauli(PauliCoefficients::z(), PauliCoefficients::new(0.0, vx, vy, 0.0))
    }

    /// `(σz, cos α σx + sin α σy)`: unit coupling at angle `α` from the x axis.
    pub fn with_coupling_angle(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::canonical(c, s).expect("unit transverse coupling never commutes with σz")
    }

    pub fn h0(&self) -> &HermitianOp2 {
        &self.h0
    }

    pub fn v(&self) -> &HermitianOp2 {
        &self.v
    }

    /// `H0 + f·V`.
    pub fn hamiltonian(&self, f: f64) -> HermitianOp2 {
        self.h0 + self.v * f
    }
}

/// Special control `f0 = (-Tr H0 Tr V + 2 Tr(H0 V)) / ((Tr V)^2 - 2 Tr V^2)`.
pub fn special_control(sys: &ControlSystem) -> Result<f64> {
    let (h, v) = (sys.h0.pauli(), sys.v.pauli());
    let tr_h = 2.0 * h.c0;
    let tr_v = 2.0 * v.c0;
    let tr_hv = 2.0 * (h.c0 * v.c0 + h.ax * v.ax + h.ay * v.ay + h.az * v.az);
    let tr_v2 = 2.0 * (v.c0 * v.c0 + v.ax * v.ax + v.ay * v.ay + v.az * v.az);
    let denominator = tr_v * tr_v - 2.0 * tr_v2;
    if denominator.abs() < DENOMINATOR_TOL {
        return Err(LandscapeError::DegenerateInteraction { denominator });
    }
    // `+ 0.0` turns a negative zero into zero.
    Ok((-tr_h * tr_v + 2.0 * tr_hv) / denominator + 0.0)
}

/// Traceless drift at the special control, `H̃0 + f0 Ṽ`.
pub fn special_drift(sys: &ControlSystem) -> Result<HermitianOp2> {
    let f0 = special_control(sys)?;
    Ok(sys.h0.traceless() + sys.v.traceless() * f0)
}

/// Special time `T0 = π / ||H̃0 + f0 Ṽ||`.
pub fn special_time(sys: &ControlSystem) -> Result<f64> {
    let norm = special_drift(sys)?.operator_norm();
    if norm < DENOMINATOR_TOL {
        return Err(LandscapeError::VanishingDrift { norm });
    }
    Ok(PI / norm)
}

/// Removes the identity parts of `H0` and `V`, returning the traceless pair and
/// the traces `(Tr H0, Tr V)`. The propagators differ by the phase
/// `λ(T) = (T·Tr H0 + Tr V·∫f dt)/2`.
pub fn recenter_traceless(sys: &ControlSystem) -> (ControlSystem, f64, f64) {
    let recentered = ControlSystem {
        h0: sys.h0.traceless(),
        v: sys.v.traceless(),
    };
    (recentered, sys.h0.trace(), sys.v.trace())
}

/// The system in the frame where the special drift is `h σz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalSystem {
    /// Frame change: `S (H̃0 + f0 Ṽ) S† = h σz`.
    pub s: Unitary2,
    pub h: f64,
    pub vx: f64,
    pub vy: f64,
    pub f0: f64,
    pub trace_h0: f64,
    pub trace_v: f64,
}

impl CanonicalSystem {
    /// `(σz, vx σx + vy σy)`, the system in canonical units.
    pub fn system(&self) -> ControlSystem {
        ControlSystem::canonical(self.vx, self.vy)
            .expect("canonical coupling is transverse and nonzero")
    }

    pub fn coupling_norm(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    /// Angle of `(vx, vy)` from the x axis, in `(-π, π]`.
    pub fn coupling_angle(&self) -> f64 {
        self.vy.atan2(self.vx)
    }

    /// `W -> S W S†`.
    pub fn gate_to_frame(&self, w: &Unitary2) -> Unitary2 {
        self.s * *w * self.s.adjoint()
    }

    /// Time in canonical units, `t·h`.
    pub fn canonical_time(&self, t: f64) -> f64 {
        t * self.h
    }
}

pub fn canonical_frame(sys: &ControlSystem) -> Result<CanonicalSystem> {
    let f0 = special_control(sys)?;
    let (traceless, trace_h0, trace_v) = recenter_traceless(sys);
    let drift = traceless.h0 + traceless.v * f0;
    let h = drift.operator_norm();
    if h < DENOMINATOR_TOL {
        return Err(LandscapeError::VanishingDrift { norm: h });
    }
    let s = eigenframe(&drift);
    let coupling = traceless.v.transform_by(&s).pauli();
    Ok(CanonicalSystem {
        s,
        h,
        vx: coupling.ax / h,
        vy: coupling.ay / h,
        f0,
        trace_h0,
        trace_v,
    })
}

/// Unitary whose rows are the conjugated eigenvectors of a traceless `D`,
/// `+|D|` first, so that `S D S† = |D| σz`.
fn eigenframe(drift: &HermitianOp2) -> Unitary2 {
    let a = drift.pauli();
    let norm = a.vector_norm();
    let (nx, ny, nz) = (a.ax / norm, a.ay / norm, a.az / norm);
    let plus = eigenvector(nx, ny, nz);
    let minus = eigenvector(-nx, -ny, -nz);
    let m = Mat2::new(plus[0].conj(), plus[1].conj(), minus[0].conj(), minus[1].conj());
    Unitary2::from_matrix_unchecked(m)
}

/// +1 eigenvector of `n·σ`, taken from the larger column of the projector
/// `(I + n·σ)/2`, with its first nonzero component real and positive.
fn eigenvector(nx: f64, ny: f64, nz: f64) -> [Complex64; 2] {
    let col0 = [
        Complex64::new(1.0 + nz, 0.0),
        Complex64::new(nx, ny),
    ];
    let col1 = [
        Complex64::new(nx, -ny),
        Complex64::new(1.0 - nz, 0.0),
    ];
    let n0 = col0[0].norm_sqr() + col0[1].norm_sqr();
    let n1 = col1[0].norm_sqr() + col1[1].norm_sqr();
    let (col, n) = if n0 >= n1 { (col0, n0) } else { (col1, n1) };
    let n = n.sqrt();
    let lead = if col[0].norm() > 1e-12 * n { col[0] } else { col[1] };
    let phase = lead.conj() / lead.norm();
    [col[0] * phase / n, col[1] * phase / n]
}

/// Parameters `W = e^{iα_W (H̃0 + f0 Ṽ) + iβ_W}` of a target commuting with
/// the special drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutingAngles {
    pub alpha_w: f64,
    pub beta_w: f64,
    /// `||H̃0 + f0 Ṽ||`.
    pub d: f64,
}

impl CommutingAngles {
    /// `φ_W = α_W·d`, the target angle in canonical units.
    pub fn phi_w(&self) -> f64 {
        self.alpha_w * self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateAngles {
    /// `α_W ∈ (0, π/d)`.
    Commuting(CommutingAngles),
    /// `W ∝ I`; reported with `α_W = π/d`.
    PurePhase(CommutingAngles),
    Noncommuting { commutator_norm: f64, d: f64 },
}

impl GateAngles {
    pub fn d(&self) -> f64 {
        match *self {
            GateAngles::Commuting(a) | GateAngles::PurePhase(a) => a.d,
            GateAngles::Noncommuting { d, .. } => d,
        }
    }

    pub fn angles(&self) -> Option<CommutingAngles> {
        match *self {
            GateAngles::Commuting(a) | GateAngles::PurePhase(a) => Some(a),
            GateAngles::Noncommuting { .. } => None,
        }
    }
}

/// Reads `(α_W, β_W)` off the eigenphases of `W` in the eigenbasis of the
/// special drift. The eigenphase gap `Δ ∈ [0, 2π)` gives `α_W = Δ/(2d)`.
pub fn gate_angles(w: &Unitary2, sys: &ControlSystem) -> Result<GateAngles> {
    let deviation = w.unitarity_deviation();
    if !(deviation <= crate::pauli::UNITARY_TOL) {
        return Err(LandscapeError::NotUnitary { deviation });
    }
    let drift = special_drift(sys)?;
    let d = drift.operator_norm();
    let dm = drift.matrix();
    let comm = spectral_norm(&(dm * w.matrix() - w.matrix() * dm));
    if comm > COMMUTING_TOL {
        return Ok(GateAngles::Noncommuting {
            commutator_norm: comm,
            d,
        });
    }
    let s = eigenframe(&drift);
    let diag = s * *w * s.adjoint();
    let arg_plus = diag.matrix()[(0, 0)].arg();
    let arg_minus = diag.matrix()[(1, 1)].arg();
    let gap = (arg_plus - arg_minus).rem_euclid(TAU);
    if gap < PURE_PHASE_TOL || TAU - gap < PURE_PHASE_TOL {
        let alpha_w = PI / d;
        return Ok(GateAngles::PurePhase(CommutingAngles {
            alpha_w,
            beta_w: (arg_plus - PI).rem_euclid(TAU),
            d,
        }));
    }
    let alpha_w = gap / (2.0 * d);
    Ok(GateAngles::Commuting(CommutingAngles {
        alpha_w,
        beta_w: (arg_plus - alpha_w * d).rem_euclid(TAU),
        d,
    }))
}
