//! Run configuration: a TOML file merged under command-line flags.

use std::f64::consts::{FRAC_PI_3, PI};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qubit_landscape::montecarlo::{default_alpha_grid, default_phi_w_grid};
use qubit_landscape::pauli::{HermitianOp2, Mat2};
use qubit_landscape::{ControlSystem, PauliCoefficients, Unitary2};

use crate::AppError;

/// Either a point count for the default range or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Count(usize),
    Values(Vec<f64>),
}

impl GridSpec {
    /// `"64"` is a count, anything else a comma-separated list.
    pub fn parse(s: &str) -> Result<Self, String> {
        if let Ok(n) = s.trim().parse::<usize>() {
            return if n == 0 {
                Err("grid needs at least one point".into())
            } else {
                Ok(GridSpec::Count(n))
            };
        }
        let values = parse_reals(s)?;
        if values.is_empty() {
            return Err("grid needs at least one point".into());
        }
        Ok(GridSpec::Values(values))
    }

    fn resolve(&self, default: fn(usize) -> Vec<f64>) -> Vec<f64> {
        match self {
            GridSpec::Count(n) => default(*n),
            GridSpec::Values(v) => v.clone(),
        }
    }
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number {p:?}: {e}")))
        .collect()
}

/// Every setting any command reads. Absent fields take command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub h0: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
    pub gate: Option<String>,
    pub phi: Option<f64>,
    pub t: Option<f64>,
    pub segments: Option<usize>,
    pub samples: Option<usize>,
    pub scale: Option<f64>,
    pub seed: Option<u64>,
    pub alpha_grid: Option<GridSpec>,
    pub phiw_grid: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub starts: Option<usize>,
    pub step: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| AppError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; h0, v, gate, phi, t, segments, samples, scale, seed,
            alpha_grid, phiw_grid, out, starts, step, max_iters, tol)
    }

    pub fn system(&self) -> Result<ControlSystem, AppError> {
        let h0 = hermitian("h0", self.h0.as_deref().unwrap_or(&[0.0, 0.0, 0.0, 1.0]))?;
        let v = hermitian("v", self.v.as_deref().unwrap_or(&[0.0, 1.0, 0.0, 0.0]))?;
        Ok(ControlSystem::new(h0, v)?)
    }

    pub fn target(&self) -> Result<Unitary2, AppError> {
        parse_gate(self.gate.as_deref().unwrap_or("hadamard"), self.phi)
    }

    pub fn horizon(&self, default: f64) -> Result<f64, AppError> {
        let t = self.t.unwrap_or(default);
        if !(t > 0.0 && t.is_finite()) {
            return Err(AppError::Usage(format!("--t must be positive, got {t}")));
        }
        Ok(t)
    }

    pub fn alpha_grid(&self) -> Vec<f64> {
        self.alpha_grid
            .as_ref()
            .unwrap_or(&GridSpec::Count(64))
            .resolve(default_alpha_grid)
    }

    pub fn phi_w_grid(&self) -> Vec<f64> {
        self.phiw_grid
            .as_ref()
            .unwrap_or(&GridSpec::Count(64))
            .resolve(default_phi_w_grid)
    }
}

pub const SCAN_HORIZON: f64 = FRAC_PI_3;
pub const OPTIMIZE_HORIZON: f64 = PI;
pub const CLASSIFY_HORIZON: f64 = PI;

fn hermitian(name: &str, values: &[f64]) -> Result<HermitianOp2, AppError> {
    match values.len() {
        4 => Ok(HermitianOp2::from_pauli(PauliCoefficients::new(
            values[0], values[1], values[2], values[3],
        ))),
        8 => Ok(HermitianOp2::new(&complex_matrix(values))?),
        n => Err(AppError::Usage(format!(
            "--{name} takes 4 Pauli coefficients or 8 reals, got {n} values"
        ))),
    }
}

fn complex_matrix(e: &[f64]) -> Mat2 {
    use num_complex::Complex64 as C;
    Mat2::new(C::new(e[0], e[1]), C::new(e[2], e[3]), C::new(e[4], e[5]), C::new(e[6], e[7]))
}

/// `hadamard`, `phase` (angle from `--phi`), `phase:<φ>`, or
/// `custom:<8 reals>` in row-major `re, im` order.
pub fn parse_gate(name: &str, phi: Option<f64>) -> Result<Unitary2, AppError> {
    let (kind, rest) = name.split_once(':').unwrap_or((name, ""));
    match kind.trim().to_ascii_lowercase().as_str() {
        "hadamard" if rest.is_empty() => Ok(Unitary2::hadamard()),
        "phase" => {
            let phi = if rest.is_empty() {
                phi.ok_or_else(|| AppError::Usage("gate 'phase' needs --phi".into()))?
            } else {
                rest.trim().parse().map_err(|e| AppError::Usage(format!("bad phase {rest:?}: {e}")))?
            };
            Ok(Unitary2::phase_shift(phi))
        }
        "custom" => {
            let e = parse_reals(rest).map_err(AppError::Usage)?;
            if e.len() != 8 {
                return Err(AppError::Usage(format!("custom gate takes 8 reals, got {}", e.len())));
            }
            Ok(Unitary2::new(complex_matrix(&e))?)
        }
        _ => Err(AppError::Usage(format!(
            "unknown gate {name:?}; expected hadamard, phase, phase:<phi> or custom:<8 reals>"
        ))),
    }
}
