//! Random sampling around the special control.
//!
//! Every control sample is a pure function of `(seed, sample_index)`, so the
//! same samples are reused across all cells of a map. This makes the map
//! reproducible under any thread schedule, and it means two cells that differ
//! only by a rotation of the coupling see exactly the same controls.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::pauli::{sigma_z, spectral_norm, Unitary2};
use crate::propagator::{final_unitary, objective, PiecewiseControl};
use crate::system::{special_control, ControlSystem, COMMUTING_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub n_segments: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub amplitude_scale: f64,
    pub horizon: f64,
}

impl SamplingConfig {
    pub const DEFAULT_SEGMENTS: usize = 100;
    pub const DEFAULT_SAMPLES: usize = 1000;

    pub fn new(horizon: f64) -> Self {
        Self {
            n_segments: Self::DEFAULT_SEGMENTS,
            n_samples: Self::DEFAULT_SAMPLES,
            seed: 0,
            amplitude_scale: 1.0,
            horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_segments == 0 || self.n_samples == 0 {
            return Err(LandscapeError::InvalidConfig(
                "n_segments and n_samples must be at least 1".into(),
            ));
        }
        if !(self.amplitude_scale > 0.0 && self.amplitude_scale.is_finite()) {
            return Err(LandscapeError::InvalidConfig(format!(
                "amplitude_scale must be positive, got {}",
                self.amplitude_scale
            )));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(LandscapeError::InvalidConfig(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// Zero-mean random control: i.i.d. `N(0, scale²)` segment amplitudes.
pub fn random_control(cfg: &SamplingConfig, sample_index: u64) -> PiecewiseControl {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(sample_index);
    let amplitudes = (0..cfg.n_segments)
        .map(|_| cfg.amplitude_scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    PiecewiseControl::new(cfg.horizon, amplitudes).expect("validated sampling config")
}

/// `(J0, P)` with `J0 = J[f0]` and `P = #{J[f0 + g] < J0} / M`.
pub fn neighborhood_probability(sys: &ControlSystem, w: &Unitary2, cfg: &SamplingConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let f0 = special_control(sys)?;
    let j0 = objective(w, &final_unitary(sys, &PiecewiseControl::constant(cfg.horizon, 1, f0)?));
    let below = (0..cfg.n_samples as u64)
        .into_par_iter()
        .filter(|&k| {
            let f = random_control(cfg, k).shifted(f0);
            objective(w, &final_unitary(sys, &f)) < j0
        })
        .count();
    Ok((j0, below as f64 / cfg.n_samples as f64))
}

/// `W = e^{iσz φ_W}`.
pub fn diagonal_target(phi_w: f64) -> Unitary2 {
    Unitary2::z_rotation(phi_w)
}

/// `k·2π/n` for `k = 0..n`.
pub fn default_alpha_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}

/// `(k+1)·π/n` for `k = 0..n`.
pub fn default_phi_w_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| PI * (k + 1) as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityMap {
    pub alpha_grid: Vec<f64>,
    pub phi_w_grid: Vec<f64>,
    /// `j0[i][j]` at `(alpha_grid[i], phi_w_grid[j])`.
    pub j0: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub config: SamplingConfig,
}

impl ProbabilityMap {
    /// Index of the largest `p`; the first one in row-major order on ties.
    pub fn argmax_p(&self) -> (usize, usize) {
        let mut best = (0, 0);
        for (i, row) in self.p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > self.p[best.0][best.1] {
                    best = (i, j);
                }
            }
        }
        best
    }

    pub fn max_p(&self) -> f64 {
        let (i, j) = self.argmax_p();
        self.p[i][j]
    }

    /// `alpha,phi_w,j0,p`, one row per cell, `α` outermost.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "alpha,phi_w,j0,p")?;
        for (i, &alpha) in self.alpha_grid.iter().enumerate() {
            for (j, &phi_w) in self.phi_w_grid.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_g10(alpha),
                    format_g10(phi_w),
                    format_g10(self.j0[i][j]),
                    format_g10(self.p[i][j])
                )?;
            }
        }
        Ok(())
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(LandscapeError::InvalidGrid(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(LandscapeError::InvalidGrid(format!("{name} grid has non-finite entries")));
    }
    Ok(())
}

/// Diagonal entries of `U_T` for every sample, with `H0 = σz` and
/// `V = cos α σx + sin α σy`.
fn sample_diagonals(alpha: f64, cfg: &SamplingConfig) -> Vec<(Complex64, Complex64)> {
    let sys = ControlSystem::with_coupling_angle(alpha);
    (0..cfg.n_samples as u64)
        .map(|k| {
            let u = final_unitary(&sys, &random_control(cfg, k));
            (u.matrix()[(0, 0)], u.matrix()[(1, 1)])
        })
        .collect()
}

/// `J` for `W = e^{iσz φ_W}` from the diagonal of `U_T`.
fn diagonal_objective(phi_w: f64, (u00, u11): (Complex64, Complex64)) -> f64 {
    let e = Complex64::from_polar(1.0, -phi_w);
    let tr = e * u00 + e.conj() * u11;
    (0.25 * tr.norm_sqr()).min(1.0)
}

/// `J0` and `P` over an `(α, φ_W)` grid for `H0 = σz`, where the special
/// control is zero.
pub fn probability_map(alpha_grid: &[f64], phi_w_grid: &[f64], cfg: &SamplingConfig) -> Result<ProbabilityMap> {
    cfg.validate()?;
    check_grid("alpha", alpha_grid)?;
    check_grid("phi_w", phi_w_grid)?;
    let zero = PiecewiseControl::constant(cfg.horizon, 1, 0.0)?;
    let rows: Vec<(Vec<f64>, Vec<f64>)> = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let u0 = final_unitary(&ControlSystem::with_coupling_angle(alpha), &zero);
            let d0 = (u0.matrix()[(0, 0)], u0.matrix()[(1, 1)]);
            let samples = sample_diagonals(alpha, cfg);
            phi_w_grid
                .iter()
                .map(|&phi_w| {
                    let j0 = diagonal_objective(phi_w, d0);
                    let below = samples
                        .iter()
                        .filter(|&&d| diagonal_objective(phi_w, d) < j0)
                        .count();
                    (j0, below as f64 / cfg.n_samples as f64)
                })
                .unzip()
        })
        .collect();
    let (j0, p) = rows.into_iter().unzip();
    Ok(ProbabilityMap {
        alpha_grid: alpha_grid.to_vec(),
        phi_w_grid: phi_w_grid.to_vec(),
        j0,
        p,
        config: *cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha: f64,
    pub j0: f64,
    pub p: f64,
}

/// `P(α)` for an arbitrary target with `H0 = σz`, `V = cos α σx + sin α σy`.
pub fn alpha_scan(w: &Unitary2, alpha_grid: &[f64], cfg: &SamplingConfig) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    check_grid("alpha", alpha_grid)?;
    alpha_grid
        .par_iter()
        .map(|&alpha| {
            let sys = ControlSystem::with_coupling_angle(alpha);
            let (j0, p) = neighborhood_probability(&sys, w, cfg)?;
            Ok(ScanPoint { alpha, j0, p })
        })
        .collect()
}

pub fn hadamard_scan(alpha_grid: &[f64], cfg: &SamplingConfig) -> Result<Vec<ScanPoint>> {
    alpha_scan(&Unitary2::hadamard(), alpha_grid, cfg)
}

/// `alpha,p`, one row per point.
pub fn write_scan_csv<W: Write>(points: &[ScanPoint], mut out: W) -> io::Result<()> {
    writeln!(out, "alpha,p")?;
    for pt in points {
        writeln!(out, "{},{}", format_g10(pt.alpha), format_g10(pt.p))?;
    }
    Ok(())
}

/// `J` for the same control under couplings at angles `alpha1` and `alpha2`.
/// Requires `[W, σz] = 0`.
pub fn rotation_invariance_check(
    w: &Unitary2,
    f: &PiecewiseControl,
    alpha1: f64,
    alpha2: f64,
) -> Result<(f64, f64)> {
    let z = sigma_z();
    let norm = spectral_norm(&(w.matrix() * z - z * w.matrix()));
    if norm > COMMUTING_TOL {
        return Err(LandscapeError::TargetNotDiagonal { norm });
    }
    let j = |alpha: f64| objective(w, &final_unitary(&ControlSystem::with_coupling_angle(alpha), f));
    Ok((j(alpha1), j(alpha2)))
}

/// Ten significant digits in the style of C's `%.10g`.
pub fn format_g10(x: f64) -> String {
    const DIGITS: i32 = 10;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
