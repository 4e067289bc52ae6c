//! First and second variations of the gate fidelity.
//!
//! With `Y = W† U_T` and `V_t = U_t† V U_t`:
//!
//! ```text
//! δJ/δf(t)          = ½ Im(Tr Y† · Tr(Y V_t))
//! δ²J/δf(t₂)δf(t₁)  = ½ Re(Tr(Y V_{t₁}) Tr(Y† V_{t₂}) − Tr(Y V_{t₂} V_{t₁}) Tr Y†),  t₂ ≥ t₁
//! ```
//!
//! and the `t₂ < t₁` branch swaps the roles so the later time is always on the
//! left of the product. Both are invariant under `Y → e^{iω} Y`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};
use crate::pauli::{HermitianOp2, Mat2, PauliCoefficients, Unitary2};
use crate::propagator::{PiecewiseControl, Trajectory};

/// `Y = W† U_T`.
pub fn y_matrix(traj: &Trajectory, w: &Unitary2) -> Unitary2 {
    w.adjoint() * traj.final_unitary()
}

/// `L(X) = ½ Im(Tr Y† · Tr(Y X))`.
pub fn l_functional(y: &Unitary2, x: &HermitianOp2) -> f64 {
    let tr_y = y.trace();
    let tr_yx = trace_of_product(y.matrix(), &x.matrix());
    0.5 * (tr_y.conj() * tr_yx).im
}

fn trace_of_product(a: &Mat2, b: &Mat2) -> Complex64 {
    a[(0, 0)] * b[(0, 0)] + a[(0, 1)] * b[(1, 0)] + a[(1, 0)] * b[(0, 1)] + a[(1, 1)] * b[(1, 1)]
}

/// Samples of `δJ/δf(t)` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientProfile {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl GradientProfile {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn check_grid(times: &[f64], horizon: f64) -> Result<()> {
    if times.is_empty() {
        return Err(LandscapeError::InvalidGrid("grid is empty".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LandscapeError::InvalidGrid(
            "grid times must be strictly increasing".into(),
        ));
    }
    let slack = 1e-12 * horizon.max(1.0);
    let (first, last) = (times[0], times[times.len() - 1]);
    if first < -slack || last > horizon + slack {
        return Err(LandscapeError::InvalidGrid(format!(
            "grid [{first}, {last}] leaves [0, {horizon}]"
        )));
    }
    Ok(())
}

pub fn gradient_profile(traj: &Trajectory, w: &Unitary2, grid: &[f64]) -> Result<GradientProfile> {
    check_grid(grid, traj.horizon())?;
    let y = y_matrix(traj, w);
    let values = grid
        .iter()
        .map(|&t| Ok(l_functional(&y, &traj.interaction_v(t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GradientProfile {
        times: grid.to_vec(),
        values,
    })
}

/// `∂J/∂a_j = ∫_{segment j} δJ/δf(t) dt`, integrated in closed form.
///
/// Inside a segment with generator `H = c0 + a·σ`, the Heisenberg-picture
/// coupling precesses about `n = a/|a|` at angular rate `2|a|`, so its time
/// integral is a fixed combination of the parallel, perpendicular and
/// `n × v` parts.
pub fn segment_gradient(traj: &Trajectory, w: &Unitary2) -> Vec<f64> {
    let y = y_matrix(traj, w);
    let control = traj.control();
    let dt = control.segment_width();
    let v = traj.system().v().pauli();
    control
        .amplitudes()
        .iter()
        .zip(traj.unitaries())
        .map(|(&a, u)| {
            let averaged = precession_integral(&traj.system().hamiltonian(a).pauli(), &v, dt);
            l_functional(&y, &HermitianOp2::from_pauli(averaged).conjugate_by(u))
        })
        .collect()
}

/// `∫_0^dt e^{iHτ} V e^{-iHτ} dτ` in Pauli coefficients.
fn precession_integral(h: &PauliCoefficients, v: &PauliCoefficients, dt: f64) -> PauliCoefficients {
    let a = h.vector_norm();
    if a < 1e-14 {
        return *v * dt;
    }
    let n = [h.ax / a, h.ay / a, h.az / a];
    let vv = v.vector();
    let along = n[0] * vv[0] + n[1] * vv[1] + n[2] * vv[2];
    let par = [along * n[0], along * n[1], along * n[2]];
    let perp = [vv[0] - par[0], vv[1] - par[1], vv[2] - par[2]];
    let cross = [
        n[1] * vv[2] - n[2] * vv[1],
        n[2] * vv[0] - n[0] * vv[2],
        n[0] * vv[1] - n[1] * vv[0],
    ];
    let omega = 2.0 * a;
    let (s, c) = (omega * dt).sin_cos();
    let k_perp = s / omega;
    let k_cross = (1.0 - c) / omega;
    let comp = |i: usize| dt * par[i] + k_perp * perp[i] - k_cross * cross[i];
    PauliCoefficients::new(v.c0 * dt, comp(0), comp(1), comp(2))
}

/// Kernel value for an ordered pair of couplings, `early` at the smaller time.
fn kernel_ordered(y: &Mat2, tr_y_conj: Complex64, early: &Mat2, late: &Mat2) -> f64 {
    let a_early = trace_of_product(y, early);
    let a_late = trace_of_product(y, late);
    let yl = y * late;
    let second = trace_of_product(&yl, early);
    0.5 * (a_early * a_late.conj() - second * tr_y_conj).re
}

pub fn hessian_kernel(traj: &Trajectory, w: &Unitary2, t1: f64, t2: f64) -> Result<f64> {
    let y = y_matrix(traj, w);
    let (early, late) = if t2 >= t1 { (t1, t2) } else { (t2, t1) };
    let ve = traj.interaction_v(early)?.matrix();
    let vl = traj.interaction_v(late)?.matrix();
    Ok(kernel_ordered(y.matrix(), y.trace().conj(), &ve, &vl))
}

/// Second-variation kernel sampled on a node grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianGrid {
    horizon: f64,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl HessianGrid {
    /// Samples the kernel at every pair of `times`. Nodes need not cover all
    /// of `[0, T]`; see [`second_variation`].
    pub fn build(traj: &Trajectory, w: &Unitary2, times: &[f64]) -> Result<Self> {
        check_grid(times, traj.horizon())?;
        let y = y_matrix(traj, w);
        let ym = *y.matrix();
        let tr_conj = y.trace().conj();
        let couplings = times
            .iter()
            .map(|&t| traj.interaction_v(t).map(|v| v.matrix()))
            .collect::<Result<Vec<_>>>()?;
        let traces: Vec<Complex64> = couplings.iter().map(|v| trace_of_product(&ym, v)).collect();
        let m = times.len();
        let mut values = vec![0.0; m * m];
        // Row i holds the pairs (i, j >= i); the lower triangle is mirrored after.
        values
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, row)| {
                for j in i..m {
                    let yl = ym * couplings[j];
                    let second = trace_of_product(&yl, &couplings[i]);
                    row[j] = 0.5 * (traces[i] * traces[j].conj() - second * tr_conj).re;
                }
            });
        for i in 0..m {
            for j in 0..i {
                values[i * m + j] = values[j * m + i];
            }
        }
        Ok(Self {
            horizon: traj.horizon(),
            times: times.to_vec(),
            values,
        })
    }

    /// Uniform grid with `nodes_per_segment` intervals in each control segment,
    /// boundaries included.
    pub fn uniform(traj: &Trajectory, w: &Unitary2, nodes_per_segment: usize) -> Result<Self> {
        let n = traj.control().n_segments() * nodes_per_segment.max(1);
        let h = traj.horizon() / n as f64;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        Self::build(traj, w, &times)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.times.len() + j]
    }
}

/// `(g, Hess g) = ∫∫ Hess(t₁, t₂) g(t₁) g(t₂) dt₁ dt₂` by the product
/// trapezoidal rule: the kernel is interpolated bilinearly between nodes and
/// the piecewise-constant perturbation is integrated exactly against each
/// node's hat function. When the perturbation's breakpoints are nodes this is
/// the composite trapezoidal rule on every pair of segments.
pub fn second_variation(grid: &HessianGrid, perturbation: &PiecewiseControl) -> Result<f64> {
    let horizon = perturbation.horizon();
    if (grid.horizon - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(LandscapeError::HorizonMismatch {
            grid: grid.horizon,
            perturbation: horizon,
        });
    }
    let weights = hat_weights(&grid.times, perturbation)?;
    let m = grid.len();
    let total = (0..m)
        .filter(|&i| weights[i] != 0.0)
        .map(|i| {
            let row = &grid.values[i * m..(i + 1) * m];
            weights[i] * row.iter().zip(&weights).map(|(k, w)| k * w).sum::<f64>()
        })
        .sum();
    Ok(total)
}

/// `∫ hat_p(t) g(t) dt` for every node `p`.
fn hat_weights(times: &[f64], g: &PiecewiseControl) -> Result<Vec<f64>> {
    let m = times.len();
    let dt = g.segment_width();
    let slack = 1e-9 * dt;
    let (first, last) = (times[0], times[m - 1]);
    for (i, &a) in g.amplitudes().iter().enumerate() {
        let (lo, hi) = g.segment_bounds(i);
        if a != 0.0 && (lo < first - slack || hi > last + slack) {
            return Err(LandscapeError::InvalidGrid(format!(
                "perturbation segment [{lo}, {hi}] is not covered by nodes [{first}, {last}]"
            )));
        }
    }
    let mut weights = vec![0.0; m];
    for p in 0..m.saturating_sub(1) {
        let (a, b) = (times[p], times[p + 1]);
        let width = b - a;
        let first_seg = g.segment_index(a);
        let last_seg = g.segment_index(b);
        for seg in first_seg..=last_seg {
            let amp = g.amplitudes()[seg];
            if amp == 0.0 {
                continue;
            }
            let (lo, hi) = g.segment_bounds(seg);
            let (u0, u1) = (lo.max(a), hi.min(b));
            if u1 <= u0 {
                continue;
            }
            // ∫ (t - a)/width over [u0, u1] goes to the right node, the rest to the left.
            let right = ((u1 - a).powi(2) - (u0 - a).powi(2)) / (2.0 * width);
            let left = (u1 - u0) - right;
            weights[p] += amp * left;
            weights[p + 1] += amp * right;
        }
    }
    Ok(weights)
}

/// Angles of `Y = e^{iω} [[e^{iφ}cos θ, e^{iψ}sin θ], [-e^{-iψ}sin θ, e^{-iφ}cos θ]]`.
///
/// Branches: `ω = ½ arg det Y ∈ (-π/2, π/2]`, `θ ∈ [0, π/2]`, `φ, ψ ∈ (-π, π]`;
/// `φ` is set to 0 when `cos θ = 0` and `ψ` to 0 when `sin θ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YAngles {
    pub phi: f64,
    pub psi: f64,
    pub theta: f64,
    pub omega: f64,
}

impl YAngles {
    pub fn reconstruct(&self) -> Unitary2 {
        let (st, ct) = self.theta.sin_cos();
        let a = Complex64::from_polar(ct, self.phi);
        let b = Complex64::from_polar(st, self.psi);
        let m = Mat2::new(a, b, -b.conj(), a.conj());
        Unitary2::from_matrix_unchecked(m).scale_phase(self.omega)
    }

    /// `J = cos²φ cos²θ` at the point where `Y` was taken.
    pub fn objective(&self) -> f64 {
        (self.phi.cos() * self.theta.cos()).powi(2)
    }

    /// `L(σx) = 2 cos φ cos θ sin θ sin ψ`.
    pub fn l_sigma_x(&self) -> f64 {
        2.0 * self.phi.cos() * self.theta.cos() * self.theta.sin() * self.psi.sin()
    }

    /// `L(σy) = 2 cos φ cos θ sin θ cos ψ`.
    pub fn l_sigma_y(&self) -> f64 {
        2.0 * self.phi.cos() * self.theta.cos() * self.theta.sin() * self.psi.cos()
    }
}

const ANGLE_CUTOFF: f64 = 1e-14;

pub fn y_angles(y: &Unitary2) -> YAngles {
    let omega = 0.5 * y.determinant().arg();
    let special = y.scale_phase(-omega);
    let m = special.matrix();
    let (diag, off) = (m[(0, 0)], m[(0, 1)]);
    let theta = off.norm().atan2(diag.norm());
    let phi = if diag.norm() > ANGLE_CUTOFF { diag.arg() } else { 0.0 };
    let psi = if off.norm() > ANGLE_CUTOFF { off.arg() } else { 0.0 };
    YAngles {
        phi,
        psi,
        theta,
        omega,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::max_abs;
    use crate::propagator::{objective, propagate};
    use crate::system::ControlSystem;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn random_unitary(q: [f64; 4], phase: f64) -> Unitary2 {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [a, b, c, d] = q.map(|x| x / n);
        let m = Mat2::new(
            Complex64::new(a, b),
            Complex64::new(c, d),
            Complex64::new(-c, d),
            Complex64::new(a, -b),
        );
        Unitary2::new(m).unwrap().scale_phase(phase)
    }

    fn sample_trajectory() -> Trajectory {
        let sys = ControlSystem::from_pauli(
            PauliCoefficients::new(0.4, 0.3, -0.2, 1.1),
            PauliCoefficients::new(-0.1, 0.8, 0.5, -0.3),
        )
        .unwrap();
        let f = PiecewiseControl::new(2.1, vec![0.5, -1.0, 0.25, 1.5, -0.7]).unwrap();
        propagate(&sys, &f)
    }

    #[test]
    fn gradient_vanishes_at_global_maximum() {
        let traj = sample_trajectory();
        let w = traj.final_unitary();
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 2.1 / 20.0).collect();
        let g = gradient_profile(&traj, &w, &grid).unwrap();
        assert!(g.max_abs() < 1e-14);
    }

    #[test]
    fn gradient_vanishes_for_diagonal_target_at_zero_control() {
        let sys = ControlSystem::canonical(0.6, 0.8).unwrap();
        let t = 1.3;
        let traj = propagate(&sys, &PiecewiseControl::constant(t, 4, 0.0).unwrap());
        // W = e^{-iσz(T + φ)} for an arbitrary φ.
        let w = HermitianOp2::from_pauli(PauliCoefficients::z()).expm(t + 0.4);
        let grid: Vec<f64> = (0..=13).map(|k| k as f64 * 0.1).collect();
        assert!(gradient_profile(&traj, &w, &grid).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn gradient_profile_rejects_bad_grid() {
        let traj = sample_trajectory();
        let w = Unitary2::hadamard();
        assert!(gradient_profile(&traj, &w, &[0.5, 0.4]).is_err());
        assert!(gradient_profile(&traj, &w, &[0.5, 2.2]).is_err());
        assert!(gradient_profile(&traj, &w, &[]).is_err());
    }

    #[test]
    fn segment_gradient_matches_gauss_legendre() {
        // 5-point Gauss-Legendre on each segment of the sampled profile.
        const NODES: [f64; 5] = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.236_926_885_056_189,
            0.478_628_670_499_366,
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
        ];
        let traj = sample_trajectory();
        let w = random_unitary([0.3, -0.2, 0.9, 0.1], 0.7);
        let exact = segment_gradient(&traj, &w);
        let f = traj.control();
        for (j, &e) in exact.iter().enumerate() {
            let (lo, hi) = f.segment_bounds(j);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            let times: Vec<f64> = NODES.iter().map(|x| mid + half * x).collect();
            let prof = gradient_profile(&traj, &w, &times).unwrap();
            let quad: f64 = half * prof.values.iter().zip(WEIGHTS).map(|(v, w)| v * w).sum::<f64>();
            assert!((quad - e).abs() < 1e-9, "segment {j}: {quad} vs {e}");
        }
    }

    #[test]
    fn commuting_critical_kernel_closed_form() {
        // Canonical system, zero control, W = e^{iσz φ_W}: Y = e^{-iσz(φ_W + T)}.
        let (v, coupling_angle) = (1.0, 0.0);
        let sys = ControlSystem::canonical(v * f64::cos(coupling_angle), v * f64::sin(coupling_angle)).unwrap();
        let t_total = 1.0;
        let phi_w = PI / 4.0;
        let traj = propagate(&sys, &PiecewiseControl::constant(t_total, 1, 0.0).unwrap());
        let w = Unitary2::z_rotation(phi_w);
        let phi = -phi_w - t_total;
        for &(t1, t2) in &[(0.2, 0.2), (0.1, 0.7), (0.9, 0.3), (0.0, 1.0)] {
            let k = hessian_kernel(&traj, &w, t1, t2).unwrap();
            let s: f64 = f64::abs(t2 - t1);
            let expected = -2.0 * v * v * phi.cos() * (2.0 * s + phi).cos();
            assert!((k - expected).abs() < 1e-12, "({t1},{t2}): {k} vs {expected}");
        }
    }

    #[test]
    fn kernel_equal_times_for_identity_like_y() {
        // φ_W = -T makes Y = I, so Hess(t,t) = -2v²cos(0)cos(0) = -2 for v = 1.
        let sys = ControlSystem::canonical(1.0, 0.0).unwrap();
        let traj = propagate(&sys, &PiecewiseControl::constant(0.8, 2, 0.0).unwrap());
        let w = Unitary2::z_rotation(-0.8);
        let k = hessian_kernel(&traj, &w, 0.3, 0.3).unwrap();
        assert!((k + 2.0).abs() < 1e-12);
    }

    #[test]
    fn hessian_grid_is_exactly_symmetric() {
        let traj = sample_trajectory();
        let w = random_unitary([0.1, 0.5, -0.4, 0.2], -1.0);
        let grid = HessianGrid::uniform(&traj, &w, 3).unwrap();
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                assert_eq!(grid.get(i, j), grid.get(j, i));
            }
        }
        let k = hessian_kernel(&traj, &w, grid.times()[4], grid.times()[9]).unwrap();
        assert!((k - grid.get(4, 9)).abs() < 1e-14);
        let k_swapped = hessian_kernel(&traj, &w, grid.times()[9], grid.times()[4]).unwrap();
        assert_eq!(k, k_swapped);
    }

    #[test]
    fn second_variation_zero_and_mismatch() {
        let traj = sample_trajectory();
        let w = Unitary2::hadamard();
        let grid = HessianGrid::uniform(&traj, &w, 2).unwrap();
        let zero = PiecewiseControl::constant(2.1, 5, 0.0).unwrap();
        assert_eq!(second_variation(&grid, &zero).unwrap(), 0.0);
        let other = PiecewiseControl::constant(2.0, 5, 1.0).unwrap();
        assert!(matches!(
            second_variation(&grid, &other),
            Err(LandscapeError::HorizonMismatch { .. })
        ));
    }

    #[test]
    fn second_variation_of_constant_kernel_is_exact() {
        // Y = I and V_t = V for a drift-free system is not constructible, but a
        // constant kernel block can be checked through the hat weights directly.
        let g = PiecewiseControl::new(1.0, vec![0.0, 2.0, -1.0, 0.0]).unwrap();
        let times = [0.0, 0.1, 0.35, 0.5, 0.6, 1.0];
        let w = hat_weights(&times, &g).unwrap();
        let total: f64 = w.iter().sum();
        assert!((total - g.integral()).abs() < 1e-15);
    }

    #[test]
    fn sparse_nodes_must_cover_support() {
        let g = PiecewiseControl::new(1.0, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(hat_weights(&[0.0, 0.25, 0.75, 1.0], &g).is_ok());
        assert!(hat_weights(&[0.0, 0.25], &g).is_err());
    }

    #[test]
    fn y_angles_examples() {
        let a = y_angles(&Unitary2::identity());
        assert_eq!((a.phi, a.theta, a.omega), (0.0, 0.0, 0.0));
        assert_eq!(a.objective(), 1.0);

        let alpha = 0.9;
        let y = HermitianOp2::from_pauli(PauliCoefficients::z()).expm(alpha);
        let a = y_angles(&y);
        assert!((a.phi + alpha).abs() < 1e-15 && a.theta.abs() < 1e-15);
        assert!((a.objective() - alpha.cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn l_functional_examples() {
        // sin θ = 0: L(σx) = 0.
        let y = Unitary2::z_rotation(0.7).scale_phase(0.3);
        let x = HermitianOp2::from_pauli(PauliCoefficients::x());
        assert!(l_functional(&y, &x).abs() < 1e-15);
        let traceless = HermitianOp2::from_pauli(PauliCoefficients::new(0.0, 0.4, -1.0, 2.0));
        assert_eq!(l_functional(&Unitary2::identity(), &traceless), 0.0);
    }

    #[test]
    fn objective_at_zero_from_angles() {
        let traj = propagate(
            &ControlSystem::canonical(1.0, 0.0).unwrap(),
            &PiecewiseControl::constant(FRAC_PI_3, 1, 0.0).unwrap(),
        );
        let y = y_matrix(&traj, &Unitary2::hadamard());
        let a = y_angles(&y);
        assert!((a.objective() - objective(&Unitary2::hadamard(), &traj.final_unitary())).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn y_angles_reconstruct(a in -1.0..1.0f64, b in -1.0..1.0f64, c in -1.0..1.0f64, d in -1.0..1.0f64, phase in -4.0..4.0f64) {
            prop_assume!(a * a + b * b + c * c + d * d > 1e-3);
            let y = random_unitary([a, b, c, d], phase);
            let angles = y_angles(&y);
            let back = angles.reconstruct();
            prop_assert!(max_abs(&(back.matrix() - y.matrix())) <= 1e-10);
            prop_assert!((0.0..=PI / 2.0).contains(&angles.theta));
            prop_assert!((angles.objective() - 0.25 * y.trace().norm_sqr()).abs() <= 1e-10);
            let sx = HermitianOp2::from_pauli(PauliCoefficients::x());
            let sy = HermitianOp2::from_pauli(PauliCoefficients::y());
            prop_assert!((l_functional(&y, &sx) - angles.l_sigma_x()).abs() <= 1e-10);
            prop_assert!((l_functional(&y, &sy) - angles.l_sigma_y()).abs() <= 1e-10);
        }

        #[test]
        fn kernels_are_phase_invariant(omega in -PI..PI, t1 in 0.0..2.1f64, t2 in 0.0..2.1f64) {
            let traj = sample_trajectory();
            let w = random_unitary([0.2, 0.7, -0.1, 0.4], 0.0);
            let w_shift = w.scale_phase(omega);
            let g = gradient_profile(&traj, &w, &[t1]).unwrap().values[0];
            let g_shift = gradient_profile(&traj, &w_shift, &[t1]).unwrap().values[0];
            prop_assert!((g - g_shift).abs() <= 1e-13);
            let k = hessian_kernel(&traj, &w, t1, t2).unwrap();
            let k_shift = hessian_kernel(&traj, &w_shift, t1, t2).unwrap();
            prop_assert!((k - k_shift).abs() <= 1e-13);
        }
    }
}
