//! 2×2 Hermitian and unitary matrices in the Pauli basis.
//!
//! A Hermitian operator is written as `c0·I + ax·σx + ay·σy + az·σz` with real
//! coefficients. For that form the exponential, the operator norm and the
//! commutator all have closed forms, so nothing here iterates or truncates a
//! series.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LandscapeError, Result};

pub type Mat2 = Matrix2<Complex64>;

/// Entrywise tolerance on `M - M†` for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Entrywise tolerance on `U†U - I` (and on `|det U| - 1`) for unitarity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Below this Bloch-vector length the exponential drops the rotation term.
const ZERO_VECTOR_CUTOFF: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, ONE)
}

pub fn sigma_x() -> Mat2 {
    Mat2::new(ZERO, ONE, ONE, ZERO)
}

pub fn sigma_y() -> Mat2 {
    Mat2::new(ZERO, -I, I, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest singular value of an arbitrary 2×2 complex matrix.
pub fn spectral_norm(m: &Mat2) -> f64 {
    let fro2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let det = m.determinant().norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    ((fro2 + disc.sqrt()) / 2.0).sqrt()
}

/// Real coefficients of `c0·I + ax·σx + ay·σy + az·σz`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliCoefficients {
    pub c0: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl PauliCoefficients {
    pub const fn new(c0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { c0, ax, ay, az }
    }

    pub const fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 0.0)
    }

    pub const fn x() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0)
    }

    pub const fn y() -> Self {
        Self::new(0.0, 0.0, 1.0, 0.0)
    }

    pub const fn z() -> Self {
        Self::new(0.0, 0.0, 0.0, 1.0)
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.ax, self.ay, self.az]
    }

    /// Length of the Bloch vector `(ax, ay, az)`.
    pub fn vector_norm(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }

    /// Eigenvalues are `c0 ± |a|`, so the operator norm is the larger modulus.
    pub fn operator_norm(&self) -> f64 {
        let a = self.vector_norm();
        (self.c0 + a).abs().max((self.c0 - a).abs())
    }

    pub fn traceless(&self) -> Self {
        Self { c0: 0.0, ..*self }
    }

    pub fn compose(&self) -> HermitianOp2 {
        pauli_compose(*self)
    }

    fn to_matrix(self) -> Mat2 {
        let c0 = Complex64::new(self.c0, 0.0);
        let az = Complex64::new(self.az, 0.0);
        Mat2::new(
            c0 + az,
            Complex64::new(self.ax, -self.ay),
            Complex64::new(self.ax, self.ay),
            c0 - az,
        )
    }

    /// Reads the coefficients without a Hermiticity check; the anti-Hermitian
    /// part of `m` is discarded.
    fn from_matrix_lossy(m: &Mat2) -> Self {
        Self {
            c0: 0.5 * (m[(0, 0)].re + m[(1, 1)].re),
            ax: 0.5 * (m[(0, 1)].re + m[(1, 0)].re),
            ay: 0.5 * (m[(1, 0)].im - m[(0, 1)].im),
            az: 0.5 * (m[(0, 0)].re - m[(1, 1)].re),
        }
    }
}

impl Add for PauliCoefficients {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.c0 + o.c0, self.ax + o.ax, self.ay + o.ay, self.az + o.az)
    }
}

impl Sub for PauliCoefficients {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for PauliCoefficients {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl Mul<f64> for PauliCoefficients {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.c0 * s, self.ax * s, self.ay * s, self.az * s)
    }
}

/// A 2×2 Hermitian matrix. Stored in the Pauli basis, so Hermiticity holds
/// exactly once constructed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HermitianOp2 {
    coeffs: PauliCoefficients,
}

impl HermitianOp2 {
    /// Accepts `m` if `max |m - m†| <= HERMITIAN_TOL`.
    pub fn new(m: &Mat2) -> Result<Self> {
        pauli_decompose(m).map(pauli_compose)
    }

    pub fn from_pauli(coeffs: PauliCoefficients) -> Self {
        Self { coeffs }
    }

    pub fn pauli(&self) -> PauliCoefficients {
        self.coeffs
    }

    pub fn matrix(&self) -> Mat2 {
        self.coeffs.to_matrix()
    }

    /// `Tr M = 2·c0`.
    pub fn trace(&self) -> f64 {
        2.0 * self.coeffs.c0
    }

    pub fn operator_norm(&self) -> f64 {
        self.coeffs.operator_norm()
    }

    /// `M - (Tr M / 2)·I`.
    pub fn traceless(&self) -> Self {
        Self::from_pauli(self.coeffs.traceless())
    }

    /// `e^{-iMt}`.
    pub fn expm(&self, t: f64) -> Unitary2 {
        expm_hermitian(self, t)
    }

    /// `U† M U`, again Hermitian.
    pub fn conjugate_by(&self, u: &Unitary2) -> Self {
        let m = u.m.adjoint() * self.matrix() * u.m;
        Self::from_pauli(PauliCoefficients::from_matrix_lossy(&m))
    }

    /// `U M U†`.
    pub fn transform_by(&self, u: &Unitary2) -> Self {
        self.conjugate_by(&u.adjoint())
    }
}

impl Add for HermitianOp2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::from_pauli(self.coeffs + o.coeffs)
    }
}

impl Sub for HermitianOp2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::from_pauli(self.coeffs - o.coeffs)
    }
}

impl Mul<f64> for HermitianOp2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::from_pauli(self.coeffs * s)
    }
}

/// Splits a Hermitian matrix into `Tr(M)/2` and `Tr(Mσ_k)/2`.
pub fn pauli_decompose(m: &Mat2) -> Result<PauliCoefficients> {
    let deviation = max_abs(&(m - m.adjoint()));
    if !(deviation <= HERMITIAN_TOL) {
        return Err(LandscapeError::NotHermitian { deviation });
    }
    Ok(PauliCoefficients::from_matrix_lossy(m))
}

pub fn pauli_compose(c: PauliCoefficients) -> HermitianOp2 {
    HermitianOp2::from_pauli(c)
}

pub fn operator_norm(m: &HermitianOp2) -> f64 {
    m.operator_norm()
}

/// `e^{-iMt} = e^{-ic0 t}[cos(|a|t)·I - i·sin(|a|t)·(a·σ)/|a|]`.
pub fn expm_hermitian(m: &HermitianOp2, t: f64) -> Unitary2 {
    let c = m.pauli();
    let phase = Complex64::from_polar(1.0, -c.c0 * t);
    let a = c.vector_norm();
    if a < ZERO_VECTOR_CUTOFF {
        return Unitary2 {
            m: identity() * phase,
        };
    }
    let (s, co) = (a * t).sin_cos();
    let (nx, ny, nz) = (c.ax / a, c.ay / a, c.az / a);
    let u = Mat2::new(
        Complex64::new(co, -s * nz),
        Complex64::new(-s * ny, -s * nx),
        Complex64::new(s * ny, -s * nx),
        Complex64::new(co, s * nz),
    );
    Unitary2 { m: u * phase }
}

/// Operator norm of `(AB - BA)/i`.
pub fn commutator_norm(a: &HermitianOp2, b: &HermitianOp2) -> f64 {
    let (am, bm) = (a.matrix(), b.matrix());
    let c = (am * bm - bm * am) * (-I);
    PauliCoefficients::from_matrix_lossy(&c).operator_norm()
}

/// A 2×2 unitary matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: Mat2,
}

impl Unitary2 {
    /// Accepts `m` if `U†U = I` and `|det U| = 1` to `UNITARY_TOL`.
    pub fn new(m: Mat2) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if !(deviation <= UNITARY_TOL) {
            return Err(LandscapeError::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    /// Builds from row-major entries `[re00, im00, re01, im01, re10, im10, re11, im11]`.
    pub fn from_real_parts(e: [f64; 8]) -> Result<Self> {
        Self::new(Mat2::new(
            Complex64::new(e[0], e[1]),
            Complex64::new(e[2], e[3]),
            Complex64::new(e[4], e[5]),
            Complex64::new(e[6], e[7]),
        ))
    }

    pub(crate) fn from_matrix_unchecked(m: Mat2) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self { m: identity() }
    }

    /// `(σx + σz)/√2`.
    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            m: Mat2::new(h, h, h, -h),
        }
    }

    /// `diag(1, e^{iφ})`.
    pub fn phase_shift(phi: f64) -> Self {
        Self {
            m: Mat2::new(ONE, ZERO, ZERO, Complex64::from_polar(1.0, phi)),
        }
    }

    /// `e^{iσz·φ_W} = diag(e^{iφ_W}, e^{-iφ_W})`.
    pub fn z_rotation(phi_w: f64) -> Self {
        Self {
            m: Mat2::new(
                Complex64::from_polar(1.0, phi_w),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, -phi_w),
            ),
        }
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.m[(0, 0)] + self.m[(1, 1)]
    }

    pub fn determinant(&self) -> Complex64 {
        self.m.determinant()
    }

    pub fn scale_phase(&self, omega: f64) -> Self {
        Self {
            m: self.m * Complex64::from_polar(1.0, omega),
        }
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.m)
    }
}

impl Mul for Unitary2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { m: self.m * o.m }
    }
}

impl Mul<&Unitary2> for &Unitary2 {
    type Output = Unitary2;
    fn mul(self, o: &Unitary2) -> Unitary2 {
        Unitary2 { m: self.m * o.m }
    }
}

fn unitarity_deviation(m: &Mat2) -> f64 {
    let gram = max_abs(&(m.adjoint() * m - identity()));
    let det = (m.determinant().norm() - 1.0).abs();
    gram.max(det)
}
