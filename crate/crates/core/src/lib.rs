//! Control-landscape analysis for a single driven qubit.
//!
//! The system is `H(t) = H0 + f(t) V` with a piecewise-constant control `f`
//! and the fidelity `J = |Tr(W† U_T)|² / 4` for a target gate `W`.

pub mod checks;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod optimizer;
pub mod pauli;
pub mod propagator;
pub mod system;
pub mod traps;

pub use error::{LandscapeError, Result};
pub use pauli::{HermitianOp2, Mat2, PauliCoefficients, Unitary2};
pub use propagator::{PiecewiseControl, Trajectory};
pub use system::{CanonicalSystem, ControlSystem, GateAngles};
pub use kernels::{gradient_profile, hessian_kernel, second_variation, y_angles, GradientProfile, HessianGrid, YAngles};
pub use montecarlo::{ProbabilityMap, SamplingConfig, ScanPoint};
pub use optimizer::{AscentConfig, AscentTrace, MultistartSummary};
pub use traps::{classify, saddle_witness, SaddleWitness, TrapCase, TrapVerdict, WitnessOutcome};
