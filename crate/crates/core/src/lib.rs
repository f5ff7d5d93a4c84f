//! Estimation of intrinsic-decoherence parameters.
//!
//! Closed-form dynamics of the Milburn dephasing (MID) and Gisin dissipation
//! (GND) models for a qubit and a truncated oscillator, Fisher-information
//! machinery, a Runge–Kutta cross-check and the optimizers that locate the
//! best estimation conditions.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod gnd;
pub mod linalg;
pub mod mid;
pub mod optimizer;
pub mod oracle;
pub mod state;

pub use error::{Error, Result};
pub use estimation::{
    cramer_rao_variance, fisher_information, qfi_bloch, qfi_mixed, qfi_pure, qsnr, sld, spin_measurement, CramerRao,
    EstimationReport, Outcome, ProbabilityModel,
};
pub use gnd::GndParams;
pub use linalg::{density_spectrum, hermitian_eigendecomposition, HermitianEigen};
pub use mid::{MidParams, MidQubitQfi, OscQsnr};
pub use optimizer::{FitResult, IterationTrace, OptimumResult};
pub use oracle::{IntegratorConfig, Trajectory};
pub use state::{
    bloch_to_density, coherent_amplitudes, density_to_bloch, truncation_dimension, BlochVector, CoherentSpec,
    FockDensity, ProbeAngles, PureFockState, QubitDensity, C64,
};
