//! Optimal estimation conditions, the `g(|alpha|)` fit and the iterative
//! estimation protocol.

mod fit;
mod golden;
mod protocol;
mod table1;

pub use fit::{fit_g, g_samples, optimal_c, optimal_c_with, FitResult, GSample, C_BRACKET, FIT_GRID};
pub use golden::{maximize_1d, prescan, try_maximize_1d, OptimumResult};
pub use protocol::{iterate_estimation, IterationSetup, IterationTrace, ProtocolModel, RoundRecord};
pub use table1::{table1_summary, Table1, Table1Row};

/// `x = mu omega^2 t` maximising the MID qubit QSNR.
pub const MID_QUBIT_X_OPT: f64 = 0.199_203_03;
