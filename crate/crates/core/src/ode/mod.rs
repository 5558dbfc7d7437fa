//! Reduced profile equation: series start at the axis, adaptive integration,
//! blow-up detection, pole extrapolation and coefficient scans.

mod dopri;
pub mod rhs;
pub mod scan;
pub mod solve;
pub mod tail;

pub use dopri::{Dopri5, Step, StepFailure, Tolerance};
pub use rhs::{ode_rhs, series_start, OdeState, RhsTerms};
pub use scan::{
    log_grid, match_rho0, scan_coefficient, MatchResult, ScanOutcome, ScanRow, ScanTable,
};
pub use solve::{
    implicit_form_residual, integrate_profile, Classification, ProfileSolution, SolveConfig,
};
pub use tail::{estimate_rho0, PoleFit};
