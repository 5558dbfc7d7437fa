//! Static solitons of the Faddeev model under the toroidal ansatz
//! `u = g(ρ)·exp(i(mφ + nz))` on the solid torus `0 ≤ ρ ≤ ρ₀`, `φ, z ∈ [0, 2π)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: pointwise algebra of `n`, `u`, `q`, `α`, `β`, the energy density and the spinor `Z`.
//! * [`profile`]: the [`RadialProfile`] abstraction shared by solved and analytic profiles.
//! * [`ode`]: the reduced profile equation, its adaptive integrator, pole fitting and
//!   coefficient scans.
//! * [`geometry`]: the ansatz-specialised `Γ, Ξ, Σ`, `a, b, c` and the identities they satisfy.
//! * [`topology`]: the Hopf-type charge by endpoint formula, radial quadrature and a
//!   full 3-D Levi-Civita quadrature.
//! * [`verify`]: finite-difference residual of the unreduced field equation and boundary audits.
//! * [`io`]: solution files, JSON reports, CSV export and run manifests.
//!
//! Lengths are measured in units of `2√(c₄/c₂)`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod geometry;
pub mod io;
pub mod ode;
pub mod profile;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
pub use field::{AnsatzParams, CylPoint, EnergyConfig, FieldSample, SpinorZ, Stereo};
pub use ode::{
    integrate_profile, match_rho0, scan_coefficient, Classification, ProfileSolution, ScanTable,
    SolveConfig,
};
pub use profile::{AnalyticProfile, ProfileEnd, RadialProfile, RadialValue};
pub use topology::{ChargeMethod, ChargeReport, Grid3dSpec};
pub use verify::{BoundaryAudit, ResidualGrid, ResidualReport};
