//! The reduced profile equation
//!
//! ```text
//! d/dρ [ P(ρ, g)·g' ] = RHS(ρ, g, g'),
//! P   = [2(m² + n²ρ²)g² + ρ²(1 + g²)²] / (ρ(1 + g²)³),
//! RHS = (m² + n²ρ²)·g·(1 − g²)·[(1 + g²)² + 2g'²] / (ρ(1 + g²)⁴),
//! ```
//!
//! expanded by the product rule into `g'' = [RHS − (∂P/∂ρ + ∂P/∂g·g')·g'] / P`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::AnsatzParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeState {
    pub rho: f64,
    pub g: f64,
    pub gp: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsTerms {
    pub p: f64,
    pub dp_drho: f64,
    pub dp_dg: f64,
    pub rhs: f64,
    pub gpp: f64,
}

/// `P` with its closed-form partial derivatives.
pub fn coefficient_p(rho: f64, g: f64, m: f64, n: f64) -> (f64, f64, f64) {
    let k = m * m + n * n * rho * rho;
    let s = 1.0 + g * g;
    let num = 2.0 * k * g * g + rho * rho * s * s;
    let den = rho * s * s * s;
    let p = num / den;
    let dnum_drho = 4.0 * n * n * rho * g * g + 2.0 * rho * s * s;
    let dnum_dg = 4.0 * k * g + 4.0 * rho * rho * g * s;
    let dden_drho = s * s * s;
    let dden_dg = 6.0 * rho * g * s * s;
    (
        p,
        (dnum_drho - p * dden_drho) / den,
        (dnum_dg - p * dden_dg) / den,
    )
}

pub fn source_term(rho: f64, g: f64, gp: f64, m: f64, n: f64) -> f64 {
    let k = m * m + n * n * rho * rho;
    let s = 1.0 + g * g;
    k * g * (1.0 - g * g) * (s * s + 2.0 * gp * gp) / (rho * s.powi(4))
}

pub fn ode_rhs(state: OdeState, params: &AnsatzParams) -> Result<RhsTerms> {
    let OdeState { rho, g, gp } = state;
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("rho must be positive, got {rho}")));
    }
    let (m, n) = (params.m as f64, params.n as f64);
    let (p, dp_drho, dp_dg) = coefficient_p(rho, g, m, n);
    if p == 0.0 {
        return Err(Error::SingularCoefficient { rho });
    }
    let rhs = source_term(rho, g, gp, m, n);
    let gpp = (rhs - (dp_drho + dp_dg * gp) * gp) / p;
    Ok(RhsTerms {
        p,
        dp_drho,
        dp_dg,
        rhs,
        gpp,
    })
}

/// Leading monomial `g = c·ρ^|m|` of the regular branch at the axis.
pub fn series_start(params: &AnsatzParams, rho_eps: f64) -> OdeState {
    let k = params.abs_m();
    let c = params.c_lead;
    OdeState {
        rho: rho_eps,
        g: c * rho_eps.powi(k),
        gp: c * k as f64 * rho_eps.powi(k - 1),
    }
}
