//! Sweeps over the leading coefficient `c` and inversion of `ρ₀(c)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solve::{integrate_profile, Classification, SolveConfig};
use crate::error::{Error, Result};
use crate::field::AnsatzParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanOutcome {
    Singular { rho0: f64 },
    Bounded { g_sup: f64 },
    Error { message: String },
}

impl ScanOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            ScanOutcome::Singular { .. } => "SINGULAR",
            ScanOutcome::Bounded { .. } => "BOUNDED",
            ScanOutcome::Error { .. } => "ERROR",
        }
    }

    pub fn rho0(&self) -> Option<f64> {
        match *self {
            ScanOutcome::Singular { rho0 } => Some(rho0),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub c_lead: f64,
    pub outcome: ScanOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub m: i32,
    pub n: i32,
    pub rows: Vec<ScanRow>,
}

/// `steps` log-spaced coefficients from `c_lo` to `c_hi` inclusive.
pub fn log_grid(c_lo: f64, c_hi: f64, steps: usize) -> Vec<f64> {
    let ratio = (c_hi / c_lo).ln();
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                c_hi
            } else {
                c_lo * (ratio * i as f64 / (steps - 1) as f64).exp()
            }
        })
        .collect()
}

fn classify(m: i32, n: i32, c: f64, cfg: &SolveConfig) -> ScanOutcome {
    let run = AnsatzParams::new(m, n, c).and_then(|p| integrate_profile(&p, cfg));
    match run {
        Ok(sol) => match sol.classification() {
            Classification::Singular { rho0, .. } => ScanOutcome::Singular { rho0 },
            Classification::Bounded { g_sup, .. } => ScanOutcome::Bounded { g_sup },
        },
        Err(e) => ScanOutcome::Error {
            message: e.to_string(),
        },
    }
}

/// One profile per coefficient. Row failures are recorded, never propagated.
pub fn scan_coefficient(
    m: i32,
    n: i32,
    c_range: (f64, f64),
    steps: usize,
    cfg: &SolveConfig,
) -> Result<ScanTable> {
    let (c_lo, c_hi) = c_range;
    if !(c_lo > 0.0 && c_hi > c_lo && c_hi.is_finite()) {
        return Err(Error::Precondition(format!(
            "coefficient range must satisfy 0 < c_lo < c_hi, got [{c_lo}, {c_hi}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Precondition(format!(
            "need at least 2 steps, got {steps}"
        )));
    }
    AnsatzParams::new(m, n, 1.0)?;
    cfg.validate()?;
    let rows = log_grid(c_lo, c_hi, steps)
        .into_par_iter()
        .map(|c| ScanRow {
            c_lead: c,
            outcome: classify(m, n, c, cfg),
        })
        .collect();
    Ok(ScanTable { m, n, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub c_lead: f64,
    pub rho0: f64,
    pub iterations: usize,
}

/// `ρ₀(c)`, with a bounded solution read as "no pole before the horizon" (`+∞`).
fn rho0_of(m: i32, n: i32, c: f64, cfg: &SolveConfig) -> Result<f64> {
    let sol = integrate_profile(&AnsatzParams::new(m, n, c)?, cfg)?;
    Ok(sol.classification().rho0().unwrap_or(f64::INFINITY))
}

/// Bisection in `ln c` for the coefficient whose pole sits at `target`.
pub fn match_rho0(
    m: i32,
    n: i32,
    target: f64,
    bracket: (f64, f64),
    tol: f64,
    cfg: &SolveConfig,
) -> Result<MatchResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && tol > 0.0 && target > 0.0) {
        return Err(Error::Precondition(format!(
            "invalid bracket [{lo}, {hi}], target {target} or tolerance {tol}"
        )));
    }
    let (r_lo, r_hi) = rayon::join(|| rho0_of(m, n, lo, cfg), || rho0_of(m, n, hi, cfg));
    let (r_lo, r_hi) = (r_lo?, r_hi?);
    let (mut d_lo, d_hi) = (r_lo - target, r_hi - target);
    for (c, d, r) in [(lo, d_lo, r_lo), (hi, d_hi, r_hi)] {
        if d.abs() < tol {
            return Ok(MatchResult {
                c_lead: c,
                rho0: r,
                iterations: 0,
            });
        }
    }
    if d_lo.signum() == d_hi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            target,
            rho0_lo: r_lo,
            rho0_hi: r_hi,
        });
    }
    for it in 1..=200 {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let r_mid = rho0_of(m, n, mid, cfg).map_err(|e| Error::ClassificationChange {
            c: mid,
            detail: e.to_string(),
        })?;
        let d_mid = r_mid - target;
        if d_mid.abs() < tol {
            return Ok(MatchResult {
                c_lead: mid,
                rho0: r_mid,
                iterations: it,
            });
        }
        if d_mid.signum() == d_lo.signum() {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Precondition(format!(
        "bisection exhausted the bracket [{lo}, {hi}] without reaching tolerance {tol}"
    )))
}
