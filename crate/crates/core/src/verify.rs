//! Independent checks of a profile against the unreduced static equation
//! `∇·α + iβ·α = 0`, plus boundary and asymptotic audits.
//!
//! `α` carries the phase `e^{−i(mφ+nz)}`, so in [`DerivativeMode::AnalyticAngular`]
//! the angular parts of the divergence are multiplications by `−im/ρ` and `−in`;
//! only `∂_ρ` is a finite difference. [`DerivativeMode::FiniteDifference`] differences
//! all three directions on the periodic angular grid.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{alpha_beta, ansatz_u, q_from_radial, CVec3, CylPoint, Stereo, Vec3};
use crate::profile::{ProfileEnd, RadialProfile};
use crate::topology::pairwise_sum;

const I: Complex64 = Complex64::new(0.0, 1.0);
pub const MIN_GRID: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    AnalyticAngular,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualGrid {
    pub rho_lo: f64,
    pub rho_hi: f64,
    pub n_rho: usize,
    pub n_phi: usize,
    pub n_z: usize,
    pub mode: DerivativeMode,
}

impl ResidualGrid {
    /// `[0.05, 0.9]` of the profile's extent, away from the axis and the steep tail.
    pub fn default_window(profile: &impl RadialProfile, n_rho: usize) -> Self {
        Self::fraction_window(profile, 0.05, 0.9, n_rho)
    }

    pub fn fraction_window(profile: &impl RadialProfile, lo: f64, hi: f64, n_rho: usize) -> Self {
        let end = profile.end().rho_end();
        Self {
            rho_lo: lo * end,
            rho_hi: hi * end,
            n_rho,
            n_phi: MIN_GRID,
            n_z: MIN_GRID,
            mode: DerivativeMode::AnalyticAngular,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.rho_hi - self.rho_lo) / (self.n_rho - 1) as f64
    }

    /// Radial grid with `2^level` times the intervals; every coarse node is kept.
    pub fn refined(&self, level: u32) -> Self {
        Self {
            n_rho: (self.n_rho - 1) * (1 << level) + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub grid: ResidualGrid,
    pub h: f64,
    /// RMS of `|R|` over the grid, divided by `reference_scale`.
    pub l2_norm: f64,
    /// Max of `|R|` over the grid, divided by `reference_scale`.
    pub linf_norm: f64,
    /// Largest magnitude of any single term of the equation on the grid.
    pub reference_scale: f64,
    pub worst_rho: f64,
    pub convergence_order: Option<f64>,
}

struct AlphaPoint {
    alpha: CVec3,
    beta: Vec3,
}

fn alpha_at(profile: &impl RadialProfile, rho: f64, phi: f64, z: f64) -> Result<AlphaPoint> {
    let (m, n) = profile.windings();
    let v = profile.eval(rho)?;
    let phase = m as f64 * phi + n as f64 * z;
    let q = q_from_radial(v, rho, m as f64, n as f64, phase)?;
    let ab = alpha_beta(&q, Complex64::from_polar(v.g, phase));
    Ok(AlphaPoint {
        alpha: ab.alpha,
        beta: ab.beta,
    })
}

/// Residual and largest term magnitude at one grid point.
fn residual_at(
    profile: &impl RadialProfile,
    grid: &ResidualGrid,
    h: f64,
    rho: f64,
    phi: f64,
    z: f64,
) -> Result<(f64, f64)> {
    let (m, n) = profile.windings();
    let here = alpha_at(profile, rho, phi, z)?;
    let up = alpha_at(profile, rho + h, phi, z)?;
    let down = alpha_at(profile, rho - h, phi, z)?;
    let radial = ((rho + h) * up.alpha.x - (rho - h) * down.alpha.x) / (2.0 * h * rho);
    let (angular, axial) = match grid.mode {
        DerivativeMode::AnalyticAngular => (
            -I * m as f64 * here.alpha.y / rho,
            -I * n as f64 * here.alpha.z,
        ),
        DerivativeMode::FiniteDifference => {
            let hp = TAU / grid.n_phi as f64;
            let hz = TAU / grid.n_z as f64;
            let pp = alpha_at(profile, rho, phi + hp, z)?.alpha.y;
            let pm = alpha_at(profile, rho, phi - hp, z)?.alpha.y;
            let zp = alpha_at(profile, rho, phi, z + hz)?.alpha.z;
            let zm = alpha_at(profile, rho, phi, z - hz)?.alpha.z;
            ((pp - pm) / (2.0 * hp * rho), (zp - zm) / (2.0 * hz))
        }
    };
    let beta = here.beta.map(|b| Complex64::new(b, 0.0));
    let source = I * beta.dot(&here.alpha);
    let r = radial + angular + axial + source;
    let scale = [radial, angular, axial, source]
        .iter()
        .map(|t| t.norm())
        .fold(0.0, f64::max);
    Ok((r.norm(), scale))
}

fn check_grid(profile: &impl RadialProfile, grid: &ResidualGrid) -> Result<f64> {
    if grid.n_rho < MIN_GRID || grid.n_phi < MIN_GRID || grid.n_z < MIN_GRID {
        return Err(Error::Precondition(format!(
            "grid sizes must be at least {MIN_GRID}, got {}x{}x{}",
            grid.n_rho, grid.n_phi, grid.n_z
        )));
    }
    let h = grid.spacing();
    let last = profile.end().last_rho();
    if !(grid.rho_lo - h > 0.0 && grid.rho_hi > grid.rho_lo && grid.rho_hi + h < last) {
        return Err(Error::Domain(format!(
            "residual window [{}, {}] with spacing {h} must lie strictly inside (0, {last})",
            grid.rho_lo, grid.rho_hi
        )));
    }
    Ok(h)
}

pub fn field_equation_residual(
    profile: &impl RadialProfile,
    grid: &ResidualGrid,
) -> Result<ResidualReport> {
    let h = check_grid(profile, grid)?;
    let slabs: Vec<(f64, f64, f64)> = (0..grid.n_rho)
        .into_par_iter()
        .map(|i| {
            let rho = if i == grid.n_rho - 1 {
                grid.rho_hi
            } else {
                grid.rho_lo + h * i as f64
            };
            let (mut sq, mut worst, mut scale) = (0.0, 0.0f64, 0.0f64);
            for jp in 0..grid.n_phi {
                let phi = TAU * jp as f64 / grid.n_phi as f64;
                for jz in 0..grid.n_z {
                    let z = TAU * jz as f64 / grid.n_z as f64;
                    let (r, s) = residual_at(profile, grid, h, rho, phi, z)?;
                    sq += r * r;
                    worst = worst.max(r);
                    scale = scale.max(s);
                }
            }
            Ok((sq, worst, scale))
        })
        .collect::<Result<_>>()?;

    let count = (grid.n_rho * grid.n_phi * grid.n_z) as f64;
    let sq: Vec<f64> = slabs.iter().map(|s| s.0).collect();
    let rms = (pairwise_sum(&sq) / count).sqrt();
    let (worst_i, worst) =
        slabs.iter().enumerate().fold(
            (0, 0.0f64),
            |acc, (i, s)| if s.1 > acc.1 { (i, s.1) } else { acc },
        );
    let scale = slabs.iter().map(|s| s.2).fold(0.0, f64::max);
    let rel = |v: f64| if scale > 0.0 { v / scale } else { v };
    Ok(ResidualReport {
        grid: *grid,
        h,
        l2_norm: rel(rms),
        linf_norm: rel(worst),
        reference_scale: scale,
        worst_rho: grid.rho_lo + h * worst_i as f64,
        convergence_order: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub reports: Vec<ResidualReport>,
    /// Least-squares slope of `log linf` against `log h`.
    pub order: f64,
    /// Set when the norms do not decrease monotonically under refinement.
    pub unreliable: bool,
}

/// Residuals on `base` and `refinements` successively halved radial spacings.
pub fn convergence_study(
    profile: &impl RadialProfile,
    base: &ResidualGrid,
    refinements: u32,
) -> Result<ConvergenceStudy> {
    if refinements == 0 {
        return Err(Error::Precondition("need at least one refinement".into()));
    }
    let mut reports = (0..=refinements)
        .map(|k| field_equation_residual(profile, &base.refined(k)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = reports.iter().map(|r| r.h.ln()).collect();
    let ys: Vec<f64> = reports
        .iter()
        .map(|r| r.linf_norm.max(f64::MIN_POSITIVE).ln())
        .collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let order = sxy / sxx;
    let unreliable = reports
        .windows(2)
        .any(|w| !(w[1].linf_norm < w[0].linf_norm));
    if let Some(last) = reports.last_mut() {
        last.convergence_order = Some(order);
    }
    Ok(ConvergenceStudy {
        reports,
        order,
        unreliable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularCheck {
    pub threshold: f64,
    pub last_magnitude: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryAudit {
    pub periodicity_z_defect: f64,
    pub periodicity_phi_defect: f64,
    /// `u` at the smallest positive radius.
    pub axis_value: Complex64,
    pub axis_rho: f64,
    /// `|u|` at the largest sampled radius.
    pub edge_magnitude: f64,
    /// `None` for profiles without a pole.
    pub singular_check: Option<SingularCheck>,
}

fn finite_u(point: &CylPoint, profile: &impl RadialProfile) -> Result<Complex64> {
    match ansatz_u(point, profile)? {
        Stereo::Finite(u) => Ok(u),
        Stereo::Infinity => Ok(Complex64::new(f64::INFINITY, 0.0)),
    }
}

/// Periodicity, axis and edge checks. `g_threshold` is the magnitude the last sample
/// of a singular profile must reach.
pub fn boundary_audit(profile: &impl RadialProfile, g_threshold: f64) -> Result<BoundaryAudit> {
    let last = profile.end().last_rho();
    let axis_rho = profile
        .knots()
        .into_iter()
        .find(|&r| r > 0.0)
        .ok_or_else(|| Error::Precondition("profile has no positive knot".into()))?;

    let angles: Vec<f64> = (0..8).map(|k| TAU * k as f64 / 8.0).collect();
    let radii = [axis_rho, 0.5 * (axis_rho + last), last];
    let (mut dz, mut dphi) = (0.0f64, 0.0f64);
    for &rho in &radii {
        for &a in &angles {
            let u0 = finite_u(&CylPoint::new(rho, a, 0.0)?, profile)?;
            let uz = finite_u(&CylPoint::new(rho, a, TAU)?, profile)?;
            let p0 = finite_u(&CylPoint::new(rho, 0.0, a)?, profile)?;
            let pp = finite_u(&CylPoint::new(rho, TAU, a)?, profile)?;
            dz = dz.max((u0 - uz).norm());
            dphi = dphi.max((p0 - pp).norm());
        }
    }
    let axis_value = finite_u(&CylPoint::new(axis_rho, 0.0, 0.0)?, profile)?;
    let edge_magnitude = profile.eval(last)?.g.abs();
    let singular_check = match profile.end() {
        ProfileEnd::Pole { .. } => Some(SingularCheck {
            threshold: g_threshold,
            last_magnitude: edge_magnitude,
            passed: edge_magnitude >= g_threshold,
        }),
        ProfileEnd::Horizon { .. } => None,
    };
    Ok(BoundaryAudit {
        periodicity_z_defect: dz,
        periodicity_phi_defect: dphi,
        axis_value,
        axis_rho,
        edge_magnitude,
        singular_check,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticExponents {
    /// Slope of `log g` against `log ρ` over `[ε, 10ε]`, `ε` the first positive knot.
    pub origin_slope: f64,
    /// Slope of `log g` against `−log(ρ₀ − ρ)` over the last samples before the pole.
    pub pole_slope: Option<f64>,
    pub pole_samples: usize,
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

/// Knots within this many multiples of the final gap `ρ₀ − ρ_last` enter the pole fit.
const POLE_WINDOW: f64 = 100.0;
const MIN_POLE_SAMPLES: usize = 8;

pub fn asymptotic_exponents(profile: &impl RadialProfile) -> Result<AsymptoticExponents> {
    let knots = profile.knots();
    let eps = knots
        .iter()
        .copied()
        .find(|&r| r > 0.0)
        .ok_or_else(|| Error::Precondition("profile has no positive knot".into()))?;
    let origin: Vec<(f64, f64)> = (0..16)
        .map(|k| {
            let r = eps * 10f64.powf(k as f64 / 15.0);
            profile.eval(r).map(|v| (r.ln(), v.g.abs().ln()))
        })
        .collect::<Result<_>>()?;
    let origin_slope = ls_slope(&origin);

    let (pole_slope, pole_samples) = match profile.end() {
        ProfileEnd::Pole { rho0, last_rho } => {
            let gap = rho0 - last_rho;
            let window: Vec<f64> = knots
                .iter()
                .copied()
                .filter(|&r| r <= last_rho && rho0 - r <= POLE_WINDOW * gap)
                .collect();
            if window.len() < MIN_POLE_SAMPLES {
                (None, window.len())
            } else {
                let pts = window
                    .iter()
                    .map(|&r| profile.eval(r).map(|v| (-(rho0 - r).ln(), v.g.abs().ln())))
                    .collect::<Result<Vec<_>>>()?;
                (Some(ls_slope(&pts)), pts.len())
            }
        }
        ProfileEnd::Horizon { .. } => (None, 0),
    };
    Ok(AsymptoticExponents {
        origin_slope,
        pole_slope,
        pole_samples,
    })
}
