//! Extrapolation of the moving singularity from the blow-up tail.
//!
//! Near a simple pole `g ≈ C/(ρ₀ − ρ)`, so `h = 1/g ≈ (ρ₀ − ρ)/C` is linear in `ρ`.
//! The slope comes from a least-squares line through the tail; the zero crossing is
//! taken from the last (largest-`g`) sample along that slope, which keeps the
//! curvature of `h` over the fit window out of `ρ₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_TAIL_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleFit {
    pub rho0: f64,
    /// `C` in `g ≈ C/(ρ₀ − ρ)`.
    pub tail_constant: f64,
    /// RMS deviation of `1/g` from the fitted line.
    pub fit_residual: f64,
    pub samples: usize,
}

pub fn estimate_rho0(tail: &[(f64, f64)]) -> Result<PoleFit> {
    if tail.len() < MIN_TAIL_SAMPLES {
        return Err(Error::Fit(format!(
            "need at least {MIN_TAIL_SAMPLES} tail samples, got {}",
            tail.len()
        )));
    }
    if tail
        .iter()
        .any(|&(r, g)| !(r.is_finite() && g.is_finite() && g > 0.0))
    {
        return Err(Error::Fit(
            "tail contains non-positive or non-finite values".into(),
        ));
    }
    if tail
        .windows(2)
        .any(|w| !(w[1].1 > w[0].1 && w[1].0 > w[0].0))
    {
        return Err(Error::Fit(
            "tail is not strictly increasing in rho and g".into(),
        ));
    }

    let k = tail.len() as f64;
    let mean_r = tail.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_h = tail.iter().map(|p| 1.0 / p.1).sum::<f64>() / k;
    let (mut srr, mut srh) = (0.0, 0.0);
    for &(r, g) in tail {
        let dr = r - mean_r;
        srr += dr * dr;
        srh += dr * (1.0 / g - mean_h);
    }
    let slope = srh / srr;
    if !(slope < 0.0) {
        return Err(Error::Fit(format!(
            "1/g does not decrease toward a pole (slope {slope})"
        )));
    }
    let intercept = mean_h - slope * mean_r;
    let fit_residual = (tail
        .iter()
        .map(|&(r, g)| (1.0 / g - (intercept + slope * r)).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();

    let &(r_last, g_last) = tail.last().unwrap();
    Ok(PoleFit {
        rho0: r_last - (1.0 / g_last) / slope,
        tail_constant: -1.0 / slope,
        fit_residual,
        samples: tail.len(),
    })
}
