//! Geometric scaffolding of the ansatz `R = g(ρ)`, `Φ = mφ + ℓ(z)`, `ζ = z`.
//!
//! `∇ζ = Γ ∇R×R∇Φ + Ξ ∇R + RΣ ∇Φ` defines `Γ, Ξ, Σ`; the coefficients `a, b, c`
//! fix the first-order relations
//!
//! ```text
//! (∇R)² = −bX/(a² − bc),   ∇R·R∇Φ = aX/(a² − bc),   (R∇Φ)² = −cX/(a² − bc).
//! ```

use crate::error::{Error, Result};
use crate::field::{profile_scalars, CylPoint, Vec3};
use crate::profile::RadialProfile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFactors {
    pub gamma: f64,
    pub xi: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbcCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl AbcCoefficients {
    pub fn discriminant(&self) -> f64 {
        self.a * self.a - self.b * self.c
    }
}

fn check_section(rho: f64, g: f64, gp: f64) -> Result<()> {
    if !(rho > 0.0) {
        return Err(Error::Axis("geometry factors"));
    }
    if !(g > 0.0) {
        return Err(Error::Domain(format!("R = g must be positive, got {g}")));
    }
    if gp == 0.0 || !gp.is_finite() {
        return Err(Error::DegenerateGradient(format!(
            "g' = {gp} at rho = {rho}"
        )));
    }
    Ok(())
}

/// Ansatz-specialised closed forms with `ℓ' = lp`.
pub fn geometry_factors(rho: f64, g: f64, gp: f64, lp: f64, m: i32) -> Result<GeometryFactors> {
    check_section(rho, g, gp)?;
    let m = m as f64;
    let d = m * m + lp * lp * rho * rho;
    let out = GeometryFactors {
        gamma: m * rho / (d * g * gp),
        xi: 0.0,
        sigma: lp * rho * rho / (d * g),
    };
    debug_assert!({
        let gen = geometry_factors_general(&ansatz_gradients(rho, g, gp, lp, m))?;
        (gen.gamma - out.gamma).abs() <= 1e-9 * out.gamma.abs().max(1e-300)
            && (gen.sigma - out.sigma).abs() <= 1e-9 * out.sigma.abs().max(1e-300)
    });
    Ok(out)
}

/// Gradients of `R`, `Φ`, `ζ` in the cylindrical frame, together with `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradients {
    pub grad_r: Vec3,
    pub grad_phi: Vec3,
    pub grad_zeta: Vec3,
    pub r: f64,
}

pub fn ansatz_gradients(rho: f64, g: f64, gp: f64, lp: f64, m: f64) -> Gradients {
    Gradients {
        grad_r: Vec3::new(gp, 0.0, 0.0),
        grad_phi: Vec3::new(0.0, m / rho, lp),
        grad_zeta: Vec3::new(0.0, 0.0, 1.0),
        r: g,
    }
}

/// `Γ, Ξ, Σ` from the projection formulas, valid for any `R, Φ, ζ`.
pub fn geometry_factors_general(gr: &Gradients) -> Result<GeometryFactors> {
    let w = gr.grad_r.cross(&gr.grad_phi);
    let w2 = w.norm_squared();
    if w2 == 0.0 {
        return Err(Error::DegenerateGradient("∇R × ∇Φ vanishes".into()));
    }
    if gr.r == 0.0 {
        return Err(Error::Domain("R = 0".into()));
    }
    Ok(GeometryFactors {
        gamma: w.dot(&gr.grad_zeta) / (gr.r * w2),
        xi: gr.grad_phi.cross(&w).dot(&gr.grad_zeta) / w2,
        sigma: gr
            .grad_r
            .cross(&gr.grad_phi.cross(&gr.grad_r))
            .dot(&gr.grad_zeta)
            / (gr.r * w2),
    })
}

pub fn abc_coefficients(rho: f64, g: f64, gp: f64, lp: f64, m: i32) -> Result<AbcCoefficients> {
    check_section(rho, g, gp)?;
    let m = m as f64;
    let d = m * m + lp * lp * rho * rho;
    let s = 1.0 + g * g;
    Ok(AbcCoefficients {
        a: 0.0,
        b: rho * rho / (d * g * g * s),
        c: 1.0 / (s * gp * gp),
    })
}

fn rel_dev(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Relative deviations of the three first-order relations for given `a, b, c`.
pub fn first_order_deviations(
    rho: f64,
    g: f64,
    gp: f64,
    m: i32,
    n: i32,
    abc: &AbcCoefficients,
) -> [f64; 3] {
    let grad_r = Vec3::new(gp, 0.0, 0.0);
    let r_grad_phi = Vec3::new(0.0, g * m as f64 / rho, g * n as f64);
    let x = 1.0 / (1.0 + g * g);
    let det = abc.discriminant();
    [
        rel_dev(grad_r.norm_squared(), -abc.b * x / det),
        rel_dev(grad_r.dot(&r_grad_phi), abc.a * x / det),
        rel_dev(r_grad_phi.norm_squared(), -abc.c * x / det),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirstOrderDeviation {
    /// `(∇R)²` relation.
    pub grad_r_sq: f64,
    /// `∇R·R∇Φ` relation.
    pub cross: f64,
    /// `(R∇Φ)²` relation.
    pub r_grad_phi_sq: f64,
    pub evaluated: usize,
    /// Probes on the axis or where `g = 0` or `g' = 0`.
    pub skipped: usize,
}

pub fn first_order_residual(
    profile: &impl RadialProfile,
    probes: &[CylPoint],
) -> Result<FirstOrderDeviation> {
    let (m, n) = profile.windings();
    let mut out = FirstOrderDeviation::default();
    for p in probes {
        let v = profile.eval(p.rho)?;
        let abc = match abc_coefficients(p.rho, v.g, v.gp, n as f64, m) {
            Ok(abc) => abc,
            Err(_) => {
                out.skipped += 1;
                continue;
            }
        };
        let d = first_order_deviations(p.rho, v.g, v.gp, m, n, &abc);
        out.grad_r_sq = out.grad_r_sq.max(d[0]);
        out.cross = out.cross.max(d[1]);
        out.r_grad_phi_sq = out.r_grad_phi_sq.max(d[2]);
        out.evaluated += 1;
    }
    Ok(out)
}

/// A fixed radial cross-section `(ρ, g, g')` of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSection {
    pub rho: f64,
    pub g: f64,
    pub gp: f64,
    pub m: i32,
}

/// `max_z |∂_z[Σ(c + Y)/Γ]|` for a phase profile `ℓ` sampled uniformly on `[0, 2π]`
/// (endpoints included). Vanishes iff `ℓ'' ≡ 0`.
pub fn phase_linearity_defect(ell: &[f64], n: i32, section: &CrossSection) -> Result<f64> {
    let k = ell.len();
    if k < 5 {
        return Err(Error::Precondition(
            "need at least 5 samples of the phase".into(),
        ));
    }
    let end = std::f64::consts::TAU * n as f64;
    let tol = 1e-10 * end.abs().max(1.0);
    if ell[0].abs() > tol || (ell[k - 1] - end).abs() > tol {
        return Err(Error::Precondition(format!(
            "phase must satisfy l(0) = 0 and l(2π) = 2πn = {end}, got {} and {}",
            ell[0],
            ell[k - 1]
        )));
    }
    let dz = std::f64::consts::TAU / (k - 1) as f64;
    let lp = derivative(ell, dz);
    let CrossSection { rho, g, gp, m } = *section;
    let y = profile_scalars(g)?.y;
    let mut s = Vec::with_capacity(k);
    for &l in &lp {
        let gf = geometry_factors(rho, g, gp, l, m)?;
        let c = abc_coefficients(rho, g, gp, l, m)?.c;
        s.push(gf.sigma * (c + y) / gf.gamma);
    }
    Ok(derivative(&s, dz).iter().fold(0.0, |a, d| a.max(d.abs())))
}

/// Second-order finite differences on a uniform grid, one-sided at the ends.
fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let k = v.len();
    (0..k)
        .map(|i| {
            if i == 0 {
                (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
            } else if i == k - 1 {
                (3.0 * v[k - 1] - 4.0 * v[k - 2] + v[k - 3]) / (2.0 * h)
            } else {
                (v[i + 1] - v[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// Largest relative residual of
/// `(1/g') d/dρ ln(R(b+Y)/Γ) = (1−R²)/(1+R²)·(c+Y)/(R(b+Y))` at the probe radii,
/// with `ℓ' = n`. Probes need `g > 0` and `g' > 0`.
pub fn by_form_residual(profile: &impl RadialProfile, probes: &[f64]) -> Result<f64> {
    const STEP: f64 = 1e-4;
    let (m, n) = profile.windings();
    let lp = n as f64;
    let log_f = |rho: f64| -> Result<f64> {
        let v = profile.eval(rho)?;
        let gf = geometry_factors(rho, v.g, v.gp, lp, m)?;
        let abc = abc_coefficients(rho, v.g, v.gp, lp, m)?;
        let y = profile_scalars(v.g)?.y;
        Ok((v.g * (abc.b + y) / gf.gamma).ln())
    };
    let mut worst: f64 = 0.0;
    for &rho in probes {
        if !(rho > STEP) {
            return Err(Error::Domain(format!("probe {rho} too close to the axis")));
        }
        let v = profile.eval(rho)?;
        if !(v.g > 0.0 && v.gp > 0.0) {
            return Err(Error::Domain(format!(
                "probe {rho} outside a window of increasing g (g = {}, g' = {})",
                v.g, v.gp
            )));
        }
        let abc = abc_coefficients(rho, v.g, v.gp, lp, m)?;
        let y = profile_scalars(v.g)?.y;
        let lhs = (log_f(rho + STEP)? - log_f(rho - STEP)?) / (2.0 * STEP) / v.gp;
        let g2 = v.g * v.g;
        let rhs = (1.0 - g2) / (1.0 + g2) * (abc.c + y) / (v.g * (abc.b + y));
        worst = worst.max(rel_dev(lhs, rhs));
    }
    Ok(worst)
}
