//! Pointwise field algebra.
//!
//! The unit vector `n` is parametrised by the stereographic coordinate `u`,
//!
//! ```text
//! n = ( (u + u*) / (|u|² + 1),  -i(u - u*) / (|u|² + 1),  (|u|² - 1) / (|u|² + 1) ),
//! ```
//!
//! with `R = |u|`, `X = 1/(1 + R²)`, `q = X∇u`, `α = q* − q*×(q×q*)` and
//! `β = (u* q − u q*)/i`. All vectors are expressed in the cylindrical orthonormal
//! frame `(ρ̂, φ̂, ẑ)`.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{RadialProfile, RadialValue};

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Integer windings and the leading coefficient `g ≈ c_lead·ρ^|m|` at the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub m: i32,
    pub n: i32,
    pub c_lead: f64,
}

impl AnsatzParams {
    pub fn new(m: i32, n: i32, c_lead: f64) -> Result<Self> {
        let p = Self { m, n, c_lead };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParams(format!(
                "windings must be non-zero, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        if !(self.c_lead.is_finite() && self.c_lead > 0.0) {
            return Err(Error::InvalidParams(format!(
                "leading coefficient must be positive and finite, got {}",
                self.c_lead
            )));
        }
        Ok(())
    }

    pub fn abs_m(&self) -> i32 {
        self.m.abs()
    }
}

/// A point of the solid torus. Angles are reduced into `[0, 2π)` on construction,
/// so `φ = 2π` and `φ = 0` are the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub rho: f64,
    pub phi: f64,
    pub z: f64,
}

impl CylPoint {
    pub fn new(rho: f64, phi: f64, z: f64) -> Result<Self> {
        if !(rho.is_finite() && rho >= 0.0 && phi.is_finite() && z.is_finite()) {
            return Err(Error::Domain(format!(
                "invalid cylindrical point ({rho}, {phi}, {z})"
            )));
        }
        Ok(Self {
            rho,
            phi: wrap_angle(phi),
            z: wrap_angle(z),
        })
    }

    /// Total phase `mφ + nz` of the ansatz.
    pub fn phase(&self, m: i32, n: i32) -> f64 {
        m as f64 * self.phi + n as f64 * self.z
    }
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Stereographic coordinate, with the point at infinity as an explicit value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stereo {
    Finite(Complex64),
    Infinity,
}

/// `X`, `B`, `Y` as algebraic functions of `R = |u|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileScalars {
    pub x: f64,
    pub b: f64,
    pub y: f64,
}

pub fn profile_scalars(r: f64) -> Result<ProfileScalars> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!(
            "R must be finite and non-negative, got {r}"
        )));
    }
    let r2 = r * r;
    let x = 1.0 / (1.0 + r2);
    Ok(ProfileScalars {
        x,
        b: 2.0 * r2 / (1.0 + r2),
        y: 2.0 * x * x * x,
    })
}

pub fn n_from_u(u: Stereo) -> Result<Vec3> {
    let u = match u {
        Stereo::Infinity => return Ok(Vec3::new(0.0, 0.0, 1.0)),
        Stereo::Finite(u) if u.is_finite() => u,
        Stereo::Finite(u) => return Err(Error::Domain(format!("non-finite u = {u}"))),
    };
    let r2 = u.norm_sqr();
    let d = r2 + 1.0;
    let n1 = (u + u.conj()) / d;
    let n2 = -I * (u - u.conj()) / d;
    Ok(Vec3::new(n1.re, n2.re, (r2 - 1.0) / d))
}

fn windings_of(profile: &impl RadialProfile) -> (f64, f64) {
    let (m, n) = profile.windings();
    (m as f64, n as f64)
}

/// `u = g(ρ)·exp(i(mφ + nz))`; `Infinity` exactly at a pole.
pub fn ansatz_u(point: &CylPoint, profile: &impl RadialProfile) -> Result<Stereo> {
    if let crate::ProfileEnd::Pole { rho0, .. } = profile.end() {
        if point.rho == rho0 {
            return Ok(Stereo::Infinity);
        }
    }
    let v = profile.eval(point.rho)?;
    let (m, n) = profile.windings();
    Ok(Stereo::Finite(Complex64::from_polar(
        v.g,
        point.phase(m, n),
    )))
}

/// `q = X∇u` from a radial value, without touching the profile.
pub fn q_from_radial(v: RadialValue, rho: f64, m: f64, n: f64, phase: f64) -> Result<CVec3> {
    if rho <= 0.0 {
        return Err(Error::Axis("q"));
    }
    let x = profile_scalars(v.g.abs())?.x;
    let e = Complex64::from_polar(x, phase);
    Ok(CVec3::new(
        e * v.gp,
        e * I * (v.g * m / rho),
        e * I * (v.g * n),
    ))
}

pub fn q_field(point: &CylPoint, profile: &impl RadialProfile) -> Result<CVec3> {
    if point.rho <= 0.0 {
        return Err(Error::Axis("q"));
    }
    let v = profile.eval(point.rho)?;
    let (m, n) = windings_of(profile);
    q_from_radial(v, point.rho, m, n, point.phase(m as i32, n as i32))
}

/// `α` and `β` at a point. `beta_imag` carries the discarded imaginary part of `β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: CVec3,
    pub beta: Vec3,
    pub beta_imag: Vec3,
}

pub fn alpha_beta(q: &CVec3, u: Complex64) -> AlphaBeta {
    let qc = q.map(|c| c.conj());
    let alpha = qc - qc.cross(&q.cross(&qc));
    let beta_c = (q * u.conj() - qc * u) / I;
    AlphaBeta {
        alpha,
        beta: beta_c.map(|c| c.re),
        beta_imag: beta_c.map(|c| c.im),
    }
}

/// Couplings of the quadratic and quartic terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub c2: f64,
    pub c4: f64,
}

impl Default for EnergyConfig {
    /// `2√(c₄/c₂) = 1`.
    fn default() -> Self {
        Self { c2: 1.0, c4: 0.25 }
    }
}

/// Cylindrical-frame derivatives `(∂_ρ, ρ⁻¹∂_φ, ∂_z)` of `u`.
fn grad_u(v: RadialValue, rho: f64, m: f64, n: f64, phase: f64) -> [Complex64; 3] {
    let e = Complex64::from_polar(1.0, phase);
    [e * v.gp, e * I * (v.g * m / rho), e * I * (v.g * n)]
}

/// Derivatives of `n` with respect to `Re u` and `Im u`, from the stereographic map.
fn dn_du(u: Complex64) -> (Vec3, Vec3) {
    let (a, b) = (u.re, u.im);
    let s = 1.0 + a * a + b * b;
    let s2 = s * s;
    let dn_da = Vec3::new(
        (2.0 * s - 4.0 * a * a) / s2,
        -4.0 * a * b / s2,
        4.0 * a / s2,
    );
    let dn_db = Vec3::new(
        -4.0 * a * b / s2,
        (2.0 * s - 4.0 * b * b) / s2,
        4.0 * b / s2,
    );
    (dn_da, dn_db)
}

/// Static energy density `c₂ Σ ∂ᵢn·∂ᵢn + 2c₄ Σ_{i<j} Hᵢⱼ²`, `Hᵢⱼ = n·(∂ᵢn × ∂ⱼn)`.
///
/// This is the bulk density only; no surface term is attached at `ρ = ρ₀`.
pub fn energy_density(
    point: &CylPoint,
    profile: &impl RadialProfile,
    cfg: &EnergyConfig,
) -> Result<f64> {
    if point.rho <= 0.0 {
        return Err(Error::Axis("energy density"));
    }
    let v = profile.eval(point.rho)?;
    let (m, n) = windings_of(profile);
    Ok(energy_from_radial(
        v,
        point.rho,
        m,
        n,
        point.phase(m as i32, n as i32),
        cfg,
    ))
}

pub(crate) fn energy_from_radial(
    v: RadialValue,
    rho: f64,
    m: f64,
    n: f64,
    phase: f64,
    cfg: &EnergyConfig,
) -> f64 {
    let u = Complex64::from_polar(v.g, phase);
    let nv = n_from_u(Stereo::Finite(u)).expect("finite u");
    let (dn_da, dn_db) = dn_du(u);
    let du = grad_u(v, rho, m, n, phase);
    let dn: [Vec3; 3] = du.map(|d| dn_da * d.re + dn_db * d.im);

    let quadratic: f64 = dn.iter().map(|d| d.norm_squared()).sum();
    let mut quartic = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            let h = nv.dot(&dn[i].cross(&dn[j]));
            quartic += h * h;
        }
    }
    cfg.c2 * quadratic + 2.0 * cfg.c4 * quartic
}

/// Two-component spinor with `n^a = Z†σ^a Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorZ {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl SpinorZ {
    /// Spinor of the ansatz for a given `g`; `g = ∞` is accepted as the limit.
    pub fn from_radial(g: f64, m: i32, n: i32, phi: f64, z: f64) -> Self {
        let (a1, a2) = if g.is_infinite() {
            (1.0, 0.0)
        } else {
            let s = (1.0 + g * g).sqrt();
            (g / s, 1.0 / s)
        };
        Self {
            z1: Complex64::from_polar(a1, -(n as f64) * z),
            z2: Complex64::from_polar(a2, m as f64 * phi),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    /// Real components `(Φ₁, Φ₂, Φ₃, Φ₄)`.
    pub fn components(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    /// `Z†σ^a Z` with the Pauli matrices.
    pub fn n_vec(&self) -> Vec3 {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let pauli = [
            [[zero, one], [one, zero]],
            [[zero, -I], [I, zero]],
            [[one, zero], [zero, -one]],
        ];
        let z = [self.z1, self.z2];
        let mut out = [0.0; 3];
        for (a, s) in pauli.iter().enumerate() {
            let mut acc = zero;
            for r in 0..2 {
                for c in 0..2 {
                    acc += z[r].conj() * s[r][c] * z[c];
                }
            }
            out[a] = acc.re;
        }
        Vec3::from(out)
    }

    /// `u = (Z₁/Z₂)*`.
    pub fn stereographic(&self) -> Stereo {
        if self.z2.norm_sqr() == 0.0 {
            Stereo::Infinity
        } else {
            Stereo::Finite((self.z1 / self.z2).conj())
        }
    }
}

pub fn spinor_z(point: &CylPoint, profile: &impl RadialProfile) -> Result<SpinorZ> {
    let (m, n) = profile.windings();
    let g = match ansatz_u(point, profile)? {
        Stereo::Infinity => f64::INFINITY,
        Stereo::Finite(u) => u.norm(),
    };
    Ok(SpinorZ::from_radial(g, m, n, point.phi, point.z))
}

/// Every pointwise quantity at one point of the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub u: Complex64,
    pub r: f64,
    pub phi: f64,
    pub x: f64,
    pub b: f64,
    pub y: f64,
    pub q: CVec3,
    pub alpha: CVec3,
    pub beta: Vec3,
    pub n_vec: Vec3,
    pub energy_density: f64,
}

pub fn field_sample(
    point: &CylPoint,
    profile: &impl RadialProfile,
    cfg: &EnergyConfig,
) -> Result<FieldSample> {
    if point.rho <= 0.0 {
        return Err(Error::Axis("field sample"));
    }
    let v = profile.eval(point.rho)?;
    let (m, n) = windings_of(profile);
    let phase = point.phase(m as i32, n as i32);
    let u = Complex64::from_polar(v.g, phase);
    let s = profile_scalars(u.norm())?;
    let q = q_from_radial(v, point.rho, m, n, phase)?;
    let ab = alpha_beta(&q, u);
    Ok(FieldSample {
        u,
        r: u.norm(),
        phi: u.arg(),
        x: s.x,
        b: s.b,
        y: s.y,
        q,
        alpha: ab.alpha,
        beta: ab.beta,
        n_vec: n_from_u(Stereo::Finite(u))?,
        energy_density: energy_from_radial(v, point.rho, m, n, phase, cfg),
    })
}
