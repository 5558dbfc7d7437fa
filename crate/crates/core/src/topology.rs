//! Hopf-type charge of `n: M → S²` for the ansatz.
//!
//! With `f = |Z₁|² = g²/(1+g²)` the gauge potential is `A = (0, 2m(1−f)/ρ, −2nf)` and its
//! curl `B = (0, 2nf', −2mf'/ρ)`, so `A·B = 4mn f'/ρ` and the charge density integrates
//! to `Q = mn (f(ρ_end) − f(0))`. Three independent evaluations are provided:
//!
//! * [`hopf_closed`]: the endpoint formula.
//! * [`hopf_reduced`]: Gauss–Legendre quadrature of `mn f'(ρ)` over the profile knots.
//! * [`hopf_grid3d`]: `(1/12π²)∫ ε_{αβγδ} Φ_α ∂(Φ_β, Φ_γ, Φ_δ)/∂(x, y, z) dV` on a
//!   cylindrical grid, with finite differences in `ρ` and exact angular derivatives.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CylPoint, SpinorZ, Vec3};
use crate::profile::{ProfileEnd, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChargeMethod {
    Closed,
    Reduced,
    Grid3d,
}

impl std::str::FromStr for ChargeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Self::Closed),
            "reduced" => Ok(Self::Reduced),
            "grid3d" => Ok(Self::Grid3d),
            other => Err(Error::Precondition(format!(
                "unknown charge method '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Discretization {
    Endpoint,
    GaussLegendre {
        points: usize,
        subdivisions: usize,
        intervals: usize,
    },
    Grid3d {
        n_rho: usize,
        n_phi: usize,
        n_z: usize,
        axis_excision: f64,
        rho_hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub method: ChargeMethod,
    pub value: f64,
    /// `m·n`.
    pub expected: i64,
    pub deviation: f64,
    pub nearest_integer_distance: f64,
    /// `None` when no estimate is available (e.g. a grid too coarse for Richardson).
    pub abs_error_estimate: Option<f64>,
    /// `mn(1 − f(ρ_last))`, the part of the charge between the last sample and the pole.
    /// Included in `value` for the quadrature methods.
    pub tail_correction: f64,
    /// Charge inside the excised axis cylinder, `mn·f(ε)`; not included in `value`.
    pub axis_excision_bound: Option<f64>,
    pub discretization: Discretization,
}

impl ChargeReport {
    fn new(
        method: ChargeMethod,
        value: f64,
        expected: i64,
        abs_error_estimate: Option<f64>,
        tail_correction: f64,
        axis_excision_bound: Option<f64>,
        discretization: Discretization,
    ) -> Self {
        Self {
            method,
            value,
            expected,
            deviation: value - expected as f64,
            nearest_integer_distance: (value - value.round()).abs(),
            abs_error_estimate,
            tail_correction,
            axis_excision_bound,
            discretization,
        }
    }
}

/// Gauge potential, its curl and `f = |Z₁|²` at a point (cylindrical frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeData {
    pub a: Vec3,
    pub b_curl: Vec3,
    pub f: f64,
}

fn f_of(g: f64) -> f64 {
    if g.abs() > 1.0 {
        let w = 1.0 / g;
        1.0 / (1.0 + w * w)
    } else {
        g * g / (1.0 + g * g)
    }
}

fn f_prime(g: f64, gp: f64) -> f64 {
    if g.abs() > 1.0 {
        // 2g'/(g³(1 + g⁻²)²) without overflow
        let w = 1.0 / g;
        let s = 1.0 + w * w;
        2.0 * gp * w * w * w / (s * s)
    } else {
        let s = 1.0 + g * g;
        2.0 * g * gp / (s * s)
    }
}

pub fn gauge_potential(point: &CylPoint, profile: &impl RadialProfile) -> Result<GaugeData> {
    if point.rho <= 0.0 {
        return Err(Error::Axis("gauge potential"));
    }
    let v = profile.eval(point.rho)?;
    let (m, n) = profile.windings();
    let (m, n) = (m as f64, n as f64);
    let f = f_of(v.g);
    let fp = f_prime(v.g, v.gp);
    Ok(GaugeData {
        a: Vec3::new(0.0, 2.0 * m * (1.0 - f) / point.rho, -2.0 * n * f),
        b_curl: Vec3::new(0.0, 2.0 * n * fp, -2.0 * m * fp / point.rho),
        f,
    })
}

fn mn(profile: &impl RadialProfile) -> i64 {
    let (m, n) = profile.windings();
    m as i64 * n as i64
}

fn tail_correction(profile: &impl RadialProfile) -> Result<f64> {
    match profile.end() {
        ProfileEnd::Pole { last_rho, .. } => {
            let g_last = profile.eval(last_rho)?.g;
            Ok(mn(profile) as f64 * (1.0 - f_of(g_last)))
        }
        ProfileEnd::Horizon { .. } => Ok(0.0),
    }
}

/// `Q = mn (f(ρ_end) − f(0))` with `f(ρ₀) = 1` at a pole.
pub fn hopf_closed(profile: &impl RadialProfile) -> Result<ChargeReport> {
    let q = mn(profile);
    let f0 = f_of(profile.eval(0.0)?.g);
    let f_end = match profile.end() {
        ProfileEnd::Pole { .. } => 1.0,
        ProfileEnd::Horizon { rho_end } => f_of(profile.eval(rho_end)?.g),
    };
    let tail = tail_correction(profile)?;
    Ok(ChargeReport::new(
        ChargeMethod::Closed,
        q as f64 * (f_end - f0),
        q,
        Some(tail.abs()),
        tail,
        None,
        Discretization::Endpoint,
    ))
}

fn gauss_legendre(points: usize) -> Result<(&'static [f64], &'static [f64])> {
    const X1: [f64; 1] = [0.0];
    const W1: [f64; 1] = [2.0];
    const X2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
    const W2: [f64; 2] = [1.0, 1.0];
    const X3: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    const X4: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const W4: [f64; 4] = [
        0.347_854_845_137_453_9,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_9,
    ];
    const X5: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const W5: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    match points {
        1 => Ok((&X1, &W1)),
        2 => Ok((&X2, &W2)),
        3 => Ok((&X3, &W3)),
        4 => Ok((&X4, &W4)),
        5 => Ok((&X5, &W5)),
        _ => Err(Error::Precondition(format!(
            "Gauss-Legendre rule with {points} points not available (1..=5)"
        ))),
    }
}

fn reduced_integral(
    profile: &impl RadialProfile,
    points: usize,
    subdivisions: usize,
) -> Result<f64> {
    let (xs, ws) = gauss_legendre(points)?;
    let knots = profile.knots();
    let mut total = 0.0;
    for w in knots.windows(2) {
        let h = (w[1] - w[0]) / subdivisions as f64;
        for s in 0..subdivisions {
            let a = w[0] + h * s as f64;
            let mut part = 0.0;
            for (x, wt) in xs.iter().zip(ws) {
                let v = profile.eval(a + 0.5 * h * (x + 1.0))?;
                part += wt * f_prime(v.g, v.gp);
            }
            total += 0.5 * h * part;
        }
    }
    Ok(total)
}

/// `Q = (1/16π²)·4π²·∫ A·B ρ dρ = mn ∫ f' dρ` by composite Gauss–Legendre quadrature
/// on the profile knots, each interval split into `subdivisions` panels. The error estimate
/// is the change under doubling `subdivisions`.
pub fn hopf_reduced(
    profile: &impl RadialProfile,
    points: usize,
    subdivisions: usize,
) -> Result<ChargeReport> {
    if subdivisions == 0 {
        return Err(Error::Precondition("subdivisions must be positive".into()));
    }
    let q = mn(profile);
    let tail = tail_correction(profile)?;
    let coarse = q as f64 * reduced_integral(profile, points, subdivisions)?;
    let fine = q as f64 * reduced_integral(profile, points, 2 * subdivisions)?;
    Ok(ChargeReport::new(
        ChargeMethod::Reduced,
        coarse + tail,
        q,
        Some((fine - coarse).abs()),
        tail,
        None,
        Discretization::GaussLegendre {
            points,
            subdivisions,
            intervals: profile.knots().len().saturating_sub(1),
        },
    ))
}

/// Sign of a permutation of `0..4`, zero for repeated indices.
pub fn levi_civita4(idx: [usize; 4]) -> f64 {
    for i in 0..4 {
        if idx[i] > 3 {
            return 0.0;
        }
        for j in (i + 1)..4 {
            if idx[i] == idx[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn permutations4() -> Vec<([usize; 4], f64)> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let s = levi_civita4([a, b, c, d]);
                    if s != 0.0 {
                        out.push(([a, b, c, d], s));
                    }
                }
            }
        }
    }
    out
}

fn det3(r0: [f64; 3], r1: [f64; 3], r2: [f64; 3]) -> f64 {
    r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
}

/// `(1/12π²) ε_{αβγδ} Φ_α ∂(Φ_β, Φ_γ, Φ_δ)/∂(x, y, z)` from `Φ` and its cylindrical partials.
fn levi_civita_form(
    perms: &[([usize; 4], f64)],
    phi_vals: [f64; 4],
    d_rho: [f64; 4],
    d_phi: [f64; 4],
    d_z: [f64; 4],
    rho: f64,
    angle: f64,
) -> f64 {
    let (sn, cs) = angle.sin_cos();
    // Cartesian gradient of each component
    let grad: [[f64; 3]; 4] = std::array::from_fn(|k| {
        [
            cs * d_rho[k] - sn / rho * d_phi[k],
            sn * d_rho[k] + cs / rho * d_phi[k],
            d_z[k],
        ]
    });
    let mut acc = 0.0;
    for &([a, b, c, d], s) in perms {
        acc += s * phi_vals[a] * det3(grad[b], grad[c], grad[d]);
    }
    acc / (12.0 * PI * PI)
}

fn angular_partials(z: &SpinorZ, m: i32, n: i32) -> ([f64; 4], [f64; 4]) {
    let (m, n) = (m as f64, n as f64);
    // ∂_φ Z₂ = i m Z₂, ∂_z Z₁ = −i n Z₁
    let d_phi = [0.0, 0.0, -m * z.z2.im, m * z.z2.re];
    let d_z = [n * z.z1.im, -n * z.z1.re, 0.0, 0.0];
    (d_phi, d_z)
}

/// Charge density `A·B/16π²` at a point.
pub fn ab_density(point: &CylPoint, profile: &impl RadialProfile) -> Result<f64> {
    let gd = gauge_potential(point, profile)?;
    Ok(gd.a.dot(&gd.b_curl) / (16.0 * PI * PI))
}

/// Levi-Civita charge density at a point, with `∂_ρΦ` by a central difference of step `h`.
pub fn levi_civita_density(point: &CylPoint, profile: &impl RadialProfile, h: f64) -> Result<f64> {
    if point.rho <= h {
        return Err(Error::Axis("charge density"));
    }
    let (m, n) = profile.windings();
    let spinor = |rho: f64| -> Result<SpinorZ> {
        Ok(SpinorZ::from_radial(
            profile.eval(rho)?.g,
            m,
            n,
            point.phi,
            point.z,
        ))
    };
    let z0 = spinor(point.rho)?;
    let (zp, zm) = (spinor(point.rho + h)?, spinor(point.rho - h)?);
    let (cp, cm) = (zp.components(), zm.components());
    let d_rho = std::array::from_fn(|k| (cp[k] - cm[k]) / (2.0 * h));
    let (d_phi, d_z) = angular_partials(&z0, m, n);
    Ok(levi_civita_form(
        &permutations4(),
        z0.components(),
        d_rho,
        d_phi,
        d_z,
        point.rho,
        point.phi,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3dSpec {
    pub n_rho: usize,
    pub n_phi: usize,
    pub n_z: usize,
    pub axis_excision: f64,
}

impl Default for Grid3dSpec {
    fn default() -> Self {
        Self {
            n_rho: 512,
            n_phi: 32,
            n_z: 32,
            axis_excision: 1e-3,
        }
    }
}

const MIN_GRID: usize = 16;

/// Integral of the Levi-Civita density over `[ε, ρ_last] × [0, 2π)²` with `n_rho` radial nodes.
fn grid_integral(
    profile: &impl RadialProfile,
    n_rho: usize,
    n_phi: usize,
    n_z: usize,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let (m, n) = profile.windings();
    let h = (hi - lo) / (n_rho - 1) as f64;
    let radii: Vec<f64> = (0..n_rho)
        .map(|i| {
            if i == n_rho - 1 {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect();
    let g: Vec<f64> = radii
        .iter()
        .map(|&r| profile.eval(r).map(|v| v.g))
        .collect::<Result<_>>()?;
    let perms = permutations4();
    let (dphi, dz) = (TAU / n_phi as f64, TAU / n_z as f64);

    let slabs: Vec<f64> = (0..n_rho)
        .into_par_iter()
        .map(|i| {
            let (i0, i1, i2, c) = if i == 0 {
                (0, 1, 2, [-3.0, 4.0, -1.0])
            } else if i == n_rho - 1 {
                (i - 2, i - 1, i, [1.0, -4.0, 3.0])
            } else {
                (i - 1, i, i + 1, [-1.0, 0.0, 1.0])
            };
            let mut slab = 0.0;
            for jp in 0..n_phi {
                let phi = dphi * jp as f64;
                for jz in 0..n_z {
                    let z = dz * jz as f64;
                    let at = |k: usize| SpinorZ::from_radial(g[k], m, n, phi, z).components();
                    let (p0, p1, p2) = (at(i0), at(i1), at(i2));
                    let d_rho: [f64; 4] = std::array::from_fn(|k| {
                        (c[0] * p0[k] + c[1] * p1[k] + c[2] * p2[k]) / (2.0 * h)
                    });
                    let here = SpinorZ::from_radial(g[i], m, n, phi, z);
                    let (d_phi, d_z) = angular_partials(&here, m, n);
                    slab += levi_civita_form(
                        &perms,
                        here.components(),
                        d_rho,
                        d_phi,
                        d_z,
                        radii[i],
                        phi,
                    );
                }
            }
            let trap = if i == 0 || i == n_rho - 1 { 0.5 } else { 1.0 };
            trap * h * radii[i] * slab * dphi * dz
        })
        .collect();
    Ok(pairwise_sum(&slabs))
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        k if k <= 8 => v.iter().sum(),
        k => pairwise_sum(&v[..k / 2]) + pairwise_sum(&v[k / 2..]),
    }
}

/// Full 3-D quadrature of the Levi-Civita form. The tail beyond the last sample is
/// supplied by the endpoint formula; the Richardson estimate compares against the
/// grid with half the radial nodes, assuming second-order convergence.
pub fn hopf_grid3d(profile: &impl RadialProfile, grid: &Grid3dSpec) -> Result<ChargeReport> {
    let Grid3dSpec {
        n_rho,
        n_phi,
        n_z,
        axis_excision: eps,
    } = *grid;
    if n_rho < MIN_GRID || n_phi < MIN_GRID || n_z < MIN_GRID {
        return Err(Error::Precondition(format!(
            "grid sizes must be at least {MIN_GRID}, got {n_rho}x{n_phi}x{n_z}"
        )));
    }
    let hi = profile.end().last_rho();
    if !(eps > 0.0 && eps < hi) {
        return Err(Error::Precondition(format!(
            "axis excision {eps} must lie in (0, {hi})"
        )));
    }
    let q = mn(profile);
    let tail = tail_correction(profile)?;
    let fine = grid_integral(profile, n_rho, n_phi, n_z, eps, hi)?;
    let coarse_n = n_rho / 2;
    let estimate = if coarse_n >= MIN_GRID {
        let coarse = grid_integral(profile, coarse_n, n_phi, n_z, eps, hi)?;
        let ratio = (n_rho - 1) as f64 / (coarse_n - 1) as f64;
        Some((fine - coarse).abs() / (ratio * ratio - 1.0))
    } else {
        None
    };
    let axis = q as f64 * f_of(profile.eval(eps)?.g);
    Ok(ChargeReport::new(
        ChargeMethod::Grid3d,
        fine + tail,
        q,
        estimate,
        tail,
        Some(axis.abs()),
        Discretization::Grid3d {
            n_rho,
            n_phi,
            n_z,
            axis_excision: eps,
            rho_hi: hi,
        },
    ))
}
