use serde::{Deserialize, Serialize};

use super::dopri::{Dopri5, Step, StepFailure, Tolerance};
use super::rhs::{coefficient_p, ode_rhs, series_start, source_term, OdeState};
use super::tail::{estimate_rho0, PoleFit};
use crate::error::{Error, Result};
use crate::field::AnsatzParams;
use crate::profile::{HermiteTable, ProfileEnd, RadialProfile, RadialValue};

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Radius of the series start.
    pub rho_eps: f64,
    /// Blow-up threshold on `g`.
    pub g_max: f64,
    /// Integration horizon for bounded solutions.
    pub rho_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Samples with `g ≥ tail_lo` enter the pole fit.
    pub tail_lo: f64,
    /// Spacing of the uniform dense-output nodes added to the integrator's own nodes.
    pub sample_step: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            rho_eps: 1e-6,
            g_max: 1e6,
            rho_max: 50.0,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            tail_lo: 1e2,
            sample_step: 1e-3,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rho_eps > 0.0
            && self.rho_eps < 1e-2
            && self.tail_lo > 1.0
            && self.g_max > self.tail_lo
            && self.rho_max > self.rho_eps
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.sample_step > 0.0
            && [
                self.g_max,
                self.rho_max,
                self.rel_tol,
                self.abs_tol,
                self.sample_step,
            ]
            .iter()
            .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "inconsistent solver configuration {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// `g` blows up like `tail_constant/(rho0 − ρ)`.
    Singular { rho0: f64, tail_constant: f64 },
    /// `g` stays below `g_max` on `[rho_eps, rho_max]`.
    Bounded { rho_max: f64, g_sup: f64 },
}

impl Classification {
    pub fn rho0(&self) -> Option<f64> {
        match *self {
            Classification::Singular { rho0, .. } => Some(rho0),
            Classification::Bounded { .. } => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Classification::Singular { .. })
    }
}

/// A solved radial profile. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSolution {
    params: AnsatzParams,
    config: SolveConfig,
    classification: Classification,
    pole_fit: Option<PoleFit>,
    table: HermiteTable,
    g: Vec<f64>,
    gp: Vec<f64>,
}

impl ProfileSolution {
    /// Rebuild from stored columns (used when loading solution files).
    pub fn from_parts(
        params: AnsatzParams,
        config: SolveConfig,
        classification: Classification,
        rho: Vec<f64>,
        g: Vec<f64>,
        gp: Vec<f64>,
    ) -> Result<Self> {
        params.validate()?;
        let table = HermiteTable::new(rho, g.clone(), gp.clone())?;
        if let Classification::Singular { rho0, .. } = classification {
            if !(rho0 > table.last()) {
                return Err(Error::Precondition(format!(
                    "pole {rho0} must lie beyond the last sample {}",
                    table.last()
                )));
            }
        }
        Ok(Self {
            params,
            config,
            classification,
            pole_fit: None,
            table,
            g,
            gp,
        })
    }

    pub fn with_pole_fit(mut self, fit: Option<PoleFit>) -> Self {
        self.pole_fit = fit;
        self
    }

    pub fn params(&self) -> &AnsatzParams {
        &self.params
    }

    pub fn config(&self) -> &SolveConfig {
        &self.config
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    /// Pole fit diagnostics of singular profiles.
    pub fn pole_fit(&self) -> Option<&PoleFit> {
        self.pole_fit.as_ref()
    }

    pub fn rho(&self) -> &[f64] {
        self.table.rho()
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn gp(&self) -> &[f64] {
        &self.gp
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// Samples `(ρ, g)` with `g ≥ threshold` at the end of a singular profile.
    pub fn tail(&self, threshold: f64) -> Vec<(f64, f64)> {
        tail_of(self.rho(), &self.g, threshold)
    }

    /// Same radial nodes with `g` replaced by `g·(1 + amplitude·sin(k ρ))` and `g'` updated
    /// consistently. Used as a negative control for the verifiers.
    pub fn modulated(&self, amplitude: f64, wavenumber: f64) -> Result<Self> {
        let rho = self.rho().to_vec();
        let g: Vec<f64> = rho
            .iter()
            .zip(&self.g)
            .map(|(&r, &g)| g * (1.0 + amplitude * (wavenumber * r).sin()))
            .collect();
        let gp: Vec<f64> = rho
            .iter()
            .zip(self.g.iter().zip(&self.gp))
            .map(|(&r, (&g, &gp))| {
                gp * (1.0 + amplitude * (wavenumber * r).sin())
                    + g * amplitude * wavenumber * (wavenumber * r).cos()
            })
            .collect();
        Self::from_parts(self.params, self.config, self.classification, rho, g, gp)
    }

    /// `g` and `g'` multiplied by a constant.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_parts(
            self.params,
            self.config,
            self.classification,
            self.rho().to_vec(),
            self.g.iter().map(|g| g * factor).collect(),
            self.gp.iter().map(|g| g * factor).collect(),
        )
    }
}

impl RadialProfile for ProfileSolution {
    fn windings(&self) -> (i32, i32) {
        (self.params.m, self.params.n)
    }

    fn end(&self) -> ProfileEnd {
        match self.classification {
            Classification::Singular { rho0, .. } => ProfileEnd::Pole {
                rho0,
                last_rho: self.table.last(),
            },
            Classification::Bounded { .. } => ProfileEnd::Horizon {
                rho_end: self.table.last(),
            },
        }
    }

    fn eval(&self, rho: f64) -> Result<RadialValue> {
        if !(rho >= 0.0) {
            return Err(Error::OutOfDomain {
                rho,
                end: self.end().rho_end(),
            });
        }
        if rho < self.table.first() {
            let k = self.params.abs_m();
            let c = self.params.c_lead;
            return Ok(RadialValue {
                g: c * rho.powi(k),
                gp: c * k as f64 * rho.powi(k - 1),
            });
        }
        if rho <= self.table.last() {
            return Ok(self.table.eval(rho));
        }
        match self.classification {
            Classification::Singular {
                rho0,
                tail_constant,
            } if rho < rho0 => {
                let d = rho0 - rho;
                Ok(RadialValue {
                    g: tail_constant / d,
                    gp: tail_constant / (d * d),
                })
            }
            _ => Err(Error::OutOfDomain {
                rho,
                end: self.end().rho_end(),
            }),
        }
    }

    fn knots(&self) -> Vec<f64> {
        let mut k = Vec::with_capacity(self.len() + 1);
        if self.table.first() > 0.0 {
            k.push(0.0);
        }
        k.extend_from_slice(self.rho());
        k
    }
}

fn tail_of(rho: &[f64], g: &[f64], threshold: f64) -> Vec<(f64, f64)> {
    let start = g.iter().rposition(|&v| v < threshold).map_or(0, |i| i + 1);
    rho[start..]
        .iter()
        .copied()
        .zip(g[start..].iter().copied())
        .collect()
}

struct SampleSink {
    rho: Vec<f64>,
    g: Vec<f64>,
    gp: Vec<f64>,
    spacing: f64,
    next_node: u64,
}

impl SampleSink {
    fn push(&mut self, rho: f64, y: [f64; 2]) {
        if self.rho.last().is_some_and(|&last| rho <= last) {
            return;
        }
        self.rho.push(rho);
        self.g.push(y[0]);
        self.gp.push(y[1]);
    }

    /// Uniform nodes strictly inside `(t0, t_stop)` from the step's continuous extension.
    fn push_uniform(&mut self, step: &Step<2>, t_stop: f64) {
        loop {
            let node = self.next_node as f64 * self.spacing;
            if node >= t_stop {
                break;
            }
            if node > step.t0 {
                self.push(node, step.dense(node));
            }
            self.next_node += 1;
        }
    }
}

/// Integrate the profile equation outward from the series start until `g` reaches
/// `g_max` (singular) or `ρ` reaches `rho_max` (bounded).
pub fn integrate_profile(params: &AnsatzParams, cfg: &SolveConfig) -> Result<ProfileSolution> {
    params.validate()?;
    cfg.validate()?;
    let start = series_start(params, cfg.rho_eps);
    let p = *params;
    let rhs = move |rho: f64, y: &[f64; 2]| -> [f64; 2] {
        match ode_rhs(
            OdeState {
                rho,
                g: y[0],
                gp: y[1],
            },
            &p,
        ) {
            Ok(t) => [y[1], t.gpp],
            Err(_) => [f64::NAN, f64::NAN],
        }
    };
    let tol = Tolerance {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let mut stepper = Dopri5::new(rhs, start.rho, [start.g, start.gp], tol);
    let mut sink = SampleSink {
        rho: Vec::new(),
        g: Vec::new(),
        gp: Vec::new(),
        spacing: cfg.sample_step,
        next_node: (start.rho / cfg.sample_step).floor() as u64 + 1,
    };
    sink.push(start.rho, [start.g, start.gp]);

    let mut g_sup = start.g;
    let mut blow_up = false;
    for _ in 0..MAX_STEPS {
        if stepper.t() >= cfg.rho_max {
            break;
        }
        let step = match stepper.step(cfg.rho_max) {
            Ok(s) => s,
            Err(StepFailure::Underflow { nonfinite }) => {
                let y = stepper.y();
                return Err(if nonfinite && !y.iter().all(|v| v.is_finite()) {
                    Error::NonFinite { rho: stepper.t() }
                } else {
                    Error::Stiffness {
                        rho: stepper.t(),
                        g: y[0],
                        gp: y[1],
                    }
                });
            }
        };
        if step.y1[0] >= cfg.g_max {
            let t_hit = locate_crossing(&step, cfg.g_max);
            sink.push_uniform(&step, t_hit);
            sink.push(t_hit, step.dense(t_hit));
            blow_up = true;
            break;
        }
        sink.push_uniform(&step, step.t1);
        sink.push(step.t1, step.y1);
        g_sup = g_sup.max(step.y1[0]);
    }
    if !blow_up && stepper.t() < cfg.rho_max {
        let y = stepper.y();
        return Err(Error::Stiffness {
            rho: stepper.t(),
            g: y[0],
            gp: y[1],
        });
    }

    let SampleSink { rho, g, gp, .. } = sink;
    if blow_up {
        let fit = estimate_rho0(&tail_of(&rho, &g, cfg.tail_lo))?;
        let mut sol = ProfileSolution::from_parts(
            *params,
            *cfg,
            Classification::Singular {
                rho0: fit.rho0,
                tail_constant: fit.tail_constant,
            },
            rho,
            g,
            gp,
        )?;
        sol.pole_fit = Some(fit);
        Ok(sol)
    } else {
        ProfileSolution::from_parts(
            *params,
            *cfg,
            Classification::Bounded {
                rho_max: cfg.rho_max,
                g_sup,
            },
            rho,
            g,
            gp,
        )
    }
}

/// Bisection on the continuous extension for `g(t) = level` inside a step.
fn locate_crossing(step: &Step<2>, level: f64) -> f64 {
    let (mut lo, mut hi) = (step.t0, step.t1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if step.dense(mid)[0] >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Residual of the conservation form `d/dρ(P g') = RHS` along the stored samples, using
/// midpoint differences of `P g'`. Returns the largest `|d(Pg')/dρ − RHS| / max(|RHS|, 1)`
/// over sample intervals inside `[lo, hi]`.
pub fn implicit_form_residual(sol: &ProfileSolution, lo: f64, hi: f64) -> f64 {
    let (m, n) = (sol.params.m as f64, sol.params.n as f64);
    let rho = sol.rho();
    let flux: Vec<f64> = (0..sol.len())
        .map(|i| coefficient_p(rho[i], sol.g[i], m, n).0 * sol.gp[i])
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..sol.len() - 1 {
        let mid = 0.5 * (rho[i] + rho[i + 1]);
        if mid < lo || mid > hi {
            continue;
        }
        let v = sol.table.eval(mid);
        let d_flux = (flux[i + 1] - flux[i]) / (rho[i + 1] - rho[i]);
        let src = source_term(mid, v.g, v.gp, m, n);
        worst = worst.max((d_flux - src).abs() / src.abs().max(1.0));
    }
    worst
}
