//! Radial profiles `g(ρ)` as consumed by the field, topology and verification layers.

use crate::error::{Error, Result};

/// Value of the profile and its first derivative at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValue {
    pub g: f64,
    pub gp: f64,
}

/// How the radial domain of a profile terminates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileEnd {
    /// `g → ∞` at `rho0`; samples stop at `last_rho < rho0`.
    Pole { rho0: f64, last_rho: f64 },
    /// Finite `g` up to `rho_end`.
    Horizon { rho_end: f64 },
}

impl ProfileEnd {
    /// Largest radius where the profile is represented by data rather than by an asymptotic model.
    pub fn last_rho(&self) -> f64 {
        match *self {
            ProfileEnd::Pole { last_rho, .. } => last_rho,
            ProfileEnd::Horizon { rho_end } => rho_end,
        }
    }

    /// Supremum of the domain (`ρ₀` or the horizon).
    pub fn rho_end(&self) -> f64 {
        match *self {
            ProfileEnd::Pole { rho0, .. } => rho0,
            ProfileEnd::Horizon { rho_end } => rho_end,
        }
    }
}

/// A radial profile of the ansatz together with its windings.
pub trait RadialProfile: Sync {
    /// `(m, n)`.
    fn windings(&self) -> (i32, i32);

    fn end(&self) -> ProfileEnd;

    /// `g` and `g'` at `rho`; errors outside the domain.
    fn eval(&self, rho: f64) -> Result<RadialValue>;

    /// Breakpoints of the underlying representation on `[0, end().last_rho()]`, increasing.
    fn knots(&self) -> Vec<f64>;
}

/// Piecewise cubic Hermite interpolant on `(ρ, g, g')` samples.
///
/// `g'` is returned as the derivative of the cubic, so that `f(g)` integrated
/// through its derivative telescopes exactly between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    rho: Vec<f64>,
    g: Vec<f64>,
    gp: Vec<f64>,
}

impl HermiteTable {
    pub fn new(rho: Vec<f64>, g: Vec<f64>, gp: Vec<f64>) -> Result<Self> {
        if rho.len() < 2 || rho.len() != g.len() || rho.len() != gp.len() {
            return Err(Error::Precondition(
                "interpolation table needs at least two samples of equal-length columns".into(),
            ));
        }
        if rho.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Precondition(
                "sample radii must be strictly increasing".into(),
            ));
        }
        Ok(Self { rho, g, gp })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn first(&self) -> f64 {
        self.rho[0]
    }

    pub fn last(&self) -> f64 {
        *self.rho.last().unwrap()
    }

    /// Interpolated `(g, g')`; `rho` must lie within `[first, last]`.
    pub fn eval(&self, rho: f64) -> RadialValue {
        let n = self.rho.len();
        let i = self.rho.partition_point(|&r| r <= rho).clamp(1, n - 1) - 1;
        let (r0, r1) = (self.rho[i], self.rho[i + 1]);
        let h = r1 - r0;
        let t = (rho - r0) / h;
        let (y0, y1) = (self.g[i], self.g[i + 1]);
        let (d0, d1) = (self.gp[i] * h, self.gp[i + 1] * h);

        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let g = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;

        let dh00 = 6.0 * t2 - 6.0 * t;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = -dh00;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let gp = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
        RadialValue { g, gp }
    }
}

type ScalarFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A profile given in closed form, used for identities that hold for any smooth `g`.
pub struct AnalyticProfile {
    m: i32,
    n: i32,
    end: ProfileEnd,
    g: ScalarFn,
    gp: ScalarFn,
    knot_count: usize,
}

impl AnalyticProfile {
    /// Profile on `[0, rho_end]` with finite values everywhere.
    pub fn new(
        m: i32,
        n: i32,
        rho_end: f64,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        gp: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            m,
            n,
            end: ProfileEnd::Horizon { rho_end },
            g: Box::new(g),
            gp: Box::new(gp),
            knot_count: 257,
        }
    }

    /// Treat the profile as having a pole at `rho0`, represented up to `last_rho`.
    pub fn with_pole(mut self, rho0: f64, last_rho: f64) -> Self {
        self.end = ProfileEnd::Pole { rho0, last_rho };
        self
    }

    pub fn with_knot_count(mut self, knots: usize) -> Self {
        self.knot_count = knots.max(2);
        self
    }
}

impl RadialProfile for AnalyticProfile {
    fn windings(&self) -> (i32, i32) {
        (self.m, self.n)
    }

    fn end(&self) -> ProfileEnd {
        self.end
    }

    fn eval(&self, rho: f64) -> Result<RadialValue> {
        let end = self.end.rho_end();
        let inside = match self.end {
            ProfileEnd::Pole { .. } => rho < end,
            ProfileEnd::Horizon { .. } => rho <= end,
        };
        if !(rho >= 0.0 && inside) {
            return Err(Error::OutOfDomain { rho, end });
        }
        Ok(RadialValue {
            g: (self.g)(rho),
            gp: (self.gp)(rho),
        })
    }

    fn knots(&self) -> Vec<f64> {
        let last = self.end.last_rho();
        let k = self.knot_count - 1;
        (0..=k).map(|i| last * i as f64 / k as f64).collect()
    }
}
