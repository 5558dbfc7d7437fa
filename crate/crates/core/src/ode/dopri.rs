//! Dormand–Prince 5(4) with PI step-size control and the fourth-order continuous extension.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th- and 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<const D: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; D],
    pub y1: [f64; D],
    rcont: [[f64; D]; 5],
}

impl<const D: usize> Step<D> {
    /// Interpolated state at `t ∈ [t0, t1]`.
    pub fn dense(&self, t: f64) -> [f64; D] {
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepFailure {
    /// Step size fell below the resolvable limit.
    Underflow { nonfinite: bool },
}

pub struct Dopri5<F, const D: usize>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    f: F,
    t: f64,
    y: [f64; D],
    k1: [f64; D],
    h: f64,
    err_prev: f64,
    tol: Tolerance,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<F, const D: usize> Dopri5<F, D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    pub fn new(f: F, t0: f64, y0: [f64; D], tol: Tolerance) -> Self {
        let k1 = f(t0, &y0);
        let mut s = Self {
            f,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            err_prev: 1e-4,
            tol,
            accepted: 0,
            rejected: 0,
        };
        s.h = s.initial_step();
        s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; D] {
        self.y
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.tol.abs + self.tol.rel * a.abs().max(b.abs())
    }

    fn rms(&self, v: &[f64; D], reference: &[f64; D]) -> f64 {
        let s: f64 = (0..D)
            .map(|i| (v[i] / self.scale(reference[i], reference[i])).powi(2))
            .sum();
        (s / D as f64).sqrt()
    }

    /// Hairer–Nørsett–Wanner starting step.
    fn initial_step(&self) -> f64 {
        let d0 = self.rms(&self.y, &self.y);
        let d1 = self.rms(&self.k1, &self.y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(0.1 * self.t.abs().max(1e-12) + 1e-6);
        let y1 = axpy(&self.y, h0, &[(1.0, &self.k1)]);
        let f1 = (self.f)(self.t + h0, &y1);
        let diff: [f64; D] = std::array::from_fn(|i| f1[i] - self.k1[i]);
        let d2 = self.rms(&diff, &self.y) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1)
    }

    /// Advance by one accepted step, never beyond `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<Step<D>, StepFailure> {
        let mut h = self.h.min(t_end - self.t);
        let mut nonfinite = false;
        loop {
            let h_min = 16.0 * f64::EPSILON * self.t.abs().max(1e-300);
            if h < h_min {
                return Err(StepFailure::Underflow { nonfinite });
            }
            let (t, y, k1) = (self.t, self.y, self.k1);
            let f = &self.f;
            let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y1 = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + h, &y1);

            let finite = y1.iter().chain(k7.iter()).all(|v| v.is_finite());
            let err = if finite {
                let e: [f64; D] = std::array::from_fn(|i| {
                    h * (E1 * k1[i]
                        + E3 * k3[i]
                        + E4 * k4[i]
                        + E5 * k5[i]
                        + E6 * k6[i]
                        + E7 * k7[i])
                });
                let s: f64 = (0..D)
                    .map(|i| (e[i] / self.scale(y[i], y1[i])).powi(2))
                    .sum();
                (s / D as f64).sqrt()
            } else {
                nonfinite = true;
                f64::INFINITY
            };

            if err.is_finite() && err <= 1.0 {
                let err = err.max(1e-10);
                let fac =
                    (SAFETY * err.powf(-ALPHA) * self.err_prev.powf(BETA)).clamp(FAC_MIN, FAC_MAX);
                self.err_prev = err;
                let rcont: [[f64; D]; 5] = {
                    let r2: [f64; D] = std::array::from_fn(|i| y1[i] - y[i]);
                    let r3: [f64; D] = std::array::from_fn(|i| h * k1[i] - r2[i]);
                    let r4: [f64; D] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
                    let r5: [f64; D] = std::array::from_fn(|i| {
                        h * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i])
                    });
                    [y, r2, r3, r4, r5]
                };
                let t1 = if h == t_end - t { t_end } else { t + h };
                let step = Step {
                    t0: t,
                    t1,
                    y0: y,
                    y1,
                    rcont,
                };
                self.t = t1;
                self.y = y1;
                self.k1 = k7;
                self.h = h * fac;
                self.accepted += 1;
                return Ok(step);
            }

            self.rejected += 1;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ALPHA)).clamp(FAC_MIN, 1.0)
            } else {
                0.25
            };
            h *= fac;
            self.h = h;
        }
    }
}
