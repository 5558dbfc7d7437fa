use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} is undefined on the symmetry axis (rho = 0)")]
    Axis(&'static str),

    #[error("rho = {rho} lies outside the profile domain [0, {end})")]
    OutOfDomain { rho: f64, end: f64 },

    #[error("leading coefficient P vanishes at rho = {rho}")]
    SingularCoefficient { rho: f64 },

    #[error("step size underflow at rho = {rho} (g = {g}, g' = {gp})")]
    Stiffness { rho: f64, g: f64, gp: f64 },

    #[error("non-finite state at rho = {rho}")]
    NonFinite { rho: f64 },

    #[error("pole fit failed: {0}")]
    Fit(String),

    #[error("degenerate gradient: {0}")]
    DegenerateGradient(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "bracket [{lo}, {hi}] does not straddle rho0 = {target} (ends give {rho0_lo}, {rho0_hi})"
    )]
    Bracket {
        lo: f64,
        hi: f64,
        target: f64,
        rho0_lo: f64,
        rho0_hi: f64,
    },

    #[error("classification changed inside bracket at c = {c}: {detail}")]
    ClassificationChange { c: f64, detail: String },

    #[error("input not found: {0}")]
    MissingInput(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed file: {0}")]
    Format(String),
}

impl Error {
    /// Failures of the numerics themselves, as opposed to bad input or i/o.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularCoefficient { .. }
                | Error::Stiffness { .. }
                | Error::NonFinite { .. }
                | Error::Fit(_)
                | Error::DegenerateGradient(_)
                | Error::Bracket { .. }
                | Error::ClassificationChange { .. }
        )
    }
}
