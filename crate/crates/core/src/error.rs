use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{what} is outside its domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("{what} is singular at {value}")]
    Singularity { what: &'static str, value: f64 },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "quadrature for {what} did not converge: estimate {estimate:e}, \
         error {error:e} after {intervals} intervals"
    )]
    Quadrature {
        what: String,
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("truncation at n_max = {n_max} leaks {leaked:e} of probability")]
    Truncation { n_max: usize, leaked: f64 },

    #[error("step error {estimate:e} exceeds tolerance {tolerance:e} at t = {t}")]
    StepError { t: f64, estimate: f64, tolerance: f64 },

    #[error("{check} violated at t = {t}: {value:e}")]
    Conservation {
        check: &'static str,
        t: f64,
        value: f64,
    },
}

impl Error {
    pub(crate) fn quadrature(what: impl Into<String>, estimate: f64, error: f64, intervals: usize) -> Self {
        Error::Quadrature {
            what: what.into(),
            estimate,
            error,
            intervals,
        }
    }
}
