use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The pilot rate is too low for the decimated channel to be unaliased.
    #[error("pilot overhead {alpha} is below the unaliased minimum {alpha_min}")]
    Aliasing { alpha: f64, alpha_min: f64 },

    #[error("invalid spectral shape: {0}")]
    InvalidShape(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("outside the validity regime of the expansion: {0}")]
    OutOfRegime(String),

    #[error(
        "optimizer did not converge after {iterations} iterations \
         (best point {best_x}, objective {best_value})"
    )]
    NotConverged {
        iterations: usize,
        best_x: f64,
        best_value: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergent(_) | Error::OutOfRegime(_) | Error::NotConverged { .. }
        )
    }

    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
