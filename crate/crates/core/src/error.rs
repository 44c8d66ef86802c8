//! Error type shared by every numerical routine in the crate.

use thiserror::Error;

/// Failure modes of the special functions, quadratures and density evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument sits on a pole of a Gamma factor.
    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    /// Result exceeds the representable range of `f64`.
    #[error("overflow in {0}")]
    Overflow(&'static str),

    /// Argument or parameter outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive scheme failed to reach its tolerance.
    #[error("no convergence in {what}: estimate {estimate:e}, error {error:e}")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    /// The integrand returned NaN or an infinity at a quadrature node.
    #[error("non-finite integrand value at {at}")]
    NaNDetected { at: f64 },

    /// Too many nested levels in an iterated composition integral.
    #[error("composition depth {depth} exceeds the supported maximum {max}")]
    DepthExceeded { depth: usize, max: usize },

    /// A Mellin argument or contour abscissa lies outside the fundamental strip.
    #[error("Re(eta) = {re} outside the strip ({lo}, {hi})")]
    StripViolation { re: f64, lo: f64, hi: f64 },

    /// The vertical-line contour sum did not decay within its truncation.
    #[error("contour truncated at |Im eta| = {at} with tail term {tail:e}")]
    Truncation { at: f64, tail: f64 },

    /// No admissible abscissa: the fundamental strip is empty.
    #[error("empty fundamental strip ({lo}, {hi})")]
    EmptyStrip { lo: f64, hi: f64 },

    /// The law is a point mass for these parameters; densities are undefined.
    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    /// Finite-difference grid has too few nodes.
    #[error("grid too coarse: need at least {needed} nodes, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    /// A cumulative distribution function decreased on sorted samples.
    #[error("cdf decreases at sample {at}")]
    NonMonotoneCdf { at: f64 },

    /// I/O or formatting failure while writing tables.
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NaNDetected { .. }
                | Error::StripViolation { .. }
                | Error::Truncation { .. }
                | Error::EmptyStrip { .. }
                | Error::Overflow(_)
                | Error::Pole { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
