use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter is outside its admissible range.
    #[error("{field} must be {requirement}")]
    InvalidParam {
        field: &'static str,
        requirement: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The Poisson tail of the sideband series did not drop below the
    /// requested tolerance within the term budget.
    #[error("sideband series truncated at max_terms={max_terms} with tail {tail:e} >= rel_tol {rel_tol:e}")]
    SidebandCap {
        max_terms: usize,
        tail: f64,
        rel_tol: f64,
    },

    #[error("quadrature did not converge on [0, {upper}] within {panels} panels (error estimate {estimate:e})")]
    QuadratureBudget {
        upper: f64,
        panels: usize,
        estimate: f64,
    },

    #[error("bisection failed: {0}")]
    Bracket(String),

    #[error("state violates density-matrix invariants: {0}")]
    InvalidState(String),

    #[error("phonon Fock cutoff leaks: top-level population {population:e} at t={t}")]
    FockLeakage { population: f64, t: f64 },

    #[error("state norm drifted by {drift:e} at t={t}")]
    NormDrift { drift: f64, t: f64 },

    #[error("polaron identity deviation is truncation dominated: {0}")]
    TruncationDominated(String),

    #[error("unsupported output format `{0}`")]
    UnsupportedFormat(String),

    #[error("failed writing {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// True for errors caused by a numerical procedure failing to converge,
    /// as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SidebandCap { .. }
                | Error::QuadratureBudget { .. }
                | Error::Bracket(_)
                | Error::InvalidState(_)
                | Error::FockLeakage { .. }
                | Error::NormDrift { .. }
                | Error::TruncationDominated(_)
        )
    }
}
