use thiserror::Error;

use crate::ifs::CertificationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("root iteration did not converge for degree {degree} after {rounds} rounds")]
    NonConvergence { degree: usize, rounds: usize },

    #[error("root of modulus {modulus} lies within {threshold} of the circle of radius {radius}")]
    BoundaryRoot {
        modulus: f64,
        radius: f64,
        threshold: f64,
    },

    #[error("Schur-Cohn count {schur_cohn} disagrees with direct root count {direct}")]
    InconsistentCount { schur_cohn: usize, direct: usize },

    #[error("candidate factor rounds to integers but exact division fails; raise root precision")]
    PrecisionExhausted,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime congruent to 3 mod 4")]
    BadPrime(u64),

    #[error("no sign change of the criterion below M = {limit} for lambda = {lam}")]
    NoBracket { lam: f64, limit: f64 },

    #[error("support at depth {depth} would need {needed} atoms, budget is {budget}")]
    Overflow {
        depth: usize,
        needed: u128,
        budget: usize,
    },

    #[error("exact arithmetic overflow while expanding the support")]
    ArithmeticOverflow,

    #[error("Garsia entropy requires an exact point representation")]
    InexactMode,

    #[error("support has a single point, separation undefined")]
    Degenerate,

    #[error("{reason}")]
    NotCertifiable {
        reason: String,
        report: Box<CertificationReport>,
    },

    #[error("quadrature budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by bad user input rather than a failed
    /// computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Parse(_) | Error::NotPrime(_) | Error::BadPrime(_)
        )
    }

    /// Stable machine-readable name.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::BoundaryRoot { .. } => "BoundaryRoot",
            Error::InconsistentCount { .. } => "InconsistentCount",
            Error::PrecisionExhausted => "PrecisionExhausted",
            Error::NotPrime(_) => "NotPrime",
            Error::BadPrime(_) => "BadPrime",
            Error::NoBracket { .. } => "NoBracket",
            Error::Overflow { .. } => "Overflow",
            Error::ArithmeticOverflow => "ArithmeticOverflow",
            Error::InexactMode => "InexactMode",
            Error::Degenerate => "Degenerate",
            Error::NotCertifiable { .. } => "NotCertifiable",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse(_) => "Parse",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
