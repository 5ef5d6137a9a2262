use thiserror::Error;

/// Failure modes shared by every layer of the engine.
///
/// Pole markers are not errors at the gamma/Pochhammer level (see
/// [`crate::numerics::GammaEval`]); they become [`Error::Pole`] only once a
/// caller needs a finite number.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("gamma pole at argument {argument}")]
    Pole { argument: String },
    #[error("both gamma functions of the ratio are singular (a = {a}, n = {n})")]
    DoublePole { a: String, n: String },
    #[error("series does not converge at unit argument (margin {margin})")]
    NonConvergent { margin: String },
    #[error("denominator parameter {parameter} reaches a pole before the series terminates")]
    DenominatorPole { parameter: String },
    #[error("series needs more than {max_terms} terms")]
    MaxTermsExceeded { max_terms: usize },
    #[error("outside the convergence region: {0}")]
    OutsideRegion(String),
    #[error("invalid series specification: {0}")]
    InvalidSpec(String),
    #[error("phase (-1)^{exponent} requires an integer exponent")]
    NonIntegerPhase { exponent: String },
    #[error("unpaired phase (-1)^({exponent}) left after continuation")]
    UnpairedPhase { exponent: String },
}

impl Error {
    /// Stable category name used in reports.
    pub fn category(&self) -> &'static str {
        match self {
            Error::InvalidPrecision(_) => "InvalidPrecision",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Pole { .. } => "Pole",
            Error::DoublePole { .. } => "DoublePole",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::DenominatorPole { .. } => "DenominatorPole",
            Error::MaxTermsExceeded { .. } => "MaxTermsExceeded",
            Error::OutsideRegion(_) => "OutsideRegion",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::NonIntegerPhase { .. } => "NonIntegerPhase",
            Error::UnpairedPhase { .. } => "UnpairedPhase",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
