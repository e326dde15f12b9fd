use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    Domain { what: &'static str, value: f64 },
    /// A ratio is undefined because the named factor vanishes.
    DivisionDomain { vanishing: &'static str },
    /// Inconsistent configuration (channel roles, detune mismatch, sim config).
    Config(&'static str),
    /// Observed counts cannot come from the linearized detector model.
    Inconsistent { reason: &'static str, delta: f64 },
    /// Strict inversion produced a negative noise rate.
    NegativeRate { which: &'static str, value: f64 },
    /// A forward-model output fell outside [0, 1].
    ModelValidity { field: &'static str, value: f64 },
    /// Not enough independent abscissae for the fit.
    RankDeficient { needed: usize, distinct: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what} out of domain: {value}"),
            Error::DivisionDomain { vanishing } => write!(f, "ratio undefined: {vanishing} is zero"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Inconsistent { reason, delta } => write!(f, "{reason} (delta = {delta:e})"),
            Error::NegativeRate { which, value } => write!(f, "negative {which} estimate: {value:e}"),
            Error::ModelValidity { field, value } => {
                write!(f, "{field} = {value} is outside [0, 1]; rates too large for the linearized count model")
            }
            Error::RankDeficient { needed, distinct } => {
                write!(f, "rank-deficient fit: need {needed} distinct positive abscissae, got {distinct}")
            }
        }
    }
}

impl core::error::Error for Error {}
