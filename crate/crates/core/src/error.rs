use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not a contraction: {0}")]
    NotContraction(String),

    /// Fixed-point iteration did not settle.
    #[error("no contraction: fixed-point iteration did not converge")]
    NoContraction,

    #[error("invalid symbol {symbol} (alphabet is 1..={alphabet})")]
    InvalidSymbol { symbol: u32, alphabet: usize },

    #[error("driver exhausted after {0} symbols")]
    DriverExhausted(u64),

    #[error("resolution infeasible: {0}")]
    ResolutionInfeasible(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("extension not found: {0}")]
    ExtensionNotFound(String),

    #[error("attractor appears finite or concentrated at all fixed points")]
    NoBaseMap,

    #[error("psi grows too slowly for this IFS: {0}")]
    PsiTooSlow(String),

    #[error("rate function saturated (overflow) at eps = {eps:e}")]
    Overflow { eps: f64 },

    #[error("internal invariant violation: {0}")]
    Invariant(String),

    #[error("invalid config: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("malformed cloud cache: {0}")]
    CacheFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{phase}: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_phase(self, phase: &'static str) -> Self {
        Error::Phase {
            phase,
            source: Box::new(self),
        }
    }

    /// Innermost error with phase labels stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Phase { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Invariant(_) | Error::ExtensionNotFound(_) => 4,
            Error::Budget(_) | Error::ResolutionInfeasible(_) | Error::DriverExhausted(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
