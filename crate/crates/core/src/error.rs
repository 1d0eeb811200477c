use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error(
        "unknown system `{0}` (expected unimodal, four-vertex, tree, or a path to a JSON config)"
    )]
    UnknownSystem(String),

    #[error("word {0} is not periodic")]
    NotPeriodic(String),

    #[error("word {0} is not extremal")]
    NotExtremal(String),

    #[error("word {0} is not admissible")]
    NotAdmissible(String),

    #[error("word {0} is not irreducible")]
    NotIrreducible(String),

    #[error("exponent {0} is not an extremal word of the unimodal system")]
    InvalidExponent(String),

    #[error("word {0} is a power of the minimal word")]
    MinimalWord(String),

    #[error("no tuning decomposition for {0}; the system violates the tunability condition at this word")]
    NotTunable(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("certification failed: {0}")]
    CertificationFailure(String),

    #[error("search exhausted after cap {cap}: {context}")]
    SearchExhausted { cap: usize, context: String },

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("kernel of the elimination system has dimension {0} > 1")]
    DegenerateKernel(usize),

    #[error("root finding did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed config: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code: 1 for violated hypotheses and bad input, 2 for
    /// failures that indicate a bug or a falsified claim.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CertificationFailure(_)
            | Error::ConvergenceFailure(_)
            | Error::DegenerateKernel(_)
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
