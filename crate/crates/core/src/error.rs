use thiserror::Error;

/// Unified error type for the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("guard exhaustion after {rounds} rejection rounds; guards: {guards:?}")]
    GuardExhaustion { rounds: u32, guards: Vec<String> },

    #[error("pole: factor `{factor}` vanishes in {context}")]
    Pole { factor: String, context: String },

    #[error("dimension overflow: basis exceeded {max_dim} while closing `{presentation}`")]
    DimensionOverflow { presentation: String, max_dim: usize },

    #[error("rule completion diverged while closing `{presentation}`")]
    CompletionDiverged { presentation: String },

    #[error("associativity audit failed in `{presentation}` on triple ({a}; {b}; {c})")]
    NonAssociative {
        presentation: String,
        a: String,
        b: String,
        c: String,
    },

    #[error("unknown generator `{name}` for `{presentation}`")]
    UnknownGenerator { name: String, presentation: String },

    #[error("owner mismatch: element of algebra #{left} combined with element of algebra #{right}")]
    OwnerMismatch { left: usize, right: usize },

    #[error("unsupported family `{family}` for {what}")]
    UnsupportedFamily { family: String, what: String },

    #[error("involution applied outside its domain: {detail}")]
    InvolutionDomain { detail: String },

    #[error("flip unavailable: {detail}")]
    FlipUnavailable { detail: String },

    #[error("inadmissible parameter point: {constraint}")]
    InadmissiblePoint { constraint: String },

    #[error("singular boundary factor `{factor}` at {at}")]
    SingularBoundary { factor: String, at: String },

    #[error("not proportional: {detail}")]
    NotProportional { detail: String },

    #[error("incompatible substitutions: {left} vs {right}")]
    IncompatibleSubstitutions { left: String, right: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
