use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("register mismatch: {0:?} vs {1:?}")]
    RegisterMismatch(Vec<String>, Vec<String>),

    #[error("invalid density matrix: {0}")]
    Validation(String),

    #[error("non-finite entry in matrix or state")]
    NonFinite,

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("gate `{name}` is not unitary (deviation {deviation:e})")]
    NotUnitary { name: String, deviation: f64 },

    #[error("gate `{name}` acts on {arity} qubit(s) but {targets} target(s) were given")]
    Arity {
        name: String,
        arity: usize,
        targets: usize,
    },

    #[error("outcome {outcome} on qubit `{qubit}` has probability {probability:e}")]
    ImpossibleOutcome {
        qubit: String,
        outcome: u8,
        probability: f64,
    },

    #[error("marker `{0}` is not after the previous marker")]
    MarkerOrder(String),

    #[error("stage {stage} is undefined for this configuration: {reason}")]
    UndefinedStage { stage: String, reason: &'static str },

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("singular confusion matrix for qubit {0}")]
    SingularConfusion(usize),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("missing expectation value for Pauli string {0}")]
    MissingPauli(String),

    #[error("cannot project an all-zero spectrum")]
    ZeroSpectrum,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
