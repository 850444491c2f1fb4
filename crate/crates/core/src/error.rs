use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: mismatched dimensions, out-of-range fields, etc.
    #[error("configuration error: {0}")]
    Config(String),

    /// Sequence length rules violated (keystream shorter than plaintext, ...).
    #[error("length error: {0}")]
    Length(String),

    /// All-zero LFSR seed; the register would emit a constant zero stream.
    #[error("degenerate LFSR seed: all-zero key")]
    DegenerateSeed,

    /// Every hypothesis has zero posterior weight under a noiseless channel.
    #[error("inconsistent evidence: observation has zero likelihood under every hypothesis")]
    InconsistentEvidence,

    /// Argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive enumeration would exceed the desk-scale ceiling.
    #[error("enumeration ceiling exceeded: {0}")]
    EnumerationCeiling(String),

    /// Constrained grid search found no feasible point.
    #[error("no feasible grid point: {0}")]
    NoFeasiblePoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
