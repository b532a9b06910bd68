use thiserror::Error;

/// Errors raised by the state, spectrum and bound evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dag| = {0:e})")]
    NonHermitian(f64),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("not a density operator: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("rank {rank} exceeds dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("{name} = {value} is outside its admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("negative input to {0}: {1}")]
    NegativeInput(&'static str, f64),

    #[error("energy {energy} is not above the ground energy {ground}")]
    EnergyBelowGround { energy: f64, ground: f64 },

    #[error("could not bracket the inverse temperature: {0}")]
    BracketFailure(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("measures are equal; Jordan decomposition undefined")]
    EqualMeasures,

    #[error("label sets differ: {0}")]
    LabelMismatch(String),

    #[error("state is not diagonal in the declared basis (off-diagonal mass {0:e})")]
    BasisMismatch(f64),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("Fock cutoff {cutoff} too small for amplitude |z|^2 = {norm_sqr} (leakage {leakage:e})")]
    CutoffTooSmall {
        cutoff: usize,
        norm_sqr: f64,
        leakage: f64,
    },

    #[error("truncated dimension {0} exceeds the cap {1}")]
    DimensionTooLarge(usize, usize),

    #[error("constraint infeasible: {0}")]
    InfeasibleConstraint(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trial {trial}: {source}")]
    Trial { trial: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]".into(),
        })
    }
}
