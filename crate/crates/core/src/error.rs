use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("layout mismatch: {left} vs {right}")]
    LayoutMismatch { left: String, right: String },

    #[error("factor index {index} out of range for a layout with {factors} factors")]
    FactorOutOfRange { index: usize, factors: usize },

    #[error("factor {0} listed more than once")]
    DuplicateFactor(usize),

    #[error("factor {index} has dimension {found}, an atom must be a two-level factor")]
    NotAQubit { index: usize, found: usize },

    #[error("fock dimension must be at least 2, got {0}")]
    InvalidFockDim(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("steady state undefined: detuning and drive are both zero")]
    UndefinedState,

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("selection of kept factors is empty")]
    EmptySelection,

    #[error(
        "integration failed at t = {t} ms after {steps} steps (last step {step_size:e} ms): {reason}"
    )]
    IntegrationFailed {
        t: f64,
        steps: usize,
        step_size: f64,
        reason: String,
    },

    #[error("null space ambiguous: singular value gap ratio {ratio:.3e} below 10")]
    AmbiguousNullSpace { ratio: f64 },

    #[error("steady state not unique: null space dimension {dimension}")]
    DegenerateNullSpace { dimension: usize },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("quadratic fit needs at least 3 points, got {0}")]
    InsufficientData(usize),

    #[error("quadratic fit is degenerate (fewer than 3 distinct abscissae)")]
    DegenerateFit,
}
