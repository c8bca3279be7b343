use thiserror::Error;

/// Errors raised by model construction, reductions and probability queries.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrinityError {
    #[error("tensor factor label collision: `{0}`")]
    LabelCollision(String),

    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (defect {defect:.3e} > {tol:.3e})")]
    NonHermitian { defect: f64, tol: f64 },

    #[error("clock energies are degenerate or unsorted at index {0}")]
    DegenerateClock(usize),

    #[error("energy {energy} violates the compactness condition for t_max = {t_max} (residual {residual:.3e})")]
    CompactnessViolated { energy: f64, t_max: f64, residual: f64 },

    #[error("continuum grid is not uniform at index {0}")]
    NonUniformGrid(usize),

    #[error("interval [{a}, {b}] lies outside the clock group")]
    IntervalOutsideGroup { a: f64, b: f64 },

    #[error("physical Hilbert space is empty (no matched clock/system energies)")]
    EmptyPhysicalSpace,

    #[error("state is not physical (constraint residual {0:.3e})")]
    NotPhysical(f64),

    #[error("state lies outside the matched subspace (leakage {0:.3e})")]
    OutsideMatchedSubspace(f64),

    #[error("operator is not projected onto the physical system space (defect {0:.3e})")]
    UnprojectedOperator(f64),

    #[error("reference energy {0} is not in the clock spectrum")]
    EnergyNotInClockSpectrum(f64),

    #[error("states or operators belong to different models")]
    ModelMismatch,

    #[error("conditioning event has vanishing weight at stage {stage} (weight {weight:.3e})")]
    DegenerateConditioning { stage: usize, weight: f64 },

    #[error("effect is not a positive contraction (min eigenvalue {min:.3e}, max {max:.3e})")]
    InvalidEffect { min: f64, max: f64 },

    #[error("operator does not commute with the reference clock Hamiltonian (defect {0:.3e})")]
    NotConstantOfMotion(f64),

    #[error("clock window too small: wavepacket truncation {0:.3e}")]
    WindowTooSmall(f64),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, TrinityError>;
