use thiserror::Error;

use crate::derham::WindowTrace;

/// Errors raised by the algebra kernels and the homology drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient ring mismatch: {left} vs {right} variables")]
    AmbientMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("input must be a nonzero polynomial")]
    ZeroInput,

    #[error("polynomial is not univariate")]
    NotUnivariate,

    #[error("affine change of variables is singular")]
    SingularChange,

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("composite of differentials {upper} -> {lower} is nonzero")]
    CompositeNotZero { upper: usize, lower: usize },

    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,

    #[error("ideal is the unit ideal")]
    UnitIdeal,

    #[error("ideal has no generators")]
    EmptyIdeal,

    #[error("ideal is not homogeneous")]
    NotHomogeneous,

    #[error("ideal has Krull dimension {found}, expected {expected}")]
    WrongHeight { expected: usize, found: usize },

    #[error("no admissible change of variables found after {attempts} attempts")]
    NoGoodChangeFound { attempts: usize },

    #[error("operators do not commute on the truncation window")]
    NonCommuting,

    #[error("operator is not a constant-coefficient first-order operator")]
    UnsupportedOperator,

    #[error("image of a basis element left the target window ({0})")]
    WindowLeak(String),

    #[error("local cohomology is not concentrated in degree {c}: total homology {dims:?}")]
    SingleRowViolated { c: usize, dims: Vec<usize> },

    #[error("homology did not stabilize within the cap budget")]
    NoStabilization { trace: Vec<WindowTrace> },

    #[error("no closed form for {0}")]
    UnknownClass(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
