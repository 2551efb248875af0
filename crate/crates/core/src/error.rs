use thiserror::Error;

/// Errors raised by the algebra, evaluation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by near-zero quaternion (|q| = {modulus:e}, floor {floor:e})")]
    DivisionByNearZero { modulus: f64, floor: f64 },

    #[error("series is not invertible at the origin (|a0| = {modulus:e}, floor {floor:e})")]
    NonInvertibleAtOrigin { modulus: f64, floor: f64 },

    #[error("evaluation too close to a zero set (|value| = {modulus:e}, floor {floor:e})")]
    EvalNearZeroSet { modulus: f64, floor: f64 },

    #[error("imaginary units are not orthogonal (inner product {inner:e})")]
    NotOrthogonal { inner: f64 },

    #[error("radius {radius} outside [0, 1)")]
    RadiusOutOfRange { radius: f64 },

    #[error("invalid mixture weights: {0}")]
    WeightsInvalid(String),

    #[error("degenerate normalization: A - Re f(0) = {gap:e}")]
    DegenerateNormalization { gap: f64 },

    #[error("not a unit imaginary quaternion: {0}")]
    NotUnitImaginary(String),

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("{k} does not give a primitive {n0}-th root of unity")]
    NotPrimitiveRoot { k: usize, n0: usize },

    #[error("symmetrization has non-real coefficient at degree {degree} (imaginary modulus {imag:e})")]
    NonRealSymmetrization { degree: usize, imag: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
