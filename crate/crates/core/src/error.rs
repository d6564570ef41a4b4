//! Error types shared by the engine.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum GeomError {
    #[error("point {point:?} outside the domain of chart '{chart}'")]
    Domain { chart: String, point: Vec<f64> },

    #[error("chart mismatch: expected '{expected}', found '{found}'")]
    ChartMismatch { expected: String, found: String },

    #[error("singular matrix in {context} at {point:?} (|det| = {det:.3e})")]
    Singular {
        context: String,
        point: Vec<f64>,
        det: f64,
    },

    #[error("{context}: condition number {cond:.3e} exceeds 1e12 at {point:?}")]
    IllConditioned {
        context: String,
        point: Vec<f64>,
        cond: f64,
    },

    #[error("rank failure in {context} at {point:?}: expected {expected}, found {found}")]
    Rank {
        context: String,
        point: Vec<f64>,
        expected: usize,
        found: usize,
    },

    #[error("slice leaves the moment level set at {point:?} (residual {residual:.3e})")]
    Slice { point: Vec<f64>, residual: f64 },

    #[error("vector not tangent to the level set (least-squares residual {residual:.3e})")]
    NotTangent { residual: f64 },

    #[error("zeta is not a central value: {detail}")]
    NotCentral { detail: String },

    #[error("structure error: {0}")]
    Structure(String),

    #[error("atlas error: {0}")]
    Atlas(String),

    #[error("equivariance error: {0}")]
    Equivariance(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
