use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The base point lies outside the structure's domain, or a field was
    /// evaluated where it is not differentiable (sqrt/log of a non-positive
    /// value, |y| below the slit threshold).
    #[error("domain error: {0}")]
    Domain(String),

    /// A derivative or coefficient was requested beyond the retained jet order.
    #[error("order error: {0}")]
    Order(String),

    /// Invalid engine or run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Floating-point failure: singular matrix, step underflow, non-finite value.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// The structure violates a Finsler axiom at the given point.
    #[error("invalid structure: {0}")]
    StructureInvalid(String),

    /// The flag plane is degenerate (transverse edge parallel to the flagpole).
    #[error("degenerate flag: {0}")]
    DegenerateFlag(String),

    #[error("expression parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
