use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid folding parameters ({a}, {b}): need a, b >= 0 and not both zero")]
    InvalidParameters { a: i64, b: i64 },

    #[error("mesh is not a closed oriented manifold: {0}")]
    NonManifold(String),

    #[error("band decomposition failed: {0}")]
    BandDecomposition(String),

    #[error("degenerate cone at vertex {vertex}")]
    DegenerateCone { vertex: usize },

    #[error("invalid relaxation config: {0}")]
    InvalidConfig(String),

    #[error("no relaxation attempt converged (best residual {best_residual:e})")]
    NotConverged { best_residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_params(a: i64, b: i64) -> Result<()> {
    if a < 0 || b < 0 || (a == 0 && b == 0) {
        return Err(Error::InvalidParameters { a, b });
    }
    Ok(())
}
