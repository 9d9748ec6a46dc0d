use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (‖a − a*‖_F = {0:.3e})")]
    NotHermitian(f64),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("columns are rank deficient (smallest singular value {smallest_singular:.3e})")]
    RankDeficient { smallest_singular: f64 },

    #[error("{0} is not a primitive p-th root of unity")]
    NotPrimitiveRoot(String),

    #[error("unsupported order p = {0}: {1}")]
    UnsupportedOrder(usize, &'static str),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("matrix is not of order {p} (‖u^p − 1‖_F = {residual:.3e})")]
    OrderViolation { p: usize, residual: f64 },

    #[error("matrices do not form a Weyl pair (max residual {0:.3e})")]
    NotWeylPair(f64),

    #[error("eigenspace dimensions differ: {0:?}")]
    UnequalMultiplicities(Vec<usize>),

    #[error("p = {p} does not divide d = {d}")]
    DivisibilityViolation { p: usize, d: usize },

    #[error("span closure did not stabilize within {0} rounds")]
    IterationCap(usize),

    #[error("systems use different orders or roots of unity")]
    MismatchedOrder,

    #[error("affine constraint projector could not be formed: {0}")]
    ConstraintDegeneracy(String),

    #[error("invalid Weyl system: {0}")]
    InvalidSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
