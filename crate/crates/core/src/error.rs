use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coupling is not even under k -> -k (relative asymmetry {0:.3e})")]
    NotEvenProfile(f64),
    #[error("delta profile with cutoff {cutoff} exceeds the hard cap {cap}; couplings grow without bound")]
    UvDivergence { cutoff: usize, cap: usize },
    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("start vector is zero")]
    ZeroStartVector,
    #[error("diagonal coefficient has imaginary residue {0:.3e}")]
    ComplexAlpha(f64),
    #[error("start block is not orthonormal (deviation {0:.3e})")]
    NonOrthonormalBlock(f64),
    #[error("emitter is decoupled from the field (mu0 = 0)")]
    Decoupled,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("site layouts do not match")]
    LayoutMismatch,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("operator is not Hermitian")]
    NonHermitianOperator,
    #[error("no dark state with n = {n} and {parity} parity for these parameters")]
    InvalidDarkState { n: u32, parity: &'static str },
    #[error("Hilbert space dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;
