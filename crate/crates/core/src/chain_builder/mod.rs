//! Lanczos tridiagonalization of the field Hamiltonian and the resulting
//! chain representation.
//!
//! The single-particle matrix is `A = diag(|k_j|)` over the coupled sector.
//! Starting the Krylov iteration from the normalized coupling vector makes
//! the first chain mode the one the emitter couples to, and the remaining
//! modes form a nearest-neighbour chain (next-nearest blocks for several
//! emitters).

mod block;
mod chain;
mod lanczos;
mod orthogonality;

pub use block::{block_lanczos, BlockTridiagonalResult};
pub use chain::{
    back_transform_correlations, build_block_chain, build_chain, ChainCoefficients, ChainRep, ModeCorrelators,
};
pub use lanczos::{
    lanczos, lanczos_operator, DiagonalOperator, HermitianOperator, LanczosOptions, LanczosReport,
    ReorthMode, TridiagonalResult,
};
pub use orthogonality::{simulate_orthogonality_loss, OrthogonalityEstimator};
