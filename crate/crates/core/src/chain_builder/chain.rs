use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::field_model::{CouplingVector, ModeBasis};
#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::qr_positive;
use crate::{Error, Result, C64};

use super::block::{block_lanczos, BlockTridiagonalResult};
use super::lanczos::{lanczos_operator, DiagonalOperator, LanczosOptions, TridiagonalResult};

#[derive(Debug, Clone, PartialEq)]
pub enum ChainCoefficients {
    /// One emitter: nearest-neighbour chain.
    Tridiagonal(TridiagonalResult),
    /// Several emitters: couplings reach `b` sites along the chain.
    Block(BlockTridiagonalResult),
}

/// The field rewritten as a chain, `c_i = Σ_j Λ_ij a_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRep {
    pub coefficients: ChainCoefficients,
    /// `m × n`: rows are chain modes, columns are eigenmodes of `basis`.
    pub transform: DMatrix<C64>,
    /// `μ0` of the (first) emitter.
    pub mu0: f64,
    pub basis: ModeBasis,
}

impl ChainRep {
    pub fn len(&self) -> usize {
        self.transform.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.transform.nrows() == 0
    }

    /// On-site energies `α_i` (tridiagonal chains only).
    pub fn alphas(&self) -> Option<&[f64]> {
        match &self.coefficients {
            ChainCoefficients::Tridiagonal(t) => Some(&t.alphas),
            ChainCoefficients::Block(_) => None,
        }
    }

    /// Hoppings `β_i` (tridiagonal chains only).
    pub fn betas(&self) -> Option<&[f64]> {
        match &self.coefficients {
            ChainCoefficients::Tridiagonal(t) => Some(&t.betas),
            ChainCoefficients::Block(_) => None,
        }
    }

    /// Single-particle chain Hamiltonian `T` with `H_f = Σ c_i† T_ij c_j`.
    pub fn single_particle_matrix(&self) -> DMatrix<C64> {
        match &self.coefficients {
            ChainCoefficients::Tridiagonal(t) => t.tridiagonal().map(|x| C64::new(x, 0.0)),
            ChainCoefficients::Block(b) => b.matrix(),
        }
    }

    /// Interaction scale `λ√μ0` for an emitter of coupling `lambda`.
    pub fn interaction_scale(&self, lambda: f64) -> f64 {
        lambda * self.mu0.sqrt()
    }

    /// `β_m` dropped by a shortened chain, if any.
    pub fn truncation(&self) -> Option<f64> {
        match &self.coefficients {
            ChainCoefficients::Tridiagonal(t) => t.report.trailing_beta,
            ChainCoefficients::Block(_) => None,
        }
    }
}

/// Chain representation for a single emitter.
///
/// The Krylov start vector is `conj(f)/√μ0`, so row 0 of `Λ = Q†` is
/// `f/√μ0` and the interaction reads `λ√μ0 σx (c_0 + c_0†)`.
pub fn build_chain(basis: &ModeBasis, coupling: &CouplingVector, opts: &LanczosOptions) -> Result<ChainRep> {
    if coupling.coefficients.len() != basis.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} coefficients for {} modes",
            coupling.coefficients.len(),
            basis.len()
        )));
    }
    if !(coupling.mu0 > 0.0) {
        return Err(Error::Decoupled);
    }
    // The sector norm can differ from μ0 only by rounding; use it so the
    // start vector is normalized exactly as the recurrence expects.
    let start: Vec<C64> = coupling.coefficients.iter().map(|f| f.conj()).collect();
    let a = DiagonalOperator(basis.frequencies().to_vec());
    let tri = lanczos_operator(&a, &start, opts)?;
    let transform = tri.basis.adjoint();
    if let Some(beta) = tri.report.trailing_beta {
        log::info!(
            "chain truncated to {} of {} modes; dropped hopping {beta:.3e}",
            tri.alphas.len(),
            basis.len()
        );
    }
    Ok(ChainRep {
        coefficients: ChainCoefficients::Tridiagonal(tri),
        transform,
        mu0: coupling.mu0,
        basis: basis.clone(),
    })
}

/// Block chain for several emitters sharing one field.
///
/// The start block is the orthonormalized set of `conj(f^(i))`.
pub fn build_block_chain(
    basis: &ModeBasis,
    couplings: &[CouplingVector],
    opts: &LanczosOptions,
) -> Result<ChainRep> {
    let n = basis.len();
    let b = couplings.len();
    if b == 0 {
        return Err(Error::InvalidArgument("need at least one emitter".into()));
    }
    for c in couplings {
        if c.coefficients.len() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} coefficients for {n} modes",
                c.coefficients.len()
            )));
        }
        if !(c.mu0 > 0.0) {
            return Err(Error::Decoupled);
        }
    }
    let raw = DMatrix::from_fn(n, b, |i, e| couplings[e].coefficients[i].conj());
    let (q1, r) = qr_positive(raw);
    if (0..b).any(|i| r[(i, i)].re <= 1e-12 * couplings[i].mu0.sqrt()) {
        return Err(Error::InvalidArgument(
            "emitter couplings are linearly dependent".into(),
        ));
    }
    let a = DiagonalOperator(basis.frequencies().to_vec());
    let blk = block_lanczos(&a, &q1, opts)?;
    let transform = blk.basis.adjoint();
    Ok(ChainRep {
        coefficients: ChainCoefficients::Block(blk),
        transform,
        mu0: couplings[0].mu0,
        basis: basis.clone(),
    })
}

/// Eigenmode one-body correlators.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCorrelators {
    /// `⟨a_p† a_q⟩`.
    pub normal: DMatrix<C64>,
    /// `⟨a_p a_q⟩`, when the chain anomalous correlator was supplied.
    pub anomalous: Option<DMatrix<C64>>,
}

/// Converts chain correlators `C_ij = ⟨c_i† c_j⟩` (and optionally
/// `K_ij = ⟨c_i c_j⟩`) to eigenmode correlators using `a = Λ† c`.
///
/// Eigenmodes outside the Krylov space of a shortened chain are decoupled
/// and stay in vacuum, so the result is exact for any chain length.
pub fn back_transform_correlations(
    normal: &DMatrix<C64>,
    anomalous: Option<&DMatrix<C64>>,
    transform: &DMatrix<C64>,
) -> Result<ModeCorrelators> {
    let m = transform.nrows();
    let check = |x: &DMatrix<C64>, what: &str| {
        if x.nrows() != m || x.ncols() != m {
            Err(Error::DimensionMismatch(alloc::format!(
                "{what} correlator is {}x{}, chain has {m} sites",
                x.nrows(),
                x.ncols()
            )))
        } else {
            Ok(())
        }
    };
    check(normal, "normal")?;
    let lam_t = transform.transpose();
    let lam_conj = transform.conjugate();
    // ⟨a_p† a_q⟩ = Σ_ij Λ_ip C_ij conj(Λ_jq)
    let mut n_modes = &lam_t * normal * &lam_conj;
    // Restore exact Hermiticity lost to rounding.
    n_modes = (&n_modes + n_modes.adjoint()) * C64::new(0.5, 0.0);
    let anomalous = match anomalous {
        Some(k) => {
            check(k, "anomalous")?;
            // ⟨a_p a_q⟩ = Σ_ij conj(Λ_ip) K_ij conj(Λ_jq)
            Some(transform.adjoint() * k * &lam_conj)
        }
        None => None,
    };
    Ok(ModeCorrelators {
        normal: n_modes,
        anomalous,
    })
}
