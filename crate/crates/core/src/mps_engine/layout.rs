use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

/// Local dimensions of the sites: the atom (dimension 2) at site 0 followed
/// by the chain modes in Lanczos order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SiteLayout {
    dims: Vec<usize>,
}

impl SiteLayout {
    /// Atom plus `chain_len` bosonic sites, each truncated to `n_b` levels.
    pub fn atom_chain(chain_len: usize, n_b: usize) -> Result<Self> {
        if n_b < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "bosonic truncation must keep at least 2 levels, got {n_b}"
            )));
        }
        if chain_len == 0 {
            return Err(Error::InvalidArgument("chain needs at least one site".into()));
        }
        let mut dims = alloc::vec![2];
        dims.extend(core::iter::repeat(n_b).take(chain_len));
        Ok(Self { dims })
    }

    /// Arbitrary local dimensions (all at least 2).
    pub fn from_dims(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidArgument("local dimensions must be >= 2".into()));
        }
        Ok(Self { dims })
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, site: usize) -> usize {
        self.dims[site]
    }

    /// Number of chain sites (all sites but the atom).
    pub fn chain_len(&self) -> usize {
        self.dims.len() - 1
    }

    /// Site index of chain mode `i`.
    pub fn chain_site(&self, i: usize) -> usize {
        i + 1
    }

    /// Product of local dimensions, saturating.
    pub fn hilbert_dim(&self) -> usize {
        self.dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d))
    }
}

/// Atomic basis index of the ground state.
pub const GROUND: usize = 0;
/// Atomic basis index of the excited state.
pub const EXCITED: usize = 1;

fn real(n: usize, f: impl Fn(usize, usize) -> f64) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |i, j| C64::new(f(i, j), 0.0))
}

/// `σ_z = |e⟩⟨e| - |g⟩⟨g|`.
pub fn sigma_z() -> DMatrix<C64> {
    real(2, |i, j| match (i, j) {
        (EXCITED, EXCITED) => 1.0,
        (GROUND, GROUND) => -1.0,
        _ => 0.0,
    })
}

/// `σ_x = |e⟩⟨g| + |g⟩⟨e|`.
pub fn sigma_x() -> DMatrix<C64> {
    real(2, |i, j| if i != j { 1.0 } else { 0.0 })
}

/// `σ_+ = |e⟩⟨g|`.
pub fn sigma_plus() -> DMatrix<C64> {
    real(2, |i, j| if i == EXCITED && j == GROUND { 1.0 } else { 0.0 })
}

/// `σ_- = |g⟩⟨e|`.
pub fn sigma_minus() -> DMatrix<C64> {
    sigma_plus().transpose()
}

/// `|e⟩⟨e|`.
pub fn excited_projector() -> DMatrix<C64> {
    real(2, |i, j| if i == EXCITED && j == EXCITED { 1.0 } else { 0.0 })
}

/// Truncated bosonic annihilation operator, `c|n⟩ = √n |n-1⟩`.
pub fn annihilation(n_b: usize) -> DMatrix<C64> {
    real(n_b, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

pub fn creation(n_b: usize) -> DMatrix<C64> {
    annihilation(n_b).transpose()
}

pub fn number(n_b: usize) -> DMatrix<C64> {
    real(n_b, |i, j| if i == j { i as f64 } else { 0.0 })
}

pub fn identity(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}
