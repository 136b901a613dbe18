use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::{inf_norm, qr_positive};
use crate::{Error, Result, C64};

use super::lanczos::{HermitianOperator, LanczosOptions};

/// Output of block Lanczos: `Q† A Q` is block tridiagonal with Hermitian
/// diagonal blocks `M_i` and upper-triangular sub-diagonal blocks `B_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTridiagonalResult {
    pub block_size: usize,
    pub diagonal: Vec<DMatrix<C64>>,
    /// `B_i` couples block `i+1` to block `i` (it sits below the diagonal).
    pub off_diagonal: Vec<DMatrix<C64>>,
    /// `n × (p·b)` with orthonormal columns.
    pub basis: DMatrix<C64>,
    /// Stopped on a rank-deficient residual block.
    pub breakdown: bool,
}

impl BlockTridiagonalResult {
    pub fn num_blocks(&self) -> usize {
        self.diagonal.len()
    }

    /// Dense `(p·b) × (p·b)` block-tridiagonal matrix.
    pub fn matrix(&self) -> DMatrix<C64> {
        let b = self.block_size;
        let p = self.diagonal.len();
        let mut t = DMatrix::zeros(p * b, p * b);
        for (i, m) in self.diagonal.iter().enumerate() {
            t.view_mut((i * b, i * b), (b, b)).copy_from(m);
        }
        for (i, bl) in self.off_diagonal.iter().enumerate() {
            t.view_mut(((i + 1) * b, i * b), (b, b)).copy_from(bl);
            t.view_mut((i * b, (i + 1) * b), (b, b)).copy_from(&bl.adjoint());
        }
        t
    }
}

fn apply_block<A: HermitianOperator + ?Sized>(a: &A, q: &DMatrix<C64>) -> DMatrix<C64> {
    let n = q.nrows();
    let mut y = DMatrix::zeros(n, q.ncols());
    let mut out = alloc::vec![C64::new(0.0, 0.0); n];
    for c in 0..q.ncols() {
        let col: Vec<C64> = q.column(c).iter().copied().collect();
        a.apply(&col, &mut out);
        y.column_mut(c).copy_from_slice(&out);
    }
    y
}

/// Block Lanczos from the orthonormal start block `q1` (`n × b`).
///
/// Each residual block is reorthogonalized against all previous blocks
/// before its QR factorization; a rank-deficient residual ends the run.
/// `opts.max_steps` counts blocks. The `R` factors have real non-negative
/// diagonals, so `b = 1` reproduces the scalar recurrence with `β >= 0`.
pub fn block_lanczos<A: HermitianOperator + ?Sized>(
    a: &A,
    q1: &DMatrix<C64>,
    opts: &LanczosOptions,
) -> Result<BlockTridiagonalResult> {
    let n = a.dim();
    let b = q1.ncols();
    if q1.nrows() != n || b == 0 {
        return Err(Error::DimensionMismatch(alloc::format!(
            "start block is {}x{} for dimension {n}",
            q1.nrows(),
            b
        )));
    }
    let gram = q1.adjoint() * q1;
    let dev = (gram - DMatrix::<C64>::identity(b, b))
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.norm()));
    if dev > 1e-12 {
        return Err(Error::NonOrthonormalBlock(dev));
    }
    let tol = opts.breakdown_tol.unwrap_or(1e-13 * a.norm_bound());
    let max_blocks = opts.max_steps.min(n / b).max(1);

    let mut blocks: Vec<DMatrix<C64>> = alloc::vec![q1.clone()];
    let mut diagonal = Vec::new();
    let mut off_diagonal: Vec<DMatrix<C64>> = Vec::new();
    let mut breakdown = false;
    loop {
        let j = blocks.len() - 1;
        let qj = &blocks[j];
        let y = apply_block(a, qj);
        let mut m = qj.adjoint() * &y;
        // Symmetrize away roundoff so M_j is Hermitian to the last bit.
        m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut r = y - qj * &m;
        if j >= 1 {
            r -= &blocks[j - 1] * off_diagonal[j - 1].adjoint();
        }
        diagonal.push(m);
        if blocks.len() == max_blocks {
            break;
        }
        for _ in 0..2 {
            for q in &blocks {
                let c = q.adjoint() * &r;
                r -= q * c;
            }
        }
        let scale = inf_norm(&r);
        if scale <= tol {
            breakdown = true;
            break;
        }
        let (q_next, bj) = qr_positive(r);
        if (0..b).any(|i| bj[(i, i)].re <= tol) {
            breakdown = true;
            break;
        }
        off_diagonal.push(bj);
        blocks.push(q_next);
    }

    let p = blocks.len();
    let mut basis = DMatrix::zeros(n, p * b);
    for (i, q) in blocks.iter().enumerate() {
        basis.view_mut((0, i * b), (n, b)).copy_from(q);
    }
    Ok(BlockTridiagonalResult {
        block_size: b,
        diagonal,
        off_diagonal,
        basis,
        breakdown,
    })
}
