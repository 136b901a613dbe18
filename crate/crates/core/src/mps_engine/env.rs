//! Environment contractions shared by expectation values, DMRG and MPO
//! application.
//!
//! A left environment after site `i` holds one `χ_bra × χ_ket` matrix per
//! MPO channel on the bond to the right of `i`. Right environments hold the
//! same for the bond to the left, with the bra index first.

use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::C64;

use super::mpo::MpoSite;

pub(crate) type Env = Vec<DMatrix<C64>>;

pub(crate) fn left_boundary() -> Env {
    alloc::vec![DMatrix::from_element(1, 1, C64::new(1.0, 0.0))]
}

pub(crate) fn right_boundary() -> Env {
    left_boundary()
}

fn nonzero(z: C64) -> bool {
    z.re != 0.0 || z.im != 0.0
}

/// `L'_b = Σ op[s',s] bra^{s'}† L_a ket^s`.
pub(crate) fn left_step(env: &Env, bra: &[DMatrix<C64>], ket: &[DMatrix<C64>], w: &MpoSite) -> Env {
    let d = ket.len();
    let cb = bra[0].ncols();
    let ck = ket[0].ncols();
    let mut out: Env = (0..w.right).map(|_| DMatrix::zeros(cb, ck)).collect();
    let mut cache: Vec<Option<DMatrix<C64>>> = alloc::vec![None; w.left * d];
    for (a, b, op) in &w.blocks {
        for s in 0..d {
            if !op.column(s).iter().any(|z| nonzero(*z)) {
                continue;
            }
            let x = cache[a * d + s].get_or_insert_with(|| &env[*a] * &ket[s]);
            for sp in 0..d {
                let c = op[(sp, s)];
                if nonzero(c) {
                    out[*b].gemm_ad(c, &bra[sp], x, C64::new(1.0, 0.0));
                }
            }
        }
    }
    out
}

/// `R_a = Σ op[s',s] conj(bra^{s'}) R_b ket^{s T}`.
pub(crate) fn right_step(env: &Env, bra: &[DMatrix<C64>], ket: &[DMatrix<C64>], w: &MpoSite) -> Env {
    let d = ket.len();
    let cb = bra[0].nrows();
    let ck = ket[0].nrows();
    let mut out: Env = (0..w.left).map(|_| DMatrix::zeros(cb, ck)).collect();
    let mut cache: Vec<Option<DMatrix<C64>>> = alloc::vec![None; w.right * d];
    let bra_conj: Vec<DMatrix<C64>> = bra.iter().map(|m| m.conjugate()).collect();
    for (a, b, op) in &w.blocks {
        for s in 0..d {
            if !op.column(s).iter().any(|z| nonzero(*z)) {
                continue;
            }
            let y = cache[b * d + s].get_or_insert_with(|| &env[*b] * ket[s].transpose());
            for sp in 0..d {
                let c = op[(sp, s)];
                if nonzero(c) {
                    out[*a].gemm(c, &bra_conj[sp], y, C64::new(1.0, 0.0));
                }
            }
        }
    }
    out
}

/// Overlap environment `L' = Σ_s bra^s† L ket^s`.
pub(crate) fn overlap_left(env: &DMatrix<C64>, bra: &[DMatrix<C64>], ket: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(bra[0].ncols(), ket[0].ncols());
    for (x, y) in bra.iter().zip(ket) {
        out.gemm_ad(C64::new(1.0, 0.0), x, &(env * y), C64::new(1.0, 0.0));
    }
    out
}

/// Overlap environment `R = Σ_s conj(bra^s) R' ket^{s T}`.
pub(crate) fn overlap_right(env: &DMatrix<C64>, bra: &[DMatrix<C64>], ket: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(bra[0].nrows(), ket[0].nrows());
    for (x, y) in bra.iter().zip(ket) {
        out += x.conjugate() * (env * y.transpose());
    }
    out
}

/// Applies a local operator to a site tensor: `(op A)^s = Σ_t op[s,t] A^t`.
pub(crate) fn apply_local(op: &DMatrix<C64>, site: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
    let d = site.len();
    (0..d)
        .map(|s| {
            let mut m = DMatrix::zeros(site[0].nrows(), site[0].ncols());
            for (t, a) in site.iter().enumerate() {
                let c = op[(s, t)];
                if nonzero(c) {
                    m += a * c;
                }
            }
            m
        })
        .collect()
}
