use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

use super::env::{apply_local, left_boundary, left_step, overlap_left, overlap_right};
use super::mpo::MpoOperator;
use super::mps::MpsState;

/// `⟨ψ|O|ψ⟩` (not divided by the norm).
pub fn expectation(state: &MpsState, mpo: &MpoOperator) -> Result<C64> {
    sandwich(state, mpo, state)
}

/// `⟨φ|O|ψ⟩`.
pub fn sandwich(bra: &MpsState, mpo: &MpoOperator, ket: &MpsState) -> Result<C64> {
    if bra.layout() != mpo.layout() || ket.layout() != mpo.layout() {
        return Err(Error::LayoutMismatch);
    }
    let mut env = left_boundary();
    for (i, w) in mpo.sites().iter().enumerate() {
        env = left_step(&env, bra.site(i), ket.site(i), w);
    }
    Ok(env[0][(0, 0)])
}

/// `⟨ψ|op_site|ψ⟩` for a single-site operator (not divided by the norm).
pub fn local_expectation(state: &MpsState, op: &DMatrix<C64>, site: usize) -> Result<C64> {
    if site >= state.len() || op.nrows() != state.layout().dim(site) || !op.is_square() {
        return Err(Error::LayoutMismatch);
    }
    if state.center() == Some(site) {
        let a = state.site(site);
        let oa = apply_local(op, a);
        return Ok(a.iter().zip(&oa).map(|(x, y)| x.dotc(y)).sum());
    }
    let mut env = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for i in 0..state.len() {
        let a = state.site(i);
        env = if i == site {
            overlap_left(&env, a, &apply_local(op, a))
        } else {
            overlap_left(&env, a, a)
        };
    }
    Ok(env[(0, 0)])
}

/// All pair expectations `M[x][y] = ⟨A_{s_x} B_{s_y}⟩` over `sites`, the
/// diagonal being `⟨(A B)_{s_x}⟩`. Operators on different sites are assumed
/// to commute (bosons and the atom). Not divided by the norm.
///
/// One left-to-right sweep per row, so `O(m²)` transfer steps.
pub fn two_point(
    state: &MpsState,
    op_a: &DMatrix<C64>,
    op_b: &DMatrix<C64>,
    sites: &[usize],
) -> Result<DMatrix<C64>> {
    let n = state.len();
    for &s in sites {
        if s >= n || state.layout().dim(s) != op_a.nrows() || op_a.shape() != op_b.shape() {
            return Err(Error::LayoutMismatch);
        }
    }
    // Norm environments: left[i] covers sites < i, right[i] covers sites > i.
    let mut left = Vec::with_capacity(n + 1);
    left.push(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)));
    for i in 0..n {
        let next = overlap_left(&left[i], state.site(i), state.site(i));
        left.push(next);
    }
    let mut right = alloc::vec![DMatrix::zeros(0, 0); n + 1];
    right[n] = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for i in (0..n).rev() {
        right[i] = overlap_right(&right[i + 1], state.site(i), state.site(i));
    }
    let close = |env: &DMatrix<C64>, i: usize, op: &DMatrix<C64>| -> C64 {
        let a = state.site(i);
        let oa = apply_local(op, a);
        let e = overlap_left(env, a, &oa);
        // Contract with the right environment of site i.
        let r = &right[i + 1];
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..e.nrows() {
            for q in 0..e.ncols() {
                acc += e[(p, q)] * r[(p, q)];
            }
        }
        acc
    };
    let m = sites.len();
    let mut out = DMatrix::zeros(m, m);
    let ab = op_a * op_b;
    // Position of each site in `sites`.
    let mut slot = alloc::vec![usize::MAX; n];
    for (x, &s) in sites.iter().enumerate() {
        slot[s] = x;
    }
    for (x, &s) in sites.iter().enumerate() {
        out[(x, x)] = close(&left[s], s, &ab);
        // Two passes: A at s paired with B further right, then B at s
        // paired with A further right.
        for (first, second, a_first) in [(op_a, op_b, true), (op_b, op_a, false)] {
            let a = state.site(s);
            let mut env = overlap_left(&left[s], a, &apply_local(first, a));
            for t in s + 1..n {
                if slot[t] != usize::MAX {
                    let v = close(&env, t, second);
                    let y = slot[t];
                    if a_first {
                        out[(x, y)] = v;
                    } else {
                        out[(y, x)] = v;
                    }
                }
                if t + 1 < n {
                    env = overlap_left(&env, state.site(t), state.site(t));
                }
            }
        }
    }
    Ok(out)
}

/// `⟨op_x⟩` for each `(site, op)` pair in one pair of sweeps (not divided
/// by the norm).
pub fn local_profile(state: &MpsState, ops: &[(usize, DMatrix<C64>)]) -> Result<Vec<C64>> {
    let n = state.len();
    for (s, op) in ops {
        if *s >= n || op.nrows() != state.layout().dim(*s) || !op.is_square() {
            return Err(Error::LayoutMismatch);
        }
    }
    let mut right = alloc::vec![DMatrix::zeros(0, 0); n + 1];
    right[n] = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for i in (0..n).rev() {
        right[i] = overlap_right(&right[i + 1], state.site(i), state.site(i));
    }
    let mut left = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    let mut out = alloc::vec![C64::new(0.0, 0.0); ops.len()];
    for i in 0..n {
        let a = state.site(i);
        for (k, (s, op)) in ops.iter().enumerate() {
            if *s == i {
                let e = overlap_left(&left, a, &apply_local(op, a));
                out[k] = e.component_mul(&right[i + 1]).sum();
            }
        }
        left = overlap_left(&left, a, a);
    }
    Ok(out)
}
