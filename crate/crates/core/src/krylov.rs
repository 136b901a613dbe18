//! Krylov-space eigensolver and propagator on matrix-free operators.

use alloc::vec::Vec;

use crate::chain_builder::{lanczos_operator, HermitianOperator, LanczosOptions};
#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::{cdot, cvec_norm, eigh_real};
use crate::{Error, Result, C64};

/// Operator plus a rank-k penalty `Σ w_k |v_k⟩⟨v_k|`.
pub(crate) struct Penalized<'a, A: HermitianOperator + ?Sized> {
    pub op: &'a A,
    pub vectors: &'a [(f64, Vec<C64>)],
}

impl<A: HermitianOperator + ?Sized> HermitianOperator for Penalized<'_, A> {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.op.apply(x, y);
        for (w, v) in self.vectors {
            let c = cdot(v, x) * *w;
            for (yi, vi) in y.iter_mut().zip(v) {
                *yi += vi * c;
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.op.norm_bound()
            + self
                .vectors
                .iter()
                .map(|(w, v)| w.abs() * cdot(v, v).re)
                .sum::<f64>()
    }
}

/// Lowest eigenpair by restarted Lanczos from `x0`.
///
/// Stops when the residual estimate `β_m |s_m|` falls below `tol`, or after
/// `max_restarts` restarts. Returns the Ritz value, the normalized Ritz
/// vector and the final residual estimate.
pub fn lowest_eigenpair<A: HermitianOperator + ?Sized>(
    op: &A,
    x0: &[C64],
    krylov_dim: usize,
    tol: f64,
    max_restarts: usize,
) -> Result<(f64, Vec<C64>, f64)> {
    let n = op.dim();
    let mut x: Vec<C64> = x0.to_vec();
    if cvec_norm(&x) == 0.0 {
        return Err(Error::ZeroStartVector);
    }
    let mut best = (f64::INFINITY, x.clone(), f64::INFINITY);
    for restart in 0..=max_restarts {
        let opts = LanczosOptions {
            max_steps: krylov_dim.max(2).min(n),
            breakdown_tol: Some(1e-14 * op.norm_bound().max(1.0)),
            ..LanczosOptions::full()
        };
        let tri = lanczos_operator(op, &x, &opts)?;
        let (vals, vecs) = eigh_real(&tri.tridiagonal());
        let m = tri.alphas.len();
        let theta = vals[0];
        let s = vecs.column(0);
        let resid = match tri.report.trailing_beta {
            Some(b) => b * s[m - 1].abs(),
            None => 0.0,
        };
        let mut y = alloc::vec![C64::new(0.0, 0.0); n];
        for (k, sk) in s.iter().enumerate() {
            for (yi, q) in y.iter_mut().zip(tri.basis.column(k).iter()) {
                *yi += q * *sk;
            }
        }
        let ny = cvec_norm(&y);
        y.iter_mut().for_each(|z| *z /= ny);
        best = (theta, y.clone(), resid);
        if resid <= tol {
            log::trace!("lanczos: converged after {restart} restart(s), residual {resid:.2e}");
            break;
        }
        if restart == max_restarts {
            log::trace!("lanczos: residual {resid:.2e} above {tol:.2e} after {max_restarts} restarts");
        }
        x = y;
    }
    Ok(best)
}

/// `e^{-iHt} ψ` by repeated short Krylov steps. `ψ` need not be normalized.
pub fn krylov_propagate<A: HermitianOperator + ?Sized>(
    op: &A,
    psi: &[C64],
    t: f64,
    krylov_dim: usize,
) -> Result<Vec<C64>> {
    let n = op.dim();
    let mut v = psi.to_vec();
    let mut remaining = t;
    // Step size keeping ‖H‖·dt moderate, so a short Krylov space is exact to roundoff.
    let scale = op.norm_bound().max(1e-300);
    let max_dt = (krylov_dim as f64 * 0.25) / scale;
    while remaining.abs() > 0.0 {
        let dt = if remaining.abs() > max_dt {
            max_dt * remaining.signum()
        } else {
            remaining
        };
        let nv = cvec_norm(&v);
        if nv == 0.0 {
            return Ok(v);
        }
        let opts = LanczosOptions {
            max_steps: krylov_dim.min(n),
            breakdown_tol: Some(1e-14 * scale),
            ..LanczosOptions::full()
        };
        let tri = lanczos_operator(op, &v, &opts)?;
        let (vals, vecs) = eigh_real(&tri.tridiagonal());
        let m = tri.alphas.len();
        // c = V e^{-iΛdt} V^T e_1
        let mut coef = alloc::vec![C64::new(0.0, 0.0); m];
        for k in 0..m {
            let phase = C64::from_polar(1.0, -vals[k] * dt) * vecs[(0, k)];
            for (c, vk) in coef.iter_mut().zip(vecs.column(k).iter()) {
                *c += phase * *vk;
            }
        }
        let mut out = alloc::vec![C64::new(0.0, 0.0); n];
        for (k, c) in coef.iter().enumerate() {
            for (o, q) in out.iter_mut().zip(tri.basis.column(k).iter()) {
                *o += q * *c;
            }
        }
        out.iter_mut().for_each(|z| *z *= nv);
        v = out;
        remaining -= dt;
    }
    Ok(v)
}

/// `J_0(x) .. J_{n-1}(x)` for `x ≥ 0` by Miller's backward recurrence,
/// normalized with `J_0 + 2 Σ J_2k = 1`.
fn bessel_j_series(x: f64, n: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = alloc::vec![0.0; n];
        out[0] = 1.0;
        return out;
    }
    let start = n + 32 + (x.sqrt() * 4.0) as usize;
    let mut out = alloc::vec![0.0; n];
    let (mut jp, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let jm = 2.0 * k as f64 / x * j - jp;
        jp = j;
        j = jm;
        // j now holds J_{k-1}
        if k - 1 < n {
            out[k - 1] = j;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            jp *= 1e-250;
            j *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += j;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

/// `e^{-iHt} ψ` by a Chebyshev expansion, for an operator whose spectrum
/// lies inside `[emin, emax]`. Long times are split into chunks with
/// `(emax - emin) t / 2 ≤ 200`.
pub fn chebyshev_propagate<A: HermitianOperator + ?Sized>(
    op: &A,
    psi: &[C64],
    t: f64,
    emin: f64,
    emax: f64,
) -> Result<Vec<C64>> {
    if !(emax > emin) || !emin.is_finite() || !emax.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "spectral bounds [{emin}, {emax}] are empty"
        )));
    }
    let a = (emax - emin) / 2.0;
    let b = (emax + emin) / 2.0;
    let chunks = ((a * t.abs()) / 200.0).ceil().max(1.0) as usize;
    let dt = t / chunks as f64;
    let x = a * dt.abs();
    let terms = (x + 10.0 * x.cbrt() + 30.0) as usize;
    let jk = bessel_j_series(x, terms);
    let n = op.dim();
    let zero = C64::new(0.0, 0.0);
    // c_k = 2 (-i)^k J_k(a dt), with J_k(-x) = (-1)^k J_k(x).
    let coef: Vec<C64> = jk
        .iter()
        .enumerate()
        .map(|(k, &j)| {
            let sign = if dt < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            let scale = if k == 0 { 1.0 } else { 2.0 };
            C64::new(0.0, -1.0).powu(k as u32) * (scale * sign * j)
        })
        .collect();
    let last = coef.iter().rposition(|c| c.norm() > 1e-18).unwrap_or(0);
    let shift = C64::from_polar(1.0, -b * dt);
    let mut v = psi.to_vec();
    let mut scratch = alloc::vec![zero; n];
    // y = (H - b) x / a
    let hn = |x: &[C64], y: &mut [C64]| {
        op.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (*yi - xi * b) / a;
        }
    };
    for _ in 0..chunks {
        let mut t0 = v.clone();
        let mut t1 = alloc::vec![zero; n];
        hn(&t0, &mut t1);
        let mut out: Vec<C64> = t0
            .iter()
            .zip(&t1)
            .map(|(p, q)| p * coef[0] + q * coef[1])
            .collect();
        for c in coef.iter().take(last + 1).skip(2) {
            hn(&t1, &mut scratch);
            for ((s, p), o) in scratch.iter_mut().zip(&t0).zip(out.iter_mut()) {
                *s = *s * 2.0 - p;
                *o += *s * c;
            }
            core::mem::swap(&mut t0, &mut t1);
            core::mem::swap(&mut t1, &mut scratch);
        }
        out.iter_mut().for_each(|z| *z *= shift);
        v = out;
    }
    Ok(v)
}
