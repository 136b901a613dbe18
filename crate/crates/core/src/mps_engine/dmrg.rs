//! Two-site DMRG ground and penalty-excited states.

use alloc::vec::Vec;
use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par};
use nalgebra::DMatrix;

use crate::chain_builder::HermitianOperator;
#[allow(unused_imports)]
use crate::float::*;
use crate::krylov::{lowest_eigenpair, Penalized};
use crate::{Error, Result, C64};

use super::env::{left_boundary, left_step, overlap_left, overlap_right, right_boundary, right_step, Env};
use super::mpo::{MpoOperator, MpoSite};
use super::mps::{MpsState, Sweep, TruncationPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct DmrgOptions {
    pub policy: TruncationPolicy,
    pub max_sweeps: usize,
    pub min_sweeps: usize,
    /// Stop once a full sweep changes the energy by less than this, relative
    /// to `max(1, |E|)`.
    pub energy_tol: f64,
    pub krylov_dim: usize,
    /// Residual target of the local eigensolver, relative to the norm of the
    /// effective Hamiltonian.
    pub local_tol: f64,
    /// Restart budget of the local eigensolver. Sweeps finish what one
    /// local solve leaves unconverged, so this stays small.
    pub local_restarts: usize,
}

impl Default for DmrgOptions {
    fn default() -> Self {
        Self {
            policy: TruncationPolicy::statics(),
            max_sweeps: 40,
            min_sweeps: 2,
            energy_tol: 1e-10,
            krylov_dim: 24,
            local_tol: 1e-10,
            local_restarts: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DmrgResult {
    /// Lowest value of `⟨H⟩ + w Σ_k |⟨φ_k|ψ⟩|²` reached.
    pub energy: f64,
    pub state: MpsState,
    /// Energy after each full (right and back) sweep.
    pub sweep_energies: Vec<f64>,
    pub converged: bool,
    /// Accumulated relative discarded weight.
    pub truncation_weight: f64,
}

/// Effective Hamiltonian of bond `(i, i+1)` on the flattened two-site tensor
/// (block `s1 * d2 + s2`, each block column-major `χl × χr`).
struct TwoSiteOperator<'a> {
    left: Vec<Mat<C64>>,
    right_t: Vec<Mat<C64>>,
    w1: &'a MpoSite,
    w2: &'a MpoSite,
    d1: usize,
    d2: usize,
    cl: usize,
    cr: usize,
    scale: f64,
}

fn to_mat(m: &DMatrix<C64>, transpose: bool) -> Mat<C64> {
    if transpose {
        Mat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)])
    } else {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

fn nonzero(z: C64) -> bool {
    z.re != 0.0 || z.im != 0.0
}

fn axpy(y: &mut [C64], c: C64, x: &[C64]) {
    for (t, v) in y.iter_mut().zip(x) {
        *t += c * v;
    }
}

impl HermitianOperator for TwoSiteOperator<'_> {
    fn dim(&self) -> usize {
        self.d1 * self.d2 * self.cl * self.cr
    }

    // All two-site blocks are handled at once: `L_a` multiplies the blocks laid
    // side by side, and `R_c^T` multiplies them stacked on top of each other.
    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let (d1, d2, cl, cr) = (self.d1, self.d2, self.cl, self.cr);
        let ns = d1 * d2;
        let blk = cl * cr;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let xm = MatRef::from_column_major_slice(x, cl, ns * cr);
        // P_a^{s} = L_a θ^s
        let mut p: Vec<Vec<C64>> = alloc::vec![Vec::new(); self.w1.left];
        // Q_b^{s1' s2} = Σ op1[s1', s1] P_a^{s1 s2}, same layout as θ
        let mut q: Vec<Vec<C64>> = alloc::vec![Vec::new(); self.w1.right];
        for (a, b, op1) in &self.w1.blocks {
            if p[*a].is_empty() {
                p[*a] = alloc::vec![zero; blk * ns];
                let dst = MatMut::from_column_major_slice_mut(&mut p[*a], cl, ns * cr);
                matmul(dst, Accum::Replace, &self.left[*a], xm, one, Par::Seq);
            }
            if q[*b].is_empty() {
                q[*b] = alloc::vec![zero; blk * ns];
            }
            let (pa, qb) = (&p[*a], &mut q[*b]);
            for s1 in 0..d1 {
                for sp in 0..d1 {
                    let c = op1[(sp, s1)];
                    if !nonzero(c) {
                        continue;
                    }
                    for s2 in 0..d2 {
                        let (src, dst) = ((s1 * d2 + s2) * blk, (sp * d2 + s2) * blk);
                        axpy(&mut qb[dst..dst + blk], c, &pa[src..src + blk]);
                    }
                }
            }
        }
        // Z_c^{s1' s2'} = Σ op2[s2', s2] Q_b^{s1' s2}, stacked as (ns·χl) × χr
        let rows = ns * cl;
        let mut z: Vec<Vec<C64>> = alloc::vec![Vec::new(); self.w2.right];
        for (b, c, op2) in &self.w2.blocks {
            if q[*b].is_empty() {
                continue;
            }
            if z[*c].is_empty() {
                z[*c] = alloc::vec![zero; rows * cr];
            }
            let (qb, zc) = (&q[*b], &mut z[*c]);
            for s2 in 0..d2 {
                for sp2 in 0..d2 {
                    let coef = op2[(sp2, s2)];
                    if !nonzero(coef) {
                        continue;
                    }
                    for s1 in 0..d1 {
                        let (src, dst) = ((s1 * d2 + s2) * blk, (s1 * d2 + sp2) * cl);
                        for r in 0..cr {
                            let o = r * rows + dst;
                            axpy(&mut zc[o..o + cl], coef, &qb[src + r * cl..src + (r + 1) * cl]);
                        }
                    }
                }
            }
        }
        // y^s = Σ_c Z_c^s R_c^T
        let mut out = alloc::vec![zero; rows * cr];
        let mut first = true;
        for (c, zc) in z.iter().enumerate() {
            if zc.is_empty() {
                continue;
            }
            let acc = if first { Accum::Replace } else { Accum::Add };
            first = false;
            let dst = MatMut::from_column_major_slice_mut(&mut out, rows, cr);
            matmul(
                dst,
                acc,
                MatRef::from_column_major_slice(zc, rows, cr),
                &self.right_t[c],
                one,
                Par::Seq,
            );
        }
        for s in 0..ns {
            for r in 0..cr {
                let o = s * blk + r * cl;
                y[o..o + cl].copy_from_slice(&out[r * rows + s * cl..r * rows + (s + 1) * cl]);
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.scale
    }
}

fn flatten(theta: &[DMatrix<C64>]) -> Vec<C64> {
    theta.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
}

/// Minimizes `⟨ψ|H|ψ⟩ + weight Σ_k |⟨φ_k|ψ⟩|²` over MPS by two-site sweeps,
/// starting from `init`. With `orthogonal_to` empty this is the ground
/// state; otherwise the penalty pushes the solution into the orthogonal
/// complement of the given (normalized) states.
pub fn dmrg_minimize(
    h: &MpoOperator,
    init: &MpsState,
    opts: &DmrgOptions,
    orthogonal_to: &[&MpsState],
    weight: f64,
) -> Result<DmrgResult> {
    if !h.tag.is_hermitian() {
        return Err(Error::NonHermitianOperator);
    }
    if init.layout() != h.layout() || orthogonal_to.iter().any(|p| p.layout() != h.layout()) {
        return Err(Error::LayoutMismatch);
    }
    opts.policy.validate()?;
    let n = h.len();
    if n < 2 {
        return Err(Error::InvalidArgument("DMRG needs at least two sites".into()));
    }
    let w = h.sites();
    let mut psi = init.clone();
    psi.canonicalize(0);
    psi.normalize();
    let start_weight = psi.truncation_weight();

    // Environments: left[i] covers sites < i, right[i] covers sites >= i.
    let mut left: Vec<Env> = alloc::vec![Vec::new(); n + 1];
    let mut right: Vec<Env> = alloc::vec![Vec::new(); n + 1];
    left[0] = left_boundary();
    right[n] = right_boundary();
    for i in (2..n).rev() {
        right[i] = right_step(&right[i + 1], psi.site(i), psi.site(i), &w[i]);
    }
    let unit = || DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    let k = orthogonal_to.len();
    let mut oleft: Vec<Vec<DMatrix<C64>>> =
        (0..k).map(|_| alloc::vec![DMatrix::zeros(0, 0); n + 1]).collect();
    let mut oright: Vec<Vec<DMatrix<C64>>> =
        (0..k).map(|_| alloc::vec![DMatrix::zeros(0, 0); n + 1]).collect();
    for (kk, phi) in orthogonal_to.iter().enumerate() {
        oleft[kk][0] = unit();
        oright[kk][n] = unit();
        for i in (2..n).rev() {
            oright[kk][i] = overlap_right(&oright[kk][i + 1], phi.site(i), psi.site(i));
        }
    }

    let mut energy = f64::INFINITY;
    let mut sweep_energies = Vec::new();
    let mut converged = false;
    let optimize = |psi: &mut MpsState,
                    i: usize,
                    left: &[Env],
                    right: &[Env],
                    oleft: &[Vec<DMatrix<C64>>],
                    oright: &[Vec<DMatrix<C64>>],
                    sweep: Sweep|
     -> Result<f64> {
        let theta = psi.theta(i);
        let (cl, cr) = theta[0].shape();
        let r_env = &right[i + 2];
        let op = TwoSiteOperator {
            left: left[i].iter().map(|m| to_mat(m, false)).collect(),
            right_t: r_env.iter().map(|m| to_mat(m, true)).collect(),
            w1: &w[i],
            w2: &w[i + 1],
            d1: psi.layout().dim(i),
            d2: psi.layout().dim(i + 1),
            cl,
            cr,
            scale: 1.0,
        };
        let x0 = flatten(&theta);
        // Scale for the breakdown threshold from one application.
        let mut hx = alloc::vec![C64::new(0.0, 0.0); x0.len()];
        op.apply(&x0, &mut hx);
        let nx = crate::linalg::cvec_norm(&x0).max(f64::MIN_POSITIVE);
        let op = TwoSiteOperator {
            scale: (crate::linalg::cvec_norm(&hx) / nx).max(1.0),
            ..op
        };
        let penalties: Vec<(f64, Vec<C64>)> = orthogonal_to
            .iter()
            .enumerate()
            .map(|(kk, phi)| {
                let lo = &oleft[kk][i];
                let ro = oright[kk][i + 2].conjugate();
                let mut v = Vec::with_capacity(x0.len());
                for a in phi.site(i) {
                    for b in phi.site(i + 1) {
                        let m = lo.adjoint() * (a * b) * &ro;
                        v.extend_from_slice(m.as_slice());
                    }
                }
                (weight, v)
            })
            .collect();
        let tol = opts.local_tol * op.scale;
        let (e, vec) = if penalties.is_empty() {
            let (e, v, _) = lowest_eigenpair(&op, &x0, opts.krylov_dim, tol, opts.local_restarts)?;
            (e, v)
        } else {
            let pen = Penalized {
                op: &op,
                vectors: &penalties,
            };
            let (e, v, _) = lowest_eigenpair(&pen, &x0, opts.krylov_dim, tol, opts.local_restarts)?;
            (e, v)
        };
        let block = cl * cr;
        let new_theta: Vec<DMatrix<C64>> = vec
            .chunks(block)
            .map(|c| DMatrix::from_column_slice(cl, cr, c))
            .collect();
        psi.split(i, &new_theta, &opts.policy, sweep);
        Ok(e)
    };

    for sweep in 0..opts.max_sweeps {
        let mut e = f64::INFINITY;
        for i in 0..n - 1 {
            e = optimize(&mut psi, i, &left, &right, &oleft, &oright, Sweep::Right)?;
            left[i + 1] = left_step(&left[i], psi.site(i), psi.site(i), &w[i]);
            for (kk, phi) in orthogonal_to.iter().enumerate() {
                oleft[kk][i + 1] = overlap_left(&oleft[kk][i], phi.site(i), psi.site(i));
            }
        }
        for i in (0..n - 1).rev() {
            e = optimize(&mut psi, i, &left, &right, &oleft, &oright, Sweep::Left)?;
            right[i + 1] = right_step(&right[i + 2], psi.site(i + 1), psi.site(i + 1), &w[i + 1]);
            for (kk, phi) in orthogonal_to.iter().enumerate() {
                oright[kk][i + 1] = overlap_right(&oright[kk][i + 2], phi.site(i + 1), psi.site(i + 1));
            }
        }
        sweep_energies.push(e);
        let change = (energy - e).abs();
        log::debug!("dmrg sweep {sweep}: E = {e:.15}, bond {}", psi.max_bond());
        energy = e;
        if sweep + 1 >= opts.min_sweeps && change < opts.energy_tol * e.abs().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!(
            "DMRG stopped after {} sweeps without meeting the energy tolerance",
            opts.max_sweeps
        );
    }
    let truncation_weight = psi.truncation_weight() - start_weight;
    Ok(DmrgResult {
        energy,
        state: psi,
        sweep_energies,
        converged,
        truncation_weight,
    })
}
