//! MPO times MPS with re-compression.

use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::svd;
use crate::{Error, Result, C64};

use super::mpo::MpoOperator;
use super::mps::{truncation_rank, MpsState, TruncationPolicy};

/// Outcome of [`apply_mpo`].
#[derive(Debug, Clone)]
pub struct AppliedMpo {
    /// `O|ψ⟩`, not normalized.
    pub state: MpsState,
    /// Sum of relative discarded weights of the compression.
    pub discarded: f64,
    /// Some single compression step discarded more than the policy cutoff,
    /// i.e. the bond cap rather than the cutoff set the rank.
    pub flagged: bool,
}

/// `O|ψ⟩` compressed back to the policy's bond dimension.
///
/// The exact product is left-canonicalized by QR and then truncated by SVD
/// from the right end; the result keeps its norm so that `‖O ψ‖` stays
/// meaningful.
pub fn apply_mpo(state: &MpsState, mpo: &MpoOperator, policy: &TruncationPolicy) -> Result<AppliedMpo> {
    if state.layout() != mpo.layout() {
        return Err(Error::LayoutMismatch);
    }
    policy.validate()?;
    let n = state.len();
    let mut tensors: Vec<Vec<DMatrix<C64>>> = Vec::with_capacity(n);
    for (i, w) in mpo.sites().iter().enumerate() {
        let a = state.site(i);
        let d = a.len();
        let (cl, cr) = a[0].shape();
        let mut site: Vec<DMatrix<C64>> = (0..d)
            .map(|_| DMatrix::zeros(w.left * cl, w.right * cr))
            .collect();
        for (l, r, op) in &w.blocks {
            for (sp, out) in site.iter_mut().enumerate() {
                for (s, as_) in a.iter().enumerate() {
                    let c = op[(sp, s)];
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let mut v = out.view_mut((l * cl, r * cr), (cl, cr));
                    v.zip_apply(as_, |x, y| *x += c * y);
                }
            }
        }
        tensors.push(site);
    }
    let mut out = MpsState::from_parts(state.layout().clone(), tensors);
    out.canonicalize(n - 1);

    let mut discarded = 0.0;
    let mut flagged = false;
    for i in (1..n).rev() {
        let site = out.site(i);
        let d = site.len();
        let (cl, cr) = site[0].shape();
        let mut m = DMatrix::zeros(cl, d * cr);
        for (s, a) in site.iter().enumerate() {
            m.view_mut((0, s * cr), (cl, cr)).copy_from(a);
        }
        let dec = svd(m);
        let (keep, w, _) = truncation_rank(&dec.s, policy);
        discarded += w;
        flagged |= w > policy.cutoff;
        let vt = dec.v_t.rows(0, keep).into_owned();
        let mut us = dec.u.columns(0, keep).into_owned();
        for (k, s) in dec.s[..keep].iter().enumerate() {
            us.column_mut(k).scale_mut(*s);
        }
        let new_site: Vec<DMatrix<C64>> = (0..d)
            .map(|s| vt.view((0, s * cr), (keep, cr)).into_owned())
            .collect();
        *out.site_mut(i) = new_site;
        for a in out.site_mut(i - 1).iter_mut() {
            *a = &*a * &us;
        }
    }
    out.set_center(0);
    out.add_truncation(discarded);
    Ok(AppliedMpo {
        state: out,
        discarded,
        flagged,
    })
}
