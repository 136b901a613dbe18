use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::{qr_positive, svd};
use crate::{Error, Result, C64};

use super::layout::SiteLayout;

/// Bond-dimension and singular-value truncation rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub max_bond: usize,
    /// Largest relative discarded weight `Σ_discarded s² / Σ s²` per split.
    pub cutoff: f64,
    /// Bosonic levels kept per chain site.
    pub n_b: usize,
}

impl TruncationPolicy {
    pub fn new(max_bond: usize, cutoff: f64, n_b: usize) -> Result<Self> {
        let p = Self {
            max_bond,
            cutoff,
            n_b,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_bond == 0 {
            return Err(Error::InvalidArgument("max bond dimension must be >= 1".into()));
        }
        if !(self.cutoff >= 0.0) {
            return Err(Error::InvalidArgument("truncation cutoff must be >= 0".into()));
        }
        if self.n_b < 2 {
            return Err(Error::InvalidArgument("n_b must be >= 2".into()));
        }
        Ok(())
    }

    /// Ground-state searches: 25 bosons per site, bond 200, cutoff 1e-12.
    pub fn statics() -> Self {
        Self {
            max_bond: 200,
            cutoff: 1e-12,
            n_b: 25,
        }
    }

    /// Time evolution: 2 bosons per site, cutoff 1e-9 up to `λ = 0.6`
    /// and 1e-8 above.
    pub fn dynamics(lambda: f64) -> Self {
        Self {
            max_bond: 200,
            cutoff: if lambda <= 0.6 { 1e-9 } else { 1e-8 },
            n_b: 2,
        }
    }
}

/// Which side of a split bond receives the singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Left tensor becomes a left isometry, the centre moves right.
    Right,
    /// Right tensor becomes a right isometry, the centre moves left.
    Left,
}

/// Open-boundary matrix-product state. `tensors[i][s]` is the
/// `χ_{i} × χ_{i+1}` matrix of site `i` for local state `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsState {
    layout: SiteLayout,
    tensors: Vec<Vec<DMatrix<C64>>>,
    center: Option<usize>,
    truncation_weight: f64,
}

/// Product state `|s_0 s_1 ...⟩`.
pub fn product_state(layout: &SiteLayout, indices: &[usize]) -> Result<MpsState> {
    if indices.len() != layout.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} local indices for {} sites",
            indices.len(),
            layout.len()
        )));
    }
    let mut tensors = Vec::with_capacity(layout.len());
    for (site, (&s, &d)) in indices.iter().zip(layout.dims()).enumerate() {
        if s >= d {
            return Err(Error::InvalidArgument(alloc::format!(
                "local index {s} out of range at site {site} (dimension {d})"
            )));
        }
        let mut t = alloc::vec![DMatrix::zeros(1, 1); d];
        t[s][(0, 0)] = C64::new(1.0, 0.0);
        tensors.push(t);
    }
    Ok(MpsState {
        layout: layout.clone(),
        tensors,
        center: Some(0),
        truncation_weight: 0.0,
    })
}

/// Product state with arbitrary local vectors, normalized site by site.
pub fn product_state_from_vectors(layout: &SiteLayout, vectors: &[Vec<C64>]) -> Result<MpsState> {
    if vectors.len() != layout.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} local vectors for {} sites",
            vectors.len(),
            layout.len()
        )));
    }
    let mut tensors = Vec::with_capacity(layout.len());
    for (site, (v, &d)) in vectors.iter().zip(layout.dims()).enumerate() {
        let norm = crate::linalg::cvec_norm(v);
        if v.len() != d || norm == 0.0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "local vector at site {site} must be non-zero with length {d}"
            )));
        }
        tensors.push(v.iter().map(|z| DMatrix::from_element(1, 1, z / norm)).collect());
    }
    Ok(MpsState {
        layout: layout.clone(),
        tensors,
        center: Some(0),
        truncation_weight: 0.0,
    })
}

/// Normalized random state with bond dimension up to `bond`, right-canonical
/// about site 0. Deterministic in `seed`.
pub fn random_state(layout: &SiteLayout, bond: usize, seed: u64) -> MpsState {
    let n = layout.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // Bond dimensions limited by the Hilbert space on either side.
    let mut bonds = alloc::vec![1usize; n + 1];
    for i in 1..n {
        let left = layout.dims()[..i]
            .iter()
            .fold(1usize, |a, &d| a.saturating_mul(d));
        let right = layout.dims()[i..]
            .iter()
            .fold(1usize, |a, &d| a.saturating_mul(d));
        bonds[i] = bond.max(1).min(left).min(right);
    }
    let mut tensors = Vec::with_capacity(n);
    for i in 0..n {
        let d = layout.dim(i);
        let t = (0..d)
            .map(|_| {
                DMatrix::from_fn(bonds[i], bonds[i + 1], |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    C64::new(re, im)
                })
            })
            .collect();
        tensors.push(t);
    }
    let mut s = MpsState {
        layout: layout.clone(),
        tensors,
        center: None,
        truncation_weight: 0.0,
    };
    s.canonicalize(0);
    s.normalize();
    s
}

impl MpsState {
    pub(crate) fn from_parts(layout: SiteLayout, tensors: Vec<Vec<DMatrix<C64>>>) -> Self {
        Self {
            layout,
            tensors,
            center: None,
            truncation_weight: 0.0,
        }
    }

    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn site(&self, i: usize) -> &[DMatrix<C64>] {
        &self.tensors[i]
    }

    pub(crate) fn site_mut(&mut self, i: usize) -> &mut Vec<DMatrix<C64>> {
        self.center = None;
        &mut self.tensors[i]
    }

    /// Bond dimensions between neighbouring sites (length `n - 1`).
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.len() - 1]
            .iter()
            .map(|t| t[0].ncols())
            .collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    pub fn center(&self) -> Option<usize> {
        self.center
    }

    /// Sum of relative discarded weights of all truncations so far.
    pub fn truncation_weight(&self) -> f64 {
        self.truncation_weight
    }

    pub(crate) fn set_center(&mut self, c: usize) {
        self.center = Some(c);
    }

    pub(crate) fn add_truncation(&mut self, w: f64) {
        self.truncation_weight += w;
    }

    pub fn norm_sqr(&self) -> f64 {
        if let Some(c) = self.center {
            return self.tensors[c].iter().map(|m| m.norm_squared()).sum();
        }
        overlap(self, self).map(|z| z.re).unwrap_or(0.0)
    }

    /// Rescales to unit norm (no-op on the zero vector).
    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.scale(C64::new(1.0 / n, 0.0));
        }
    }

    /// Multiplies the state by `z`, applied at the centre if one is set.
    pub fn scale(&mut self, z: C64) {
        let i = self.center.unwrap_or(0);
        for m in self.tensors[i].iter_mut() {
            *m *= z;
        }
    }

    fn left_orthonormalize(&mut self, i: usize) {
        let d = self.tensors[i].len();
        let (cl, cr) = self.tensors[i][0].shape();
        let mut m = DMatrix::zeros(d * cl, cr);
        for (s, a) in self.tensors[i].iter().enumerate() {
            m.view_mut((s * cl, 0), (cl, cr)).copy_from(a);
        }
        let (q, r) = qr_positive(m);
        let k = q.ncols();
        for s in 0..d {
            self.tensors[i][s] = q.view((s * cl, 0), (cl, k)).into_owned();
        }
        for a in self.tensors[i + 1].iter_mut() {
            *a = &r * &*a;
        }
    }

    fn right_orthonormalize(&mut self, i: usize) {
        let d = self.tensors[i].len();
        let (cl, cr) = self.tensors[i][0].shape();
        let mut m = DMatrix::zeros(cl, d * cr);
        for (s, a) in self.tensors[i].iter().enumerate() {
            m.view_mut((0, s * cr), (cl, cr)).copy_from(a);
        }
        let (q, r) = qr_positive(m.adjoint());
        let k = q.ncols();
        let qd = q.adjoint();
        for s in 0..d {
            self.tensors[i][s] = qd.view((0, s * cr), (k, cr)).into_owned();
        }
        let rd = r.adjoint();
        for a in self.tensors[i - 1].iter_mut() {
            *a = &*a * &rd;
        }
    }

    /// Brings the state into mixed canonical form about `center`.
    pub fn canonicalize(&mut self, center: usize) {
        for i in 0..center {
            self.left_orthonormalize(i);
        }
        for i in (center + 1..self.len()).rev() {
            self.right_orthonormalize(i);
        }
        self.center = Some(center);
    }

    /// Moves the canonical centre, canonicalizing from scratch if needed.
    pub fn move_center(&mut self, to: usize) {
        match self.center {
            Some(c) if c <= to => {
                for i in c..to {
                    self.left_orthonormalize(i);
                }
            }
            Some(c) => {
                for i in (to + 1..=c).rev() {
                    self.right_orthonormalize(i);
                }
            }
            None => {
                self.canonicalize(to);
                return;
            }
        }
        self.center = Some(to);
    }

    /// Deviation of site `i` from being a left isometry `Σ_s A^s† A^s = 1`.
    pub fn left_isometry_residual(&self, i: usize) -> f64 {
        let cr = self.tensors[i][0].ncols();
        let mut acc = DMatrix::<C64>::zeros(cr, cr);
        for a in &self.tensors[i] {
            acc += a.adjoint() * a;
        }
        (acc - DMatrix::identity(cr, cr)).camax()
    }

    /// Deviation of site `i` from being a right isometry `Σ_s A^s A^s† = 1`.
    pub fn right_isometry_residual(&self, i: usize) -> f64 {
        let cl = self.tensors[i][0].nrows();
        let mut acc = DMatrix::<C64>::zeros(cl, cl);
        for a in &self.tensors[i] {
            acc += a * a.adjoint();
        }
        (acc - DMatrix::identity(cl, cl)).camax()
    }

    /// Two-site tensor of bond `(i, i+1)`, indexed `s1 * d2 + s2`.
    pub(crate) fn theta(&self, i: usize) -> Vec<DMatrix<C64>> {
        let a = &self.tensors[i];
        let b = &self.tensors[i + 1];
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                out.push(x * y);
            }
        }
        out
    }

    /// Splits a two-site tensor back onto sites `i, i+1` by truncated SVD.
    /// The kept singular values are rescaled to preserve the norm. Returns
    /// the relative discarded weight.
    pub(crate) fn split(
        &mut self,
        i: usize,
        theta: &[DMatrix<C64>],
        policy: &TruncationPolicy,
        sweep: Sweep,
    ) -> f64 {
        let d1 = self.layout.dim(i);
        let d2 = self.layout.dim(i + 1);
        let (cl, cr) = theta[0].shape();
        let mut m = DMatrix::zeros(d1 * cl, d2 * cr);
        for s1 in 0..d1 {
            for s2 in 0..d2 {
                m.view_mut((s1 * cl, s2 * cr), (cl, cr))
                    .copy_from(&theta[s1 * d2 + s2]);
            }
        }
        let dec = svd(m);
        let (keep, discarded, total) = truncation_rank(&dec.s, policy);
        let kept: f64 = dec.s[..keep].iter().map(|s| s * s).sum();
        let rescale = if kept > 0.0 { (total / kept).sqrt() } else { 1.0 };
        let weights: Vec<f64> = dec.s[..keep].iter().map(|s| s * rescale).collect();
        let mut u = dec.u.columns(0, keep).into_owned();
        let mut vt = dec.v_t.rows(0, keep).into_owned();
        match sweep {
            Sweep::Right => {
                for (k, w) in weights.iter().enumerate() {
                    vt.row_mut(k).scale_mut(*w);
                }
            }
            Sweep::Left => {
                for (k, w) in weights.iter().enumerate() {
                    u.column_mut(k).scale_mut(*w);
                }
            }
        }
        for s1 in 0..d1 {
            self.tensors[i][s1] = u.view((s1 * cl, 0), (cl, keep)).into_owned();
        }
        for s2 in 0..d2 {
            self.tensors[i + 1][s2] = vt.view((0, s2 * cr), (keep, cr)).into_owned();
        }
        self.center = Some(match sweep {
            Sweep::Right => i + 1,
            Sweep::Left => i,
        });
        self.truncation_weight += discarded;
        discarded
    }
}

/// Number of singular values to keep, the relative discarded weight and the
/// total weight `Σ s²`.
pub(crate) fn truncation_rank(s: &[f64], policy: &TruncationPolicy) -> (usize, f64, f64) {
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return (1, 0.0, 0.0);
    }
    // Smallest rank whose tail weight is within the cutoff.
    let mut keep = s.len();
    let mut tail = 0.0;
    while keep > 1 {
        let w = s[keep - 1] * s[keep - 1];
        if (tail + w) / total > policy.cutoff {
            break;
        }
        tail += w;
        keep -= 1;
    }
    // Exact zeros carry no information even with a zero cutoff.
    while keep > 1 && s[keep - 1] <= 1e-15 * s[0] {
        keep -= 1;
    }
    keep = keep.min(policy.max_bond);
    let discarded: f64 = s[keep..].iter().map(|x| x * x).sum::<f64>() / total;
    (keep, discarded, total)
}

/// `⟨a|b⟩`.
pub fn overlap(a: &MpsState, b: &MpsState) -> Result<C64> {
    if a.layout != b.layout {
        return Err(Error::LayoutMismatch);
    }
    let mut env = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for i in 0..a.len() {
        let mut next = DMatrix::zeros(a.tensors[i][0].ncols(), b.tensors[i][0].ncols());
        for (x, y) in a.tensors[i].iter().zip(&b.tensors[i]) {
            next += x.adjoint() * (&env * y);
        }
        env = next;
    }
    Ok(env[(0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_rank_respects_cutoff_and_bond() {
        let p = TruncationPolicy::new(10, 1e-3, 2).unwrap();
        let s = [1.0, 0.1, 0.01, 0.001];
        let (k, w, _) = truncation_rank(&s, &p);
        assert_eq!(k, 2);
        assert!(w <= 1e-3);
        let p = TruncationPolicy::new(1, 0.0, 2).unwrap();
        assert_eq!(truncation_rank(&s, &p).0, 1);
    }

    #[test]
    fn random_state_is_canonical_and_normalized() {
        let layout = SiteLayout::atom_chain(4, 3).unwrap();
        let s = random_state(&layout, 5, 1);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        for i in 1..s.len() {
            assert!(s.right_isometry_residual(i) < 1e-12);
        }
        let o = overlap(&s, &s).unwrap();
        assert!((o.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moving_the_centre_keeps_the_state() {
        let layout = SiteLayout::atom_chain(5, 2).unwrap();
        let s = random_state(&layout, 4, 2);
        let mut t = s.clone();
        t.move_center(4);
        for i in 0..4 {
            assert!(t.left_isometry_residual(i) < 1e-12);
        }
        assert!((overlap(&s, &t).unwrap().norm() - 1.0).abs() < 1e-12);
        t.move_center(2);
        assert!(t.right_isometry_residual(3) < 1e-12);
        assert!(t.left_isometry_residual(1) < 1e-12);
    }
}
