use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

use super::layout::{identity, SiteLayout};

/// What an MPO encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MpoTag {
    AtomHamiltonian,
    FieldHamiltonian,
    Interaction,
    TotalHamiltonian,
    /// Occupation of one site.
    Number(usize),
    /// Total boson number on the chain.
    TotalNumber,
    /// `σ+σ- + Σ_i c_i† c_i`.
    ExcitationNumber,
    /// Creation operator of field eigenmode `p` (basis position).
    ModeCreation(usize),
    Identity,
    Custom {
        hermitian: bool,
    },
}

impl MpoTag {
    pub fn is_hermitian(&self) -> bool {
        match self {
            MpoTag::ModeCreation(_) => false,
            MpoTag::Custom { hermitian } => *hermitian,
            _ => true,
        }
    }
}

/// One MPO tensor in block-sparse form: `(left, right, op)` entries with
/// `op` a `d × d` matrix acting on the site.
#[derive(Debug, Clone, PartialEq)]
pub struct MpoSite {
    pub left: usize,
    pub right: usize,
    pub blocks: Vec<(usize, usize, DMatrix<C64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpoOperator {
    pub tag: MpoTag,
    layout: SiteLayout,
    sites: Vec<MpoSite>,
}

impl MpoOperator {
    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn sites(&self) -> &[MpoSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Largest bond dimension.
    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right).max().unwrap_or(1)
    }

    /// Dense matrix in the product basis (site 0 most significant). Only
    /// for small layouts.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut partial: Vec<DMatrix<C64>> = alloc::vec![DMatrix::identity(1, 1)];
        for site in &self.sites {
            let d = site.blocks.first().map_or(1, |b| b.2.nrows());
            let dim = partial[0].nrows() * d;
            let mut next = alloc::vec![DMatrix::zeros(dim, dim); site.right];
            for (a, b, op) in &site.blocks {
                next[*b] += partial[*a].kronecker(op);
            }
            partial = next;
        }
        partial.swap_remove(0)
    }
}

/// A term of an operator sum. Coefficients are folded into the matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Local {
        site: usize,
        op: DMatrix<C64>,
    },
    /// `op_i ⊗ op_j` with `i < j` and identities in between.
    Pair {
        i: usize,
        op_i: DMatrix<C64>,
        j: usize,
        op_j: DMatrix<C64>,
    },
}

/// Sum of one- and two-site terms, compiled into an MPO with one channel
/// per open pair term.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    layout: SiteLayout,
    terms: Vec<Term>,
}

impl OperatorSum {
    pub fn new(layout: &SiteLayout) -> Self {
        Self {
            layout: layout.clone(),
            terms: Vec::new(),
        }
    }

    pub fn layout(&self) -> &SiteLayout {
        &self.layout
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn check(&self, site: usize, op: &DMatrix<C64>) -> Result<()> {
        if site >= self.layout.len() {
            return Err(Error::InvalidArgument(alloc::format!("site {site} out of range")));
        }
        let d = self.layout.dim(site);
        if op.shape() != (d, d) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "operator {:?} on site {site} of dimension {d}",
                op.shape()
            )));
        }
        Ok(())
    }

    pub fn add_local(&mut self, site: usize, op: DMatrix<C64>) -> Result<()> {
        self.check(site, &op)?;
        self.terms.push(Term::Local { site, op });
        Ok(())
    }

    pub fn add_pair(&mut self, i: usize, op_i: DMatrix<C64>, j: usize, op_j: DMatrix<C64>) -> Result<()> {
        self.check(i, &op_i)?;
        self.check(j, &op_j)?;
        if i == j {
            return self.add_local(i, op_i * op_j);
        }
        let (i, op_i, j, op_j) = if i < j {
            (i, op_i, j, op_j)
        } else {
            (j, op_j, i, op_i)
        };
        self.terms.push(Term::Pair { i, op_i, j, op_j });
        Ok(())
    }

    pub fn extend(&mut self, other: &OperatorSum) -> Result<()> {
        if other.layout != self.layout {
            return Err(Error::LayoutMismatch);
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    /// Compiles to an MPO. Channel 0 means "all terms placed", channel 1
    /// "nothing placed yet", channels 2.. carry pair terms across bonds.
    pub fn to_mpo(&self, tag: MpoTag) -> MpoOperator {
        let n = self.layout.len();
        // Pair terms open on each bond, in term order.
        let mut open: Vec<Vec<usize>> = alloc::vec![Vec::new(); n.saturating_sub(1)];
        for (t, term) in self.terms.iter().enumerate() {
            if let Term::Pair { i, j, .. } = term {
                for bond in open.iter_mut().take(*j).skip(*i) {
                    bond.push(t);
                }
            }
        }
        let channel = |bond: usize, t: usize| 2 + open[bond].iter().position(|&x| x == t).unwrap();
        let mut sites = Vec::with_capacity(n);
        for s in 0..n {
            let d = self.layout.dim(s);
            let first = s == 0;
            let last = s + 1 == n;
            let left = if first { 1 } else { 2 + open[s - 1].len() };
            let right = if last { 1 } else { 2 + open[s].len() };
            let start_l = if first { 0 } else { 1 };
            let mut blocks = Vec::new();
            if !last {
                blocks.push((start_l, 1, identity(d)));
            }
            if !first {
                blocks.push((0, 0, identity(d)));
            }
            let mut local = DMatrix::<C64>::zeros(d, d);
            let mut has_local = false;
            for (t, term) in self.terms.iter().enumerate() {
                match term {
                    Term::Local { site, op } if *site == s => {
                        local += op;
                        has_local = true;
                    }
                    Term::Pair { i, op_i, j, op_j } => {
                        if *i == s {
                            blocks.push((start_l, channel(s, t), op_i.clone()));
                        } else if *i < s && s < *j {
                            blocks.push((channel(s - 1, t), channel(s, t), identity(d)));
                        } else if *j == s {
                            blocks.push((channel(s - 1, t), 0, op_j.clone()));
                        }
                    }
                    _ => {}
                }
            }
            if has_local {
                blocks.push((start_l, 0, local));
            }
            sites.push(MpoSite { left, right, blocks });
        }
        MpoOperator {
            tag,
            layout: self.layout.clone(),
            sites,
        }
    }
}

/// Identity operator on `layout`.
pub fn identity_mpo(layout: &SiteLayout) -> MpoOperator {
    let mut sum = OperatorSum::new(layout);
    sum.add_local(0, identity(layout.dim(0))).expect("valid site");
    sum.to_mpo(MpoTag::Identity)
}
