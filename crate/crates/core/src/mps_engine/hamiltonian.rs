use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::chain_builder::{ChainCoefficients, ChainRep};
use crate::field_model::EmitterSpec;
#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

use super::layout::{
    annihilation, creation, excited_projector, identity, number, sigma_minus, sigma_plus, sigma_x, sigma_z,
    SiteLayout,
};
use super::mpo::{MpoOperator, MpoTag, OperatorSum, Term};

/// Form of the atom–field coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `λ√μ0 σx (c_0 + c_0†)`.
    Full,
    /// Rotating-wave form `λ√μ0 (σ+ c_0 + σ- c_0†)`.
    Rwa,
}

/// The three pieces of the Hamiltonian as operator sums.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerms {
    pub atom: OperatorSum,
    pub field: OperatorSum,
    pub interaction: OperatorSum,
}

impl HamiltonianTerms {
    pub fn total(&self) -> OperatorSum {
        let mut t = self.atom.clone();
        t.extend(&self.field).expect("same layout");
        t.extend(&self.interaction).expect("same layout");
        t
    }
}

/// `H_A`, `H_f`, `H_int` and their sum as MPOs.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSet {
    pub h_a: MpoOperator,
    pub h_f: MpoOperator,
    pub h_int: MpoOperator,
    pub h_tot: MpoOperator,
}

fn scaled(op: DMatrix<C64>, x: f64) -> DMatrix<C64> {
    op * C64::new(x, 0.0)
}

fn check_layout(chain: &ChainRep, layout: &SiteLayout) -> Result<()> {
    if layout.chain_len() != chain.len() || layout.dim(0) != 2 {
        return Err(Error::LayoutMismatch);
    }
    Ok(())
}

/// `H_f = Σ_ij T_ij c_i† c_j` on the chain sites of `layout`. Works for
/// block chains, whose hopping reaches beyond nearest neighbours.
pub fn field_terms(chain: &ChainRep, layout: &SiteLayout) -> Result<OperatorSum> {
    check_layout(chain, layout)?;
    let t = chain.single_particle_matrix();
    let m = chain.len();
    let mut sum = OperatorSum::new(layout);
    for i in 0..m {
        let si = layout.chain_site(i);
        let nb = layout.dim(si);
        let a = t[(i, i)].re;
        if a != 0.0 {
            sum.add_local(si, scaled(number(nb), a))?;
        }
        for j in i + 1..m {
            let tij = t[(i, j)];
            if tij.norm() == 0.0 {
                continue;
            }
            let sj = layout.chain_site(j);
            let nj = layout.dim(sj);
            sum.add_pair(si, creation(nb) * tij, sj, annihilation(nj))?;
            sum.add_pair(si, annihilation(nb) * tij.conj(), sj, creation(nj))?;
        }
    }
    Ok(sum)
}

/// Hamiltonian pieces for one emitter on a tridiagonal chain.
pub fn hamiltonian_terms(
    chain: &ChainRep,
    emitter: &EmitterSpec,
    variant: Variant,
    layout: &SiteLayout,
) -> Result<HamiltonianTerms> {
    if matches!(chain.coefficients, ChainCoefficients::Block(_)) {
        return Err(Error::Unsupported(
            "emitter Hamiltonian on a block chain; only the field part is available".into(),
        ));
    }
    check_layout(chain, layout)?;
    let mut atom = OperatorSum::new(layout);
    atom.add_local(0, scaled(sigma_z(), emitter.frequency / 2.0))?;
    let field = field_terms(chain, layout)?;
    let g = chain.interaction_scale(emitter.coupling);
    let mut interaction = OperatorSum::new(layout);
    if g != 0.0 {
        let s1 = layout.chain_site(0);
        let nb = layout.dim(s1);
        match variant {
            Variant::Full => {
                interaction.add_pair(0, scaled(sigma_x(), g), s1, annihilation(nb) + creation(nb))?;
            }
            Variant::Rwa => {
                interaction.add_pair(0, scaled(sigma_plus(), g), s1, annihilation(nb))?;
                interaction.add_pair(0, scaled(sigma_minus(), g), s1, creation(nb))?;
            }
        }
    }
    Ok(HamiltonianTerms {
        atom,
        field,
        interaction,
    })
}

/// MPOs of `H_A = Ω/2 σ_z`, the chain `H_f`, `H_int` and `H_tot` with `n_b`
/// bosonic levels per chain site.
pub fn hamiltonian_mpos(
    chain: &ChainRep,
    emitter: &EmitterSpec,
    variant: Variant,
    n_b: usize,
) -> Result<HamiltonianSet> {
    let layout = SiteLayout::atom_chain(chain.len(), n_b)?;
    let terms = hamiltonian_terms(chain, emitter, variant, &layout)?;
    Ok(HamiltonianSet {
        h_a: terms.atom.to_mpo(MpoTag::AtomHamiltonian),
        h_f: terms.field.to_mpo(MpoTag::FieldHamiltonian),
        h_int: terms.interaction.to_mpo(MpoTag::Interaction),
        h_tot: terms.total().to_mpo(MpoTag::TotalHamiltonian),
    })
}

/// `c_i† c_i` on one site.
pub fn number_mpo(layout: &SiteLayout, site: usize) -> Result<MpoOperator> {
    let mut sum = OperatorSum::new(layout);
    sum.add_local(site, number(layout.dim(site)))?;
    Ok(sum.to_mpo(MpoTag::Number(site)))
}

/// Total boson number on the chain sites.
pub fn total_number_mpo(layout: &SiteLayout) -> MpoOperator {
    let mut sum = OperatorSum::new(layout);
    for s in 1..layout.len() {
        sum.add_local(s, number(layout.dim(s))).expect("valid site");
    }
    sum.to_mpo(MpoTag::TotalNumber)
}

/// `σ+σ- + Σ_i c_i† c_i`, conserved by the rotating-wave Hamiltonian.
pub fn excitation_number_mpo(layout: &SiteLayout) -> MpoOperator {
    let mut sum = OperatorSum::new(layout);
    sum.add_local(0, excited_projector()).expect("valid site");
    for s in 1..layout.len() {
        sum.add_local(s, number(layout.dim(s))).expect("valid site");
    }
    sum.to_mpo(MpoTag::ExcitationNumber)
}

/// `Σ_i w_i c_i†` over the chain sites.
pub fn chain_creation_mpo(layout: &SiteLayout, weights: &[C64], tag: MpoTag) -> Result<MpoOperator> {
    if weights.len() != layout.chain_len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} weights for {} chain sites",
            weights.len(),
            layout.chain_len()
        )));
    }
    let mut sum = OperatorSum::new(layout);
    for (i, w) in weights.iter().enumerate() {
        if w.norm() == 0.0 {
            continue;
        }
        let s = layout.chain_site(i);
        sum.add_local(s, creation(layout.dim(s)) * *w)?;
    }
    Ok(sum.to_mpo(tag))
}

/// Creation operator of eigenmode `p`: `a_p† = Σ_i Λ_ip c_i†`.
pub fn mode_creation_mpo(chain: &ChainRep, p: usize, layout: &SiteLayout) -> Result<MpoOperator> {
    check_layout(chain, layout)?;
    if p >= chain.transform.ncols() {
        return Err(Error::InvalidArgument(alloc::format!("mode {p} out of range")));
    }
    let weights: Vec<C64> = chain.transform.column(p).iter().copied().collect();
    chain_creation_mpo(layout, &weights, MpoTag::ModeCreation(p))
}

/// Two-site Hamiltonians for a Trotter splitting along the chain.
///
/// Bond `b` couples sites `b, b+1`. The atom bond carries `H_A` and
/// `H_int`; each chain bond carries its hopping. On-site terms are shared
/// equally between the bonds touching a site (an end site gives all of it
/// to its only bond). Pair terms must be nearest neighbour.
pub fn bond_hamiltonians(terms: &OperatorSum) -> Result<Vec<DMatrix<C64>>> {
    let layout = terms.layout();
    let n = layout.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two sites".into()));
    }
    let mut bonds: Vec<DMatrix<C64>> = (0..n - 1)
        .map(|b| {
            let d = layout.dim(b) * layout.dim(b + 1);
            DMatrix::zeros(d, d)
        })
        .collect();
    for term in terms.terms() {
        match term {
            Term::Local { site, op } => {
                let s = *site;
                let mut targets: Vec<(usize, bool)> = Vec::new();
                if s > 0 {
                    targets.push((s - 1, false));
                }
                if s + 1 < n {
                    targets.push((s, true));
                }
                let share = C64::new(1.0 / targets.len() as f64, 0.0);
                for (b, site_is_left) in targets {
                    let dl = layout.dim(b);
                    let dr = layout.dim(b + 1);
                    let piece = if site_is_left {
                        op.kronecker(&identity(dr))
                    } else {
                        identity(dl).kronecker(op)
                    };
                    bonds[b] += piece * share;
                }
            }
            Term::Pair { i, op_i, j, op_j } => {
                if *j != *i + 1 {
                    return Err(Error::Unsupported(
                        "Trotter splitting needs nearest-neighbour couplings".into(),
                    ));
                }
                bonds[*i] += op_i.kronecker(op_j);
            }
        }
    }
    Ok(bonds)
}
