//! Trotterized real-time evolution of the atom plus chain.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::chain_builder::ChainRep;
use crate::field_model::EmitterSpec;
#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::eigh;
use crate::{Error, ObservableTable, Result, C64};

use super::expectation::{expectation, local_profile};
use super::hamiltonian::{bond_hamiltonians, excitation_number_mpo, hamiltonian_terms, Variant};
use super::layout::{excited_projector, number};
use super::mpo::{MpoTag, OperatorSum};
use super::mps::{MpsState, Sweep, TruncationPolicy};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub total_time: f64,
    /// Trotter order, 1 or 2.
    pub order: u8,
    /// Time between recorded rows; a multiple of `dt`.
    pub stride: f64,
    pub policy: TruncationPolicy,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidArgument("total time must be non-negative".into()));
        }
        if self.order != 1 && self.order != 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "Trotter order {} (expected 1 or 2)",
                self.order
            )));
        }
        if self.stride < self.dt * (1.0 - 1e-9) {
            return Err(Error::InvalidArgument(
                "observation stride shorter than dt".into(),
            ));
        }
        self.policy.validate()
    }

    fn steps_per_stride(&self) -> Result<usize> {
        whole_steps(self.stride, self.dt, "stride")
    }

    fn total_steps(&self) -> Result<usize> {
        whole_steps(self.total_time, self.dt, "total time")
    }
}

fn whole_steps(span: f64, dt: f64, what: &str) -> Result<usize> {
    let r = span / dt;
    let n = r.round();
    if (r - n).abs() > 1e-6 * r.max(1.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "{what} {span} is not a multiple of dt {dt}"
        )));
    }
    Ok(n as usize)
}

/// Extra columns beyond the default `t, p_e, n_field, e_total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observer {
    /// `n_exc`: `σ+σ- + Σ c_i†c_i`.
    ExcitationNumber,
    /// `norm`: `⟨ψ|ψ⟩`.
    Norm,
    /// `max_occ`: largest single-site occupation on the chain.
    MaxOccupation,
    /// `n_site_i` for every chain site `i`.
    SiteOccupations,
    /// `truncation`: accumulated discarded weight.
    TruncationWeight,
}

/// Bond gates `e^{-i h_b δ}`, built once per step size.
#[derive(Debug, Clone)]
pub struct TrotterPropagator {
    bonds: Vec<DMatrix<C64>>,
    half: Vec<DMatrix<C64>>,
    full: Vec<DMatrix<C64>>,
    order: u8,
    dims: Vec<usize>,
}

fn gate(h: &DMatrix<C64>, dt: f64) -> DMatrix<C64> {
    let (vals, vecs) = eigh(h);
    let mut scaled = vecs.clone();
    for (k, e) in vals.iter().enumerate() {
        let ph = C64::from_polar(1.0, -e * dt);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= ph;
        }
    }
    scaled * vecs.adjoint()
}

impl TrotterPropagator {
    pub fn new(terms: &OperatorSum, dt: f64, order: u8) -> Result<Self> {
        if order != 1 && order != 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "Trotter order {order} (expected 1 or 2)"
            )));
        }
        let bonds = bond_hamiltonians(terms)?;
        let half = bonds.iter().map(|h| gate(h, dt / 2.0)).collect();
        let full = bonds.iter().map(|h| gate(h, dt)).collect();
        Ok(Self {
            bonds,
            half,
            full,
            order,
            dims: terms.layout().dims().to_vec(),
        })
    }

    /// The bond Hamiltonians behind the gates.
    pub fn bond_terms(&self) -> &[DMatrix<C64>] {
        &self.bonds
    }

    fn apply(&self, psi: &mut MpsState, i: usize, u: &DMatrix<C64>, policy: &TruncationPolicy, sweep: Sweep) {
        let theta = psi.theta(i);
        let (cl, cr) = theta[0].shape();
        let mut out: Vec<DMatrix<C64>> = (0..theta.len()).map(|_| DMatrix::zeros(cl, cr)).collect();
        for (sp, o) in out.iter_mut().enumerate() {
            for (s, t) in theta.iter().enumerate() {
                let c = u[(sp, s)];
                if c.re != 0.0 || c.im != 0.0 {
                    o.zip_apply(t, |a, b| *a += c * b);
                }
            }
        }
        psi.split(i, &out, policy, sweep);
    }

    /// Gates on every other bond starting at `first`, swept in the given
    /// direction so the canonical centre always sits on the gate.
    fn layer(
        &self,
        psi: &mut MpsState,
        first: usize,
        gates: &[DMatrix<C64>],
        policy: &TruncationPolicy,
        sweep: Sweep,
    ) {
        let mut bonds: Vec<usize> = (first..self.bonds.len()).step_by(2).collect();
        if sweep == Sweep::Left {
            bonds.reverse();
        }
        for b in bonds {
            match sweep {
                Sweep::Right => psi.move_center(b),
                Sweep::Left => psi.move_center(b + 1),
            }
            self.apply(psi, b, &gates[b], policy, sweep);
        }
    }

    /// One time step `dt`: even bonds, odd bonds, even bonds for order 2
    /// (Strang), even then odd for order 1.
    pub fn step(&self, psi: &mut MpsState, policy: &TruncationPolicy) -> Result<()> {
        if psi.layout().dims() != self.dims.as_slice() {
            return Err(Error::LayoutMismatch);
        }
        if self.order == 2 {
            self.layer(psi, 0, &self.half, policy, Sweep::Right);
            self.layer(psi, 1, &self.full, policy, Sweep::Left);
            self.layer(psi, 0, &self.half, policy, Sweep::Right);
        } else {
            self.layer(psi, 0, &self.full, policy, Sweep::Right);
            self.layer(psi, 1, &self.full, policy, Sweep::Left);
        }
        Ok(())
    }
}

/// Output of [`tebd_run`].
#[derive(Debug, Clone)]
pub struct TebdRun {
    pub table: ObservableTable,
    pub state: MpsState,
    /// Largest single-site chain occupation at any recorded time.
    pub max_occupation: f64,
}

/// Evolves `init` and records `t, p_e, n_field, e_total` (plus `observers`)
/// every stride, starting with `t = 0`.
pub fn tebd_evolve(
    chain: &ChainRep,
    emitter: &EmitterSpec,
    variant: Variant,
    init: &MpsState,
    config: &EvolutionConfig,
    observers: &[Observer],
) -> Result<ObservableTable> {
    tebd_run(chain, emitter, variant, init, config, observers).map(|r| r.table)
}

/// As [`tebd_evolve`], also returning the final state.
pub fn tebd_run(
    chain: &ChainRep,
    emitter: &EmitterSpec,
    variant: Variant,
    init: &MpsState,
    config: &EvolutionConfig,
    observers: &[Observer],
) -> Result<TebdRun> {
    config.validate()?;
    let layout = init.layout().clone();
    let total = hamiltonian_terms(chain, emitter, variant, &layout)?.total();
    let prop = TrotterPropagator::new(&total, config.dt, config.order)?;
    let h_tot = total.to_mpo(MpoTag::TotalHamiltonian);
    let n_exc = excitation_number_mpo(&layout);

    let mut columns: Vec<String> = ["t", "p_e", "n_field", "e_total"]
        .iter()
        .map(|s| String::from(*s))
        .collect();
    for o in observers {
        match o {
            Observer::ExcitationNumber => columns.push("n_exc".into()),
            Observer::Norm => columns.push("norm".into()),
            Observer::MaxOccupation => columns.push("max_occ".into()),
            Observer::TruncationWeight => columns.push("truncation".into()),
            Observer::SiteOccupations => {
                for i in 0..layout.chain_len() {
                    columns.push(alloc::format!("n_site_{i}"));
                }
            }
        }
    }
    let mut table = ObservableTable::new(&columns);
    let mut ops: Vec<(usize, DMatrix<C64>)> = alloc::vec![(0, excited_projector())];
    for i in 0..layout.chain_len() {
        let s = layout.chain_site(i);
        ops.push((s, number(layout.dim(s))));
    }
    let nb_max = (1..layout.len()).map(|s| layout.dim(s)).max().unwrap_or(2);
    let occ_limit = 0.8 * (nb_max as f64 - 1.0);
    let mut max_seen = 0.0f64;
    let mut warned = false;

    let mut record = |t: f64, psi: &MpsState, table: &mut ObservableTable| -> Result<()> {
        let norm = psi.norm_sqr();
        let prof: Vec<f64> = local_profile(psi, &ops)?.iter().map(|z| z.re / norm).collect();
        let n_field: f64 = prof[1..].iter().sum();
        let max_occ = prof[1..].iter().fold(0.0f64, |m, x| m.max(*x));
        max_seen = max_seen.max(max_occ);
        if max_occ > occ_limit && !warned {
            log::warn!("site occupation {max_occ:.3} exceeds 0.8 (n_b - 1) at t = {t}; raise n_b");
            warned = true;
        }
        let e = expectation(psi, &h_tot)?.re / norm;
        let mut row = alloc::vec![t, prof[0], n_field, e];
        for o in observers {
            match o {
                Observer::ExcitationNumber => row.push(expectation(psi, &n_exc)?.re / norm),
                Observer::Norm => row.push(norm),
                Observer::MaxOccupation => row.push(max_occ),
                Observer::TruncationWeight => row.push(psi.truncation_weight()),
                Observer::SiteOccupations => row.extend_from_slice(&prof[1..]),
            }
        }
        table.push_row(row)
    };

    let mut psi = init.clone();
    psi.move_center(0);
    let per_stride = config.steps_per_stride()?;
    let steps = config.total_steps()?;
    record(0.0, &psi, &mut table)?;
    for k in 1..=steps {
        prop.step(&mut psi, &config.policy)?;
        if k % per_stride == 0 {
            record(k as f64 * config.dt, &psi, &mut table)?;
        }
    }
    table.set_meta("dt", alloc::format!("{}", config.dt));
    table.set_meta("trotter_order", alloc::format!("{}", config.order));
    table.set_meta(
        "truncation_weight",
        alloc::format!("{:e}", psi.truncation_weight()),
    );
    table.set_meta("max_bond", alloc::format!("{}", psi.max_bond()));
    Ok(TebdRun {
        table,
        state: psi,
        max_occupation: max_seen,
    })
}
