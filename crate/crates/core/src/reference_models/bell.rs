//! Radiation from two giant atoms prepared in a Bell state.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::field_model::{build_mode_basis, CouplingProfile, EmitterSpec, ProfileKind, Sector};
#[allow(unused_imports)]
use crate::float::*;
use crate::observables::{energy_density, EnergyDensityField};
use crate::{Error, ObservableTable, Result, C64};

use super::single_excitation::{single_excitation_states, SingleExcitationSetup};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellState {
    /// `(|eg⟩ + |ge⟩)/√2`.
    Triplet,
    /// `(|eg⟩ - |ge⟩)/√2`.
    Singlet,
}

impl BellState {
    pub fn amplitudes(self) -> [C64; 2] {
        let a = core::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::Triplet => [C64::new(a, 0.0), C64::new(a, 0.0)],
            BellState::Singlet => [C64::new(a, 0.0), C64::new(-a, 0.0)],
        }
    }
}

/// Two identical two-point atoms in the braided arrangement: atom 1 at
/// `0, τ`, atom 2 at `τ/2, 3τ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BraidedPair {
    pub length: f64,
    pub cutoff: usize,
    pub frequency: f64,
    pub coupling: f64,
    pub tau: f64,
    /// Gaussian width `d` of each point.
    pub width: f64,
}

impl BraidedPair {
    /// `L = 1`, `τ = L/10`, `d = L/300`, `λ = 0.208`, `Ωτ/2π = 5`.
    pub fn reference() -> Self {
        let length = 1.0;
        let tau = length / 10.0;
        Self {
            length,
            cutoff: 550,
            frequency: 10.0 * core::f64::consts::PI / tau,
            coupling: 0.208,
            tau,
            width: length / 300.0,
        }
    }

    /// Leftmost and rightmost coupling point.
    pub fn outer_points(&self) -> (f64, f64) {
        (0.0, 1.5 * self.tau)
    }

    pub fn emitters(&self) -> Result<[EmitterSpec; 2]> {
        let profile = CouplingProfile::new(ProfileKind::Gaussian, self.width)?;
        let t = self.tau;
        Ok([
            EmitterSpec::new(self.frequency, self.coupling, alloc::vec![0.0, t], profile)?,
            EmitterSpec::new(
                self.frequency,
                self.coupling,
                alloc::vec![t / 2.0, 1.5 * t],
                profile,
            )?,
        ])
    }

    pub fn setup(&self) -> Result<SingleExcitationSetup> {
        let basis = build_mode_basis(self.length, self.cutoff, Sector::Full)?;
        SingleExcitationSetup::from_emitters(&basis, &self.emitters()?)
    }
}

#[derive(Debug, Clone)]
pub struct BellEmission {
    /// `t, p_e_1, p_e_2, norm, e_field, e_between` per time.
    pub table: ObservableTable,
    /// Field energy density at each time.
    pub density: Vec<EnergyDensityField>,
}

/// Propagates a Bell state of a [`BraidedPair`] and records the field energy
/// density on `x` at every time. `e_between` integrates the density over the
/// grid points between the outer coupling points.
pub fn bell_state_emission(
    pair: &BraidedPair,
    initial: BellState,
    times: &[f64],
    x: &[f64],
) -> Result<BellEmission> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "energy density needs at least two grid points".into(),
        ));
    }
    let setup = pair.setup()?;
    let basis = setup.basis().expect("periodic setup").clone();
    let psi0 = setup.emitter_state(&initial.amplitudes())?;
    let (a, b) = pair.outer_points();
    let mut table = ObservableTable::new(&["t", "p_e_1", "p_e_2", "norm", "e_field", "e_between"]);
    let mut density = Vec::with_capacity(times.len());
    let freqs = setup.mode_frequencies().to_vec();
    single_excitation_states(&setup, &psi0, times, |t, psi| {
        let field = &psi[2..];
        // ⟨a_p† a_q⟩ = conj(ψ_p) ψ_q
        let corr = DMatrix::from_fn(field.len(), field.len(), |p, q| field[p].conj() * field[q]);
        let rho = energy_density(&corr, &basis, x)?;
        let e_field: f64 = field.iter().zip(&freqs).map(|(z, w)| z.norm_sqr() * w).sum();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        table.push_row(alloc::vec![
            t,
            psi[0].norm_sqr(),
            psi[1].norm_sqr(),
            norm,
            e_field,
            rho.integrate(a, b)
        ])?;
        density.push(rho);
        Ok(())
    })?;
    table.set_meta(
        "initial",
        if initial == BellState::Triplet {
            "triplet"
        } else {
            "singlet"
        },
    );
    Ok(BellEmission { table, density })
}
