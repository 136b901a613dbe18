//! Physical observables of atom plus field states: population, energy
//! pieces, occupations in both bases, overlaps and the field energy density.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::chain_builder::{back_transform_correlations, ChainRep};
use crate::field_model::{ModeBasis, Sector};
#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::hermiticity_deviation;
use crate::mps_engine::{
    annihilation, apply_mpo, creation, expectation, local_expectation, mode_creation_mpo, overlap,
    product_state, sigma_z, two_point, HamiltonianSet, MpsState, TruncationPolicy, EXCITED, GROUND,
};
use crate::{Error, Result, C64};

/// States handed to the normalized observables must be within this of unit norm.
const NORM_TOL: f64 = 1e-8;

fn check_normalized(state: &MpsState) -> Result<f64> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(n)
}

/// `p_e = (1 + ⟨σz⟩)/2`, normalized by `⟨ψ|ψ⟩`.
pub fn atomic_population(state: &MpsState) -> Result<f64> {
    let n = state.norm_sqr();
    let sz = local_expectation(state, &sigma_z(), 0)?.re / n;
    Ok((1.0 + sz) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub e_total: f64,
    pub e_atom: f64,
    pub e_field: f64,
    pub e_int: f64,
}

impl EnergyBreakdown {
    /// `|e_total - (e_atom + e_field + e_int)|`.
    pub fn additivity_error(&self) -> f64 {
        (self.e_total - (self.e_atom + self.e_field + self.e_int)).abs()
    }
}

/// `⟨H_tot⟩, ⟨H_A⟩, ⟨H_f⟩, ⟨H_int⟩` on a normalized state.
pub fn energy_breakdown(state: &MpsState, mpos: &HamiltonianSet) -> Result<EnergyBreakdown> {
    let n = check_normalized(state)?;
    let ev = |m| expectation(state, m).map(|z| z.re / n);
    let out = EnergyBreakdown {
        e_total: ev(&mpos.h_tot)?,
        e_atom: ev(&mpos.h_a)?,
        e_field: ev(&mpos.h_f)?,
        e_int: ev(&mpos.h_int)?,
    };
    let scale = out.e_atom.abs() + out.e_field.abs() + out.e_int.abs();
    if out.additivity_error() > 1e-10 * scale.max(1.0) {
        log::warn!("energy pieces miss the total by {:e}", out.additivity_error());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupationRecord {
    pub p_e: f64,
    pub n_field: f64,
    /// `⟨a_j† a_j⟩` in basis order.
    pub n_modes: Vec<f64>,
    /// `⟨c_i† c_i⟩` along the chain.
    pub n_chain: Vec<f64>,
    /// Occupation of the lowest right-moving mode `j = 1`.
    pub n_lowest: f64,
}

/// Occupations in the chain and eigenmode bases from the chain correlator.
pub fn occupations(state: &MpsState, chain: &ChainRep) -> Result<OccupationRecord> {
    let layout = state.layout();
    if layout.chain_len() != chain.len() {
        return Err(Error::LayoutMismatch);
    }
    let norm = state.norm_sqr();
    let nb = layout.dim(layout.chain_site(0));
    let sites: Vec<usize> = (0..chain.len()).map(|i| layout.chain_site(i)).collect();
    if sites.iter().any(|&s| layout.dim(s) != nb) {
        return Err(Error::Unsupported(
            "occupations need a uniform boson truncation".into(),
        ));
    }
    let corr = two_point(state, &creation(nb), &annihilation(nb), &sites)? / C64::new(norm, 0.0);
    let modes = back_transform_correlations(&corr, None, &chain.transform)?;
    let n_modes: Vec<f64> = modes.normal.diagonal().iter().map(|z| z.re).collect();
    let n_chain: Vec<f64> = corr.diagonal().iter().map(|z| z.re).collect();
    Ok(OccupationRecord {
        p_e: atomic_population(state)?,
        n_field: n_chain.iter().sum(),
        n_lowest: n_modes[chain.basis.lowest_mode()],
        n_modes,
        n_chain,
    })
}

/// Squared overlaps probing the weak-coupling picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapRecord {
    /// `|⟨g,0|GS⟩|²`.
    pub ground_bare: f64,
    /// `|⟨e,0|ES⟩|²`.
    pub excited_bare: f64,
    /// `|⟨ES| a_1† |GS⟩|²` with `a_1†|GS⟩` normalized.
    pub excited_dressed: f64,
    /// `|⟨ES|GS⟩|²`.
    pub orthogonality: f64,
}

/// Overlaps of a ground and first excited state with their weak-coupling
/// counterparts. `policy` controls the compression of `a_1†|GS⟩`.
pub fn overlaps(
    gs: &MpsState,
    es: &MpsState,
    chain: &ChainRep,
    policy: &TruncationPolicy,
) -> Result<OverlapRecord> {
    if gs.layout() != es.layout() {
        return Err(Error::LayoutMismatch);
    }
    check_normalized(gs)?;
    check_normalized(es)?;
    let layout = gs.layout();
    let mut bare = alloc::vec![0usize; layout.len()];
    bare[0] = GROUND;
    let g0 = product_state(layout, &bare)?;
    bare[0] = EXCITED;
    let e0 = product_state(layout, &bare)?;
    let a1 = mode_creation_mpo(chain, chain.basis.lowest_mode(), layout)?;
    let applied = apply_mpo(gs, &a1, policy)?;
    if applied.flagged {
        log::warn!("a_1†|GS⟩ compression discarded {:e}", applied.discarded);
    }
    let mut dressed = applied.state;
    let nd = dressed.norm_sqr();
    if nd == 0.0 {
        return Err(Error::InvalidArgument("a_1† annihilated the ground state".into()));
    }
    dressed.normalize();
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    Ok(OverlapRecord {
        ground_bare: clamp(overlap(&g0, gs)?.norm_sqr()),
        excited_bare: clamp(overlap(&e0, es)?.norm_sqr()),
        excited_dressed: clamp(overlap(es, &dressed)?.norm_sqr()),
        orthogonality: clamp(overlap(es, gs)?.norm_sqr()),
    })
}

/// Normal-ordered field energy density on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDensityField {
    pub x: Vec<f64>,
    /// `T00 = ⟨:π_R²:⟩ + ⟨:π_L²:⟩`.
    pub t00: Vec<f64>,
    pub pi_r2: Vec<f64>,
    pub pi_l2: Vec<f64>,
}

impl EnergyDensityField {
    /// Trapezoid integral of `T00` over the grid points in `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        for k in 1..self.x.len() {
            let (x0, x1) = (self.x[k - 1], self.x[k]);
            if x0 >= a && x1 <= b {
                acc += 0.5 * (self.t00[k - 1] + self.t00[k]) * (x1 - x0);
            }
        }
        acc
    }

    /// Integral over one period `[0, L)` of a uniform periodic grid.
    pub fn total(&self, length: f64) -> f64 {
        let n = self.x.len() as f64;
        self.t00.iter().sum::<f64>() * length / n
    }
}

/// `n` uniform points covering `[0, L)`.
pub fn uniform_grid(length: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 * length / n as f64).collect()
}

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Field energy density from eigenmode correlators `⟨a_p† a_q⟩`, keeping
/// only number-conserving terms (normal ordered, vacuum subtracted).
///
/// Right movers (`j ≥ 1`) and left movers (`j ≤ -1`) give `π_R²` and
/// `π_L²`. For the Even sector each mode is the symmetric pair of `±j` and
/// the antisymmetric partner is assumed empty.
pub fn energy_density(
    correlators: &DMatrix<C64>,
    basis: &ModeBasis,
    x: &[f64],
) -> Result<EnergyDensityField> {
    let m = basis.len();
    if correlators.shape() != (m, m) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "correlator is {}x{}, basis has {m} modes",
            correlators.nrows(),
            correlators.ncols()
        )));
    }
    let scale = correlators
        .iter()
        .fold(0.0f64, |a, z| a.max(z.norm()))
        .max(1e-300);
    if hermiticity_deviation(correlators) > 1e-10 * scale {
        return Err(Error::NotHermitian(hermiticity_deviation(correlators)));
    }
    let n = basis.cutoff();
    let length = basis.length();
    // Per-sector correlators indexed by |j| - 1.
    let (right, left) = match basis.sector() {
        Sector::Full => {
            let pick = |sign: i64| {
                DMatrix::from_fn(n, n, |a, b| {
                    let p = basis.position(sign * (a as i64 + 1)).expect("mode in basis");
                    let q = basis.position(sign * (b as i64 + 1)).expect("mode in basis");
                    correlators[(p, q)]
                })
            };
            (pick(1), pick(-1))
        }
        Sector::Even => {
            let half = DMatrix::from_fn(n, n, |a, b| {
                let p = basis.position(a as i64 + 1).expect("mode in basis");
                let q = basis.position(b as i64 + 1).expect("mode in basis");
                correlators[(p, q)] * 0.5
            });
            (half.clone(), half)
        }
    };
    let pi_r2 = sector_density(&right, 1.0, length, x);
    let pi_l2 = sector_density(&left, -1.0, length, x);
    let t00 = pi_r2.iter().zip(&pi_l2).map(|(a, b)| a + b).collect();
    Ok(EnergyDensityField {
        x: x.to_vec(),
        t00,
        pi_r2,
        pi_l2,
    })
}

/// `2 Σ_jl C_jl √(k_j k_l)/(2L) e^{i(k_l - k_j)x}` for one direction. The
/// phase depends only on `l - j`, so the double sum collapses onto the
/// diagonals of `C` first.
fn sector_density(c: &DMatrix<C64>, sign: f64, length: f64, x: &[f64]) -> Vec<f64> {
    let n = c.nrows();
    let k = |a: usize| 2.0 * core::f64::consts::PI * (a as f64 + 1.0) / length;
    // g[d + n - 1] = Σ_j C_{j, j+d} √(k_j k_{j+d})
    let mut g = alloc::vec![C64::new(0.0, 0.0); 2 * n - 1];
    for a in 0..n {
        for b in 0..n {
            let w = (k(a) * k(b)).sqrt();
            g[b + n - 1 - a] += c[(a, b)] * w;
        }
    }
    x.iter()
        .map(|&xv| {
            let mut acc = 0.0;
            for (idx, gd) in g.iter().enumerate() {
                let d = idx as f64 - (n as f64 - 1.0);
                let phase = C64::from_polar(1.0, sign * 2.0 * core::f64::consts::PI * d * xv / length);
                acc += (gd * phase).re;
            }
            acc / length
        })
        .collect()
}
