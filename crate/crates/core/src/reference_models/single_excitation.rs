//! Exact dynamics in the one-excitation sector under the rotating-wave
//! approximation, for any number of (giant) emitters.
//!
//! The basis is `{|e_i⟩ ⊗ vac}` for each emitter followed by `{|g..g⟩ ⊗ a_j†|vac⟩}`
//! for each mode, energies measured from the global ground state.

use alloc::string::String;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::chain_builder::HermitianOperator;
use crate::field_model::{coupling_vector, EmitterSpec, ModeBasis};
#[allow(unused_imports)]
use crate::float::*;
use crate::krylov::chebyshev_propagate;
use crate::linalg::eigh;
use crate::{Error, ObservableTable, Result, C64};

/// Above this dimension propagation switches from one dense
/// eigendecomposition to a Chebyshev expansion.
pub const SE_DENSE_LIMIT: usize = 4096;

/// Initial amplitudes must have unit norm to this precision.
const NORM_TOL: f64 = 1e-12;

/// An emitter coupled at bare points with a frequency-independent
/// strength, as in the continuum model.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEmitter {
    pub frequency: f64,
    pub positions: Vec<f64>,
}

/// A symmetric window of waveguide modes around a centre frequency.
///
/// Index `j` runs over `centre - half ..= centre + half`, each carrying a
/// right mover `k = 2πj/L` and a left mover `k = -2πj/L` at frequency
/// `2πj/L`. Frequencies may reach zero or below: the band models a linear
/// dispersion over the whole bandwidth the emitters can resolve, not the
/// physical spectrum of a ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideBand {
    pub length: f64,
    pub centre: i64,
    pub half: usize,
}

impl WaveguideBand {
    /// Band centred on the mode nearest to `frequency`.
    pub fn around(frequency: f64, length: f64, half: usize) -> Self {
        let centre = (frequency * length / (2.0 * core::f64::consts::PI)).round() as i64;
        Self { length, centre, half }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationSetup {
    emitter_frequencies: Vec<f64>,
    wavenumbers: Vec<f64>,
    mode_frequencies: Vec<f64>,
    /// `H1[e_i, mode]`, one row per emitter.
    couplings: Vec<Vec<C64>>,
    basis: Option<ModeBasis>,
}

impl SingleExcitationSetup {
    /// Emitters with smeared coupling points on a periodic mode basis:
    /// `H1[e_i, j] = λ_i f_j^(i)`, the weight of `σ_i+ a_j`.
    pub fn from_emitters(basis: &ModeBasis, emitters: &[EmitterSpec]) -> Result<Self> {
        if emitters.is_empty() {
            return Err(Error::InvalidArgument("need at least one emitter".into()));
        }
        let mut couplings = Vec::with_capacity(emitters.len());
        for e in emitters {
            let f = coupling_vector(basis, e)?;
            couplings.push(f.coefficients.iter().map(|c| c * e.coupling).collect());
        }
        Ok(Self {
            emitter_frequencies: emitters.iter().map(|e| e.frequency).collect(),
            wavenumbers: basis.wavenumbers().to_vec(),
            mode_frequencies: basis.frequencies().to_vec(),
            couplings,
            basis: Some(basis.clone()),
        })
    }

    /// Point-coupled emitters on a [`WaveguideBand`] with decay rate `γ`
    /// per point: each point couples to each mode with `√(γ/2L) e^{-ikx}`.
    pub fn waveguide(band: &WaveguideBand, gamma: f64, emitters: &[PointEmitter]) -> Result<Self> {
        if emitters.is_empty() {
            return Err(Error::InvalidArgument("need at least one emitter".into()));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) || !(band.length > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "need gamma >= 0 and L > 0, got {gamma} and {}",
                band.length
            )));
        }
        let unit = 2.0 * core::f64::consts::PI / band.length;
        let lo = band.centre - band.half as i64;
        let hi = band.centre + band.half as i64;
        let omega: Vec<f64> = (lo..=hi).map(|j| unit * j as f64).collect();
        let mut wavenumbers = omega.clone();
        wavenumbers.extend(omega.iter().map(|w| -w));
        let mut mode_frequencies = omega.clone();
        mode_frequencies.extend_from_slice(&omega);
        let g = (gamma / (2.0 * band.length)).sqrt();
        let couplings = emitters
            .iter()
            .map(|e| {
                wavenumbers
                    .iter()
                    .map(|&k| e.positions.iter().map(|&x| C64::from_polar(g, k * x)).sum())
                    .collect()
            })
            .collect();
        Ok(Self {
            emitter_frequencies: emitters.iter().map(|e| e.frequency).collect(),
            wavenumbers,
            mode_frequencies,
            couplings,
            basis: None,
        })
    }

    pub fn num_emitters(&self) -> usize {
        self.emitter_frequencies.len()
    }

    pub fn num_modes(&self) -> usize {
        self.mode_frequencies.len()
    }

    pub fn dim(&self) -> usize {
        self.num_emitters() + self.num_modes()
    }

    /// The periodic basis, for setups built by [`Self::from_emitters`].
    pub fn basis(&self) -> Option<&ModeBasis> {
        self.basis.as_ref()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn mode_frequencies(&self) -> &[f64] {
        &self.mode_frequencies
    }

    /// Dense `H1`.
    pub fn matrix(&self) -> DMatrix<C64> {
        let ne = self.num_emitters();
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for (i, w) in self.emitter_frequencies.iter().enumerate() {
            h[(i, i)] = C64::new(*w, 0.0);
        }
        for (j, w) in self.mode_frequencies.iter().enumerate() {
            h[(ne + j, ne + j)] = C64::new(*w, 0.0);
        }
        for (i, row) in self.couplings.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                h[(i, ne + j)] = *c;
                h[(ne + j, i)] = c.conj();
            }
        }
        h
    }

    /// `(emin, emax)` enclosing the spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        let diag = self.emitter_frequencies.iter().chain(&self.mode_frequencies);
        let (lo, hi) = diag.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &w| {
            (l.min(w), h.max(w))
        });
        let g: f64 = self
            .couplings
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        (lo - g - 1e-9, hi + g + 1e-9)
    }

    /// The emitter-only initial state with the given amplitudes.
    pub fn emitter_state(&self, amplitudes: &[C64]) -> Result<Vec<C64>> {
        if amplitudes.len() != self.num_emitters() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} amplitudes for {} emitters",
                amplitudes.len(),
                self.num_emitters()
            )));
        }
        let mut v = alloc::vec![C64::new(0.0, 0.0); self.dim()];
        v[..amplitudes.len()].copy_from_slice(amplitudes);
        Ok(v)
    }
}

impl HermitianOperator for SingleExcitationSetup {
    fn dim(&self) -> usize {
        SingleExcitationSetup::dim(self)
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        let ne = self.num_emitters();
        let (xe, xf) = x.split_at(ne);
        let (ye, yf) = y.split_at_mut(ne);
        for ((yj, xj), w) in yf.iter_mut().zip(xf).zip(&self.mode_frequencies) {
            *yj = xj * *w;
        }
        for (i, row) in self.couplings.iter().enumerate() {
            let mut acc = xe[i] * self.emitter_frequencies[i];
            for ((c, xj), yj) in row.iter().zip(xf).zip(yf.iter_mut()) {
                acc += c * xj;
                *yj += c.conj() * xe[i];
            }
            ye[i] = acc;
        }
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        lo.abs().max(hi.abs())
    }
}

enum Propagator {
    Dense {
        values: Vec<f64>,
        vectors: DMatrix<C64>,
        start: Vec<C64>,
    },
    Chebyshev {
        current: Vec<C64>,
        time: f64,
        bounds: (f64, f64),
    },
}

impl Propagator {
    fn new(setup: &SingleExcitationSetup, init: &[C64]) -> Self {
        if setup.dim() <= SE_DENSE_LIMIT {
            let (values, vectors) = eigh(&setup.matrix());
            let start = (vectors.adjoint() * crate::linalg::to_dvector(init))
                .iter()
                .copied()
                .collect();
            Propagator::Dense {
                values,
                vectors,
                start,
            }
        } else {
            Propagator::Chebyshev {
                current: init.to_vec(),
                time: 0.0,
                bounds: setup.spectral_bounds(),
            }
        }
    }

    fn at(&mut self, setup: &SingleExcitationSetup, t: f64) -> Result<Vec<C64>> {
        match self {
            Propagator::Dense {
                values,
                vectors,
                start,
            } => {
                let phased: Vec<C64> = start
                    .iter()
                    .zip(values.iter())
                    .map(|(c, e)| c * C64::from_polar(1.0, -e * t))
                    .collect();
                let mut out = alloc::vec![C64::new(0.0, 0.0); vectors.nrows()];
                for (k, c) in phased.iter().enumerate() {
                    for (o, v) in out.iter_mut().zip(vectors.column(k).iter()) {
                        *o += v * c;
                    }
                }
                Ok(out)
            }
            Propagator::Chebyshev {
                current,
                time,
                bounds,
            } => {
                if t != *time {
                    *current = chebyshev_propagate(setup, current, t - *time, bounds.0, bounds.1)?;
                    *time = t;
                }
                Ok(current.clone())
            }
        }
    }
}

fn check_normalized(v: &[C64]) -> Result<()> {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// Calls `visit(t, amplitudes)` with the full state `e^{-iH1 t} ψ0` at each
/// time. Times may come in any order; ascending is cheapest for large setups.
pub fn single_excitation_states(
    setup: &SingleExcitationSetup,
    init: &[C64],
    times: &[f64],
    mut visit: impl FnMut(f64, &[C64]) -> Result<()>,
) -> Result<()> {
    if init.len() != setup.dim() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "initial state has {} amplitudes, setup has dimension {}",
            init.len(),
            setup.dim()
        )));
    }
    check_normalized(init)?;
    let mut prop = Propagator::new(setup, init);
    for &t in times {
        let psi = prop.at(setup, t)?;
        visit(t, &psi)?;
    }
    Ok(())
}

/// Populations and amplitudes of each emitter over `times`.
///
/// Columns: `t`, then `p_e_i`, `re_b_i`, `im_b_i` per emitter (1-based),
/// `p_field` and `norm`. Mode amplitudes are available through
/// [`single_excitation_states`].
pub fn single_excitation_evolve(
    setup: &SingleExcitationSetup,
    init: &[C64],
    times: &[f64],
) -> Result<ObservableTable> {
    let ne = setup.num_emitters();
    let mut columns: Vec<String> = alloc::vec!["t".into()];
    for i in 1..=ne {
        columns.push(alloc::format!("p_e_{i}"));
        columns.push(alloc::format!("re_b_{i}"));
        columns.push(alloc::format!("im_b_{i}"));
    }
    columns.push("p_field".into());
    columns.push("norm".into());
    let mut table = ObservableTable::new(&columns);
    single_excitation_states(setup, init, times, |t, psi| {
        let mut row = alloc::vec![t];
        for b in &psi[..ne] {
            row.extend_from_slice(&[b.norm_sqr(), b.re, b.im]);
        }
        let p_field: f64 = psi[ne..].iter().map(|z| z.norm_sqr()).sum();
        let p_atoms: f64 = psi[..ne].iter().map(|z| z.norm_sqr()).sum();
        row.push(p_field);
        row.push(p_atoms + p_field);
        table.push_row(row)
    })?;
    table.set_meta("dimension", alloc::format!("{}", setup.dim()));
    table.set_meta(
        "method",
        if setup.dim() <= SE_DENSE_LIMIT {
            "eigendecomposition"
        } else {
            "chebyshev"
        },
    );
    Ok(table)
}
