//! Brute-force exact diagonalization in the truncated product basis.
//!
//! The Hamiltonian is assembled element by element from the single-particle
//! matrix and the coupling weights, without going through the MPO builder,
//! so it can serve as an independent check of the MPS engine.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::chain_builder::{ChainCoefficients, ChainRep, HermitianOperator};
use crate::field_model::{CouplingVector, EmitterSpec, ModeBasis};
#[allow(unused_imports)]
use crate::float::*;
use crate::krylov::{krylov_propagate, lowest_eigenpair, Penalized};
use crate::linalg::{cdot, eigh};
use crate::mps_engine::Variant;
use crate::{Error, ObservableTable, Result, C64};

/// Largest Hilbert dimension the oracle accepts.
pub const ED_DIMENSION_CAP: usize = 200_000;
/// Up to this dimension the oracle works with a dense eigendecomposition.
pub const ED_DENSE_LIMIT: usize = 2048;

/// Atom plus bosonic modes:
/// `Ω/2 σz + Σ_ij T_ij c_i† c_j + σx Σ_i (w_i c_i + w_i* c_i†)`
/// (or its rotating-wave form), each mode truncated to `n_b` levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EdHamiltonian {
    pub omega: f64,
    pub hopping: DMatrix<C64>,
    /// Weight of `c_i` in the interaction.
    pub weights: Vec<C64>,
    pub variant: Variant,
    pub n_b: usize,
}

impl EdHamiltonian {
    /// The chain form: only the front site couples, with strength `λ√μ0`.
    pub fn from_chain(chain: &ChainRep, emitter: &EmitterSpec, variant: Variant, n_b: usize) -> Result<Self> {
        if matches!(chain.coefficients, ChainCoefficients::Block(_)) {
            return Err(Error::Unsupported("oracle for a single emitter only".into()));
        }
        let mut weights = alloc::vec![C64::new(0.0, 0.0); chain.len()];
        weights[0] = C64::new(chain.interaction_scale(emitter.coupling), 0.0);
        Ok(Self {
            omega: emitter.frequency,
            hopping: chain.single_particle_matrix(),
            weights,
            variant,
            n_b,
        })
    }

    /// The eigenmode form: diagonal field, `a_j` weighted by `λ f_j`.
    pub fn from_modes(
        basis: &ModeBasis,
        coupling: &CouplingVector,
        emitter: &EmitterSpec,
        variant: Variant,
        n_b: usize,
    ) -> Result<Self> {
        if coupling.coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch("coupling vector and basis".into()));
        }
        let w = basis.frequencies();
        let hopping = DMatrix::from_fn(w.len(), w.len(), |i, j| {
            if i == j {
                C64::new(w[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let weights = coupling
            .coefficients
            .iter()
            .map(|f| f * emitter.coupling)
            .collect();
        Ok(Self {
            omega: emitter.frequency,
            hopping,
            weights,
            variant,
            n_b,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.weights.len()
    }

    pub fn dimension(&self) -> usize {
        let m = self.num_modes() as u32;
        2usize.saturating_mul(self.n_b.saturating_pow(m))
    }
}

/// Hamiltonian in compressed sparse row form plus the product-basis layout.
#[derive(Debug, Clone)]
pub struct EdOperator {
    dim: usize,
    n_b: usize,
    modes: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    bound: f64,
}

impl EdOperator {
    /// Occupations `(s_atom, n_0, …)` of basis state `idx` (atom most significant).
    pub fn decode(&self, idx: usize) -> Vec<usize> {
        let mut out = alloc::vec![0usize; self.modes + 1];
        let mut r = idx;
        for k in (1..=self.modes).rev() {
            out[k] = r % self.n_b;
            r /= self.n_b;
        }
        out[0] = r;
        out
    }

    pub fn encode(&self, occ: &[usize]) -> usize {
        occ[1..].iter().fold(occ[0], |acc, &n| acc * self.n_b + n)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

impl HermitianOperator for EdOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yr = acc;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

/// Builds the sparse Hamiltonian. Fails above [`ED_DIMENSION_CAP`].
pub fn ed_operator(h: &EdHamiltonian) -> Result<EdOperator> {
    let m = h.num_modes();
    if h.hopping.shape() != (m, m) {
        return Err(Error::DimensionMismatch("hopping matrix and weights".into()));
    }
    if h.n_b < 2 {
        return Err(Error::InvalidArgument("n_b must be at least 2".into()));
    }
    let dim = h.dimension();
    if dim > ED_DIMENSION_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: ED_DIMENSION_CAP,
        });
    }
    let nb = h.n_b;
    let mut op = EdOperator {
        dim,
        n_b: nb,
        modes: m,
        row_ptr: Vec::with_capacity(dim + 1),
        cols: Vec::new(),
        vals: Vec::new(),
        bound: 0.0,
    };
    // Stride of mode i in the flat index.
    let stride: Vec<usize> = (0..m).map(|i| nb.pow((m - 1 - i) as u32)).collect();
    let atom_stride = nb.pow(m as u32);
    op.row_ptr.push(0);
    let mut row: Vec<(usize, C64)> = Vec::new();
    for r in 0..dim {
        let occ = op.decode(r);
        row.clear();
        // Matrix element ⟨r|H|c⟩ collected per column c.
        let mut diag = h.omega / 2.0 * if occ[0] == 1 { 1.0 } else { -1.0 };
        for i in 0..m {
            diag += h.hopping[(i, i)].re * occ[i + 1] as f64;
        }
        row.push((r, C64::new(diag, 0.0)));
        // Hopping ⟨r|c_i† c_j|c⟩: c has one more boson at j, one fewer at i.
        for i in 0..m {
            for j in 0..m {
                let t = h.hopping[(i, j)];
                if i == j || (t.re == 0.0 && t.im == 0.0) {
                    continue;
                }
                let (ni, nj) = (occ[i + 1], occ[j + 1]);
                if ni == 0 || nj + 1 >= nb {
                    continue;
                }
                let c = r - stride[i] + stride[j];
                row.push((c, t * ((ni as f64) * (nj as f64 + 1.0)).sqrt()));
            }
        }
        // Interaction.
        for (i, w) in h.weights.iter().enumerate() {
            if w.re == 0.0 && w.im == 0.0 {
                continue;
            }
            let ni = occ[i + 1];
            let flip_up = occ[0] == 0; // column has the atom excited
            let c_atom = if flip_up { r + atom_stride } else { r - atom_stride };
            // ⟨r| w c_i |c⟩: column holds ni + 1 bosons.
            let lowers = ni + 1 < nb;
            // ⟨r| w* c_i† |c⟩: column holds ni - 1 bosons.
            let raises = ni > 0;
            let allowed_lower = match h.variant {
                Variant::Full => true,
                // σ- c_i† and σ+ c_i only: row atom state g pairs with raising.
                Variant::Rwa => !flip_up,
            };
            let allowed_raise = match h.variant {
                Variant::Full => true,
                Variant::Rwa => flip_up,
            };
            if lowers && allowed_lower {
                row.push((c_atom + stride[i], *w * ((ni + 1) as f64).sqrt()));
            }
            if raises && allowed_raise {
                row.push((c_atom - stride[i], w.conj() * (ni as f64).sqrt()));
            }
        }
        row.sort_by_key(|(c, _)| *c);
        let mut abs_sum = 0.0;
        let mut last: Option<usize> = None;
        for &(c, v) in row.iter() {
            if last == Some(c) {
                *op.vals.last_mut().expect("entry") += v;
            } else {
                op.cols.push(c);
                op.vals.push(v);
                last = Some(c);
            }
            abs_sum += v.norm();
        }
        op.bound = op.bound.max(abs_sum);
        op.row_ptr.push(op.cols.len());
    }
    Ok(op)
}

/// What to compute.
#[derive(Debug, Clone, PartialEq)]
pub enum EdTask {
    Ground,
    /// The `k` lowest eigenpairs.
    Lowest(usize),
    /// `t, p_e, n_field, e_total, n_exc` at each time from a product state
    /// with the given occupations (atom first).
    Evolve {
        times: Vec<f64>,
        initial: Vec<usize>,
    },
}

#[derive(Debug, Clone)]
pub enum EdOutput {
    Spectrum {
        energies: Vec<f64>,
        states: Vec<Vec<C64>>,
    },
    Dynamics(ObservableTable),
}

pub fn ed_oracle(h: &EdHamiltonian, task: &EdTask) -> Result<EdOutput> {
    let op = ed_operator(h)?;
    match task {
        EdTask::Ground => lowest_states(&op, 1),
        EdTask::Lowest(k) => lowest_states(&op, *k),
        EdTask::Evolve { times, initial } => evolve(&op, initial, times).map(EdOutput::Dynamics),
    }
}

fn lowest_states(op: &EdOperator, k: usize) -> Result<EdOutput> {
    let k = k.min(op.dim);
    if op.dim <= ED_DENSE_LIMIT {
        let (vals, vecs) = eigh(&op.to_dense());
        let states = (0..k).map(|c| vecs.column(c).iter().copied().collect()).collect();
        return Ok(EdOutput::Spectrum {
            energies: vals[..k].to_vec(),
            states,
        });
    }
    // Sequential deflation: each new state minimizes H plus a penalty on
    // the ones already found.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let shift = 2.0 * op.norm_bound();
    let mut found: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut energies = Vec::new();
    for _ in 0..k {
        let x0: Vec<C64> = (0..op.dim)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let pen = Penalized { op, vectors: &found };
        let (e, v, resid) = lowest_eigenpair(&pen, &x0, 80, 1e-9 * shift, 400)?;
        if resid > 1e-6 * shift {
            return Err(Error::NoConvergence(alloc::format!(
                "oracle eigenpair residual {resid:e}"
            )));
        }
        energies.push(e);
        found.push((shift, v));
    }
    let states = found.into_iter().map(|(_, v)| v).collect();
    Ok(EdOutput::Spectrum { energies, states })
}

fn evolve(op: &EdOperator, initial: &[usize], times: &[f64]) -> Result<ObservableTable> {
    if initial.len() != op.modes + 1 || initial[0] > 1 || initial[1..].iter().any(|&n| n >= op.n_b) {
        return Err(Error::InvalidArgument(
            "initial occupations do not fit the layout".into(),
        ));
    }
    let start = op.encode(initial);
    let mut psi0 = alloc::vec![C64::new(0.0, 0.0); op.dim];
    psi0[start] = C64::new(1.0, 0.0);
    // Diagonal observables in the product basis.
    let mut p_e = Vec::with_capacity(op.dim);
    let mut n_field = Vec::with_capacity(op.dim);
    for idx in 0..op.dim {
        let occ = op.decode(idx);
        p_e.push(occ[0] as f64);
        n_field.push(occ[1..].iter().sum::<usize>() as f64);
    }
    let mut hpsi = alloc::vec![C64::new(0.0, 0.0); op.dim];
    op.apply(&psi0, &mut hpsi);
    let energy = cdot(&psi0, &hpsi).re;
    let mut table = ObservableTable::new(&["t", "p_e", "n_field", "e_total", "n_exc"]);
    let push = |t: f64, psi: &[C64], table: &mut ObservableTable| -> Result<()> {
        let (mut pe, mut nf) = (0.0, 0.0);
        for (k, z) in psi.iter().enumerate() {
            let w = z.norm_sqr();
            pe += w * p_e[k];
            nf += w * n_field[k];
        }
        table.push_row(alloc::vec![t, pe, nf, energy, pe + nf])
    };
    if op.dim <= ED_DENSE_LIMIT {
        let (vals, vecs) = eigh(&op.to_dense());
        let coef = vecs.adjoint() * crate::linalg::to_dvector(&psi0);
        for &t in times {
            let mut c = coef.clone();
            for (k, z) in c.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, -vals[k] * t);
            }
            let psi = &vecs * c;
            push(t, psi.as_slice(), &mut table)?;
        }
    } else {
        let mut psi = psi0;
        let mut now = 0.0;
        for &t in times {
            psi = krylov_propagate(op, &psi, t - now, 40)?;
            now = t;
            push(t, &psi, &mut table)?;
        }
    }
    Ok(table)
}
