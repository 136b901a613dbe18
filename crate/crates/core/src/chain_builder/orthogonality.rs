//! Simulated loss of orthogonality for partial reorthogonalization.
//!
//! The inner products `ξ_{k,j} = v_k† v_j` of the computed Lanczos vectors
//! obey a recurrence driven by unknown roundoff terms. Those terms are
//! replaced by seeded Gaussian draws so the estimate is cheap and
//! reproducible.

use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Normal};

#[allow(unused_imports)]
use crate::float::*;

/// Variance of the model for the roundoff terms in the recurrence.
const THETA_VARIANCE: f64 = 0.3;
/// Variance of the model for adjacent vectors.
const PSI_VARIANCE: f64 = 0.6;
/// Variance used when resetting after a reorthogonalization.
const XI_RESET_VARIANCE: f64 = 1.5;

/// Running state of the `ξ` recurrence. Rows are 0-based: after step `j`
/// (1-based), `current[k-1] = ξ_{k,j+1}` for `k = 1..=j+1`.
#[derive(Debug, Clone)]
pub struct OrthogonalityEstimator {
    dim: usize,
    eps: f64,
    rng: ChaCha20Rng,
    draws: u64,
    previous: Vec<f64>,
    current: Vec<f64>,
    theta: Normal<f64>,
    psi: Normal<f64>,
    reset: Normal<f64>,
}

impl OrthogonalityEstimator {
    /// `dim` is the matrix dimension `n`, `eps` the roundoff unit.
    pub fn new(dim: usize, eps: f64, seed: u64) -> Self {
        Self {
            dim,
            eps,
            rng: ChaCha20Rng::seed_from_u64(seed),
            draws: 0,
            previous: Vec::new(),
            current: vec![1.0],
            theta: Normal::new(0.0, THETA_VARIANCE.sqrt()).unwrap(),
            psi: Normal::new(0.0, PSI_VARIANCE.sqrt()).unwrap(),
            reset: Normal::new(0.0, XI_RESET_VARIANCE.sqrt()).unwrap(),
        }
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Latest row `ξ_{k,j+1}`, `k = 1..=j+1`.
    pub fn row(&self) -> &[f64] {
        &self.current
    }

    /// Largest `|ξ_{k,j+1}|` over `k <= j`, i.e. excluding the diagonal.
    pub fn max_offdiag(&self) -> f64 {
        let n = self.current.len();
        self.current[..n.saturating_sub(1)]
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Advances the recurrence after Lanczos step `j` (1-based), given
    /// `alpha[0..j]` and `beta[0..j]` (so `beta[j-1] = β_j > 0`).
    pub fn advance(&mut self, alpha: &[f64], beta: &[f64], j: usize) {
        let next = simulate_orthogonality_loss(
            &self.previous,
            &self.current,
            alpha,
            beta,
            j,
            self.dim,
            self.eps,
            &mut |kind| {
                self.draws += 1;
                match kind {
                    Draw::Theta => self.theta.sample(&mut self.rng),
                    Draw::Psi => self.psi.sample(&mut self.rng),
                }
            },
        );
        self.previous = core::mem::replace(&mut self.current, next);
    }

    /// Resets `ξ_{k,j+1}` for `k <= j` to `ε Ξ` after a reorthogonalization.
    pub fn reset(&mut self) {
        let n = self.current.len();
        for k in 0..n.saturating_sub(1) {
            self.draws += 1;
            self.current[k] = self.eps * self.reset.sample(&mut self.rng);
        }
    }
}

/// Which random model a draw feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    Theta,
    Psi,
}

/// One step of the `ξ` recurrence.
///
/// `previous[k-1] = ξ_{k,j-1}` (length `j-1`), `current[k-1] = ξ_{k,j}`
/// (length `j`, last entry 1). Returns `ξ_{k,j+1}` for `k = 1..=j+1`, whose
/// last entry is 1 and whose entry `j` comes from the adjacent-vector model.
#[allow(clippy::too_many_arguments)]
pub fn simulate_orthogonality_loss(
    previous: &[f64],
    current: &[f64],
    alpha: &[f64],
    beta: &[f64],
    j: usize,
    dim: usize,
    eps: f64,
    draw: &mut dyn FnMut(Draw) -> f64,
) -> Vec<f64> {
    debug_assert_eq!(current.len(), j);
    let bj = beta[j - 1];
    let aj = alpha[j - 1];
    let bjm1 = if j >= 2 { beta[j - 2] } else { 0.0 };
    let mut next = vec![0.0; j + 1];
    // ξ_{j,i} as a function of 1-based i, with ξ_{j,0} = 0.
    let xi_j = |i: usize| if i == 0 { 0.0 } else { current[i - 1] };
    for k in 1..j {
        let bk = beta[k - 1];
        let ak = alpha[k - 1];
        let bkm1 = if k >= 2 { beta[k - 2] } else { 0.0 };
        let xi_k_jm1 = previous.get(k - 1).copied().unwrap_or(0.0);
        let theta = eps * (bk + bj) * draw(Draw::Theta);
        let s = bk * xi_j(k + 1) + ak * xi_j(k) - aj * xi_j(k) + bkm1 * xi_j(k - 1) - bjm1 * xi_k_jm1 + theta;
        next[k - 1] = s / bj;
    }
    next[j - 1] = dim as f64 * eps * (beta[0] / bj) * draw(Draw::Psi);
    next[j] = 1.0;
    next
}
