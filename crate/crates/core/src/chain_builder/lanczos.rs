use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;

#[allow(unused_imports)]
use crate::float::*;
use crate::linalg::{cdot, cvec_norm, hermiticity_deviation, inf_norm};
use crate::{Error, Result, C64};

use super::orthogonality::OrthogonalityEstimator;

/// Matrix-free Hermitian operator.
pub trait HermitianOperator {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[C64], y: &mut [C64]);
    /// Any upper bound on the spectral norm; sets the breakdown scale.
    fn norm_bound(&self) -> f64;
}

impl HermitianOperator for DMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (j, xj) in x.iter().enumerate() {
            if *xj == C64::new(0.0, 0.0) {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(self.column(j).iter()) {
                *yi += a * xj;
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        inf_norm(self)
    }
}

/// Real diagonal matrix, the field's single-particle Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator(pub Vec<f64>);

impl HermitianOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = xi * *d;
        }
    }

    fn norm_bound(&self) -> f64 {
        self.0.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReorthMode {
    None,
    /// Reorthogonalize only when the simulated `ξ` estimate exceeds `√ε`.
    Partial,
    /// Reorthogonalize against all previous vectors at every step.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    pub reorth: ReorthMode,
    /// Roundoff unit `ε` of the working precision.
    pub roundoff: f64,
    /// Breakdown threshold on `β_j`; `None` means `1e-13 · ‖A‖`.
    pub breakdown_tol: Option<f64>,
    /// Maximum number of Lanczos vectors; capped at the dimension.
    pub max_steps: usize,
    pub seed: u64,
}

/// Defaults to full reorthogonalization, which keeps the chain transform
/// unitary to ~1e-14; [`ReorthMode::Partial`] only guarantees `√ε`.
impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            reorth: ReorthMode::Full,
            roundoff: f64::EPSILON / 2.0,
            breakdown_tol: None,
            max_steps: usize::MAX,
            seed: 0,
        }
    }
}

impl LanczosOptions {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn partial(seed: u64) -> Self {
        Self {
            reorth: ReorthMode::Partial,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LanczosReport {
    pub steps: usize,
    /// The iteration stopped because `β_j` fell below the breakdown threshold.
    pub breakdown: bool,
    /// 1-based steps at which the residual was reorthogonalized.
    pub reorth_steps: Vec<usize>,
    /// Largest simulated `|ξ_{k,j+1}|`, `k <= j`, after each step (Partial only).
    pub xi_max: Vec<f64>,
    pub rng_draws: u64,
    /// `β_m` of the last step when the run stopped at `max_steps` without
    /// breakdown; measures what a shortened chain leaves out.
    pub trailing_beta: Option<f64>,
}

/// Output of a Lanczos run: `Q† A Q = tridiag(β, α, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalResult {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `n × m`, orthonormal columns `v_1..v_m`.
    pub basis: DMatrix<C64>,
    pub report: LanczosReport,
}

impl TridiagonalResult {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Dense `m × m` tridiagonal matrix.
    pub fn tridiagonal(&self) -> DMatrix<f64> {
        let m = self.alphas.len();
        DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                self.alphas[i]
            } else if i + 1 == j {
                self.betas[i]
            } else if j + 1 == i {
                self.betas[j]
            } else {
                0.0
            }
        })
    }
}

/// Lanczos tridiagonalization of a dense Hermitian matrix.
pub fn lanczos(a: &DMatrix<C64>, v: &[C64], opts: &LanczosOptions) -> Result<TridiagonalResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    let dev = hermiticity_deviation(a);
    if dev > 1e-12 {
        return Err(Error::NotHermitian(dev));
    }
    lanczos_operator(a, v, opts)
}

fn orthogonalize_against(r: &mut [C64], vectors: &[Vec<C64>]) {
    // Two passes of classical Gram-Schmidt keep r orthogonal to working precision.
    for _ in 0..2 {
        for q in vectors {
            let c = cdot(q, r);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= c * qi;
            }
        }
    }
}

/// Lanczos tridiagonalization of a matrix-free Hermitian operator.
///
/// Uses `w = A v_j - β_{j-1} v_{j-1}`, `α_j = w† v_j`, `r_j = w - α_j v_j`,
/// `β_j = ‖r_j‖`. In [`ReorthMode::Partial`] the orthogonality loss is
/// simulated after every step; when it reaches `√ε` the residual is
/// reorthogonalized in this step and the next.
pub fn lanczos_operator<A: HermitianOperator + ?Sized>(
    a: &A,
    v: &[C64],
    opts: &LanczosOptions,
) -> Result<TridiagonalResult> {
    let n = a.dim();
    if v.len() != n {
        return Err(Error::DimensionMismatch(alloc::format!(
            "start vector of length {} for dimension {n}",
            v.len()
        )));
    }
    if opts.max_steps == 0 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    let nv = cvec_norm(v);
    if !(nv > 0.0) {
        return Err(Error::ZeroStartVector);
    }
    let a_norm = a.norm_bound();
    let tol = opts.breakdown_tol.unwrap_or(1e-13 * a_norm);
    let max_steps = opts.max_steps.min(n);
    let semi = opts.roundoff.sqrt();

    let mut vectors: Vec<Vec<C64>> = Vec::with_capacity(max_steps);
    vectors.push(v.iter().map(|z| z / nv).collect());
    let mut alphas = Vec::with_capacity(max_steps);
    let mut betas: Vec<f64> = Vec::with_capacity(max_steps);
    let mut report = LanczosReport::default();
    let mut estimator = match opts.reorth {
        ReorthMode::Partial => Some(OrthogonalityEstimator::new(n, opts.roundoff, opts.seed)),
        _ => None,
    };
    let mut pending = false;
    let mut w = vec![C64::new(0.0, 0.0); n];

    loop {
        let j = vectors.len();
        let vj = &vectors[j - 1];
        a.apply(vj, &mut w);
        if j >= 2 {
            let b = betas[j - 2];
            for (wi, pi) in w.iter_mut().zip(&vectors[j - 2]) {
                *wi -= pi * b;
            }
        }
        let alpha_c = cdot(vj, &w);
        if alpha_c.im.abs() > 1e-10 * a_norm.max(f64::MIN_POSITIVE) {
            return Err(Error::ComplexAlpha(alpha_c.im.abs()));
        }
        let alpha = alpha_c.re;
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(vj) {
            *wi -= vi * alpha;
        }
        let mut beta = cvec_norm(&w);

        let mut reorth_now = match opts.reorth {
            ReorthMode::Full => true,
            ReorthMode::None => false,
            ReorthMode::Partial => pending,
        };
        pending = false;
        if let Some(est) = estimator.as_mut() {
            if beta > tol {
                let mut b_hist = betas.clone();
                b_hist.push(beta);
                est.advance(&alphas, &b_hist, j);
                if est.max_offdiag() >= semi {
                    reorth_now = true;
                    pending = true;
                }
            }
        }
        if reorth_now {
            orthogonalize_against(&mut w, &vectors);
            beta = cvec_norm(&w);
            report.reorth_steps.push(j);
            if let Some(est) = estimator.as_mut() {
                est.reset();
            }
        }
        if let Some(est) = estimator.as_ref() {
            report.xi_max.push(est.max_offdiag());
        }

        if beta <= tol {
            report.breakdown = true;
            break;
        }
        if j == max_steps {
            if j < n {
                report.trailing_beta = Some(beta);
            }
            break;
        }
        betas.push(beta);
        vectors.push(w.iter().map(|z| z / beta).collect());
    }

    report.steps = alphas.len();
    report.rng_draws = estimator.as_ref().map_or(0, |e| e.draws());
    let m = vectors.len();
    let mut basis = DMatrix::zeros(n, m);
    for (c, vec) in vectors.iter().enumerate() {
        basis.column_mut(c).copy_from_slice(vec);
    }
    Ok(TridiagonalResult {
        alphas,
        betas,
        basis,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
        ]));
        let s = 1.0 / 2f64.sqrt();
        let r = lanczos(&a, &[C64::new(s, 0.0), C64::new(s, 0.0)], &LanczosOptions::full()).unwrap();
        assert!((r.alphas[0] - 1.5).abs() < 1e-15);
        assert!((r.alphas[1] - 1.5).abs() < 1e-15);
        assert!((r.betas[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_breaks_down_immediately() {
        let a = DMatrix::<C64>::identity(6, 6);
        let v: Vec<C64> = (0..6).map(|i| C64::new(i as f64, 1.0)).collect();
        let r = lanczos(&a, &v, &LanczosOptions::default()).unwrap();
        assert_eq!(r.alphas.len(), 1);
        assert!((r.alphas[0] - 1.0).abs() < 1e-15);
        assert!(r.report.breakdown);
        assert!(r.betas.is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = DMatrix::<C64>::identity(3, 3);
        a[(0, 1)] = C64::new(1.0, 0.0);
        let v = vec![C64::new(1.0, 0.0); 3];
        assert!(matches!(
            lanczos(&a, &v, &LanczosOptions::default()),
            Err(Error::NotHermitian(_))
        ));
        let a = DMatrix::<C64>::identity(3, 3);
        let z = vec![C64::new(0.0, 0.0); 3];
        assert_eq!(
            lanczos(&a, &z, &LanczosOptions::default()),
            Err(Error::ZeroStartVector)
        );
    }

    #[test]
    fn max_steps_records_trailing_beta() {
        let d = DiagonalOperator((1..=10).map(f64::from).collect());
        let v = vec![C64::new(1.0, 0.0); 10];
        let opts = LanczosOptions {
            max_steps: 4,
            ..LanczosOptions::full()
        };
        let r = lanczos_operator(&d, &v, &opts).unwrap();
        assert_eq!(r.alphas.len(), 4);
        assert_eq!(r.betas.len(), 3);
        assert!(r.report.trailing_beta.unwrap() > 0.1);
    }
}
