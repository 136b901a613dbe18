//! Closed-form dark states of two braided giant atoms, each with two
//! coupling points a distance `τ` apart, the second atom shifted by `τ_s`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

/// Relative tolerance of the existence conditions.
const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateParams {
    /// Atomic frequency `Ω`.
    pub omega: f64,
    /// `γτ`, decay rate per point times the leg separation.
    pub gamma_tau: f64,
    /// `τ_s/τ`, in `(0, 1)`.
    pub ratio: f64,
    /// Leg separation `τ` (sets the time unit).
    pub tau: f64,
}

impl DarkStateParams {
    pub fn new(omega: f64, gamma_tau: f64, ratio: f64, tau: f64) -> Result<Self> {
        let p = Self {
            omega,
            gamma_tau,
            ratio,
            tau,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_tau > 0.0 && self.gamma_tau.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "need γτ > 0, got {}",
                self.gamma_tau
            )));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "need 0 < τ_s/τ < 1, got {}",
                self.ratio
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite() && self.omega.is_finite()) {
            return Err(Error::InvalidArgument("need finite Ω and τ > 0".into()));
        }
        Ok(())
    }

    /// `γ`.
    pub fn gamma(&self) -> f64 {
        self.gamma_tau / self.tau
    }

    /// `τ_s`.
    pub fn tau_s(&self) -> f64 {
        self.ratio * self.tau
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        }
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Symmetric => 1.0,
            Parity::Antisymmetric => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkStateSolution {
    pub n: u32,
    pub parity: Parity,
    /// Amplitude on each atom at `t = 0`.
    pub beta: C64,
    /// `πn/(2τ_s)`.
    pub frequency: f64,
}

impl DarkStateSolution {
    pub fn amplitude(&self, t: f64) -> C64 {
        self.beta * C64::from_polar(1.0, self.frequency * t)
    }
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONDITION_TOL * a.abs().max(b.abs()).max(1.0)
}

fn satisfies(n: u32, parity: Parity, p: &DarkStateParams) -> bool {
    let nf = n as f64;
    let q = nf / (4.0 * p.ratio);
    let frac_ok = match parity {
        Parity::Symmetric => near(q, q.round()),
        Parity::Antisymmetric => near(q - 0.5, (q - 0.5).round()),
    };
    let rhs = PI * nf / 2.0 / p.ratio - parity.sign() * p.gamma_tau * (PI * nf / 2.0).sin();
    frac_ok && near(p.omega * p.tau, rhs)
}

/// All `(n, parity)` with `n ≤ n_max` for which a dark state exists, in
/// increasing `n`.
pub fn dark_state_conditions(params: &DarkStateParams, n_max: u32) -> Vec<(u32, Parity)> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for parity in [Parity::Symmetric, Parity::Antisymmetric] {
            if satisfies(n, parity, params) {
                out.push((n, parity));
            }
        }
    }
    out
}

/// The amplitude `β±(t)` of the `(n, parity)` dark state on each atom.
pub fn dark_state_amplitude(n: u32, parity: Parity, params: &DarkStateParams, t: f64) -> Result<C64> {
    params.validate()?;
    if n == 0 || !satisfies(n, parity, params) {
        return Err(Error::InvalidDarkState {
            n,
            parity: parity.name(),
        });
    }
    let half_angle = PI * n as f64 / 2.0;
    let (s, c) = half_angle.sin_cos();
    let gt = params.gamma_tau;
    let r = params.ratio;
    let denom = match parity {
        Parity::Symmetric => C64::new(1.0 - gt * (1.0 + (1.0 + r) * c), -2.0 * gt * r * s),
        Parity::Antisymmetric => C64::new(1.0 + gt * (1.0 - (1.0 - r) * c), 0.0),
    };
    let phase = C64::from_polar(1.0, half_angle * t / params.tau_s());
    Ok(phase * 0.5 / denom)
}

/// Every dark state with `n ≤ n_max`.
pub fn dark_state_solutions(params: &DarkStateParams, n_max: u32) -> Result<Vec<DarkStateSolution>> {
    dark_state_conditions(params, n_max)
        .into_iter()
        .map(|(n, parity)| {
            Ok(DarkStateSolution {
                n,
                parity,
                beta: dark_state_amplitude(n, parity, params, 0.0)?,
                frequency: PI * n as f64 / (2.0 * params.tau_s()),
            })
        })
        .collect()
}

/// Long-time population of the initially excited atom, `|Σ β(t)|²` over
/// all dark states.
pub fn bound_population(solutions: &[DarkStateSolution], t: f64) -> f64 {
    solutions.iter().map(|s| s.amplitude(t)).sum::<C64>().norm_sqr()
}
