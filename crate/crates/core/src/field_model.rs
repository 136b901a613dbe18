//! Periodic waveguide modes, coupling-point profiles and the emitter–field
//! coupling coefficients.
//!
//! Units: ħ = c = 1 and lengths are measured in the waveguide length `L`,
//! so frequencies and wavenumbers share the unit `1/L`.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

#[allow(unused_imports)]
use crate::float::*;
use crate::{Error, Result, C64};

/// Default cutoff `N` for the reference geometry. The Gaussian tail beyond
/// it contributes ~4e-11 of `mu0`.
pub const DEFAULT_CUTOFF: usize = 550;

/// Largest cutoff accepted for a delta profile, whose couplings grow like
/// `sqrt(|k|)` without bound.
pub const DEFAULT_DELTA_CUTOFF_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// All modes `-N <= j <= N`, `j != 0`.
    Full,
    /// Modes folded into `(a_j + a_-j)/sqrt 2`, one per `|j|`.
    Even,
}

/// Discretized eigenmodes of a periodic waveguide of length `L`.
///
/// Full-sector modes are stored in ascending wavenumber order
/// (`j = -N..=-1, 1..=N`); even-sector modes as `j = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    length: f64,
    cutoff: usize,
    sector: Sector,
    indices: Vec<i64>,
    wavenumbers: Vec<f64>,
    frequencies: Vec<f64>,
}

pub fn build_mode_basis(length: f64, cutoff: usize, sector: Sector) -> Result<ModeBasis> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "waveguide length must be positive, got {length}"
        )));
    }
    if cutoff == 0 {
        return Err(Error::InvalidArgument("mode cutoff must be at least 1".into()));
    }
    let n = cutoff as i64;
    let indices: Vec<i64> = match sector {
        Sector::Full => (-n..=-1).chain(1..=n).collect(),
        Sector::Even => (1..=n).collect(),
    };
    let wavenumbers: Vec<f64> = indices.iter().map(|&j| 2.0 * PI * j as f64 / length).collect();
    let frequencies = wavenumbers.iter().map(|k| k.abs()).collect();
    Ok(ModeBasis {
        length,
        cutoff,
        sector,
        indices,
        wavenumbers,
        frequencies,
    })
}

impl ModeBasis {
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Signed mode indices `j`.
    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    /// `k_j = 2πj/L`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `|k_j|`.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Number of full-sector modes represented by each stored mode.
    pub fn multiplicity(&self) -> usize {
        match self.sector {
            Sector::Full => 1,
            Sector::Even => 2,
        }
    }

    /// Storage position of mode `j`, if present.
    pub fn position(&self, j: i64) -> Option<usize> {
        let n = self.cutoff as i64;
        if j == 0 || j.abs() > n {
            return None;
        }
        match self.sector {
            Sector::Full if j < 0 => Some((j + n) as usize),
            Sector::Full => Some((j + n - 1) as usize),
            Sector::Even if j > 0 => Some((j - 1) as usize),
            Sector::Even => None,
        }
    }

    /// Position of the lowest-frequency mode (`j = +1`).
    pub fn lowest_mode(&self) -> usize {
        self.position(1).expect("basis always holds j = 1")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Gaussian,
    Lorentzian,
    Rectangle,
    Delta,
}

/// Normalized real-space smearing of one coupling point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    pub kind: ProfileKind,
    /// Width parameter `d`; ignored for [`ProfileKind::Delta`].
    pub half_width: f64,
}

impl CouplingProfile {
    pub fn new(kind: ProfileKind, half_width: f64) -> Result<Self> {
        if kind != ProfileKind::Delta && !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "{kind:?} profile needs a positive width, got {half_width}"
            )));
        }
        Ok(Self { kind, half_width })
    }

    pub fn delta() -> Self {
        Self {
            kind: ProfileKind::Delta,
            half_width: 0.0,
        }
    }
}

/// Fourier transform `∫dx e^{ikx} f(x)` of the profile over the whole line.
pub fn profile_fourier(profile: &CouplingProfile, k: f64) -> C64 {
    let d = profile.half_width;
    let v = match profile.kind {
        ProfileKind::Gaussian => (-k * k * d * d / 4.0).exp(),
        ProfileKind::Lorentzian => (-k.abs() * d).exp(),
        ProfileKind::Rectangle => {
            let x = k * d;
            // Taylor branch avoids 0/0 and cancellation near the origin.
            if x.abs() < 1e-4 {
                1.0 - x * x / 6.0
            } else {
                x.sin() / x
            }
        }
        ProfileKind::Delta => 1.0,
    };
    C64::new(v, 0.0)
}

/// A two-level emitter and the positions of its coupling points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterSpec {
    /// Transition frequency `Ω`.
    pub frequency: f64,
    /// Dimensionless coupling `λ`.
    pub coupling: f64,
    pub positions: Vec<f64>,
    pub profile: CouplingProfile,
}

impl EmitterSpec {
    pub fn new(frequency: f64, coupling: f64, positions: Vec<f64>, profile: CouplingProfile) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "emitter frequency must be positive, got {frequency}"
            )));
        }
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "coupling must be non-negative, got {coupling}"
            )));
        }
        if positions.is_empty() || positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "emitter needs at least one finite coupling point".into(),
            ));
        }
        Ok(Self {
            frequency,
            coupling,
            positions,
            profile,
        })
    }

    /// `m` equally spaced points with spacing `tau`, centred on the origin.
    pub fn symmetric(
        frequency: f64,
        coupling: f64,
        m: usize,
        tau: f64,
        profile: CouplingProfile,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("need at least one coupling point".into()));
        }
        let centre = (m as f64 - 1.0) / 2.0;
        let positions = (0..m).map(|l| (l as f64 - centre) * tau).collect();
        Self::new(frequency, coupling, positions, profile)
    }

    /// Reference configuration for a waveguide of length `length`: three
    /// Gaussian points at `-τ, 0, τ` with `τ = L/20`, `d = L/500`,
    /// `λ = 0.4` and `Ω = 160π/L`.
    pub fn reference(length: f64) -> Self {
        let profile = CouplingProfile {
            kind: ProfileKind::Gaussian,
            half_width: length / 500.0,
        };
        Self {
            frequency: 160.0 * PI / length,
            coupling: 0.4,
            positions: alloc::vec![-length / 20.0, 0.0, length / 20.0],
            profile,
        }
    }

    pub fn num_points(&self) -> usize {
        self.positions.len()
    }
}

/// Coupling coefficients `f_j` aligned with a [`ModeBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingVector {
    pub coefficients: Vec<C64>,
    /// `μ0 = Σ_j |f_j|²` over the full index set.
    pub mu0: f64,
}

impl CouplingVector {
    pub fn sqrt_mu0(&self) -> f64 {
        self.mu0.sqrt()
    }
}

/// Coefficient of a single full-sector mode with wavenumber `k`.
fn mode_coefficient(length: f64, k: f64, emitter: &EmitterSpec) -> C64 {
    let phase_sum: C64 = emitter
        .positions
        .iter()
        .map(|&x| C64::from_polar(1.0, k * x))
        .sum();
    let amp = (k.abs() / (2.0 * length)).sqrt();
    C64::new(0.0, -amp) * phase_sum * profile_fourier(&emitter.profile, k)
}

/// `f_j = -i sqrt(|k_j|/2L) Σ_l e^{i k_j x_l} F(k_j)` on `basis`.
///
/// For an even-sector basis the folded coefficients `(f_j + f_-j)/sqrt 2` are
/// returned, after checking that the odd combination vanishes.
pub fn coupling_vector(basis: &ModeBasis, emitter: &EmitterSpec) -> Result<CouplingVector> {
    coupling_vector_capped(basis, emitter, DEFAULT_DELTA_CUTOFF_CAP)
}

/// [`coupling_vector`] with an explicit cap on the cutoff for delta profiles.
pub fn coupling_vector_capped(
    basis: &ModeBasis,
    emitter: &EmitterSpec,
    delta_cap: usize,
) -> Result<CouplingVector> {
    let length = basis.length();
    if emitter.profile.kind == ProfileKind::Delta {
        if basis.cutoff() > delta_cap {
            return Err(Error::UvDivergence {
                cutoff: basis.cutoff(),
                cap: delta_cap,
            });
        }
    } else if emitter.profile.half_width >= length / 50.0 {
        log::warn!(
            "profile width {} is not small against L/50 = {}; the infinite-line transform is inaccurate",
            emitter.profile.half_width,
            length / 50.0
        );
    }
    match basis.sector() {
        Sector::Full => {
            let coefficients: Vec<C64> = basis
                .wavenumbers()
                .iter()
                .map(|&k| mode_coefficient(length, k, emitter))
                .collect();
            let mu0 = coefficients.iter().map(|f| f.norm_sqr()).sum();
            Ok(CouplingVector { coefficients, mu0 })
        }
        Sector::Even => {
            let full = build_mode_basis(length, basis.cutoff(), Sector::Full)?;
            let cv = coupling_vector_capped(&full, emitter, delta_cap)?;
            Ok(even_sector_reduce(&cv, &full)?.0)
        }
    }
}

/// Folds a full-sector coupling onto the even sector.
///
/// Returns the folded coefficients `sqrt 2 · f_j` (for `j >= 1`) with `μ0`
/// carried over unchanged, and the even-sector basis.
pub fn even_sector_reduce(
    coupling: &CouplingVector,
    basis: &ModeBasis,
) -> Result<(CouplingVector, ModeBasis)> {
    if basis.sector() != Sector::Full {
        return Err(Error::InvalidArgument(
            "even_sector_reduce expects a full-sector basis".into(),
        ));
    }
    if coupling.coefficients.len() != basis.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} coefficients for {} modes",
            coupling.coefficients.len(),
            basis.len()
        )));
    }
    let n = basis.cutoff() as i64;
    let scale = coupling.coefficients.iter().fold(0.0_f64, |m, f| m.max(f.norm()));
    let mut folded = Vec::with_capacity(n as usize);
    let mut worst = 0.0_f64;
    for j in 1..=n {
        let fp = coupling.coefficients[basis.position(j).unwrap()];
        let fm = coupling.coefficients[basis.position(-j).unwrap()];
        worst = worst.max((fp - fm).norm());
        folded.push((fp + fm) / SQRT_2);
    }
    let rel = if scale > 0.0 { worst / scale } else { 0.0 };
    if rel > 1e-12 {
        return Err(Error::NotEvenProfile(rel));
    }
    let even = build_mode_basis(basis.length(), basis.cutoff(), Sector::Even)?;
    Ok((
        CouplingVector {
            coefficients: folded,
            mu0: coupling.mu0,
        },
        even,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_basis_ordering() {
        let b = build_mode_basis(1.0, 3, Sector::Full).unwrap();
        assert_eq!(b.indices(), &[-3, -2, -1, 1, 2, 3]);
        for j in [-3, -1, 1, 3] {
            assert_eq!(b.indices()[b.position(j).unwrap()], j);
        }
        assert_eq!(b.position(0), None);
        assert_eq!(b.position(4), None);
    }

    #[test]
    fn even_basis_positions() {
        let b = build_mode_basis(1.0, 3, Sector::Even).unwrap();
        assert_eq!(b.position(2), Some(1));
        assert_eq!(b.position(-2), None);
        assert_eq!(b.multiplicity(), 2);
    }

    #[test]
    fn rectangle_is_smooth_at_origin() {
        let p = CouplingProfile::new(ProfileKind::Rectangle, 0.1).unwrap();
        let a = profile_fourier(&p, 1e-3).re;
        let b = profile_fourier(&p, 1.001e-3).re;
        assert!((a - b).abs() < 1e-9);
        assert!((profile_fourier(&p, 0.0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(CouplingProfile::new(ProfileKind::Gaussian, 0.0).is_err());
        assert!(CouplingProfile::new(ProfileKind::Delta, 0.0).is_ok());
    }

    #[test]
    fn delta_cap_enforced() {
        let b = build_mode_basis(1.0, 100, Sector::Full).unwrap();
        let e = EmitterSpec::new(10.0, 0.1, alloc::vec![0.0], CouplingProfile::delta()).unwrap();
        assert!(coupling_vector_capped(&b, &e, 50).is_err());
        assert!(coupling_vector_capped(&b, &e, 100).is_ok());
    }

    #[test]
    fn asymmetric_emitter_is_not_even() {
        let b = build_mode_basis(1.0, 20, Sector::Full).unwrap();
        let p = CouplingProfile::new(ProfileKind::Gaussian, 0.002).unwrap();
        let e = EmitterSpec::new(10.0, 0.1, alloc::vec![0.0, 0.1], p).unwrap();
        let cv = coupling_vector(&b, &e).unwrap();
        assert!(matches!(
            even_sector_reduce(&cv, &b),
            Err(Error::NotEvenProfile(_))
        ));
    }
}
