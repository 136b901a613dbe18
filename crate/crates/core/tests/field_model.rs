use giantchain_core::field_model::{
    build_mode_basis, coupling_vector, coupling_vector_capped, even_sector_reduce, profile_fourier,
    CouplingProfile, EmitterSpec, ProfileKind, Sector,
};
use giantchain_core::Error;
use proptest::prelude::*;
use std::f64::consts::{PI, SQRT_2};

fn gaussian(d: f64) -> CouplingProfile {
    CouplingProfile::new(ProfileKind::Gaussian, d).unwrap()
}

/// Trapezoid rule for `∫ e^{ikx} g(x) dx` with the unit-normalized Gaussian
/// `g(x) = exp(-x²/d²) / (d sqrt π)`.
fn gaussian_transform_by_quadrature(k: f64, d: f64) -> f64 {
    let n = 20_000;
    let (a, b) = (-12.0 * d, 12.0 * d);
    let h = (b - a) / n as f64;
    let g = |x: f64| (-(x * x) / (d * d)).exp() / (d * PI.sqrt());
    let mut re = 0.0;
    for i in 0..=n {
        let x = a + i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        re += w * g(x) * (k * x).cos();
    }
    re * h
}

#[test]
fn single_gaussian_point_matches_quadrature() {
    let d = 1.0 / 500.0;
    let basis = build_mode_basis(1.0, 100, Sector::Full).unwrap();
    let emitter = EmitterSpec::new(1.0, 0.4, vec![0.0], gaussian(d)).unwrap();
    let cv = coupling_vector(&basis, &emitter).unwrap();
    let f80 = cv.coefficients[basis.position(80).unwrap()];
    let k = 160.0 * PI;
    let expected = (80.0 * PI).sqrt() * gaussian_transform_by_quadrature(k, d);
    assert!(
        (f80.norm() - expected).abs() < 1e-9 * expected,
        "{} vs {expected}",
        f80.norm()
    );
    assert!((f80.norm() - 12.313).abs() < 1e-3);
    // The -i phase is kept on the coefficient.
    assert!(f80.re.abs() < 1e-12 * f80.norm() && f80.im < 0.0);
}

#[test]
fn three_points_at_half_wavelength_cancel_to_minus_one() {
    let d = 1.0 / 500.0;
    let basis = build_mode_basis(1.0, 20, Sector::Full).unwrap();
    let single = EmitterSpec::new(1.0, 0.4, vec![0.0], gaussian(d)).unwrap();
    let triple = EmitterSpec::symmetric(1.0, 0.4, 3, 1.0 / 20.0, gaussian(d)).unwrap();
    let fs = coupling_vector(&basis, &single).unwrap();
    let ft = coupling_vector(&basis, &triple).unwrap();
    for j in [-10, 10] {
        let i = basis.position(j).unwrap();
        let ratio = ft.coefficients[i] / fs.coefficients[i];
        assert!(
            (ratio.re + 1.0).abs() < 1e-12 && ratio.im.abs() < 1e-12,
            "{ratio}"
        );
    }
}

#[test]
fn reference_emitter_total_coupling() {
    for length in [1.0, 2.5] {
        let basis = build_mode_basis(length, 550, Sector::Full).unwrap();
        let cv = coupling_vector(&basis, &EmitterSpec::reference(length)).unwrap();
        let scaled = cv.sqrt_mu0() * length;
        assert!((scaled / 345.1 - 1.0).abs() < 5e-3, "sqrt(mu0) L = {scaled}");
    }
}

#[test]
fn total_coupling_is_converged_in_the_cutoff() {
    let emitter = EmitterSpec::reference(1.0);
    let mu = |n| {
        let basis = build_mode_basis(1.0, n, Sector::Full).unwrap();
        coupling_vector(&basis, &emitter).unwrap().mu0
    };
    let (a, b) = (mu(550), mu(1100));
    assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
}

#[test]
fn folding_keeps_mu0_and_scales_by_sqrt_two() {
    let full = build_mode_basis(1.0, 550, Sector::Full).unwrap();
    let cv = coupling_vector(&full, &EmitterSpec::reference(1.0)).unwrap();
    for j in 1..=550 {
        let odd = (cv.coefficients[full.position(j).unwrap()] - cv.coefficients[full.position(-j).unwrap()])
            / SQRT_2;
        assert!(odd.norm() < 1e-12 * cv.sqrt_mu0());
    }
    let (even, basis) = even_sector_reduce(&cv, &full).unwrap();
    assert_eq!(basis.sector(), Sector::Even);
    assert_eq!(even.mu0, cv.mu0);
    let folded_sum: f64 = even.coefficients.iter().map(|f| f.norm_sqr()).sum();
    assert!((folded_sum - cv.mu0).abs() < 1e-10 * cv.mu0);
    let f80 = even.coefficients[basis.position(80).unwrap()];
    assert!(
        (f80.norm() - SQRT_2 * 3.0 * 12.313).abs() < 5e-3,
        "{}",
        f80.norm()
    );

    // Building directly on the even sector gives the same thing.
    let direct = coupling_vector(&basis, &EmitterSpec::reference(1.0)).unwrap();
    assert_eq!(direct.coefficients, even.coefficients);
}

#[test]
fn off_centre_emitter_cannot_be_folded() {
    let full = build_mode_basis(1.0, 50, Sector::Full).unwrap();
    let emitter = EmitterSpec::new(1.0, 0.4, vec![0.0, 0.1], gaussian(0.002)).unwrap();
    let cv = coupling_vector(&full, &emitter).unwrap();
    assert!(matches!(
        even_sector_reduce(&cv, &full),
        Err(Error::NotEvenProfile(_))
    ));
}

#[test]
fn delta_points_need_a_bounded_cutoff() {
    let emitter = EmitterSpec::new(1.0, 0.4, vec![0.0], CouplingProfile::delta()).unwrap();
    let small = build_mode_basis(1.0, 20, Sector::Full).unwrap();
    let cv = coupling_vector_capped(&small, &emitter, 20).unwrap();
    // |f_j|² = |k_j| / 2L grows without bound.
    for (f, k) in cv.coefficients.iter().zip(small.wavenumbers()) {
        assert!((f.norm_sqr() - k.abs() / 2.0).abs() < 1e-12 * k.abs());
    }
    let large = build_mode_basis(1.0, 21, Sector::Full).unwrap();
    assert!(matches!(
        coupling_vector_capped(&large, &emitter, 20),
        Err(Error::UvDivergence { .. })
    ));
}

fn smooth_kind() -> impl Strategy<Value = ProfileKind> {
    prop_oneof![
        Just(ProfileKind::Gaussian),
        Just(ProfileKind::Lorentzian),
        Just(ProfileKind::Rectangle),
    ]
}

proptest! {
    #[test]
    fn profile_transform_is_bounded_by_one(kind in smooth_kind(), d in 1e-4..0.05f64, k in -5e4..5e4f64) {
        let p = CouplingProfile::new(kind, d).unwrap();
        prop_assert!(profile_fourier(&p, k).norm() <= 1.0 + 1e-15);
        prop_assert!((profile_fourier(&p, 0.0).re - 1.0).abs() < 1e-15);
        prop_assert_eq!(profile_fourier(&CouplingProfile::delta(), k).re, 1.0);
    }

    #[test]
    fn coefficients_obey_the_tail_bound(
        kind in smooth_kind(),
        d in 1e-3..0.01f64,
        m in 1usize..5,
        tau in 0.01..0.1f64,
        length in 0.5..3.0f64,
    ) {
        let basis = build_mode_basis(length, 300, Sector::Full).unwrap();
        let p = CouplingProfile::new(kind, d).unwrap();
        let emitter = EmitterSpec::symmetric(1.0, 0.4, m, tau * length, p).unwrap();
        let cv = coupling_vector(&basis, &emitter).unwrap();
        for ((f, &j), &k) in cv.coefficients.iter().zip(basis.indices()).zip(basis.wavenumbers()) {
            let bound = (PI * j.unsigned_abs() as f64).sqrt() / length * profile_fourier(&p, k).norm() * m as f64;
            prop_assert!(f.norm() <= bound * (1.0 + 1e-12) + 1e-300);
        }
    }
}
