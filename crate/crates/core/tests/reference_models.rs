use std::f64::consts::PI;

use giantchain_core::chain_builder::{build_chain, LanczosOptions};
use giantchain_core::field_model::{
    build_mode_basis, coupling_vector, CouplingProfile, EmitterSpec, ProfileKind, Sector,
};
use giantchain_core::krylov::chebyshev_propagate;
use giantchain_core::linalg::eigh;
use giantchain_core::mps_engine::{
    product_state, tebd_evolve, EvolutionConfig, SiteLayout, TruncationPolicy, Variant, EXCITED,
};
use giantchain_core::reference_models::*;
use giantchain_core::{Error, C64};
use nalgebra::DMatrix;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn gaussian_emitter(omega: f64, lambda: f64, positions: Vec<f64>) -> EmitterSpec {
    let profile = CouplingProfile::new(ProfileKind::Gaussian, 0.004).unwrap();
    EmitterSpec::new(omega, lambda, positions, profile).unwrap()
}

fn two_atoms(lambda: f64) -> SingleExcitationSetup {
    let basis = build_mode_basis(1.0, 40, Sector::Full).unwrap();
    let a = gaussian_emitter(20.0 * PI, lambda, vec![0.0, 0.1]);
    let b = gaussian_emitter(22.0 * PI, lambda, vec![0.05, 0.15]);
    SingleExcitationSetup::from_emitters(&basis, &[a, b]).unwrap()
}

mod propagator {
    use super::*;

    #[test]
    fn hamiltonian_is_hermitian_with_the_expected_size() {
        let s = two_atoms(0.3);
        assert_eq!(s.dim(), 2 + 80);
        let h = s.matrix();
        assert!((h.adjoint() - &h).camax() < 1e-12);
    }

    #[test]
    fn decoupled_emitters_keep_their_populations() {
        let s = two_atoms(0.0);
        let init = s.emitter_state(&[c(0.6), C64::new(0.0, 0.8)]).unwrap();
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.37).collect();
        let t = single_excitation_evolve(&s, &init, &times).unwrap();
        for (p1, p2) in t.column("p_e_1").unwrap().iter().zip(t.column("p_e_2").unwrap()) {
            assert!((p1 - 0.36).abs() < 1e-12 && (p2 - 0.64).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_is_conserved_and_evolution_reverses() {
        let s = two_atoms(0.5);
        let init = s.emitter_state(&[c(1.0), c(0.0)]).unwrap();
        let t = single_excitation_evolve(&s, &init, &[0.0, 0.3, 1.7, 5.0]).unwrap();
        for n in t.column("norm").unwrap() {
            assert!((n - 1.0).abs() < 1e-12, "{n}");
        }
        let mut forward = Vec::new();
        single_excitation_states(&s, &init, &[2.3], |_, psi| {
            forward = psi.to_vec();
            Ok(())
        })
        .unwrap();
        single_excitation_states(&s, &forward, &[-2.3], |_, psi| {
            let dev = psi
                .iter()
                .zip(&init)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "{dev}");
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn rejects_unnormalized_input() {
        let s = two_atoms(0.5);
        let init = s.emitter_state(&[c(1.0), c(0.1)]).unwrap();
        assert!(matches!(
            single_excitation_evolve(&s, &init, &[1.0]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn chebyshev_matches_eigendecomposition() {
        let s = two_atoms(0.6);
        let init = s.emitter_state(&[c(0.8), c(0.6)]).unwrap();
        let (vals, vecs) = eigh(&s.matrix());
        let lo = vals[0] - 1.0;
        let hi = vals[vals.len() - 1] + 1.0;
        for t in [0.01, 0.9, -2.5, 7.0] {
            let phases = DMatrix::from_fn(vals.len(), vals.len(), |i, j| {
                if i == j {
                    C64::from_polar(1.0, -vals[i] * t)
                } else {
                    c(0.0)
                }
            });
            let exact = &vecs * phases * vecs.adjoint() * nalgebra::DVector::from_vec(init.clone());
            let cheb = chebyshev_propagate(&s, &init, t, lo, hi).unwrap();
            let dev = cheb
                .iter()
                .zip(exact.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-11, "t = {t}: {dev}");
        }
    }

    #[test]
    fn band_couplings_are_plane_waves() {
        let band = WaveguideBand::around(4.0 * PI, 2.0, 3);
        assert_eq!(band.centre, 4);
        let s = SingleExcitationSetup::waveguide(
            &band,
            0.5,
            &[PointEmitter {
                frequency: 4.0 * PI,
                positions: vec![0.0],
            }],
        )
        .unwrap();
        assert_eq!(s.num_modes(), 14);
        let h = s.matrix();
        for j in 0..14 {
            assert!((h[(0, 1 + j)].norm() - (0.5f64 / 4.0).sqrt()).abs() < 1e-14);
        }
        assert_eq!(s.mode_frequencies()[0], s.mode_frequencies()[7]);
        assert_eq!(s.wavenumbers()[0], -s.wavenumbers()[7]);
    }

    /// The chain form under the rotating-wave approximation has the same
    /// one-excitation dynamics as the mode form.
    #[test]
    fn matches_rotating_wave_chain_dynamics() {
        let basis = build_mode_basis(1.0, 4, Sector::Even).unwrap();
        let mut emitter = gaussian_emitter(4.0 * PI, 1.0, vec![-0.05, 0.0, 0.05]);
        let f = coupling_vector(&basis, &emitter).unwrap();
        emitter.coupling = 0.1 * emitter.frequency / f.sqrt_mu0();
        let f = coupling_vector(&basis, &emitter).unwrap();
        let chain = build_chain(&basis, &f, &LanczosOptions::full()).unwrap();

        let layout = SiteLayout::atom_chain(chain.len(), 2).unwrap();
        let mut idx = vec![0; layout.len()];
        idx[0] = EXCITED;
        let cfg = EvolutionConfig {
            dt: 1e-3,
            total_time: 2.0,
            order: 2,
            stride: 0.1,
            policy: TruncationPolicy::new(64, 0.0, 2).unwrap(),
        };
        let init = product_state(&layout, &idx).unwrap();
        let tebd = tebd_evolve(&chain, &emitter, Variant::Rwa, &init, &cfg, &[]).unwrap();

        let s = SingleExcitationSetup::from_emitters(&basis, &[emitter]).unwrap();
        let psi0 = s.emitter_state(&[c(1.0)]).unwrap();
        let exact = single_excitation_evolve(&s, &psi0, &tebd.column("t").unwrap()).unwrap();
        let dev = tebd
            .column("p_e")
            .unwrap()
            .iter()
            .zip(exact.column("p_e_1").unwrap())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-4, "{dev}");
    }
}

mod dark_states {
    use super::*;

    fn lone_symmetric() -> DarkStateParams {
        DarkStateParams::new(40.0 * PI, 4.0, 0.025, 1.0).unwrap()
    }

    fn beating_triplet() -> DarkStateParams {
        DarkStateParams::new(10.0 * PI, PI, 0.5, 1.0).unwrap()
    }

    #[test]
    fn condition_table() {
        assert_eq!(
            dark_state_conditions(&lone_symmetric(), 200),
            vec![(2, Parity::Symmetric)]
        );
        assert_eq!(
            dark_state_conditions(&beating_triplet(), 200),
            vec![
                (9, Parity::Antisymmetric),
                (10, Parity::Symmetric),
                (11, Parity::Antisymmetric)
            ]
        );
        let fast = DarkStateParams::new(40.0 * PI, 4.0, 0.39, 1.0).unwrap();
        assert!(dark_state_conditions(&fast, 2000).is_empty());
    }

    #[test]
    fn conditions_are_dimensionless() {
        for p in [lone_symmetric(), beating_triplet()] {
            let s = 3.7;
            // τ → sτ and Ω → Ω/s; γτ and τ_s/τ are already scale free.
            let q = DarkStateParams::new(p.omega / s, p.gamma_tau, p.ratio, p.tau * s).unwrap();
            assert_eq!(dark_state_conditions(&p, 100), dark_state_conditions(&q, 100));
        }
    }

    #[test]
    fn closed_form_amplitudes() {
        let b = dark_state_amplitude(2, Parity::Symmetric, &lone_symmetric(), 0.0).unwrap();
        assert!((b.norm() - 0.5 / 1.1).abs() < 1e-12);
        assert!((b.norm_sqr() - 0.2066).abs() < 1e-3);
        let a = dark_state_amplitude(9, Parity::Antisymmetric, &beating_triplet(), 3.3).unwrap();
        assert!((a.norm() - 0.5 / (1.0 + PI)).abs() < 1e-12);
        for s in dark_state_solutions(&beating_triplet(), 50).unwrap() {
            assert!(s.beta.norm() <= 0.5);
        }
    }

    #[test]
    fn superposition_beats_with_period_two_tau() {
        let sols = dark_state_solutions(&beating_triplet(), 50).unwrap();
        let p: Vec<f64> = (0..4001)
            .map(|k| bound_population(&sols, k as f64 * 1e-3))
            .collect();
        let max = p.iter().cloned().fold(0.0, f64::max);
        assert!((max - 0.190).abs() < 5e-3, "{max}");
        assert!((p[0] - max).abs() < 1e-12);
        // Odd multiples of τ sit on a shallow local maximum between two zeros.
        assert!((p[1000] - 0.0022).abs() < 1e-3, "{}", p[1000]);
        assert!(p.iter().cloned().fold(1.0, f64::min) < 1e-6);
        for k in 0..2000 {
            assert!((p[k] - p[k + 2000]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_parameters_without_that_state() {
        let e = dark_state_amplitude(3, Parity::Symmetric, &lone_symmetric(), 0.0);
        assert!(matches!(e, Err(Error::InvalidDarkState { n: 3, .. })));
        assert!(DarkStateParams::new(1.0, 1.0, 1.2, 1.0).is_err());
        assert!(DarkStateParams::new(1.0, 0.0, 0.5, 1.0).is_err());
    }
}

mod bell {
    use super::*;

    #[test]
    fn braided_geometry_alternates_atoms() {
        let pair = BraidedPair::reference();
        let [a, b] = pair.emitters().unwrap();
        let mut pts: Vec<(f64, usize)> = a
            .positions
            .iter()
            .map(|x| (*x, 0))
            .chain(b.positions.iter().map(|x| (*x, 1)))
            .collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in pts.windows(2) {
            assert!((w[1].0 - w[0].0 - pair.tau / 2.0).abs() < 1e-15);
            assert_ne!(w[0].1, w[1].1);
        }
        assert!((pair.frequency * pair.tau / (2.0 * PI) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn field_energy_density_accounts_for_the_emitted_energy() {
        let pair = BraidedPair::reference();
        let x: Vec<f64> = (0..4096).map(|k| k as f64 / 4096.0).collect();
        let out = bell_state_emission(&pair, BellState::Singlet, &[0.0, 0.1, 0.2], &x).unwrap();
        let e_field = out.table.column("e_field").unwrap();
        for (rho, e) in out.density.iter().zip(&e_field) {
            assert!(
                (rho.total(1.0) - e).abs() < 1e-6 * pair.frequency,
                "{} {e}",
                rho.total(1.0)
            );
        }
        for n in out.table.column("norm").unwrap() {
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}

mod exact_diagonalization {
    use super::*;

    fn one_mode(omega: f64, g: f64, variant: Variant, n_b: usize) -> EdHamiltonian {
        EdHamiltonian {
            omega,
            hopping: DMatrix::from_element(1, 1, c(omega)),
            weights: vec![c(g)],
            variant,
            n_b,
        }
    }

    #[test]
    fn vacuum_rabi_splitting() {
        let g = 0.01;
        let h = one_mode(3.0, g, Variant::Rwa, 3);
        let EdOutput::Spectrum { energies, .. } = ed_oracle(&h, &EdTask::Lowest(3)).unwrap() else {
            unreachable!()
        };
        assert!((energies[0] + 1.5).abs() < 1e-12);
        assert!((energies[2] - energies[1] - 2.0 * g).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_spectrum_is_atom_plus_ladders() {
        let mut h = one_mode(2.0, 0.0, Variant::Full, 3);
        h.hopping = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.7)]));
        h.weights = vec![c(0.0), c(0.0)];
        let EdOutput::Spectrum { energies, .. } = ed_oracle(&h, &EdTask::Lowest(18)).unwrap() else {
            unreachable!()
        };
        let mut expect = Vec::new();
        for s in [-1.0, 1.0] {
            for a in 0..3 {
                for b in 0..3 {
                    expect.push(s + a as f64 + 1.7 * b as f64);
                }
            }
        }
        expect.sort_by(f64::total_cmp);
        for (e, x) in energies.iter().zip(&expect) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let mut h = one_mode(1.0, 0.1, Variant::Full, 4);
        h.hopping = DMatrix::identity(9, 9);
        h.weights = vec![c(0.1); 9];
        assert!(matches!(ed_operator(&h), Err(Error::DimensionCap { .. })));
    }
}
