use giantchain_core::chain_builder::{build_chain, ChainRep, LanczosOptions};
use giantchain_core::field_model::{
    build_mode_basis, coupling_vector, CouplingProfile, EmitterSpec, ProfileKind, Sector,
};
use giantchain_core::mps_engine::*;
use giantchain_core::observables::*;
use giantchain_core::reference_models::{ed_oracle, EdHamiltonian, EdOutput, EdTask};
use giantchain_core::C64;
use nalgebra::DMatrix;
use std::f64::consts::PI;

fn system(ratio: f64, sector: Sector, cutoff: usize) -> (ChainRep, EmitterSpec) {
    let basis = build_mode_basis(1.0, cutoff, sector).unwrap();
    let profile = CouplingProfile::new(ProfileKind::Gaussian, 0.002).unwrap();
    let mut emitter = EmitterSpec::symmetric(4.0 * PI, 1.0, 3, 0.05, profile).unwrap();
    let f = coupling_vector(&basis, &emitter).unwrap();
    emitter.coupling = ratio * emitter.frequency / f.sqrt_mu0();
    let f = coupling_vector(&basis, &emitter).unwrap();
    (build_chain(&basis, &f, &LanczosOptions::full()).unwrap(), emitter)
}

fn vacuum(layout: &SiteLayout, atom: usize) -> MpsState {
    let mut idx = vec![0; layout.len()];
    idx[0] = atom;
    product_state(layout, &idx).unwrap()
}

#[test]
fn population_of_simple_states() {
    let layout = SiteLayout::atom_chain(3, 2).unwrap();
    assert_eq!(atomic_population(&vacuum(&layout, EXCITED)).unwrap(), 1.0);
    assert_eq!(atomic_population(&vacuum(&layout, GROUND)).unwrap(), 0.0);
    let h = 1.0 / 2f64.sqrt();
    let mut v = vec![vec![C64::new(h, 0.0), C64::new(h, 0.0)]];
    v.extend((0..3).map(|_| vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
    let sup = product_state_from_vectors(&layout, &v).unwrap();
    assert!((atomic_population(&sup).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn energy_pieces_of_product_states() {
    let (chain, mut emitter) = system(0.5, Sector::Even, 4);
    let mpos = hamiltonian_mpos(&chain, &emitter, Variant::Full, 3).unwrap();
    let layout = mpos.h_tot.layout().clone();
    let e = energy_breakdown(&vacuum(&layout, EXCITED), &mpos).unwrap();
    assert_eq!(e.e_int, 0.0);
    assert!((e.e_atom - emitter.frequency / 2.0).abs() < 1e-12);
    emitter.coupling = 0.0;
    let mpos = hamiltonian_mpos(&chain, &emitter, Variant::Full, 3).unwrap();
    let e = energy_breakdown(&vacuum(&layout, GROUND), &mpos).unwrap();
    let half = -emitter.frequency / 2.0;
    for (got, want) in [
        (e.e_total, half),
        (e.e_atom, half),
        (e.e_field, 0.0),
        (e.e_int, 0.0),
    ] {
        assert!((got - want).abs() < 1e-12);
    }
    let mut s = vacuum(&layout, GROUND);
    s.scale(C64::new(2.0, 0.0));
    assert!(energy_breakdown(&s, &mpos).is_err());
}

#[test]
fn ground_state_energy_pieces_match_the_oracle() {
    let (chain, emitter) = system(0.5, Sector::Even, 4);
    let mpos = hamiltonian_mpos(&chain, &emitter, Variant::Full, 4).unwrap();
    let layout = mpos.h_tot.layout().clone();
    let opts = DmrgOptions {
        policy: TruncationPolicy::new(64, 0.0, 4).unwrap(),
        ..Default::default()
    };
    let gs = dmrg_minimize(&mpos.h_tot, &random_state(&layout, 4, 5), &opts, &[], 0.0).unwrap();
    let e = energy_breakdown(&gs.state, &mpos).unwrap();
    let EdOutput::Spectrum { energies, .. } = ed_oracle(
        &EdHamiltonian::from_chain(&chain, &emitter, Variant::Full, 4).unwrap(),
        &EdTask::Ground,
    )
    .unwrap() else {
        unreachable!()
    };
    assert!((e.e_total - energies[0]).abs() < 1e-8);
    assert!(e.additivity_error() < 1e-10 * e.e_total.abs());
    assert!(e.e_int < 0.0);
}

#[test]
fn one_chain_boson_spreads_as_the_coupling_profile() {
    let (chain, emitter) = system(0.5, Sector::Full, 6);
    let layout = SiteLayout::atom_chain(chain.len(), 2).unwrap();
    let mut idx = vec![0; layout.len()];
    idx[1] = 1;
    let s = product_state(&layout, &idx).unwrap();
    let occ = occupations(&s, &chain).unwrap();
    let f = coupling_vector(&chain.basis, &emitter).unwrap();
    for (n, fj) in occ.n_modes.iter().zip(&f.coefficients) {
        assert!((n - fj.norm_sqr() / f.mu0).abs() < 1e-12);
    }
    assert!((occ.n_field - 1.0).abs() < 1e-12);
    assert!((occ.n_modes.iter().sum::<f64>() - occ.n_field).abs() < 1e-10);
    let vac = occupations(&vacuum(&layout, EXCITED), &chain).unwrap();
    assert!(vac.n_modes.iter().all(|n| n.abs() < 1e-15) && vac.p_e == 1.0);
}

#[test]
fn occupation_bases_agree_on_a_correlated_state() {
    let (chain, emitter) = system(1.0, Sector::Even, 4);
    let mpos = hamiltonian_mpos(&chain, &emitter, Variant::Full, 4).unwrap();
    let layout = mpos.h_tot.layout().clone();
    let opts = DmrgOptions {
        policy: TruncationPolicy::new(64, 0.0, 4).unwrap(),
        ..Default::default()
    };
    let gs = dmrg_minimize(&mpos.h_tot, &random_state(&layout, 4, 9), &opts, &[], 0.0).unwrap();
    let occ = occupations(&gs.state, &chain).unwrap();
    assert!(occ.n_field > 1e-3);
    assert!((occ.n_modes.iter().sum::<f64>() - occ.n_chain.iter().sum::<f64>()).abs() < 1e-10);
    let direct = expectation(&gs.state, &total_number_mpo(&layout)).unwrap().re;
    assert!((direct - occ.n_field).abs() < 1e-10);
}

#[test]
fn free_theory_overlaps() {
    let (chain, mut emitter) = system(0.5, Sector::Even, 4);
    emitter.coupling = 0.0;
    let mpos = hamiltonian_mpos(&chain, &emitter, Variant::Full, 3).unwrap();
    let layout = mpos.h_tot.layout().clone();
    let opts = DmrgOptions {
        policy: TruncationPolicy::new(32, 0.0, 3).unwrap(),
        ..Default::default()
    };
    let gs = dmrg_minimize(&mpos.h_tot, &random_state(&layout, 3, 1), &opts, &[], 0.0).unwrap();
    let w = 10.0 * gs.energy.abs();
    let es = dmrg_minimize(&mpos.h_tot, &random_state(&layout, 3, 2), &opts, &[&gs.state], w).unwrap();
    assert!((gs.energy + emitter.frequency / 2.0).abs() < 1e-9);
    let gap = expectation(&es.state, &mpos.h_tot).unwrap().re - gs.energy;
    assert!((gap - 2.0 * PI).abs() < 1e-6);
    let o = overlaps(&gs.state, &es.state, &chain, &TruncationPolicy::statics()).unwrap();
    assert!((o.ground_bare - 1.0).abs() < 1e-10);
    assert!((o.excited_dressed - 1.0).abs() < 1e-8);
    // The first excitation is a photon, not the bare excited atom.
    assert!(o.excited_bare < 1e-8);
    assert!(o.orthogonality < 1e-8);
}

#[test]
fn vacuum_has_no_normal_ordered_energy() {
    let basis = build_mode_basis(1.0, 8, Sector::Full).unwrap();
    let x = uniform_grid(1.0, 64);
    let f = energy_density(&DMatrix::zeros(16, 16), &basis, &x).unwrap();
    assert!(f.t00.iter().all(|v| *v == 0.0));
}

#[test]
fn right_moving_packet_has_no_left_density() {
    let basis = build_mode_basis(2.0, 12, Sector::Full).unwrap();
    // Gaussian packet over right movers, one excitation in total.
    let mut amp = vec![C64::new(0.0, 0.0); basis.len()];
    for j in 1..=12i64 {
        let p = basis.position(j).unwrap();
        amp[p] = C64::from_polar((-((j - 6) as f64).powi(2) / 4.0).exp(), 0.3 * j as f64);
    }
    let norm: f64 = amp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amp.iter_mut().for_each(|z| *z /= norm);
    let corr = DMatrix::from_fn(amp.len(), amp.len(), |p, q| amp[p].conj() * amp[q]);
    let x = uniform_grid(2.0, 256);
    let f = energy_density(&corr, &basis, &x).unwrap();
    assert!(f.pi_l2.iter().all(|v| v.abs() < 1e-14));
    assert!(f.t00.iter().all(|v| *v > -1e-12));
    let want: f64 = (0..basis.len())
        .map(|p| basis.frequencies()[p] * corr[(p, p)].re)
        .sum();
    assert!((f.total(2.0) - want).abs() < 1e-10 * want);
    for (t, (r, l)) in f.t00.iter().zip(f.pi_r2.iter().zip(&f.pi_l2)) {
        assert!((t - r - l).abs() < 1e-12);
    }
}

#[test]
fn non_hermitian_correlators_are_rejected() {
    let basis = build_mode_basis(1.0, 2, Sector::Full).unwrap();
    let mut c = DMatrix::<C64>::zeros(4, 4);
    c[(0, 1)] = C64::new(1.0, 0.0);
    assert!(energy_density(&c, &basis, &[0.0]).is_err());
}
