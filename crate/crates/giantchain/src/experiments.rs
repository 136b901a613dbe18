//! One function per experiment kind, each returning finished tables.

use rayon::prelude::*;

use giantchain_core::chain_builder::{build_chain, ChainRep, LanczosOptions};
use giantchain_core::field_model::{
    build_mode_basis, coupling_vector, CouplingProfile, EmitterSpec, ModeBasis,
};
use giantchain_core::linalg::eigvalsh;
use giantchain_core::mps_engine::{
    dmrg_minimize, expectation, hamiltonian_mpos, product_state, random_state, tebd_evolve, DmrgOptions,
    EvolutionConfig, MpsState, Observer, SiteLayout, TruncationPolicy, Variant, EXCITED,
};
use giantchain_core::observables::{
    energy_breakdown, occupations, overlaps, EnergyBreakdown, OccupationRecord, OverlapRecord,
};
use giantchain_core::reference_models::{
    bell_state_emission, bound_population, dark_state_solutions, ed_oracle, single_excitation_evolve,
    BraidedPair, DarkStateParams, EdHamiltonian, EdOutput, EdTask, PointEmitter, SingleExcitationSetup,
    WaveguideBand, ED_DENSE_LIMIT,
};
use giantchain_core::C64;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::output::{Cell, CsvTable};

const DYNAMICS_COLUMNS: [&str; 4] = ["t", "p_e", "n_field", "e_total"];

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    match cfg.kind {
        ExperimentKind::Modes => modes(cfg),
        ExperimentKind::Chain => chain_table(cfg),
        ExperimentKind::GroundScan => ground_scan(cfg),
        ExperimentKind::OccupationScan => occupation_scan(cfg),
        ExperimentKind::Dynamics => dynamics(cfg),
        ExperimentKind::RwaCompare => rwa_compare(cfg),
        ExperimentKind::DarkStates => dark_states(cfg),
        ExperimentKind::TwoAtomDensity => two_atom_density(cfg),
        ExperimentKind::OracleCheck => oracle_check(cfg),
    }
}

fn emitter(cfg: &ExperimentConfig, coupling: f64) -> Result<EmitterSpec> {
    let e = &cfg.emitter;
    let profile = CouplingProfile::new(e.profile, e.width)?;
    Ok(EmitterSpec::symmetric(
        e.frequency,
        coupling,
        e.points,
        e.spacing,
        profile,
    )?)
}

fn basis(cfg: &ExperimentConfig) -> Result<ModeBasis> {
    let w = &cfg.waveguide;
    Ok(build_mode_basis(w.length, w.cutoff, w.sector)?)
}

fn lanczos_options(cfg: &ExperimentConfig) -> LanczosOptions {
    let n = &cfg.numerics;
    LanczosOptions {
        reorth: n.reorth,
        max_steps: if n.chain_length == 0 {
            usize::MAX
        } else {
            n.chain_length
        },
        seed: cfg.seed,
        ..LanczosOptions::default()
    }
}

/// Basis, emitter at the configured coupling, and its chain.
fn system(cfg: &ExperimentConfig) -> Result<(ModeBasis, EmitterSpec, ChainRep)> {
    let basis = basis(cfg)?;
    let em = emitter(cfg, cfg.emitter.coupling)?;
    let f = coupling_vector(&basis, &em)?;
    let chain = build_chain(&basis, &f, &lanczos_options(cfg))?;
    Ok((basis, em, chain))
}

fn chain_meta(t: &mut CsvTable, chain: &ChainRep, em: &EmitterSpec) {
    t.set_meta("mu0", format!("{:?}", chain.mu0));
    t.set_meta("chain_length", chain.len());
    t.set_meta(
        "interaction_scale",
        format!("{:?}", chain.interaction_scale(em.coupling)),
    );
    if let Some(b) = chain.truncation() {
        t.set_meta("dropped_hopping", format!("{b:e}"));
    }
}

fn policy(cfg: &ExperimentConfig) -> Result<TruncationPolicy> {
    let n = &cfg.numerics;
    Ok(TruncationPolicy::new(n.max_bond, n.svd_cutoff, n.n_b)?)
}

fn excited_vacuum(layout: &SiteLayout) -> Result<MpsState> {
    let mut idx = vec![0; layout.len()];
    idx[0] = EXCITED;
    Ok(product_state(layout, &idx)?)
}

/// `0, step, 2 step, ..` up to `t_max` (inclusive within rounding).
fn time_grid(t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

fn modes(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let basis = basis(cfg)?;
    let em = emitter(cfg, cfg.emitter.coupling)?;
    let f = coupling_vector(&basis, &em)?;
    let mut t = CsvTable::new("modes.csv", &["j", "k", "omega", "re_f", "im_f", "abs_f2"]);
    for (i, &j) in basis.indices().iter().enumerate() {
        let c = f.coefficients[i];
        t.push(vec![
            Cell::Int(j),
            basis.wavenumbers()[i].into(),
            basis.frequencies()[i].into(),
            c.re.into(),
            c.im.into(),
            c.norm_sqr().into(),
        ])?;
    }
    t.set_meta("mu0", format!("{:?}", f.mu0));
    t.set_meta(
        "sqrt_mu0_times_length",
        format!("{:?}", f.sqrt_mu0() * cfg.waveguide.length),
    );
    Ok(vec![t])
}

fn chain_table(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (_, em, chain) = system(cfg)?;
    let (alphas, betas) = match (chain.alphas(), chain.betas()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(CliError::Internal(
                "single emitter chain is not tridiagonal".into(),
            ))
        }
    };
    let mut t = CsvTable::new("chain.csv", &["index", "alpha", "beta"]);
    for (i, &a) in alphas.iter().enumerate() {
        // beta_i couples sites i and i + 1; the last site has none.
        let b = betas.get(i).copied().unwrap_or(0.0);
        t.push(vec![Cell::Int(i as i64), a.into(), b.into()])?;
    }
    chain_meta(&mut t, &chain, &em);
    Ok(vec![t])
}

struct EigenPoint {
    lambda: f64,
    gs: EnergyBreakdown,
    es: EnergyBreakdown,
    occupations: Option<(OccupationRecord, OccupationRecord)>,
    overlaps: Option<OverlapRecord>,
}

/// Ground and first excited state at `lambda`; the excited state comes from
/// a penalized search orthogonal to the ground state.
fn eigen_point(
    cfg: &ExperimentConfig,
    chain: &ChainRep,
    lambda: f64,
    index: usize,
    want_occupations: bool,
    want_overlaps: bool,
) -> Result<EigenPoint> {
    let em = emitter(cfg, lambda)?;
    let n = &cfg.numerics;
    let h = hamiltonian_mpos(chain, &em, n.variant, n.n_b)?;
    let layout = h.h_tot.layout().clone();
    let opts = DmrgOptions {
        policy: policy(cfg)?,
        max_sweeps: n.max_sweeps,
        energy_tol: n.energy_tol,
        ..DmrgOptions::default()
    };
    let seed = cfg.seed.wrapping_add(2 * index as u64);
    let mut gs = dmrg_minimize(&h.h_tot, &random_state(&layout, 2, seed), &opts, &[], 0.0)?.state;
    gs.normalize();
    let e0 = expectation(&gs, &h.h_tot)?.re;
    let weight = 10.0 * e0.abs().max(em.frequency);
    let mut es = dmrg_minimize(
        &h.h_tot,
        &random_state(&layout, 2, seed.wrapping_add(1)),
        &opts,
        &[&gs],
        weight,
    )?
    .state;
    es.normalize();
    let occupations = if want_occupations {
        Some((occupations(&gs, chain)?, occupations(&es, chain)?))
    } else {
        None
    };
    let overlaps = if want_overlaps {
        let p = TruncationPolicy::new(2 * n.max_bond, 1e-12, n.n_b)?;
        Some(overlaps(&gs, &es, chain, &p)?)
    } else {
        None
    };
    log::info!("lambda = {lambda}: E_GS = {e0}");
    Ok(EigenPoint {
        lambda,
        gs: energy_breakdown(&gs, &h)?,
        es: energy_breakdown(&es, &h)?,
        occupations,
        overlaps,
    })
}

/// Scan points in parallel, collected in scan order.
fn eigen_scan(
    cfg: &ExperimentConfig,
    want_occupations: bool,
    want_overlaps: bool,
) -> Result<(Vec<EigenPoint>, ChainRep, EmitterSpec)> {
    let (_, em, chain) = system(cfg)?;
    let points = cfg
        .scan
        .lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &l)| eigen_point(cfg, &chain, l, i, want_occupations, want_overlaps))
        .collect::<Result<Vec<_>>>()?;
    Ok((points, chain, em))
}

fn ground_scan(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (points, chain, em) = eigen_scan(cfg, false, true)?;
    let mut g = CsvTable::new(
        "ground_scan.csv",
        &[
            "lambda",
            "e_gs",
            "e_a",
            "e_f",
            "e_int",
            "gap_total",
            "gap_a",
            "gap_f",
            "gap_int",
        ],
    );
    let mut o = CsvTable::new("overlaps.csv", &["lambda", "ov_gs_g0", "ov_es_e0", "ov_es_a1gs"]);
    for p in &points {
        let (a, b) = (&p.gs, &p.es);
        g.push(vec![
            p.lambda.into(),
            a.e_total.into(),
            a.e_atom.into(),
            a.e_field.into(),
            a.e_int.into(),
            (b.e_total - a.e_total).into(),
            (b.e_atom - a.e_atom).into(),
            (b.e_field - a.e_field).into(),
            (b.e_int - a.e_int).into(),
        ])?;
        let ov = p.overlaps.expect("requested");
        o.push(vec![
            p.lambda.into(),
            ov.ground_bare.into(),
            ov.excited_bare.into(),
            ov.excited_dressed.into(),
        ])?;
    }
    chain_meta(&mut g, &chain, &em);
    chain_meta(&mut o, &chain, &em);
    Ok(vec![g, o])
}

fn occupation_scan(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (points, chain, em) = eigen_scan(cfg, true, false)?;
    let mut t = CsvTable::new(
        "occupations.csv",
        &["lambda", "p_e", "n_field", "n_1", "d_p_e", "d_n_field", "d_n_1"],
    );
    for p in &points {
        let (g, e) = p.occupations.as_ref().expect("requested");
        t.push(vec![
            p.lambda.into(),
            g.p_e.into(),
            g.n_field.into(),
            g.n_lowest.into(),
            (e.p_e - g.p_e).into(),
            (e.n_field - g.n_field).into(),
            (e.n_lowest - g.n_lowest).into(),
        ])?;
    }
    chain_meta(&mut t, &chain, &em);
    Ok(vec![t])
}

fn evolution(cfg: &ExperimentConfig) -> Result<EvolutionConfig> {
    let n = &cfg.numerics;
    Ok(EvolutionConfig {
        dt: n.dt,
        total_time: n.total_time,
        order: n.trotter_order,
        stride: n.stride,
        policy: policy(cfg)?,
    })
}

fn dynamics(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (_, em, chain) = system(cfg)?;
    let layout = SiteLayout::atom_chain(chain.len(), cfg.numerics.n_b)?;
    let table = tebd_evolve(
        &chain,
        &em,
        cfg.numerics.variant,
        &excited_vacuum(&layout)?,
        &evolution(cfg)?,
        &[],
    )?;
    let mut t = CsvTable::from_observables("dynamics.csv", &table, &DYNAMICS_COLUMNS)?;
    chain_meta(&mut t, &chain, &em);
    Ok(vec![t])
}

fn rwa_compare(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (_, em, chain) = system(cfg)?;
    let layout = SiteLayout::atom_chain(chain.len(), cfg.numerics.n_b)?;
    let init = excited_vacuum(&layout)?;
    let evo = evolution(cfg)?;
    let run = |variant: Variant, name: &str| -> Result<CsvTable> {
        let table = tebd_evolve(&chain, &em, variant, &init, &evo, &[Observer::ExcitationNumber])?;
        let mut t = CsvTable::from_observables(name, &table, &["t", "p_e", "n_field", "e_total", "n_exc"])?;
        chain_meta(&mut t, &chain, &em);
        Ok(t)
    };
    let (full, rwa) = rayon::join(
        || run(Variant::Full, "dynamics_full.csv"),
        || run(Variant::Rwa, "dynamics_rwa.csv"),
    );
    Ok(vec![full?, rwa?])
}

fn dark_params(cfg: &ExperimentConfig) -> Result<DarkStateParams> {
    let d = &cfg.dark_states;
    Ok(DarkStateParams::new(d.omega, d.gamma_tau, d.ratio, d.tau)?)
}

fn dark_states(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let d = &cfg.dark_states;
    let params = dark_params(cfg)?;
    let solutions = dark_state_solutions(&params, d.n_max)?;
    let mut t = CsvTable::new(
        "darkstates.csv",
        &["n", "parity", "re_beta", "im_beta", "abs_beta2"],
    );
    for s in &solutions {
        t.push(vec![
            Cell::Int(s.n as i64),
            s.parity.name().into(),
            s.beta.re.into(),
            s.beta.im.into(),
            s.beta.norm_sqr().into(),
        ])?;
    }
    t.set_meta("gamma", format!("{:?}", params.gamma()));
    t.set_meta("tau_s", format!("{:?}", params.tau_s()));
    let mut out = vec![t];
    if d.t_max > 0.0 {
        let times = time_grid(d.t_max, d.t_step);
        let mut cols = vec!["t", "p_bound"];
        let propagated = if d.propagate {
            cols.extend(["p_e_1", "p_e_2"]);
            Some(propagate_pair(cfg, &params, &times)?)
        } else {
            None
        };
        let mut b = CsvTable::new("bound_population.csv", &cols);
        for (i, &time) in times.iter().enumerate() {
            let mut row: Vec<Cell> = vec![time.into(), bound_population(&solutions, time).into()];
            if let Some((p1, p2)) = &propagated {
                row.extend([p1[i].into(), p2[i].into()]);
            }
            b.push(row)?;
        }
        out.push(b);
    }
    Ok(out)
}

/// Atom 1 excited, two braided point-coupled atoms on a symmetric band.
fn propagate_pair(
    cfg: &ExperimentConfig,
    p: &DarkStateParams,
    times: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = &cfg.dark_states;
    let band = WaveguideBand::around(p.omega, d.band_length, d.band_half);
    let atoms = [
        PointEmitter {
            frequency: p.omega,
            positions: vec![0.0, p.tau],
        },
        PointEmitter {
            frequency: p.omega,
            positions: vec![p.tau_s(), p.tau_s() + p.tau],
        },
    ];
    let setup = SingleExcitationSetup::waveguide(&band, p.gamma(), &atoms)?;
    let init = setup.emitter_state(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?;
    let t = single_excitation_evolve(&setup, &init, times)?;
    let col = |n: &str| {
        t.column(n)
            .ok_or_else(|| CliError::Internal(format!("missing {n}")))
    };
    Ok((col("p_e_1")?, col("p_e_2")?))
}

fn braided_pair(cfg: &ExperimentConfig) -> BraidedPair {
    let a = &cfg.two_atom;
    BraidedPair {
        length: cfg.waveguide.length,
        cutoff: cfg.waveguide.cutoff,
        frequency: a.frequency,
        coupling: a.coupling,
        tau: a.tau,
        width: a.width,
    }
}

fn two_atom_density(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let a = &cfg.two_atom;
    let pair = braided_pair(cfg);
    let times = time_grid(a.t_max, a.t_step);
    let m = a.grid_points;
    let x: Vec<f64> = (0..m)
        .map(|k| a.x_min + (a.x_max - a.x_min) * k as f64 / (m - 1) as f64)
        .collect();
    let out = bell_state_emission(&pair, a.state, &times, &x)?;
    let mut rho = CsvTable::new("density.csv", &["t", "x", "T00"]);
    for (&t, field) in times.iter().zip(&out.density) {
        for (&xi, &e) in field.x.iter().zip(&field.t00) {
            rho.push(vec![t.into(), xi.into(), e.into()])?;
        }
    }
    let emission = CsvTable::from_observables(
        "emission.csv",
        &out.table,
        &["t", "p_e_1", "p_e_2", "norm", "e_field", "e_between"],
    )?;
    let (lo, hi) = pair.outer_points();
    rho.set_meta("outer_points", format!("{lo:?}, {hi:?}"));
    Ok(vec![rho, emission])
}

/// Chain, MPS and single-excitation results against dense references on the
/// configured (small) system. Columns: `check, value, tolerance, pass`.
fn oracle_check(cfg: &ExperimentConfig) -> Result<Vec<CsvTable>> {
    let (basis, em, chain) = system(cfg)?;
    let n = &cfg.numerics;
    let mut t = CsvTable::new("oracle.csv", &["check", "value", "tolerance", "pass"]);
    let mut push = |name: &str, value: f64, tol: f64| {
        t.push(vec![
            name.into(),
            value.into(),
            tol.into(),
            Cell::Int((value <= tol) as i64),
        ])
    };

    let lam = &chain.transform;
    let gram = lam * lam.adjoint();
    let unitarity = (0..gram.nrows())
        .flat_map(|i| (0..gram.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| {
            (gram[(i, j)]
                - if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                })
            .norm()
        })
        .fold(0.0, f64::max);
    push("chain_unitarity", unitarity, 1e-10)?;

    if chain.len() == basis.len() {
        let mut eig = eigvalsh(&chain.single_particle_matrix());
        let mut freq = basis.frequencies().to_vec();
        eig.sort_by(f64::total_cmp);
        freq.sort_by(f64::total_cmp);
        let scale = freq.last().copied().unwrap_or(1.0);
        let dev = eig
            .iter()
            .zip(&freq)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale;
        push("chain_spectrum", dev, 1e-10)?;
    }

    let ed = EdHamiltonian::from_chain(&chain, &em, n.variant, n.n_b)?;
    let EdOutput::Spectrum { energies, .. } = ed_oracle(&ed, &EdTask::Ground)? else {
        return Err(CliError::Internal("ground task returned dynamics".into()));
    };
    let h = hamiltonian_mpos(&chain, &em, n.variant, n.n_b)?;
    let layout = h.h_tot.layout().clone();
    let opts = DmrgOptions {
        policy: policy(cfg)?,
        max_sweeps: n.max_sweeps,
        energy_tol: n.energy_tol,
        ..DmrgOptions::default()
    };
    let gs = dmrg_minimize(&h.h_tot, &random_state(&layout, 2, cfg.seed), &opts, &[], 0.0)?;
    push(
        "ground_energy",
        (gs.energy - energies[0]).abs() / energies[0].abs().max(1.0),
        1e-8,
    )?;

    let tebd = tebd_evolve(
        &chain,
        &em,
        n.variant,
        &excited_vacuum(&layout)?,
        &evolution(cfg)?,
        &[],
    )?;
    let times = tebd.column("t").unwrap_or_default();
    let mut initial = vec![0; chain.len() + 1];
    initial[0] = 1;
    let EdOutput::Dynamics(exact) = ed_oracle(
        &ed,
        &EdTask::Evolve {
            times: times.clone(),
            initial: initial.clone(),
        },
    )?
    else {
        return Err(CliError::Internal("evolve task returned a spectrum".into()));
    };
    let dev = max_dev(
        &tebd.column("p_e").unwrap_or_default(),
        &exact.column("p_e").unwrap_or_default(),
    );
    push("dynamics_p_e", dev, 1e-4)?;

    // One excitation under the rotating-wave form: the chain ED and the
    // eigenmode propagator must agree exactly.
    let ed_rwa = EdHamiltonian::from_chain(&chain, &em, Variant::Rwa, n.n_b)?;
    let EdOutput::Dynamics(chain_rwa) = ed_oracle(
        &ed_rwa,
        &EdTask::Evolve {
            times: times.clone(),
            initial,
        },
    )?
    else {
        return Err(CliError::Internal("evolve task returned a spectrum".into()));
    };
    let setup = SingleExcitationSetup::from_emitters(&basis, std::slice::from_ref(&em))?;
    let init = setup.emitter_state(&[C64::new(1.0, 0.0)])?;
    let modes = single_excitation_evolve(&setup, &init, &times)?;
    let dev = max_dev(
        &chain_rwa.column("p_e").unwrap_or_default(),
        &modes.column("p_e_1").unwrap_or_default(),
    );
    push("rwa_single_excitation", dev, 1e-8)?;

    chain_meta(&mut t, &chain, &em);
    Ok(vec![t])
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Chain sites an MPS run will use, before building anything.
fn planned_chain_len(cfg: &ExperimentConfig) -> usize {
    let w = &cfg.waveguide;
    let modes = match w.sector {
        giantchain_core::field_model::Sector::Even => w.cutoff,
        giantchain_core::field_model::Sector::Full => 2 * w.cutoff,
    };
    match cfg.numerics.chain_length {
        0 => modes,
        m => m.min(modes),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum MpsWork {
    /// Ground plus excited state and their environments.
    Search,
    /// One state and its two-site gate buffers.
    Evolution,
}

/// Rough peak working set in bytes for `workers` concurrent MPS jobs.
fn mps_bytes(cfg: &ExperimentConfig, work: MpsWork, workers: usize) -> f64 {
    let n = &cfg.numerics;
    let sites = (planned_chain_len(cfg) + 1) as f64;
    let (d, chi) = (n.n_b as f64, n.max_bond as f64);
    let c = 16.0;
    let state = sites * d * chi * chi * c;
    let buffers = 6.0 * (d * chi).powi(2) * c;
    let per = match work {
        // Environments of an MPO with bond dimension about 5.
        MpsWork::Search => 2.0 * state + sites * 5.0 * chi * chi * c + buffers,
        MpsWork::Evolution => state + buffers,
    };
    per * workers as f64
}

/// Refuses configurations whose estimated cost exceeds `[limits]`, before
/// any computation or file creation.
pub fn check_resources(cfg: &ExperimentConfig, threads: usize) -> Result<()> {
    let l = &cfg.limits;
    let mb = |bytes: f64| bytes / (1024.0 * 1024.0);
    let memory = |bytes: f64, what: &str| -> Result<()> {
        if mb(bytes) > l.max_memory_mb {
            return Err(CliError::ResourceCap(format!(
                "{what} needs an estimated {:.0} MB, above [limits] max_memory_mb = {}",
                mb(bytes),
                l.max_memory_mb
            )));
        }
        Ok(())
    };
    let dimension = |dim: f64, what: &str| -> Result<()> {
        if dim > l.max_dimension as f64 {
            return Err(CliError::ResourceCap(format!(
                "{what} has dimension {dim:.0}, above [limits] max_dimension = {}",
                l.max_dimension
            )));
        }
        Ok(())
    };
    let rows = |n: usize, what: &str| -> Result<()> {
        if n > l.max_rows {
            return Err(CliError::ResourceCap(format!(
                "{what} would hold {n} rows, above [limits] max_rows = {}",
                l.max_rows
            )));
        }
        Ok(())
    };
    let modes = planned_chain_len(cfg).max(cfg.waveguide.cutoff) as f64;
    memory(3.0 * 16.0 * modes * modes, "the chain transform")?;
    let n = &cfg.numerics;
    let steps = |total: f64, stride: f64| (total / stride + 1e-9).floor() as usize + 1;
    match cfg.kind {
        ExperimentKind::Modes | ExperimentKind::Chain => {}
        ExperimentKind::GroundScan | ExperimentKind::OccupationScan => {
            let workers = threads.min(cfg.scan.lambdas.len()).max(1);
            memory(mps_bytes(cfg, MpsWork::Search, workers), "the eigenstate scan")?;
            rows(cfg.scan.lambdas.len(), "the scan table")?;
        }
        ExperimentKind::Dynamics | ExperimentKind::RwaCompare => {
            let workers = if cfg.kind == ExperimentKind::RwaCompare {
                2
            } else {
                1
            };
            memory(mps_bytes(cfg, MpsWork::Evolution, workers), "time evolution")?;
            rows(steps(n.total_time, n.stride), "the dynamics table")?;
        }
        ExperimentKind::OracleCheck => {
            let dim = 2.0 * (n.n_b as f64).powi(planned_chain_len(cfg) as i32);
            dimension(dim, "the exact-diagonalization oracle")?;
            if dim <= ED_DENSE_LIMIT as f64 {
                memory(3.0 * 16.0 * dim * dim, "the dense oracle")?;
            }
            memory(
                mps_bytes(cfg, MpsWork::Search, 1),
                "the MPS side of the oracle check",
            )?;
        }
        ExperimentKind::DarkStates => {
            let d = &cfg.dark_states;
            if d.t_max > 0.0 {
                rows(steps(d.t_max, d.t_step), "the bound-population table")?;
                if d.propagate {
                    dimension(2.0 + 2.0 * (2 * d.band_half + 1) as f64, "the waveguide band")?;
                }
            }
        }
        ExperimentKind::TwoAtomDensity => {
            let a = &cfg.two_atom;
            let dim = 2.0 + 2.0 * cfg.waveguide.cutoff as f64;
            dimension(dim, "the two-atom single-excitation space")?;
            memory(4.0 * 16.0 * dim * dim, "the two-atom propagator")?;
            rows(steps(a.t_max, a.t_step) * a.grid_points, "the density table")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_grid_includes_the_end_point() {
        assert_eq!(time_grid(1.0, 0.25), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(time_grid(0.3, 0.1).len(), 4);
    }

    #[test]
    fn memory_estimate_grows_with_bond_dimension() {
        let mut cfg: ExperimentConfig = "[experiment]\nkind = dynamics\n".parse().unwrap();
        let small = mps_bytes(&cfg, MpsWork::Search, 1);
        cfg.numerics.max_bond *= 2;
        assert!(mps_bytes(&cfg, MpsWork::Search, 1) > 3.0 * small);
    }
}
