use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use giantchain::{ExperimentConfig, ExperimentKind};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_giantchain"));
    c.env_remove(giantchain::THREADS_ENV);
    c
}

fn run_config(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.ini");
    fs::write(&cfg, text).unwrap();
    bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Header and rows of a written table, metadata skipped.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let (h, rows) = read_csv(path);
    let i = h
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name} in {h:?}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

const SMALL: &str = "\
[waveguide]
cutoff = 12
[numerics]
n_b = 2
max_bond = 16
";

mod outputs {
    use super::*;

    #[test]
    fn decoupled_dynamics_keeps_the_atom_excited() {
        let dir = TempDir::new().unwrap();
        let text = format!(
            "[experiment]\nkind = dynamics\n{SMALL}dt = 0.01\ntotal_time = 0.5\nstride = 0.05\n[emitter]\ncoupling = 0\n"
        );
        let out = run_config(dir.path(), &text, &["--threads", "1"]);
        assert!(out.status.success(), "{}", stderr(&out));
        let path = dir.path().join("out/dynamics.csv");
        assert_eq!(read_csv(&path).0, ["t", "p_e", "n_field", "e_total"]);
        let p = column(&path, "p_e");
        assert_eq!(p.len(), 11);
        assert!(p.iter().all(|x| (x - 1.0).abs() < 1e-12), "{p:?}");
    }

    #[test]
    fn free_gap_is_the_lowest_mode() {
        for length in [1.0, 2.0] {
            let text = format!(
                "[experiment]\nkind = ground_scan\n[waveguide]\ncutoff = 12\nlength = {length}\n\
                 [numerics]\nn_b = 2\nmax_bond = 16\n[scan]\nlambdas = 0, 0.1\n"
            );
            let cfg: ExperimentConfig = text.parse().unwrap();
            let tables = giantchain::compute(&cfg, 2).unwrap();
            let g = &tables[0];
            assert_eq!(g.file_name, "ground_scan.csv");
            assert_eq!(
                g.columns,
                [
                    "lambda",
                    "e_gs",
                    "e_a",
                    "e_f",
                    "e_int",
                    "gap_total",
                    "gap_a",
                    "gap_f",
                    "gap_int"
                ]
            );
            let gap = g.column("gap_total").unwrap();
            assert!((gap[0] - 2.0 * PI / length).abs() < 1e-8, "L = {length}: {gap:?}");
            let ov = &tables[1];
            assert_eq!(ov.columns, ["lambda", "ov_gs_g0", "ov_es_e0", "ov_es_a1gs"]);
            assert!((ov.column("ov_gs_g0").unwrap()[0] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn occupation_differences_are_excited_minus_ground() {
        let cfg: ExperimentConfig =
            format!("[experiment]\nkind = occupation_scan\n{SMALL}[scan]\nlambdas = 0\n")
                .parse()
                .unwrap();
        let t = &giantchain::compute(&cfg, 1).unwrap()[0];
        assert_eq!(
            t.columns,
            ["lambda", "p_e", "n_field", "n_1", "d_p_e", "d_n_field", "d_n_1"]
        );
        let col = |n| t.column(n).unwrap()[0];
        // Uncoupled: ground state is |g, 0>, first excitation one photon in j = 1.
        assert!(col("p_e").abs() < 1e-10 && col("n_field").abs() < 1e-10);
        assert!((col("d_n_1") - 1.0).abs() < 1e-8 && (col("d_n_field") - 1.0).abs() < 1e-8);
        assert!(col("d_p_e").abs() < 1e-8);
    }

    #[test]
    fn beating_dark_states_are_listed() {
        let dir = TempDir::new().unwrap();
        let out = run_config(
            dir.path(),
            "[experiment]\nkind = dark_states\n[dark_states]\nt_max = 4\n",
            &[],
        );
        assert!(out.status.success(), "{}", stderr(&out));
        let (h, rows) = read_csv(&dir.path().join("out/darkstates.csv"));
        assert_eq!(h, ["n", "parity", "re_beta", "im_beta", "abs_beta2"]);
        let found: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
        assert_eq!(
            found,
            [
                ("9", "antisymmetric"),
                ("10", "symmetric"),
                ("11", "antisymmetric")
            ]
        );
        let p = column(&dir.path().join("out/bound_population.csv"), "p_bound");
        assert!((p[0] - 0.190).abs() < 5e-3, "{}", p[0]);
    }

    #[test]
    fn chain_and_modes_tables() {
        let cfg: ExperimentConfig = format!("[experiment]\nkind = chain\n{SMALL}").parse().unwrap();
        let chain = &giantchain::compute(&cfg, 1).unwrap()[0];
        assert_eq!(chain.columns, ["index", "alpha", "beta"]);
        assert_eq!(chain.rows.len(), 12);
        assert_eq!(*chain.column("beta").unwrap().last().unwrap(), 0.0);

        let mut cfg = cfg;
        cfg.kind = ExperimentKind::Modes;
        let modes = &giantchain::compute(&cfg, 1).unwrap()[0];
        let total: f64 = modes.column("abs_f2").unwrap().iter().sum();
        let mu0: f64 = modes
            .meta
            .iter()
            .find(|(k, _)| k == "mu0")
            .unwrap()
            .1
            .parse()
            .unwrap();
        assert!((total - mu0).abs() < 1e-10 * mu0);
    }

    #[test]
    fn rotating_wave_run_conserves_excitations() {
        let cfg: ExperimentConfig = format!(
            "[experiment]\nkind = rwa_compare\n{SMALL}dt = 0.001\ntotal_time = 0.2\nstride = 0.01\n[emitter]\nfrequency = 4pi\n"
        )
        .parse()
        .unwrap();
        let tables = giantchain::compute(&cfg, 2).unwrap();
        let names: Vec<&str> = tables.iter().map(|t| t.file_name.as_str()).collect();
        assert_eq!(names, ["dynamics_full.csv", "dynamics_rwa.csv"]);
        let n = tables[1].column("n_exc").unwrap();
        assert!(n.iter().all(|x| (x - 1.0).abs() < 1e-8));
        let full = tables[0].column("n_exc").unwrap();
        assert!(full.iter().any(|x| (x - 1.0).abs() > 1e-3));
    }

    #[test]
    fn two_atom_density_grid() {
        let cfg: ExperimentConfig = "\
[experiment]
kind = two_atom_density
[waveguide]
cutoff = 200
[two_atom]
state = singlet
t_max = 0.1
t_step = 0.05
grid_points = 31
"
        .parse()
        .unwrap();
        let tables = giantchain::compute(&cfg, 1).unwrap();
        assert_eq!(tables[0].columns, ["t", "x", "T00"]);
        assert_eq!(tables[0].rows.len(), 3 * 31);
        let norm = tables[1].column("norm").unwrap();
        assert!(norm.iter().all(|n| (n - 1.0).abs() < 1e-12));
        // Vacuum field at t = 0.
        assert!(tables[0].column("T00").unwrap()[..31]
            .iter()
            .all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn oracle_check_passes_on_the_built_in_system() {
        let cfg: ExperimentConfig = giantchain::CHECK_CONFIG.parse().unwrap();
        let t = &giantchain::compute(&cfg, 1).unwrap()[0];
        assert_eq!(t.columns, ["check", "value", "tolerance", "pass"]);
        assert_eq!(t.rows.len(), 5);
        for row in &t.rows {
            assert_eq!(row[3], giantchain::Cell::Int(1), "{row:?}");
        }
    }
}

mod reproducibility {
    use super::*;

    const SCAN: &str = "\
[experiment]
kind = ground_scan
seed = 3
[waveguide]
cutoff = 10
[numerics]
n_b = 3
max_bond = 12
[scan]
lambda_start = 0
lambda_stop = 0.6
lambda_count = 4
";

    #[test]
    fn reruns_are_byte_identical_across_thread_counts() {
        let dir = TempDir::new().unwrap();
        let files = ["ground_scan.csv", "overlaps.csv"];
        let read = || files.map(|f| fs::read(dir.path().join("out").join(f)).unwrap());
        let first = run_config(dir.path(), SCAN, &["--threads", "1"]);
        assert!(first.status.success(), "{}", stderr(&first));
        let serial = read();
        let second = run_config(dir.path(), SCAN, &["--threads", "4"]);
        assert!(second.status.success(), "{}", stderr(&second));
        for (f, (x, y)) in files.iter().zip(serial.iter().zip(read().iter())) {
            assert!(x == y, "{f} differs");
        }
    }

    #[test]
    fn header_embeds_the_resolved_configuration() {
        let dir = TempDir::new().unwrap();
        let out = run_config(dir.path(), SCAN, &["--threads", "2", "--seed", "11"]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = fs::read_to_string(dir.path().join("out/ground_scan.csv")).unwrap();
        let block: String = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l.strip_prefix("# "))
            .skip_while(|l| !l.starts_with("--- resolved"))
            .skip(1)
            .take_while(|l| !l.starts_with("run."))
            .map(|l| format!("{l}\n"))
            .collect();
        let cfg: ExperimentConfig = block.parse().unwrap();
        assert_eq!(cfg.seed, 11);
        let expected: Vec<f64> = (0..4).map(|i| 0.6 * i as f64 / 3.0).collect();
        assert_eq!(cfg.scan.lambdas, expected);
        assert_eq!(cfg.emitter.points, 3);
        // Every value written with 17 significant digits.
        let (_, rows) = read_csv(&dir.path().join("out/ground_scan.csv"));
        assert!(rows[1][1].contains('e') && rows[1][1].split('e').next().unwrap().len() >= 18);
    }

    #[test]
    fn thread_variable_is_read_when_the_flag_is_absent() {
        let dir = TempDir::new().unwrap();
        let cfg = dir.path().join("run.ini");
        fs::write(
            &cfg,
            "[experiment]\nkind = dark_states\n[dark_states]\nt_max = 0\n",
        )
        .unwrap();
        let bad = bin()
            .env(giantchain::THREADS_ENV, "many")
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(!bad.status.success());
        assert!(stderr(&bad).contains(giantchain::THREADS_ENV));
        let good = bin()
            .env(giantchain::THREADS_ENV, "many")
            .args(["run", "--threads", "1", "--config"])
            .arg(&cfg)
            .arg("--output-dir")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(good.status.success(), "{}", stderr(&good));
    }
}

mod diagnostics {
    use super::*;

    fn rejected(text: &str) -> (i32, String, bool) {
        let dir = TempDir::new().unwrap();
        let out = run_config(dir.path(), text, &[]);
        let wrote =
            dir.path().join("out").exists() && fs::read_dir(dir.path().join("out")).unwrap().next().is_some();
        (out.status.code().unwrap(), stderr(&out), wrote)
    }

    #[test]
    fn bad_values_report_their_line() {
        let (code, err, wrote) = rejected("[experiment]\nkind = dynamics\n\n[waveguide]\ncutoff = many\n");
        assert_eq!(code, 2);
        assert!(
            err.contains("run.ini: line 5:") && err.contains("cutoff"),
            "{err}"
        );
        assert!(!wrote);
    }

    #[test]
    fn unknown_keys_and_sections_are_errors() {
        let (code, err, _) = rejected("[experiment]\nkind = dynamics\n[numerics]\nnb = 4\n");
        assert_eq!(code, 2);
        assert!(
            err.contains("line 4") && err.contains("unknown key `nb`"),
            "{err}"
        );
        let (_, err, _) = rejected("[experiment]\nkind = dynamics\n[numerix]\n");
        assert!(err.contains("line 3") && err.contains("unknown section"), "{err}");
        let (_, err, _) = rejected("# comment\n[experiment]\nkind = spectra\n");
        assert!(err.contains("line 3") && err.contains("experiment kind"), "{err}");
    }

    #[test]
    fn range_errors_point_at_the_key() {
        let (code, err, _) = rejected("[experiment]\nkind = dynamics\n[numerics]\nmax_bond = 8\nn_b = 1\n");
        assert_eq!(code, 2);
        assert!(err.contains("line 5") && err.contains("n_b"), "{err}");
        let (_, err, _) = rejected("[experiment]\nkind = dynamics\n[numerics]\ndt = 0.01\nstride = 0.015\n");
        assert!(err.contains("line 5") && err.contains("multiple of dt"), "{err}");
        let (_, err, _) =
            rejected("[experiment]\nkind = dynamics\n[emitter]\ncoupling = 0.1\ncoupling = 0.2\n");
        assert!(err.contains("line 5") && err.contains("repeated"), "{err}");
    }

    #[test]
    fn over_limit_runs_are_refused_without_output() {
        let (code, err, wrote) = rejected(
            "[experiment]\nkind = ground_scan\n[numerics]\nmax_bond = 4096\nn_b = 8\n[limits]\nmax_memory_mb = 512\n",
        );
        assert_eq!(code, 3);
        assert!(
            err.contains("refusing to run") && err.contains("max_memory_mb"),
            "{err}"
        );
        assert!(!wrote);
        let (code, err, wrote) =
            rejected("[experiment]\nkind = oracle_check\n[waveguide]\ncutoff = 40\n[numerics]\nn_b = 4\n");
        assert_eq!(code, 3);
        assert!(err.contains("max_dimension"), "{err}");
        assert!(!wrote);
    }
}

#[test]
fn shipped_configs_parse_within_limits() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "ini") {
            let cfg = giantchain::load_config(&path).unwrap_or_else(|e| panic!("{e}"));
            giantchain::experiments::check_resources(&cfg, 4)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert_eq!(seen, 11);
}
