use std::fs;
use std::path::Path;
use std::process::Command;

use ca3d::experiment::{
    emit_plot_data, load_single, reevaluate, run_single, run_spacing_sweep, run_uav_count_sweep, save_single,
    spacing_rows_csv, ExperimentConfig, Scheme, SweepTable, SPACING_HEADER,
};

const SMALL: &str = r#"
[scenario]
region = { width = 1500.0, height = 1500.0 }
users = { distribution = "hotspot", count = 12, radius = 400.0 }
nodes = { distribution = "uniform", count = 5, cap_min = 2e9, cap_max = 10e9 }
task = { input_mb = 5.0, cycles = 1e9, deadline = 1.0 }

[channel]
a = 9.61
b = 0.16
beta0 = 1e-3
pathloss_exp = 2.6
nlos_atten = 0.01
bandwidth = 10e6
p_user = 0.3
p_uav = 10.0
noise = 3.98e-14

[weights]
alpha = 0.2
beta = 1.5e4
gamma = 0.1

[constraints]
h_min = 100.0
h_max = 300.0
d_min = 50.0

[pso]
num_particles = 8
iterations = 10

[beam]
max_passes = 4

[run]
seeds = [1, 2, 3]
uav_counts = [1, 3]

[spacing]
altitudes = [150.0]
spacings = [20.0, 400.0, 900.0]
"#;

fn small() -> ExperimentConfig {
    ExperimentConfig::from_toml_str(SMALL).unwrap()
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p
}

fn simulate(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn cli_uav_sweep_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let o = simulate(&["--config", cfg.to_str().unwrap(), "--sweep", "uavs", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push((
            fs::read(out.join("uavs.csv")).unwrap(),
            fs::read(out.join("uavs_p_succ.csv")).unwrap(),
        ));
        assert!(out.join("uavs_timing.csv").exists());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(text.starts_with("scheme,m,seed,p_succ,psi_ghz,omega_ghz,utility,status\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4 * 2 * 3);
    // Sorted by scheme (config order), then M, then seed.
    assert_eq!(rows[0][..3], ["ca3d", "1", "1"]);
    assert_eq!(rows[3][..3], ["ca3d", "3", "1"]);
    assert_eq!(rows[23][..3], ["fixed", "3", "3"]);
}

#[test]
fn rows_are_self_consistent() {
    let cfg = small();
    let w = cfg.weights;
    let text = ca3d::experiment::uav_rows_csv(&run_uav_count_sweep(&cfg).unwrap());
    for r in csv_rows(&text) {
        assert_eq!(r[7], "ok");
        let f: Vec<f64> = r[3..7].iter().map(|v| v.parse().unwrap()).collect();
        let (p, psi, omega, u) = (f[0], f[1], f[2], f[3]);
        let recomputed = w.alpha * psi + w.beta * p - w.gamma * omega;
        let scale = (w.alpha * psi).abs() + (w.beta * p).abs() + (w.gamma * omega).abs();
        assert!((recomputed - u).abs() <= 1e-8 * scale.max(1.0), "{r:?}");
    }
}

#[test]
fn cli_overrides_seeds_and_schemes() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replace("uav_counts = [1, 3]", "uav_counts = [1]");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("o");
    let o = simulate(&[
        "--config",
        cfg.to_str().unwrap(),
        "--sweep",
        "uavs",
        "--out",
        out.to_str().unwrap(),
        "--seeds",
        "7,9",
        "--scheme",
        "random",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&fs::read_to_string(out.join("uavs.csv")).unwrap());
    let keys: Vec<_> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(keys, [("random", "1", "7"), ("random", "1", "9")]);
}

#[test]
fn cli_config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let missing = simulate(&["--config", "/nonexistent/cfg.toml", "--sweep", "uavs", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));

    let unknown = write_config(tmp.path(), &SMALL.replace("[weights]", "[weights]\ndelta = 1.0"));
    let o = simulate(&["--config", unknown.to_str().unwrap(), "--sweep", "uavs", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let good = write_config(tmp.path(), SMALL);
    let o = simulate(&[
        "--config",
        good.to_str().unwrap(),
        "--sweep",
        "uavs",
        "--out",
        out.to_str().unwrap(),
        "--scheme",
        "bogus",
    ]);
    assert_eq!(o.status.code(), Some(2));

    // Two schemes are not a single run.
    let o = simulate(&["--config", good.to_str().unwrap(), "--sweep", "single", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cli_failed_cell_exit_3_and_run_continues() {
    let tmp = tempfile::tempdir().unwrap();
    // 40 UAVs with 400 m separation cannot fit in the box.
    let text = SMALL
        .replace("d_min = 50.0", "d_min = 400.0")
        .replace("uav_counts = [1, 3]", "uav_counts = [1, 40]");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("o");
    let o = simulate(&[
        "--config",
        cfg.to_str().unwrap(),
        "--sweep",
        "uavs",
        "--out",
        out.to_str().unwrap(),
        "--scheme",
        "random",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let rows = csv_rows(&fs::read_to_string(out.join("uavs.csv")).unwrap());
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().filter(|r| r[1] == "1").all(|r| r[7] == "ok"));
    assert!(rows.iter().filter(|r| r[1] == "40").all(|r| r[7].starts_with("error: ") && r[3].is_empty()));
}

#[test]
fn spacing_sweep_rows() {
    let cfg = small();
    let rows = run_spacing_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 3 * 3);
    let text = spacing_rows_csv(&rows);
    for r in csv_rows(&text) {
        if r[1] == "20" {
            assert!(r[7].starts_with("skipped"), "{r:?}");
        } else {
            assert_eq!(r[7], "ok");
        }
    }

    let mut empty = cfg.clone();
    empty.spacing.as_mut().unwrap().spacings.clear();
    let rows = run_spacing_sweep(&empty).unwrap();
    assert_eq!(spacing_rows_csv(&rows), format!("{SPACING_HEADER}\n"));

    let mut none = cfg;
    none.spacing = None;
    assert!(run_spacing_sweep(&none).is_err());
}

#[test]
fn plot_data_matches_hand_averages() {
    let cfg = small().with_schemes(vec![Scheme::Random, Scheme::Fixed]);
    let rows = run_uav_count_sweep(&cfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    emit_plot_data(SweepTable::Uavs(&rows), tmp.path()).unwrap();
    let text = fs::read_to_string(tmp.path().join("uavs_p_succ.csv")).unwrap();
    let stats = csv_rows(&text);
    assert_eq!(stats.len(), 4);
    for s in &stats {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.scheme.as_str() == s[0] && r.m.to_string() == s[1])
            .map(|r| r.result.as_ref().unwrap().p_succ)
            .collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64).sqrt();
        assert_eq!(s[2], "3");
        assert!((s[3].parse::<f64>().unwrap() - mean).abs() <= 1e-8 * mean.abs().max(1e-12));
        assert!((s[4].parse::<f64>().unwrap() - sd).abs() <= 1e-8 * sd.max(1e-12));
    }

    let one = small().with_seeds(vec![4]).unwrap();
    let rows = run_spacing_sweep(&one).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_plot_data(SweepTable::Spacing(&rows), dir.path()).unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        for r in csv_rows(&fs::read_to_string(f).unwrap()) {
            assert_eq!(r[2], "1");
            assert_eq!(r[4], "0");
        }
    }
}

#[test]
fn single_random_run_is_its_own_start() {
    let cfg = small().with_schemes(vec![Scheme::Random]);
    let mut cfg = cfg;
    cfg.run.uav_counts = vec![3];
    let run = run_single(&cfg).unwrap();
    assert_eq!(run.initial, run.deployment);
    assert_eq!(run.initial_report, run.report);
    assert!(run.trace.is_none());
}

#[test]
fn single_ca3d_improves_and_round_trips() {
    let mut cfg = small().with_schemes(vec![Scheme::Ca3d]);
    cfg.run.uav_counts = vec![3];
    let run = run_single(&cfg).unwrap();
    assert!(run.report.utility >= run.initial_report.utility);

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("single.json");
    save_single(&run, &path).unwrap();
    let back = load_single(&path).unwrap();
    assert_eq!(back, run);
    assert_eq!(reevaluate(&cfg, &back).unwrap(), run.report);
}

#[test]
fn cli_single_writes_dump_and_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let text = SMALL.replace("uav_counts = [1, 3]", "uav_counts = [2]");
    let cfg = write_config(tmp.path(), &text);
    let out = tmp.path().join("o");
    let o = simulate(&[
        "--config",
        cfg.to_str().unwrap(),
        "--sweep",
        "single",
        "--out",
        out.to_str().unwrap(),
        "--scheme",
        "greedy",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let run = load_single(out.join("single.json")).unwrap();
    assert_eq!((run.scheme, run.m, run.seed), (Scheme::Greedy, 2, 1));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("stage,iteration,best_utility,evals\n"));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("psi_ghz,omega_ghz,p_succ,utility"));
}

#[test]
fn reference_configs_load() {
    for name in ["reference_hotspot.toml", "reference_random.toml", "reference_spacing.toml"] {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/").to_string() + name;
        let cfg = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(cfg.run.seeds, (1..=20).collect::<Vec<u64>>());
    }
}
