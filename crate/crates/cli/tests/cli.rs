use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dyson_cli::experiment::{density_trajectory_from_table, initial_density};
use dyson_cli::output::read_csv;
use dyson_cli::{parse_config, run_experiment, InitialDatum, RunOptions};
use dyson_core::spectral::{solve_density, DensitySolverOptions};
use serde_json::Value;

fn dyson(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyson"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn tree(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(tree(&p));
        }
        out.push(p);
    }
    out.sort();
    out
}

#[test]
fn config_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "bad.cfg", "M = 64\nN = -4\nT = 1\n");
    let o = dyson(dir.path(), &["particles", "--config", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&o.stderr));

    write_config(dir.path(), "mismatch.cfg", "channel = density\nM = 64\nT = 1\n");
    let o = dyson(dir.path(), &["primitive", "--config", "mismatch.cfg"]);
    assert_eq!(o.status.code(), Some(1));

    let o = dyson(dir.path(), &["density", "--config", "missing.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "atom.cfg", "N = 4\nT = 0.1\ninitial = one_atom\n");
    let o = dyson(dir.path(), &["particles", "--config", "atom.cfg"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("particles", "N = 8\nT = 0.2\ndt = 1e-3\nruns = 4\nrecord_every = 20\ninitial = cosine(0.5)\nseed = 7\n"),
        ("matrix", "N = 6\nT = 0.1\ndt = 1e-3\nruns = 3\nrecord_every = 10\nseed = 3\n"),
        ("density", "M = 128\nT = 0.2\nrecord_interval = 0.05\ninitial = cosine(0.5)\n"),
        ("primitive", "M = 128\nT = 0.2\nrecord_interval = 0.05\ninitial = two_cluster\n"),
    ];
    for (channel, text) in cases {
        write_config(dir.path(), "run.cfg", text);
        let mut outputs = Vec::new();
        for out in ["a", "b"] {
            let o = dyson(dir.path(), &[channel, "--config", "run.cfg", "--out", out]);
            assert_eq!(o.status.code(), Some(0), "{channel}: {}", String::from_utf8_lossy(&o.stderr));
            outputs.push(fs::read(dir.path().join(out).join("trajectory.csv")).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{channel}");
        let text = String::from_utf8(outputs[0].clone()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("t,"));
    }
}

#[test]
fn seed_override_changes_the_path() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "p.cfg", "N = 8\nT = 0.1\nseed = 1\n");
    dyson(dir.path(), &["particles", "--config", "p.cfg", "--out", "a"]);
    dyson(dir.path(), &["particles", "--config", "p.cfg", "--out", "b", "--seed", "2"]);
    let a = fs::read(dir.path().join("a/trajectory.csv")).unwrap();
    let b = fs::read(dir.path().join("b/trajectory.csv")).unwrap();
    assert_ne!(a, b);
    assert_eq!(summary(&dir.path().join("b"))["config"]["seed"], 2);
}

#[test]
fn csv_reloads_to_the_computed_values() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse_config("channel = density\nM = 128\nT = 0.3\nrecord_interval = 0.1\ninitial = cosine(0.9)").unwrap();
    config.out_dir = dir.path().join("out");
    run_experiment(&config, &RunOptions::default()).unwrap();

    let mu0 = initial_density(&InitialDatum::Cosine(0.9), 128).unwrap();
    let eps = dyson_core::SpectralWorkspace::default_viscosity(128);
    let options = DensitySolverOptions { record_interval: 0.1, ..Default::default() };
    let direct = solve_density(&mu0, 0.3, eps, options).unwrap();

    let table = read_csv(&dir.path().join("out/trajectory.csv")).unwrap();
    let (times, states) = density_trajectory_from_table(&table).unwrap();
    assert_eq!(times, direct.times);
    for (a, b) in states.iter().zip(&direct.states) {
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn summary_is_stable_json() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "d.cfg", "M = 64\nT = 0.6\nrecord_interval = 0.05\n");
    let o = dyson(dir.path(), &["density", "--config", "d.cfg", "--out", "o"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&dir.path().join("o"));
    let keys: Vec<&str> = s.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["channel", "config", "wall_time_s", "rejected_steps", "results", "bound_report", "violation"]);
    assert_eq!(s["config"]["M"], 64);
    assert_eq!(s["bound_report"]["series_file"], "series.csv");
    let bounds = s["bound_report"]["bounds"].as_array().unwrap();
    assert!(bounds.iter().any(|b| b["name"] == "linf_regularization"));
    let back: Vec<dyson_core::BoundCheck> = serde_json::from_value(s["bound_report"]["bounds"].clone()).unwrap();
    assert_eq!(back.len(), bounds.len());

    let series = read_csv(&dir.path().join("o/series.csv")).unwrap();
    assert_eq!(series.header[..6], ["t", "M", "m", "V", "I", "D"]);
    assert_eq!(series.header.last().unwrap(), "dmax");
    assert!(series.header.contains(&"lp_3".to_string()));
}

#[test]
fn nothing_is_written_outside_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.cfg", "N = 8, 16\nT = 0.1\nruns = 2\nM = 64\nout = results/cmp\n");
    let before = tree(dir.path());
    let o = dyson(dir.path(), &["compare", "--config", "c.cfg", "--gnuplot"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let root = dir.path().join("results");
    let after: Vec<PathBuf> = tree(dir.path()).into_iter().filter(|p| !before.contains(p)).collect();
    assert!(after.iter().all(|p| p.starts_with(&root)), "{after:?}");
    let files: Vec<String> = fs::read_dir(root.join("cmp")).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    for f in ["cdf.csv", "summary.json", "plot.gp"] {
        assert!(files.contains(&f.to_string()), "{files:?}");
    }
}

#[test]
fn report_channel_reproduces_the_density_report() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "d.cfg", "M = 128\nT = 1\nrecord_interval = 0.05\ninitial = cosine(0.8)\nout = dens\n");
    assert_eq!(dyson(dir.path(), &["density", "--config", "d.cfg"]).status.code(), Some(0));
    write_config(dir.path(), "r.cfg", "input = dens/trajectory.csv\nout = rep\n");
    let o = dyson(dir.path(), &["report", "--config", "r.cfg", "--strict"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let from_density = summary(&dir.path().join("dens"));
    let from_report = summary(&dir.path().join("rep"));
    assert_eq!(from_density["bound_report"], from_report["bound_report"]);
    assert_eq!(from_report["results"]["all_passed"], true);
    assert_eq!(
        fs::read(dir.path().join("dens/series.csv")).unwrap(),
        fs::read(dir.path().join("rep/series.csv")).unwrap()
    );
}

#[test]
fn strict_mode_flags_bound_violations() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "d.cfg", "M = 64\nT = 0.5\nrecord_interval = 0.1\nout = dens\n");
    assert_eq!(dyson(dir.path(), &["density", "--config", "d.cfg"]).status.code(), Some(0));
    // scale every density by 1.1: the mass invariant must fail
    let table = read_csv(&dir.path().join("dens/trajectory.csv")).unwrap();
    let mut text = table.header.join(",") + "\n";
    for row in &table.rows {
        let cells: Vec<String> =
            row.iter().enumerate().map(|(k, x)| if k == 0 { x.to_string() } else { (1.1 * x).to_string() }).collect();
        text += &(cells.join(",") + "\n");
    }
    fs::write(dir.path().join("scaled.csv"), text).unwrap();
    write_config(dir.path(), "r.cfg", "input = scaled.csv\nout = rep\n");
    assert_eq!(dyson(dir.path(), &["report", "--config", "r.cfg"]).status.code(), Some(0));
    assert_eq!(dyson(dir.path(), &["report", "--config", "r.cfg", "--strict"]).status.code(), Some(2));
    let s = summary(&dir.path().join("rep"));
    let mass = s["bound_report"]["bounds"].as_array().unwrap().iter().find(|b| b["name"] == "mass").unwrap().clone();
    assert_eq!(mass["passed"], false);
}

#[test]
fn compare_reports_distance_per_n() {
    let dir = tempfile::tempdir().unwrap();
    write_config(dir.path(), "c.cfg", "N = 8, 64\nT = 0.2\nruns = 20\nM = 256\ninitial = cosine(1)\n");
    let o = dyson(dir.path(), &["compare", "--config", "c.cfg", "--strict", "--out", "c"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&dir.path().join("c"));
    let d8 = s["results"]["sup_distance"]["8"].as_f64().unwrap();
    let d64 = s["results"]["sup_distance"]["64"].as_f64().unwrap();
    assert!(d64 < d8, "{d64} vs {d8}");
    let cdf = read_csv(&dir.path().join("c/cdf.csv")).unwrap();
    assert_eq!(cdf.header, ["theta", "reference", "N8", "N64"]);
    assert_eq!(cdf.rows.len(), 256);
}

#[test]
fn csv_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let angles = "x\n0.1\n1.7\n2.0\n4.5\n";
    fs::write(dir.path().join("x.csv"), angles).unwrap();
    write_config(dir.path(), "p.cfg", "N = 4\nT = 0.05\ninitial = csv:x.csv\n");
    let o = dyson(dir.path(), &["particles", "--config", "p.cfg", "--out", "p"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_csv(&dir.path().join("p/trajectory.csv")).unwrap();
    assert_eq!(t.rows[0], vec![0.0, 0.1, 1.7, 2.0, 4.5]);

    let m = 64;
    let mut density = String::from("theta,mu\n");
    for j in 0..m {
        let th = std::f64::consts::TAU * j as f64 / m as f64;
        density += &format!("{th},{}\n", (1.0 + 0.3 * th.sin()) / std::f64::consts::TAU);
    }
    fs::write(dir.path().join("mu.csv"), density).unwrap();
    write_config(dir.path(), "d.cfg", "M = 64\nT = 0.1\ninitial = csv:mu.csv\nreport = false\n");
    let o = dyson(dir.path(), &["density", "--config", "d.cfg", "--out", "d"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("d/series.csv").exists());
}
