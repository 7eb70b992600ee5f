//! Channel dispatch and artifact emission.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dyson_core::circle::{grid_step, PeriodicDensity, PseudoCDF};
use dyson_core::diagnostics::{bound_report, BoundReport, ReportOptions};
use dyson_core::matrix::{simulate_matrix, MatrixTrajectory, UnitaryMatrix};
use dyson_core::particles::{simulate, ParticleTrajectory, SDEParameters};
use dyson_core::primitive::{solve_primitive, PrimitiveSolverOptions};
use dyson_core::spectral::{solve_density, DensitySolverOptions, SpectralWorkspace};
use dyson_core::{cdf_distance, DysonError, EmpiricalCdf, LiftedConfiguration};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{Channel, ExperimentConfig, InitialDatum, Preset};
use crate::output::{read_csv, OutputDir, Table};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SERIES_FILE: &str = "series.csv";
pub const CDF_FILE: &str = "cdf.csv";
pub const GNUPLOT_FILE: &str = "plot.gp";

/// Step used by the stochastic channels when `dt` is not configured.
pub const DEFAULT_DT: f64 = 1e-3;
/// Grid used for averaged CDFs and compare references when `M` is not configured.
pub const DEFAULT_CDF_GRID: usize = 512;
/// Grid on which densities are cumulated to place particles at quantiles.
const QUANTILE_GRID: usize = 4096;
/// Two-cluster preset: concentration of each bump.
const CLUSTER_KAPPA: f64 = 20.0;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Core(#[from] DysonError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Io { context, source }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub strict: bool,
    pub gnuplot: bool,
}

/// What a finished experiment produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: Value,
    /// A checked bound or convergence assertion failed.
    pub violation: bool,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
}

impl Outcome {
    /// Process exit code: 2 for a violation under `--strict`, 0 otherwise.
    pub fn exit_code(&self, strict: bool) -> i32 {
        if strict && self.violation {
            2
        } else {
            0
        }
    }
}

struct ChannelResult {
    results: Map<String, Value>,
    rejected_steps: u64,
    report: Option<BoundReport>,
    violation: bool,
}

impl ChannelResult {
    fn new(results: Map<String, Value>) -> Self {
        Self { results, rejected_steps: 0, report: None, violation: false }
    }
}

pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<Outcome, RunError> {
    let start = Instant::now();
    let mut out = OutputDir::create(&config.out_dir).map_err(io_err(format!("creating {}", config.out_dir.display())))?;
    log::info!("running {} into {}", config.channel, out.root().display());
    let result = match config.channel {
        Channel::Particles => run_particles(config, &mut out)?,
        Channel::Matrix => run_matrix(config, &mut out)?,
        Channel::Density => run_density(config, &mut out)?,
        Channel::Primitive => run_primitive(config, &mut out)?,
        Channel::Compare => run_compare(config, &mut out)?,
        Channel::Report => run_report(config, &mut out)?,
    };
    if options.gnuplot {
        out.write_text(GNUPLOT_FILE, &gnuplot_script(config, &out))
            .map_err(io_err("writing gnuplot script"))?;
    }

    let mut summary = Map::new();
    summary.insert("channel".into(), json!(config.channel.name()));
    summary.insert("config".into(), config.to_json());
    summary.insert("wall_time_s".into(), json!(start.elapsed().as_secs_f64()));
    summary.insert("rejected_steps".into(), json!(result.rejected_steps));
    summary.insert("results".into(), Value::Object(result.results));
    if let Some(report) = &result.report {
        summary.insert(
            "bound_report".into(),
            json!({ "bounds": report.bounds, "series_file": SERIES_FILE }),
        );
    }
    summary.insert("violation".into(), json!(result.violation));
    let summary = Value::Object(summary);
    out.write_json(SUMMARY_FILE, &summary).map_err(io_err("writing summary"))?;
    Ok(Outcome {
        summary,
        violation: result.violation,
        out_dir: out.root().to_path_buf(),
        files: out.written().to_vec(),
    })
}

fn sde_parameters(config: &ExperimentConfig, n: usize) -> Result<SDEParameters, RunError> {
    Ok(match (config.alpha, config.beta, config.preset) {
        (Some(a), Some(b), _) => SDEParameters::new(n, a, b)?,
        (_, _, Preset::Dyson) => SDEParameters::dyson(n)?,
        (_, _, Preset::MatrixMatched) => SDEParameters::matrix_matched(n)?,
    })
}

fn csv_values(path: &Path) -> Result<Vec<f64>, RunError> {
    let table = read_csv(path).map_err(io_err(format!("reading {}", path.display())))?;
    let last = table.header.len() - 1;
    let values: Vec<f64> = table.rows.iter().map(|r| r[last]).collect();
    if values.is_empty() {
        return Err(RunError::Input(format!("{} has no data rows", path.display())));
    }
    Ok(values)
}

/// Nodal density of the initial datum on an `m`-point grid.
pub fn initial_density(datum: &InitialDatum, m: usize) -> Result<PeriodicDensity, RunError> {
    Ok(match datum {
        InitialDatum::Uniform | InitialDatum::EquallySpaced => PeriodicDensity::uniform(m),
        InitialDatum::CosineBump(k) => PeriodicDensity::von_mises(m, *k, PI),
        InitialDatum::Cosine(a) => PeriodicDensity::from_fn(m, |t| (1.0 + a * t.cos()) / TAU),
        InitialDatum::TwoCluster => {
            let a = PeriodicDensity::von_mises(m, CLUSTER_KAPPA, FRAC_PI_2);
            let b = PeriodicDensity::von_mises(m, CLUSTER_KAPPA, 3.0 * FRAC_PI_2);
            PeriodicDensity::new(a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect())
        }
        InitialDatum::OneAtom => {
            return Err(RunError::Input("one_atom has no density; use the primitive or matrix channel".into()))
        }
        InitialDatum::Csv(path) => {
            let values = csv_values(path)?;
            if values.len() != m {
                return Err(RunError::Input(format!(
                    "{} holds {} density values, expected M = {m}",
                    path.display(),
                    values.len()
                )));
            }
            let mu = PeriodicDensity::new(values);
            mu.check(1e-6, 0.0)?;
            mu
        }
    })
}

/// Pseudo-CDF of the initial datum on an `m`-point grid, anchored at `F(0) = 0`.
pub fn initial_cdf(datum: &InitialDatum, m: usize) -> Result<PseudoCDF, RunError> {
    if let InitialDatum::OneAtom = datum {
        // unit atom at π; right-continuous
        let h = grid_step(m);
        return Ok(PseudoCDF::new((0..m).map(|j| if j as f64 * h >= PI { 1.0 } else { 0.0 }).collect(), 1.0)?);
    }
    let mu = initial_density(datum, m)?;
    let f = SpectralWorkspace::new(m, 0.0)?.primitive(&mu)?;
    if f.is_nondecreasing() {
        Ok(f)
    } else {
        // sharp data can ring spectrally; the rectangle sum is monotone by construction
        Ok(PseudoCDF::from_density_cumulative(&mu))
    }
}

/// Angles `θ_i ∈ [0, 2π)` with `F(θ_i) = (i + ½)/N`.
pub fn quantile_positions(f: &PseudoCDF, n: usize) -> Vec<f64> {
    let m = f.len() as i64;
    let h = grid_step(f.len());
    let base = f.at(0);
    let w = f.winding();
    let mut j = 0i64;
    (0..n)
        .map(|i| {
            let level = base + w * (i as f64 + 0.5) / n as f64;
            while j + 1 < m && f.at(j + 1) < level {
                j += 1;
            }
            let (lo, hi) = (f.at(j), f.at(j + 1));
            let frac = if hi > lo { ((level - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
            (j as f64 + frac) * h
        })
        .collect()
}

fn initial_configuration(datum: &InitialDatum, n: usize, m: usize) -> Result<LiftedConfiguration, RunError> {
    match datum {
        InitialDatum::EquallySpaced => Ok(LiftedConfiguration::equally_spaced(n, 0.0)),
        InitialDatum::OneAtom => Err(RunError::Input("particles cannot start from a single atom".into())),
        InitialDatum::Csv(path) => {
            let mut x = csv_values(path)?;
            if x.len() != n {
                return Err(RunError::Input(format!("{} holds {} angles, expected N = {n}", path.display(), x.len())));
            }
            x.iter_mut().for_each(|a| *a = a.rem_euclid(TAU));
            x.sort_by(f64::total_cmp);
            Ok(LiftedConfiguration::from_positions(x, 0.0)?)
        }
        _ => Ok(LiftedConfiguration::from_positions(quantile_positions(&initial_cdf(datum, m)?, n), 0.0)?),
    }
}

fn initial_unitary(datum: &InitialDatum, n: usize) -> Result<UnitaryMatrix, RunError> {
    let phases = match datum {
        InitialDatum::OneAtom => vec![PI; n],
        _ => initial_configuration(datum, n, QUANTILE_GRID)?.sorted_angles(),
    };
    Ok(UnitaryMatrix::from_phases(&phases))
}

/// Pseudo-CDF of a lifted configuration: each particle counts once per
/// periodic copy at or left of `θ`, so mass that crossed `0` keeps its winding.
pub fn lifted_cdf(positions: &[f64], m: usize) -> PseudoCDF {
    let h = grid_step(m);
    let n = positions.len() as f64;
    let values = (0..m)
        .map(|j| {
            let theta = j as f64 * h;
            positions.iter().map(|&x| ((theta - x) / TAU).floor() + 1.0).sum::<f64>() / n
        })
        .collect();
    PseudoCDF::new_unchecked(values, 1.0)
}

/// Pointwise mean of pseudo-CDFs on a common grid.
pub fn average_cdfs(cdfs: &[PseudoCDF]) -> PseudoCDF {
    let m = cdfs[0].len();
    let mut acc = vec![0.0; m];
    for c in cdfs {
        for (a, v) in acc.iter_mut().zip(c.values()) {
            *a += v;
        }
    }
    let k = cdfs.len() as f64;
    PseudoCDF::new_unchecked(acc.into_iter().map(|a| a / k).collect(), 1.0)
}

fn indexed_header(first: &str, prefix: &str, n: usize) -> Vec<String> {
    std::iter::once(first.to_string()).chain((0..n).map(|i| format!("{prefix}{i}"))).collect()
}

fn rows_with_time<'a>(times: &'a [f64], states: impl Iterator<Item = &'a [f64]>) -> Vec<Vec<f64>> {
    times
        .iter()
        .zip(states)
        .map(|(t, s)| std::iter::once(*t).chain(s.iter().copied()).collect())
        .collect()
}

fn write_table(out: &mut OutputDir, name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<(), RunError> {
    out.write_csv(name, header, rows.iter().map(|r| r.as_slice()))
        .map_err(io_err(format!("writing {name}")))
}

fn write_cdf_table(out: &mut OutputDir, columns: &[(String, &PseudoCDF)]) -> Result<(), RunError> {
    let m = columns[0].1.len();
    let h = grid_step(m);
    let header: Vec<String> = std::iter::once("theta".to_string()).chain(columns.iter().map(|(n, _)| n.clone())).collect();
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|j| std::iter::once(j as f64 * h).chain(columns.iter().map(|(_, c)| c.values()[j])).collect())
        .collect();
    write_table(out, CDF_FILE, &header, &rows)
}

fn run_seeds<T: Send>(
    config: &ExperimentConfig,
    f: impl Fn(u64) -> Result<T, DysonError> + Sync,
) -> Result<Vec<T>, RunError> {
    (0..config.runs as u64)
        .into_par_iter()
        .map(|r| f(config.seed.wrapping_add(r)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(RunError::from)
}

fn run_particles(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let n = config.n[0];
    let params = sde_parameters(config, n)?;
    let dt = config.dt.unwrap_or(DEFAULT_DT);
    let start = initial_configuration(&config.initial, n, QUANTILE_GRID)?;
    let runs: Vec<ParticleTrajectory> =
        run_seeds(config, |seed| simulate(&start, &params, config.t_end, dt, seed, config.record_every))?;

    let first = &runs[0];
    let rows = rows_with_time(&first.times, first.states.iter().map(|s| s.positions()));
    write_table(out, TRAJECTORY_FILE, &indexed_header("t", "x", n), &rows)?;

    let m = config.m.unwrap_or(DEFAULT_CDF_GRID);
    // phases mod 2π, comparable with the matrix channel
    let cdfs: Vec<PseudoCDF> = runs.iter().map(|r| EmpiricalCdf::new(r.final_state()).on_grid(m)).collect();
    let mean = average_cdfs(&cdfs);
    write_cdf_table(out, &[("F".to_string(), &mean)])?;

    let rejected: u64 = runs.iter().map(|r| r.rejected_steps).sum();
    let min_gap = runs.iter().map(|r| r.min_gap()).fold(f64::INFINITY, f64::min);
    let mut results = Map::new();
    results.insert("N".into(), json!(n));
    results.insert("alpha".into(), json!(params.alpha));
    results.insert("beta".into(), json!(params.beta));
    results.insert("dt".into(), json!(dt));
    results.insert("runs".into(), json!(config.runs));
    results.insert("min_gap".into(), json!(min_gap));
    results.insert("trajectory_file".into(), json!(TRAJECTORY_FILE));
    results.insert("cdf_file".into(), json!(CDF_FILE));
    let mut r = ChannelResult::new(results);
    r.rejected_steps = rejected;
    Ok(r)
}

fn run_matrix(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let n = config.n[0];
    let h = config.dt.unwrap_or(DEFAULT_DT);
    let u0 = initial_unitary(&config.initial, n)?;
    let runs: Vec<MatrixTrajectory> =
        run_seeds(config, |seed| simulate_matrix(n, config.t_end, h, seed, config.record_every, Some(u0.clone())))?;

    let first = &runs[0];
    let rows = rows_with_time(&first.times, first.phases.iter().map(|p| p.as_slice()));
    write_table(out, TRAJECTORY_FILE, &indexed_header("t", "phi", n), &rows)?;

    let m = config.m.unwrap_or(DEFAULT_CDF_GRID);
    let cdfs: Vec<PseudoCDF> = runs
        .iter()
        .map(|r| EmpiricalCdf::from_angles(r.phases.last().expect("initial phases recorded")).on_grid(m))
        .collect();
    let mean = average_cdfs(&cdfs);
    write_cdf_table(out, &[("F".to_string(), &mean)])?;

    let defect = runs.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    let mut results = Map::new();
    results.insert("N".into(), json!(n));
    results.insert("h".into(), json!(h));
    results.insert("runs".into(), json!(config.runs));
    results.insert("max_unitarity_defect".into(), json!(defect));
    results.insert("trajectory_file".into(), json!(TRAJECTORY_FILE));
    results.insert("cdf_file".into(), json!(CDF_FILE));
    Ok(ChannelResult::new(results))
}

fn density_options(config: &ExperimentConfig) -> DensitySolverOptions {
    let d = DensitySolverOptions::default();
    DensitySolverOptions {
        cfl: config.cfl.unwrap_or(d.cfl),
        max_dt: config.dt.unwrap_or(d.max_dt),
        record_interval: config.record_interval,
        ..d
    }
}

fn primitive_options(config: &ExperimentConfig) -> PrimitiveSolverOptions {
    let d = PrimitiveSolverOptions::default();
    PrimitiveSolverOptions {
        cfl: config.cfl.unwrap_or(d.cfl),
        max_dt: config.dt.unwrap_or(d.max_dt),
        record_interval: config.record_interval,
    }
}

/// Writes the series CSV of a bound report.
pub fn write_series(out: &mut OutputDir, report: &BoundReport) -> Result<(), RunError> {
    let s = &report.series;
    let mut header: Vec<String> = ["t", "M", "m", "V", "I", "D"].iter().map(|h| h.to_string()).collect();
    header.extend(s.lp.iter().map(|(p, _)| format!("lp_{p}")));
    header.push("dmax".into());
    let rows: Vec<Vec<f64>> = (0..s.t.len())
        .map(|k| {
            let mut row = vec![s.t[k], s.max[k], s.min[k], s.amplitude[k], s.entropy[k], s.dissipation[k]];
            row.extend(s.lp.iter().map(|(_, v)| v[k]));
            row.push(s.dmax[k]);
            row
        })
        .collect();
    write_table(out, SERIES_FILE, &header, &rows)
}

fn report_result(out: &mut OutputDir, times: &[f64], states: &[PeriodicDensity]) -> Result<(BoundReport, bool), RunError> {
    let report = bound_report(times, states, &ReportOptions::default())?;
    write_series(out, &report)?;
    let failed: Vec<&str> = report.bounds.iter().filter(|b| !b.passed).map(|b| b.name.as_str()).collect();
    if !failed.is_empty() {
        log::warn!("bounds violated: {}", failed.join(", "));
    }
    Ok((report.clone(), !failed.is_empty()))
}

fn run_density(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let m = config.m.expect("validated");
    let mu0 = initial_density(&config.initial, m)?;
    let epsilon = config.epsilon.unwrap_or_else(|| SpectralWorkspace::default_viscosity(m));
    let traj = solve_density(&mu0, config.t_end, epsilon, density_options(config))?;
    let rows = rows_with_time(&traj.times, traj.states.iter().map(|s| s.values()));
    write_table(out, TRAJECTORY_FILE, &indexed_header("t", "mu", m), &rows)?;

    let mut results = Map::new();
    results.insert("M".into(), json!(m));
    results.insert("epsilon".into(), json!(epsilon));
    results.insert("steps".into(), json!(traj.steps));
    results.insert("min_value".into(), json!(traj.min_value));
    results.insert("final_mass".into(), json!(traj.final_state().mass()));
    results.insert("trajectory_file".into(), json!(TRAJECTORY_FILE));
    let mut r = ChannelResult::new(results);
    if config.report {
        let (report, violation) = report_result(out, &traj.times, &traj.states)?;
        r.report = Some(report);
        r.violation = violation;
    }
    Ok(r)
}

fn run_primitive(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let m = config.m.expect("validated");
    let f0 = initial_cdf(&config.initial, m)?;
    let f0 = PseudoCDF::new(f0.values().to_vec(), 1.0)?;
    let traj = solve_primitive(&f0, config.t_end, primitive_options(config))?;
    let rows = rows_with_time(&traj.times, traj.states.iter().map(|s| s.values()));
    write_table(out, TRAJECTORY_FILE, &indexed_header("t", "F", m), &rows)?;

    let monotone = traj.states.iter().all(|s| s.is_nondecreasing());
    let mut results = Map::new();
    results.insert("M".into(), json!(m));
    results.insert("steps".into(), json!(traj.steps));
    results.insert("winding".into(), json!(traj.final_state().winding()));
    results.insert("monotone".into(), json!(monotone));
    results.insert("trajectory_file".into(), json!(TRAJECTORY_FILE));
    let mut r = ChannelResult::new(results);
    r.violation = !monotone;
    Ok(r)
}

/// Averaged particle CDFs at `T` against the primitive solution, one entry per `N`.
fn run_compare(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let m = config.m.unwrap_or(DEFAULT_CDF_GRID);
    let dt = config.dt.unwrap_or(DEFAULT_DT);
    let f0 = initial_cdf(&config.initial, m)?;
    let f0 = PseudoCDF::new(f0.values().to_vec(), 1.0)?;
    let reference = solve_primitive(&f0, config.t_end, primitive_options(config))?.final_state().clone();
    let quantile_cdf = initial_cdf(&config.initial, QUANTILE_GRID.max(m))?;

    let mut ns = config.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut means = Vec::new();
    let mut distances = Map::new();
    let mut errors = Vec::new();
    let mut rejected = 0;
    for &n in &ns {
        let params = sde_parameters(config, n)?;
        let start = match config.initial {
            InitialDatum::EquallySpaced => LiftedConfiguration::equally_spaced(n, 0.0),
            _ => LiftedConfiguration::from_positions(quantile_positions(&quantile_cdf, n), 0.0)?,
        };
        let finals: Vec<(PseudoCDF, u64)> = run_seeds(config, |seed| {
            let t = simulate(&start, &params, config.t_end, dt, seed, usize::MAX)?;
            Ok((lifted_cdf(t.final_state().positions(), m), t.rejected_steps))
        })?;
        rejected += finals.iter().map(|f| f.1).sum::<u64>();
        let cdfs: Vec<PseudoCDF> = finals.into_iter().map(|f| f.0).collect();
        let mean = average_cdfs(&cdfs);
        let d = cdf_distance(&mean, &reference)?;
        log::info!("N = {n}: sup-distance {d}");
        distances.insert(n.to_string(), json!(d));
        errors.push(d);
        means.push((format!("N{n}"), mean));
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);

    let mut columns = vec![("reference".to_string(), &reference)];
    columns.extend(means.iter().map(|(name, c)| (name.clone(), c)));
    write_cdf_table(out, &columns)?;

    let mut results = Map::new();
    results.insert("M".into(), json!(m));
    results.insert("dt".into(), json!(dt));
    results.insert("runs".into(), json!(config.runs));
    results.insert("sup_distance".into(), Value::Object(distances));
    results.insert("error_decreases_with_N".into(), json!(decreasing));
    results.insert("cdf_file".into(), json!(CDF_FILE));
    let mut r = ChannelResult::new(results);
    r.rejected_steps = rejected;
    r.violation = !decreasing;
    Ok(r)
}

/// Splits a saved density trajectory (`t, mu0, …`) into times and states.
pub fn density_trajectory_from_table(table: &Table) -> Result<(Vec<f64>, Vec<PeriodicDensity>), RunError> {
    if table.header.first().map(String::as_str) != Some("t") || table.header.len() < 2 {
        return Err(RunError::Input("density trajectory must have columns t, mu0, mu1, …".into()));
    }
    if table.rows.is_empty() {
        return Err(RunError::Input("density trajectory has no rows".into()));
    }
    let times = table.rows.iter().map(|r| r[0]).collect();
    let states = table.rows.iter().map(|r| PeriodicDensity::new(r[1..].to_vec())).collect();
    Ok((times, states))
}

fn run_report(config: &ExperimentConfig, out: &mut OutputDir) -> Result<ChannelResult, RunError> {
    let input = config.input.as_ref().expect("validated");
    let table = read_csv(input).map_err(io_err(format!("reading {}", input.display())))?;
    let (times, states) = density_trajectory_from_table(&table)?;
    let (report, violation) = report_result(out, &times, &states)?;
    let mut results = Map::new();
    results.insert("input".into(), json!(input.display().to_string()));
    results.insert("records".into(), json!(times.len()));
    results.insert("all_passed".into(), json!(!violation));
    let mut r = ChannelResult::new(results);
    r.report = Some(report);
    r.violation = violation;
    Ok(r)
}

fn gnuplot_script(config: &ExperimentConfig, out: &OutputDir) -> String {
    let has = |f: &str| out.written().iter().any(|w| w == f);
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n");
    if has(CDF_FILE) {
        let cols = match config.channel {
            Channel::Compare => config.n.len() + 2,
            _ => 2,
        };
        s.push_str("set output 'cdf.png'\nset xlabel 'theta'\n");
        let plots: Vec<String> = (2..=cols).map(|c| format!("'{CDF_FILE}' using 1:{c} with lines")).collect();
        s.push_str(&format!("plot {}\n", plots.join(", ")));
    }
    if has(SERIES_FILE) {
        s.push_str("set output 'series.png'\nset xlabel 't'\nset logscale y\n");
        s.push_str(&format!(
            "plot '{SERIES_FILE}' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines, '' using 1:5 with lines\n"
        ));
        s.push_str("unset logscale y\n");
    }
    if has(TRAJECTORY_FILE) {
        s.push_str("set output 'trajectory.png'\nset xlabel 't'\n");
        match config.channel {
            Channel::Particles | Channel::Matrix => {
                let n = config.n[0];
                s.push_str(&format!("plot for [i=2:{}] '{TRAJECTORY_FILE}' using 1:i with lines notitle\n", n + 1));
            }
            _ => {
                // nodal values at four quarter points over time
                let m = config.m.unwrap_or(4);
                let cols: Vec<String> =
                    (0..4).map(|q| format!("'{TRAJECTORY_FILE}' using 1:{} with lines", 2 + q * m / 4)).collect();
                s.push_str(&format!("plot {}\n", cols.join(", ")));
            }
        }
    }
    s
}
