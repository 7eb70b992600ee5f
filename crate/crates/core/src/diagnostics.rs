//! Free entropy, dissipation, lower-bound lemmas and envelope reports for
//! density trajectories.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{grid_step, FourierCoefficients, PeriodicDensity};
use crate::error::{DysonError, Result};
use crate::primitive::a0_periodic;
use crate::spectral::SpectralWorkspace;

/// Coefficients above this magnitude at the highest requested mode suggest aliasing.
pub const ALIASING_THRESHOLD: f64 = 1e-6;

fn workspace(m: usize) -> Result<SpectralWorkspace> {
    SpectralWorkspace::new(m, 0.0)
}

fn coefficients_raw(ws: &SpectralWorkspace, values: &[f64], n_max: usize) -> Vec<Complex64> {
    let m = values.len();
    let h = grid_step(m);
    let spec = ws.forward(values);
    (-(n_max as i64)..=n_max as i64)
        .map(|n| spec[n.rem_euclid(m as i64) as usize] * h)
        .collect()
}

/// `c_n = Δθ Σ_j e^{−inθ_j} μ_j` for `|n| ≤ n_max`.
pub fn fourier_coefficients(mu: &PeriodicDensity, n_max: usize) -> Result<FourierCoefficients> {
    let m = mu.len();
    if 2 * n_max >= m {
        return Err(DysonError::Precondition(format!("n_max = {n_max} must be below M/2 = {}", m / 2)));
    }
    let ws = workspace(m)?;
    let c = coefficients_raw(&ws, mu.values(), n_max);
    let top = c[0].norm();
    let aliasing = n_max > 0 && top > ALIASING_THRESHOLD;
    if aliasing {
        log::warn!("|c_{n_max}| = {top:e} exceeds {ALIASING_THRESHOLD:e}; the grid may under-resolve the density");
    }
    FourierCoefficients::new(n_max, c, aliasing)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeEntropy {
    pub value: f64,
    /// Contribution of the highest retained mode, a proxy for truncation error.
    pub tail_estimate: f64,
}

fn entropy_from_values(ws: &SpectralWorkspace, values: &[f64], n_max: usize) -> FreeEntropy {
    let c = coefficients_raw(ws, values, n_max);
    let mut value = 0.0;
    for n in 1..=n_max {
        value += c[n_max + n].norm_sqr() / n as f64;
    }
    let tail_estimate = if n_max > 0 { c[2 * n_max].norm_sqr() / n_max as f64 } else { 0.0 };
    FreeEntropy { value, tail_estimate }
}

/// `I(μ) = ½ Σ_{n≠0} |c_n|²/|n|` truncated at `n_max`.
pub fn free_entropy(mu: &PeriodicDensity, n_max: usize) -> Result<FreeEntropy> {
    let m = mu.len();
    if 2 * n_max >= m {
        return Err(DysonError::Precondition(format!("n_max = {n_max} must be below M/2 = {}", m / 2)));
    }
    Ok(entropy_from_values(&workspace(m)?, mu.values(), n_max))
}

/// `−∬ ln|sin((x−y)/2)| μ(x)μ(y) − ln2·c₀²` by direct quadrature.
///
/// The density is trigonometrically interpolated onto a grid `refine` times
/// finer; the logarithmic singularity is removed by subtracting `μ(x)` and
/// adding back `μ(x)² ∫ ln|sin(s/2)| ds = −2π ln 2 · μ(x)²`.
pub fn free_entropy_quadrature(values: &[f64], refine: usize) -> Result<f64> {
    let m = values.len();
    let ws = workspace(m)?;
    let fine_m = m * refine.max(1);
    let fine_ws = workspace(fine_m)?;
    let spec = ws.forward(values);
    let mut padded = vec![Complex64::new(0.0, 0.0); fine_m];
    let scale = fine_m as f64 / m as f64;
    for k in 0..m {
        let n = ws.mode(k);
        if 2 * n.unsigned_abs() as usize == m {
            continue;
        }
        padded[n.rem_euclid(fine_m as i64) as usize] = spec[k] * scale;
    }
    let f = fine_ws.inverse(padded);
    let h = grid_step(fine_m);
    let kernel: Vec<f64> = (0..fine_m)
        .map(|k| if k == 0 { 0.0 } else { (0.5 * k as f64 * h).sin().abs().ln() })
        .collect();
    let mass = h * f.iter().sum::<f64>();
    let mut double = 0.0;
    for i in 0..fine_m {
        let mut inner = 0.0;
        for (k, kv) in kernel.iter().enumerate().skip(1) {
            inner += kv * (f[(i + fine_m - k) % fine_m] - f[i]);
        }
        double += f[i] * (h * inner - TAU * LN_2 * f[i]);
    }
    Ok(-h * double - LN_2 * mass * mass)
}

/// `(∫ H[μ]² μ, (4π²/3)(∫μ³ − 1/(4π²)))` with the unnormalized `H`.
pub fn entropy_dissipation(mu: &PeriodicDensity) -> Result<(f64, f64)> {
    let ws = workspace(mu.len())?;
    Ok(dissipation_with(&ws, mu.values()))
}

fn dissipation_with(ws: &SpectralWorkspace, values: &[f64]) -> (f64, f64) {
    let h = grid_step(values.len());
    let hv = ws.hilbert_transform(values).expect("grid size checked by workspace");
    let lhs = h * hv.iter().zip(values).map(|(a, b)| a * a * b).sum::<f64>();
    let cubic = h * values.iter().map(|v| v * v * v).sum::<f64>();
    (lhs, 4.0 * PI * PI / 3.0 * (cubic - 1.0 / (4.0 * PI * PI)))
}

/// Slack (`lhs − rhs`) of each lower-bound lemma at the relevant extremal node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRecord {
    /// `A₀μ(x_max) ≥ (2/π²)(2πM − ‖μ‖₁)`.
    pub constantin_vicol: f64,
    /// `A₀μ(x_max) ≥ 2(M−m) cot(π(μ̄−m)/(2(M−m)))`.
    pub cotangent_bound: f64,
    /// `4𝒱 A₀[g](x₀) ≥ g(x₀)²` at the maximum of `g = ∂μ` and of `−g`.
    pub derivative_max_principle: f64,
    /// `32𝒱 A₀[g](x₀) ≥ H[g](x₀)²` at the same nodes.
    pub hilbert_derivative: f64,
}

impl LowerBoundRecord {
    pub fn min_slack(&self) -> f64 {
        self.constantin_vicol
            .min(self.cotangent_bound)
            .min(self.derivative_max_principle)
            .min(self.hilbert_derivative)
    }

    pub fn holds(&self) -> bool {
        self.min_slack() >= -1e-6
    }
}

pub fn lower_bound_checks(mu: &PeriodicDensity) -> Result<LowerBoundRecord> {
    let m_grid = mu.len();
    let ws = workspace(m_grid)?;
    let v = mu.values();
    let h = grid_step(m_grid);
    let a0 = a0_periodic(v)?;
    let (big, small) = (mu.max(), mu.min());
    let amp = big - small;
    let jmax = mu.argmax();
    let l1 = h * v.iter().map(|x| x.abs()).sum::<f64>();
    let constantin_vicol = a0[jmax] - 2.0 / (PI * PI) * (TAU * big - l1);
    let mean = mu.mass() / TAU;
    let cotangent_bound = if amp > 0.0 {
        let arg = PI * (mean - small) / (2.0 * amp);
        a0[jmax] - 2.0 * amp / arg.tan()
    } else {
        a0[jmax]
    };

    let g = ws.derivative(v)?;
    let hg = ws.hilbert_transform(&g)?;
    let a0g = a0_periodic(&g)?;
    let (mut dmp, mut hil) = (f64::INFINITY, f64::INFINITY);
    for sign in [1.0, -1.0] {
        let signed: Vec<f64> = g.iter().map(|x| sign * x).collect();
        let j = crate::circle::argmax(&signed);
        let a = sign * a0g[j];
        dmp = dmp.min(4.0 * amp * a - g[j] * g[j]);
        hil = hil.min(32.0 * amp * a - hg[j] * hg[j]);
    }
    Ok(LowerBoundRecord { constantin_vicol, cotangent_bound, derivative_max_principle: dmp, hilbert_derivative: hil })
}

/// Outcome of one envelope or invariant over a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub passed: bool,
    /// Smallest margin seen (relative for envelopes, absolute for invariants).
    pub worst_margin: f64,
    pub worst_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSeries {
    pub t: Vec<f64>,
    pub max: Vec<f64>,
    pub min: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub entropy: Vec<f64>,
    pub dissipation: Vec<f64>,
    /// `(p, ‖μ(t)‖_p)` series.
    pub lp: Vec<(f64, Vec<f64>)>,
    pub dmax: Vec<f64>,
    pub mass: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub series: BoundSeries,
    pub bounds: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn all_passed(&self) -> bool {
        self.bounds.iter().all(|b| b.passed)
    }

    pub fn bound(&self, name: &str) -> Option<&BoundCheck> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub lp_exponents: Vec<f64>,
    /// Relative slack allowed on theoretical envelopes.
    pub envelope_tolerance: f64,
    /// Allowed per-step increase of the max and decrease of the min.
    pub extremum_tolerance: f64,
    /// Allowed per-step increase of `‖μ‖_p` and `I`.
    pub monotone_tolerance: f64,
    pub mass_tolerance: f64,
    /// Earliest time at which the short-time `L∞` and `L^p` envelopes are checked.
    pub short_time_start: f64,
    /// Earliest time at which the long-time envelope is checked.
    pub long_time_start: f64,
    /// Anchor time for fitting the derivative-decay constant.
    pub derivative_anchor: f64,
    /// Multiplicative slack on the amplitude decay envelope.
    pub amplitude_factor: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            lp_exponents: vec![2.0, 3.0, 5.0],
            envelope_tolerance: 1e-2,
            extremum_tolerance: 1e-6,
            monotone_tolerance: 1e-8,
            mass_tolerance: 1e-10,
            short_time_start: 0.05,
            long_time_start: 0.5,
            derivative_anchor: 0.2,
            amplitude_factor: 1.01,
        }
    }
}

/// `1/(2√(1−e^{−t}))`.
pub fn linf_envelope(t: f64) -> f64 {
    0.5 / (-(-t).exp_m1()).sqrt()
}

/// `π/√(1−e^{−t})`.
pub fn lp_envelope(t: f64) -> f64 {
    PI / (-(-t).exp_m1()).sqrt()
}

/// `(1/2π)/(1−e^{−2t/π²})`.
pub fn long_time_envelope(t: f64) -> f64 {
    1.0 / (TAU * -(-2.0 * t / (PI * PI)).exp_m1())
}

/// `(1/2π)/(1 + (1/(2π m₀) − 1) e^{−2t/π²})`.
pub fn min_lower_envelope(t: f64, m0: f64) -> f64 {
    1.0 / (TAU * (1.0 + (1.0 / (TAU * m0) - 1.0) * (-2.0 * t / (PI * PI)).exp()))
}

struct Tracker {
    name: String,
    tolerance: f64,
    worst: f64,
    time: f64,
    seen: bool,
}

impl Tracker {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self { name: name.into(), tolerance, worst: f64::INFINITY, time: 0.0, seen: false }
    }

    fn observe(&mut self, margin: f64, t: f64) {
        self.seen = true;
        if margin < self.worst || margin.is_nan() {
            self.worst = margin;
            self.time = t;
        }
    }

    fn finish(self) -> Option<BoundCheck> {
        self.seen.then(|| BoundCheck {
            passed: self.worst >= -self.tolerance,
            name: self.name,
            worst_margin: self.worst,
            worst_time: self.time,
        })
    }
}

/// Relative margin `(bound − value)/|bound|`.
fn rel(bound: f64, value: f64) -> f64 {
    (bound - value) / bound.abs().max(f64::MIN_POSITIVE)
}

/// Evaluates every envelope and invariant along a recorded density trajectory.
pub fn bound_report(times: &[f64], states: &[PeriodicDensity], options: &ReportOptions) -> Result<BoundReport> {
    if times.len() != states.len() || times.is_empty() {
        return Err(DysonError::Shape(format!("{} times for {} states", times.len(), states.len())));
    }
    let m_grid = states[0].len();
    if states.iter().any(|s| s.len() != m_grid) {
        return Err(DysonError::Shape("states use different grids".into()));
    }
    let ws = workspace(m_grid)?;
    let n_max = m_grid / 2 - 1;

    let mut series = BoundSeries {
        t: times.to_vec(),
        max: Vec::new(),
        min: Vec::new(),
        amplitude: Vec::new(),
        entropy: Vec::new(),
        dissipation: Vec::new(),
        lp: options.lp_exponents.iter().map(|&p| (p, Vec::new())).collect(),
        dmax: Vec::new(),
        mass: Vec::new(),
    };
    for s in states {
        let (big, small) = (s.max(), s.min());
        series.max.push(big);
        series.min.push(small);
        series.amplitude.push(big - small);
        series.entropy.push(entropy_from_values(&ws, s.values(), n_max).value);
        series.dissipation.push(dissipation_with(&ws, s.values()).0);
        for (p, values) in series.lp.iter_mut() {
            values.push(s.lp_norm(*p));
        }
        let d = ws.derivative(s.values())?;
        series.dmax.push(d.iter().map(|x| x.abs()).fold(0.0, f64::max));
        series.mass.push(s.mass());
    }

    let mut bounds = Vec::new();
    let mut push = |t: Tracker| {
        if let Some(b) = t.finish() {
            bounds.push(b);
        }
    };

    let mut mass = Tracker::new("mass", 0.0);
    for (t, mv) in times.iter().zip(&series.mass) {
        mass.observe(options.mass_tolerance - (mv - 1.0).abs(), *t);
    }
    push(mass);

    let mut max_mono = Tracker::new("max_nonincreasing", options.extremum_tolerance);
    let mut min_mono = Tracker::new("min_nondecreasing", options.extremum_tolerance);
    let mut ent_mono = Tracker::new("entropy_nonincreasing", options.monotone_tolerance);
    let mut lp_mono: Vec<Tracker> = options
        .lp_exponents
        .iter()
        .map(|p| Tracker::new(format!("lp{p}_nonincreasing"), options.monotone_tolerance))
        .collect();
    for k in 1..times.len() {
        let t = times[k];
        max_mono.observe(series.max[k - 1] - series.max[k], t);
        min_mono.observe(series.min[k] - series.min[k - 1], t);
        ent_mono.observe(series.entropy[k - 1] - series.entropy[k], t);
        for (tr, (_, values)) in lp_mono.iter_mut().zip(&series.lp) {
            tr.observe(values[k - 1] - values[k], t);
        }
    }
    push(max_mono);
    push(min_mono);
    push(ent_mono);
    lp_mono.into_iter().for_each(&mut push);

    let tol = options.envelope_tolerance;
    let mut linf = Tracker::new("linf_regularization", tol);
    let mut lp_env: Vec<Tracker> = options
        .lp_exponents
        .iter()
        .map(|p| Tracker::new(format!("lp{p}_envelope"), tol))
        .collect();
    let mut long = Tracker::new("long_time", tol);
    for (k, &t) in times.iter().enumerate() {
        if t >= options.short_time_start && t > 0.0 {
            linf.observe(rel(linf_envelope(t), series.max[k]), t);
            for (tr, (_, values)) in lp_env.iter_mut().zip(&series.lp) {
                tr.observe(rel(lp_envelope(t), values[k]), t);
            }
        }
        if t >= options.long_time_start && t > 0.0 {
            long.observe(rel(long_time_envelope(t), series.max[k]), t);
        }
    }
    push(linf);
    lp_env.into_iter().for_each(&mut push);
    push(long);

    let m0 = series.min[0];
    let v0 = series.amplitude[0];
    let t0 = times[0];
    if m0 > 0.0 {
        let mut low = Tracker::new("min_lower_bound", tol);
        let mut amp = Tracker::new("amplitude_decay", 0.0);
        for (k, &t) in times.iter().enumerate() {
            let bound = min_lower_envelope(t - t0, m0);
            low.observe((series.min[k] - bound) / bound, t);
            let env = v0 * (-4.0 * m0 * (t - t0)).exp() * options.amplitude_factor;
            let margin = if env > 0.0 { rel(env, series.amplitude[k]) } else { -series.amplitude[k] };
            amp.observe(margin, t);
        }
        push(low);
        push(amp);
    }

    if let Some(anchor) = times.iter().position(|&t| t - t0 >= options.derivative_anchor) {
        let rate = m0.max(0.0);
        let c1 = series.dmax[anchor] * (rate * (times[anchor] - t0)).exp();
        let mut der = Tracker::new("derivative_decay", tol);
        for k in anchor..times.len() {
            let env = c1 * (-rate * (times[k] - t0)).exp();
            let margin = if env > 0.0 { rel(env, series.dmax[k]) } else { -series.dmax[k] };
            der.observe(margin, times[k]);
        }
        push(der);
    }

    Ok(BoundReport { series, bounds })
}
