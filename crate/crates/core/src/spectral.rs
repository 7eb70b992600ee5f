//! Fourier multipliers on the circle and a pseudo-spectral solver for
//! `∂_t μ − ε ∂_θθ μ + ∂_θ(μ H[μ]) = 0`.
//!
//! Conventions: `H` is the unnormalized circular Hilbert transform with
//! multiplier `−2πi sign(n)`, and `A₀ = H ∘ ∂_θ` has multiplier `2π|n|`.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::circle::{grid_step, PeriodicDensity, PseudoCDF};
use crate::error::{DysonError, Result};

/// Densities may dip this far below zero before the solve is aborted.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

/// FFT plans and multiplier tables for one power-of-two grid.
#[derive(Clone)]
pub struct SpectralWorkspace {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Highest mode kept by the 2/3 rule.
    cutoff: usize,
    epsilon: f64,
}

impl std::fmt::Debug for SpectralWorkspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralWorkspace")
            .field("m", &self.m)
            .field("cutoff", &self.cutoff)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl SpectralWorkspace {
    pub fn new(m: usize, epsilon: f64) -> Result<Self> {
        if m < 8 || !m.is_power_of_two() {
            return Err(DysonError::Shape(format!("spectral grid size must be a power of two >= 8, got {m}")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(DysonError::Domain(format!("viscosity must be nonnegative, got {epsilon}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            cutoff: m / 3,
            epsilon,
        })
    }

    /// Grid-scale viscosity `0.5 · 2π/M`.
    pub fn default_viscosity(m: usize) -> f64 {
        0.5 * grid_step(m)
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Signed mode number of FFT slot `k`; the Nyquist slot maps to `M/2`.
    pub fn mode(&self, k: usize) -> i64 {
        if k <= self.m / 2 {
            k as i64
        } else {
            k as i64 - self.m as i64
        }
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.m {
            return Err(DysonError::Shape(format!("grid function has {} points, workspace expects {}", u.len(), self.m)));
        }
        Ok(())
    }

    /// Unnormalized DFT `û_k = Σ_j u_j e^{−2πijk/M}`.
    pub fn forward(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`SpectralWorkspace::forward`], keeping the real part.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spectrum);
        let scale = 1.0 / self.m as f64;
        spectrum.into_iter().map(|z| z.re * scale).collect()
    }

    /// Applies the multiplier `symbol(n)`; the Nyquist mode is dropped for odd symbols.
    pub fn apply_multiplier(&self, u: &[f64], symbol: impl Fn(i64) -> Complex64) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let mut spec = self.forward(u);
        for (k, z) in spec.iter_mut().enumerate() {
            let n = self.mode(k);
            *z *= if 2 * n.unsigned_abs() as usize == self.m { symbol(n).re.into() } else { symbol(n) };
        }
        Ok(self.inverse(spec))
    }

    pub fn hilbert_transform(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.apply_multiplier(u, hilbert_symbol)
    }

    pub fn half_laplacian(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.apply_multiplier(u, |n| Complex64::new(TAU * n.abs() as f64, 0.0))
    }

    pub fn derivative(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.apply_multiplier(u, |n| Complex64::new(0.0, n as f64))
    }

    /// `ε ∂_θθ μ − ∂_θ(μ H[μ])`, conservative and 2/3-dealiased.
    pub fn dyson_rhs(&self, mu: &[f64]) -> Result<Vec<f64>> {
        self.check_len(mu)?;
        let spec = self.forward(mu);
        let nonlinear = self.transport_spectrum(&spec);
        let mut out = nonlinear;
        for (k, z) in out.iter_mut().enumerate() {
            let n = self.mode(k) as f64;
            *z -= self.epsilon * n * n * spec[k];
        }
        Ok(self.inverse(out))
    }

    /// Spectrum of `−∂_θ(μ H[μ])` from the spectrum of `μ`, truncated to the kept modes.
    fn transport_spectrum(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut mu_d = spec.to_vec();
        let mut h_d = spec.to_vec();
        for k in 0..self.m {
            let n = self.mode(k);
            if n.unsigned_abs() as usize > self.cutoff {
                mu_d[k] = Complex64::new(0.0, 0.0);
                h_d[k] = Complex64::new(0.0, 0.0);
            } else {
                h_d[k] *= hilbert_symbol(n);
            }
        }
        let mu_p = self.inverse(mu_d);
        let h_p = self.inverse(h_d);
        let flux: Vec<f64> = mu_p.iter().zip(&h_p).map(|(a, b)| a * b).collect();
        let mut f = self.forward(&flux);
        for (k, z) in f.iter_mut().enumerate() {
            let n = self.mode(k);
            *z = if n.unsigned_abs() as usize > self.cutoff { Complex64::new(0.0, 0.0) } else { -Complex64::new(0.0, n as f64) * *z };
        }
        f
    }

    /// Spectral primitive `F(θ) = ∫_0^θ μ` at the nodes, exact for band-limited `μ`.
    pub fn primitive(&self, mu: &PeriodicDensity) -> Result<PseudoCDF> {
        self.check_len(mu.values())?;
        let spec = self.forward(mu.values());
        let mean = spec[0].re / self.m as f64;
        let mut anti = spec;
        for (k, z) in anti.iter_mut().enumerate() {
            let n = self.mode(k);
            *z = if n == 0 || 2 * n.unsigned_abs() as usize == self.m { Complex64::new(0.0, 0.0) } else { *z / Complex64::new(0.0, n as f64) };
        }
        let g = self.inverse(anti);
        let h = grid_step(self.m);
        let values = g.iter().enumerate().map(|(j, v)| mean * j as f64 * h + v - g[0]).collect();
        Ok(PseudoCDF::new_unchecked(values, mean * TAU))
    }
}

fn hilbert_symbol(n: i64) -> Complex64 {
    Complex64::new(0.0, -TAU * n.signum() as f64)
}

/// Convenience wrapper building a workspace for a single transform.
pub fn hilbert_transform(u: &[f64]) -> Result<Vec<f64>> {
    SpectralWorkspace::new(u.len(), 0.0)?.hilbert_transform(u)
}

pub fn half_laplacian(u: &[f64]) -> Result<Vec<f64>> {
    SpectralWorkspace::new(u.len(), 0.0)?.half_laplacian(u)
}

pub fn dyson_rhs(mu: &PeriodicDensity, ws: &SpectralWorkspace) -> Result<Vec<f64>> {
    ws.dyson_rhs(mu.values())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySolverOptions {
    /// Safety factor applied to both step limits.
    pub cfl: f64,
    /// Upper bound on any single step.
    pub max_dt: f64,
    /// States are recorded at multiples of this time (every step when 0).
    pub record_interval: f64,
    /// A nodal value below `−positivity_tolerance` aborts the solve.
    pub positivity_tolerance: f64,
}

impl Default for DensitySolverOptions {
    fn default() -> Self {
        Self { cfl: 0.5, max_dt: 1e-2, record_interval: 0.0, positivity_tolerance: POSITIVITY_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PeriodicDensity>,
    pub epsilon: f64,
    pub steps: usize,
    /// Smallest nodal value seen over all steps.
    pub min_value: f64,
}

impl DensityTrajectory {
    pub fn final_state(&self) -> &PeriodicDensity {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// Stable step from the current state: transport CFL and the explicit `μ A₀[μ]` rate.
fn stable_dt(ws: &SpectralWorkspace, spec: &[Complex64], cfl: f64) -> f64 {
    let mut h = spec.to_vec();
    for (k, z) in h.iter_mut().enumerate() {
        *z *= hilbert_symbol(ws.mode(k));
    }
    let hv = ws.inverse(h);
    let mu = ws.inverse(spec.to_vec());
    let max_h = hv.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let max_mu = mu.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let transport = if max_h > 0.0 { grid_step(ws.m) / max_h } else { f64::INFINITY };
    let reaction = if max_mu > 0.0 { 1.0 / (PI * ws.cutoff as f64 * max_mu) } else { f64::INFINITY };
    cfl * transport.min(reaction)
}

/// ETD-RK2 integration of the viscous Dyson equation from `mu0` to `T`.
pub fn solve_density(
    mu0: &PeriodicDensity,
    t_end: f64,
    epsilon: f64,
    options: DensitySolverOptions,
) -> Result<DensityTrajectory> {
    let ws = SpectralWorkspace::new(mu0.len(), epsilon)?;
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(DysonError::Domain(format!("final time must be nonnegative, got {t_end}")));
    }
    if !(options.cfl > 0.0) || !(options.max_dt > 0.0) || !(options.record_interval >= 0.0) {
        return Err(DysonError::Domain("solver options must be positive".into()));
    }
    if mu0.min() < -options.positivity_tolerance {
        return Err(DysonError::PositivityLoss { time: 0.0, min_value: mu0.min() });
    }
    let m = ws.m;
    let mut spec = ws.forward(mu0.values());
    let mass_mode = spec[0];
    let lin: Vec<f64> = (0..m).map(|k| -epsilon * (ws.mode(k) as f64).powi(2)).collect();

    let mut t = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![mu0.clone()];
    let mut min_value = mu0.min();
    let mut steps = 0usize;
    let mut next_record = if options.record_interval > 0.0 { options.record_interval } else { f64::INFINITY };

    while t < t_end {
        let proposal = t + stable_dt(&ws, &spec, options.cfl).min(options.max_dt);
        let mut record = options.record_interval == 0.0;
        let mut t_next = proposal;
        if t_next >= next_record.min(t_end) - 1e-12 * t_end.max(1.0) {
            t_next = next_record.min(t_end);
            record = true;
        }
        if t_next >= next_record {
            next_record += options.record_interval;
        }
        let dt = t_next - t;
        let n0 = ws.transport_spectrum(&spec);
        let mut a = vec![Complex64::new(0.0, 0.0); m];
        for k in 0..m {
            let z = lin[k] * dt;
            a[k] = spec[k] * z.exp() + n0[k] * (phi1(z) * dt);
        }
        let na = ws.transport_spectrum(&a);
        for k in 0..m {
            let z = lin[k] * dt;
            spec[k] = a[k] + (na[k] - n0[k]) * (phi2(z) * dt);
        }
        spec[0] = mass_mode;
        t = t_next;
        steps += 1;

        let values = ws.inverse(spec.clone());
        let step_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        min_value = min_value.min(step_min);
        if !values.iter().all(|v| v.is_finite()) {
            return Err(DysonError::Numerical(format!("density solve diverged at t = {t}")));
        }
        if step_min < -options.positivity_tolerance {
            return Err(DysonError::PositivityLoss { time: t, min_value: step_min });
        }
        if record {
            times.push(t);
            states.push(PeriodicDensity::new(values));
        }
    }
    Ok(DensityTrajectory { times, states, epsilon, steps, min_value })
}
