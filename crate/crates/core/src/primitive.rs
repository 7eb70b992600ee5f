//! Monotone upwind scheme for the primitive equation
//! `∂_t F + (∂_θ F)₊ A₀[F] = 0` on nondecreasing `F` with `F(θ + 2π) = F(θ) + 1`.
//!
//! `A₀` is discretized by the periodic trapezoid rule applied to
//! `∫_T (2F(θ) − F(θ−s) − F(θ+s)) / (4 sin²(s/2)) ds`, with the `s = 0` node
//! replaced by the centred second difference. Every weight is positive, so the
//! explicit Euler update is a monotone map under the CFL condition.
//!
//! States are stored as `F_j = offset + j·winding/M + R_j` with periodic `R`.
//! The affine part cancels in every difference, which makes the scheme exact
//! on the uniform CDF and exactly equivariant under grid shifts.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::circle::{grid_step, PseudoCDF};
use crate::error::{DysonError, Result};

const PARALLEL_THRESHOLD: usize = 256;

/// Positive stencil weights `a_k`, `k = 1..=M/2`, so that
/// `A₀F_j ≈ Σ_k a_k (2F_j − F_{j−k} − F_{j+k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct A0Stencil {
    m: usize,
    weights: Vec<f64>,
}

impl A0Stencil {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(DysonError::Shape(format!("primitive grid size must be even and >= 4, got {m}")));
        }
        let h = grid_step(m);
        let half = m / 2;
        let mut weights: Vec<f64> = (1..=half)
            .map(|k| {
                let s = (0.5 * k as f64 * h).sin();
                let w = h / (4.0 * s * s);
                if k < half {
                    2.0 * w
                } else {
                    w
                }
            })
            .collect();
        weights[0] += 1.0 / h;
        Ok(Self { m, weights })
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    /// `a_k` for `k = 1..=M/2` (index `k − 1`).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Coefficient of `F_j` in the stencil, `2 Σ a_k`.
    pub fn diagonal(&self) -> f64 {
        2.0 * self.weights.iter().sum::<f64>()
    }

    /// Applies the stencil at node `j` to a periodic residual.
    fn apply(&self, r: &[f64], j: usize) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for (idx, a) in self.weights.iter().enumerate() {
            let k = idx + 1;
            let lo = r[(j + m - k) % m];
            let hi = r[(j + k) % m];
            acc += a * ((r[j] - lo) + (r[j] - hi));
        }
        acc
    }
}

/// Quadrature value of `A₀[F]` at node `j`, using the winding extension.
pub fn a0_quadrature(f: &PseudoCDF, j: usize) -> Result<f64> {
    let stencil = A0Stencil::new(f.len())?;
    if j >= f.len() {
        return Err(DysonError::Shape(format!("node {j} outside grid of size {}", f.len())));
    }
    let r = residual(f);
    Ok(stencil.apply(&r, j))
}

/// Quadrature `A₀` of a periodic grid function (no winding) at every node.
pub fn a0_periodic(values: &[f64]) -> Result<Vec<f64>> {
    let stencil = A0Stencil::new(values.len())?;
    Ok((0..values.len()).map(|j| stencil.apply(values, j)).collect())
}

/// `(I₁,δ, I₂,δ)`: contributions of `|s| < δ` and `|s| ≥ δ` to [`a0_quadrature`].
/// The centred second difference counts as local.
pub fn a0_split(f: &PseudoCDF, j: usize, delta: f64) -> Result<(f64, f64)> {
    let stencil = A0Stencil::new(f.len())?;
    if j >= f.len() {
        return Err(DysonError::Shape(format!("node {j} outside grid of size {}", f.len())));
    }
    let r = residual(f);
    let m = f.len();
    let h = grid_step(m);
    let (mut local, mut far) = (0.0, 0.0);
    for (idx, a) in stencil.weights.iter().enumerate() {
        let k = idx + 1;
        let d = (r[j] - r[(j + m - k) % m]) + (r[j] - r[(j + k) % m]);
        if (k as f64) * h < delta {
            local += a * d;
        } else if k == 1 {
            // the centred term is local even when δ is below one cell
            let centre = 1.0 / h;
            local += centre * d;
            far += (a - centre) * d;
        } else {
            far += a * d;
        }
    }
    Ok((local, far))
}

/// Periodic residual `R_j = F_j − F_0 − j·winding/M`.
fn residual(f: &PseudoCDF) -> Vec<f64> {
    let m = f.len();
    let slope = f.winding() / m as f64;
    let f0 = f.values()[0];
    f.values().iter().enumerate().map(|(j, v)| v - f0 - j as f64 * slope).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveState {
    pub time: f64,
    /// Radius used by the local/non-local split diagnostic.
    pub delta_split: f64,
    offset: f64,
    winding: f64,
    residual: Vec<f64>,
}

impl PrimitiveState {
    pub fn new(f: &PseudoCDF, delta_split: f64) -> Result<Self> {
        f.validate()?;
        A0Stencil::new(f.len())?;
        Ok(Self {
            time: 0.0,
            delta_split,
            offset: f.values()[0],
            winding: f.winding(),
            residual: residual(f),
        })
    }

    pub fn grid_size(&self) -> usize {
        self.residual.len()
    }

    pub fn winding(&self) -> f64 {
        self.winding
    }

    /// Nodal value at any integer index.
    pub fn at(&self, j: i64) -> f64 {
        let m = self.residual.len() as i64;
        self.offset + j as f64 * self.winding / m as f64 + self.residual[j.rem_euclid(m) as usize]
    }

    pub fn cdf(&self) -> PseudoCDF {
        let m = self.residual.len();
        PseudoCDF::new_unchecked((0..m as i64).map(|j| self.at(j)).collect(), self.winding)
    }

    /// The datum `F(· − c·Δθ)`, with the residual rotated exactly.
    pub fn shifted_cells(&self, cells: i64) -> Self {
        let m = self.residual.len() as i64;
        let residual = (0..m).map(|j| self.residual[(j - cells).rem_euclid(m) as usize]).collect();
        Self {
            time: self.time,
            delta_split: self.delta_split,
            offset: self.offset - cells as f64 * self.winding / m as f64,
            winding: self.winding,
            residual,
        }
    }

    /// `F_{j+1} − F_j` for every node.
    fn forward_differences(&self) -> Vec<f64> {
        let m = self.residual.len();
        let slope = self.winding / m as f64;
        (0..m).map(|j| slope + (self.residual[(j + 1) % m] - self.residual[j])).collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.forward_differences().iter().all(|d| *d >= 0.0)
    }

    /// `A₀[F]` at every node.
    pub fn a0(&self, stencil: &A0Stencil) -> Vec<f64> {
        let m = self.residual.len();
        if m >= PARALLEL_THRESHOLD {
            (0..m).into_par_iter().map(|j| stencil.apply(&self.residual, j)).collect()
        } else {
            (0..m).map(|j| stencil.apply(&self.residual, j)).collect()
        }
    }
}

/// Largest stable step for the current state: `dt (max|A₀|/Δθ + max(∂F)₊ · 2Σa_k) ≤ 1`.
pub fn cfl_bound(state: &PrimitiveState, stencil: &A0Stencil) -> f64 {
    let h = grid_step(state.grid_size());
    let a0 = state.a0(stencil);
    let slope = state.forward_differences().iter().fold(0.0f64, |acc, d| acc.max(*d)) / h;
    let rate = a0.iter().map(|v| v.abs()).fold(0.0, f64::max) / h + slope * stencil.diagonal();
    if rate > 0.0 {
        1.0 / rate
    } else {
        f64::INFINITY
    }
}

/// One forward Euler step of the upwind scheme.
pub fn primitive_step(state: &PrimitiveState, stencil: &A0Stencil, dt: f64) -> Result<PrimitiveState> {
    if stencil.grid_size() != state.grid_size() {
        return Err(DysonError::Shape("stencil and state grid sizes differ".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DysonError::Domain(format!("time step must be positive, got {dt}")));
    }
    let bound = cfl_bound(state, stencil);
    if dt > bound {
        return Err(DysonError::Cfl { dt, suggested_dt: 0.9 * bound });
    }
    Ok(step_unchecked(state, stencil, dt))
}

fn step_unchecked(state: &PrimitiveState, stencil: &A0Stencil, dt: f64) -> PrimitiveState {
    let m = state.grid_size();
    let h = grid_step(m);
    let a0 = state.a0(stencil);
    let diff = state.forward_differences();
    let residual = (0..m)
        .map(|j| {
            let v = a0[j];
            // upwind: information travels along the sign of A₀
            let d = if v >= 0.0 { diff[(j + m - 1) % m] } else { diff[j] };
            state.residual[j] - dt * (d / h).max(0.0) * v
        })
        .collect();
    PrimitiveState {
        time: state.time + dt,
        delta_split: state.delta_split,
        offset: state.offset,
        winding: state.winding,
        residual,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveSolverOptions {
    /// Fraction of the CFL bound used per step.
    pub cfl: f64,
    /// Upper bound on any single step.
    pub max_dt: f64,
    /// States are recorded at multiples of this time (every step when 0).
    pub record_interval: f64,
}

impl Default for PrimitiveSolverOptions {
    fn default() -> Self {
        Self { cfl: 0.9, max_dt: 1e-2, record_interval: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<PseudoCDF>,
    pub steps: usize,
}

impl PrimitiveTrajectory {
    pub fn final_state(&self) -> &PseudoCDF {
        self.states.last().expect("trajectory holds at least the initial state")
    }
}

/// Evolves a state to `T` with CFL-limited steps; returns the final state,
/// the recorded states and the number of steps taken.
pub fn evolve(state: &PrimitiveState, t_end: f64, options: PrimitiveSolverOptions) -> Result<(PrimitiveState, Vec<PrimitiveState>, usize)> {
    let stencil = A0Stencil::new(state.grid_size())?;
    if !(t_end >= state.time) || !t_end.is_finite() {
        return Err(DysonError::Domain(format!("final time {t_end} precedes state time {}", state.time)));
    }
    if !(options.cfl > 0.0 && options.cfl <= 1.0) || !(options.max_dt > 0.0) || !(options.record_interval >= 0.0) {
        return Err(DysonError::Domain("solver options out of range".into()));
    }
    let mut s = state.clone();
    let mut recorded = Vec::new();
    let mut steps = 0;
    let scale = t_end.max(1.0);
    let mut next_record = if options.record_interval > 0.0 { s.time + options.record_interval } else { f64::INFINITY };
    while s.time < t_end {
        let proposal = s.time + (options.cfl * cfl_bound(&s, &stencil)).min(options.max_dt);
        let mut record = options.record_interval == 0.0;
        let mut t_next = proposal;
        if t_next >= next_record.min(t_end) - 1e-12 * scale {
            t_next = next_record.min(t_end);
            record = true;
        }
        if t_next >= next_record {
            next_record += options.record_interval;
        }
        let mut next = step_unchecked(&s, &stencil, t_next - s.time);
        next.time = t_next;
        if !next.is_nondecreasing() {
            return Err(DysonError::Numerical(format!("monotonicity lost at t = {t_next}")));
        }
        s = next;
        steps += 1;
        if record {
            recorded.push(s.clone());
        }
    }
    Ok((s, recorded, steps))
}

/// Solves from `F0` (nondecreasing, winding 1) to `T`.
pub fn solve_primitive(f0: &PseudoCDF, t_end: f64, options: PrimitiveSolverOptions) -> Result<PrimitiveTrajectory> {
    if (f0.winding() - 1.0).abs() > 1e-12 {
        return Err(DysonError::Precondition(format!("initial winding must be 1, got {}", f0.winding())));
    }
    let start = PrimitiveState::new(f0, TAU / 8.0)?;
    let (_, recorded, steps) = evolve(&start, t_end, options)?;
    let mut times = vec![start.time];
    let mut states = vec![start.cdf()];
    for s in recorded {
        times.push(s.time);
        states.push(s.cdf());
    }
    Ok(PrimitiveTrajectory { times, states, steps })
}
