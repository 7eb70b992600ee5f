//! N-particle Dyson system on the circle.
//!
//! `dλ_i = (α/N²) Σ_{j≠i} cot((λ_i − λ_j)/2) dt + √(2α/β) dB_i`
//!
//! The integrator is explicit Euler–Maruyama. A proposal is rejected when it
//! leaves the ordered set (wrap pair included) or, for coupled systems, when
//! the step is too large for the Euler map to be order preserving; rejected
//! steps are refined along a Brownian bridge so the noise path does not
//! depend on the refinement.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::LiftedConfiguration;
use crate::error::{DysonError, Result};
use crate::noise::NoiseStream;

/// Maximum number of nested bridge halvings before a step is declared stiff.
pub const MAX_HALVINGS: u32 = 40;

/// Halvings spent on the order-preservation condition for coupled systems.
/// Deeper refinements are reserved for ordering rejections: near a critical
/// (β = N²/2) close encounter the condition asks for steps far below the
/// halving budget.
pub const MONOTONE_HALVINGS: u32 = MAX_HALVINGS / 2;

const PARALLEL_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SDEParameters {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `√(2α/β)` unless overridden (zero for deterministic runs).
    pub noise_scale: f64,
    /// Gaps below this abort with a near-collision error.
    pub collision_tolerance: f64,
}

impl SDEParameters {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(DysonError::Precondition(format!("need N >= 2 particles, got {n}")));
        }
        if !(alpha >= 0.0) || !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(DysonError::Domain(format!("invalid coefficients alpha = {alpha}, beta = {beta}")));
        }
        Ok(Self {
            n,
            alpha,
            beta,
            noise_scale: (2.0 * alpha / beta).sqrt(),
            collision_tolerance: 1e-12,
        })
    }

    /// `α = N`, `β = N²/2`: the eigenphase system of the unitary Dyson motion.
    pub fn dyson(n: usize) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, nf, nf * nf / 2.0)
    }

    /// `α = N/2`, `β = N²`: the eigenphase law of the matrix process driven
    /// by a GUE with unit off-diagonal second moment.
    pub fn matrix_matched(n: usize) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, nf / 2.0, nf * nf)
    }

    pub fn with_noise_scale(mut self, noise_scale: f64) -> Self {
        self.noise_scale = noise_scale;
        self
    }

    pub fn deterministic(self) -> Self {
        self.with_noise_scale(0.0)
    }

    /// `β ≥ N²/2`, the regime where the system cannot explode.
    pub fn well_posed(&self) -> bool {
        let nf = self.n as f64;
        self.beta >= nf * nf / 2.0
    }

    fn coupling(&self) -> f64 {
        self.alpha / (self.n * self.n) as f64
    }

    /// `C_N = (2α/N⁴)(N(N−1)(N−2)/3 + N(N−1))`.
    pub fn generator_constant(&self) -> f64 {
        let nf = self.n as f64;
        2.0 * self.alpha / nf.powi(4) * (nf * (nf - 1.0) * (nf - 2.0) / 3.0 + nf * (nf - 1.0))
    }

    /// Coefficient of `Σ 1/sin²` in the generator of the interaction energy.
    pub fn generator_bracket(&self) -> f64 {
        let nf = self.n as f64;
        self.alpha / (nf * nf * self.beta) - 2.0 * self.alpha / nf.powi(4)
    }

    /// `K_N = 2α/β + 2α(N−1)/N² + C_N`, valid when the bracket is nonpositive.
    pub fn generator_bound(&self) -> f64 {
        let nf = self.n as f64;
        2.0 * self.alpha / self.beta + 2.0 * self.alpha * (nf - 1.0) / (nf * nf) + self.generator_constant()
    }

    fn check_config(&self, config: &LiftedConfiguration) -> Result<()> {
        if config.len() != self.n {
            return Err(DysonError::Shape(format!(
                "configuration has {} particles, parameters expect {}",
                config.len(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Smallest circular gap of an ordered lift.
fn min_gap(x: &[f64]) -> f64 {
    let n = x.len();
    let inner = x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    inner.min(x[0] + TAU - x[n - 1])
}

fn is_ordered(x: &[f64], tol: f64) -> bool {
    if x.iter().any(|v| !v.is_finite()) {
        return false;
    }
    x.windows(2).all(|w| w[1] - w[0] > tol) && x[0] + TAU - x[x.len() - 1] > tol
}

/// Drift and, when asked for, the stiffness `(α/N²) max_i Σ_{j≠i} 1/(2 sin²((x_i−x_j)/2))`.
fn drift_and_stiffness(x: &[f64], params: &SDEParameters, with_stiffness: bool) -> Result<(Vec<f64>, f64)> {
    let n = x.len();
    let gap = min_gap(x);
    if !(gap >= params.collision_tolerance) {
        return Err(DysonError::NearCollision { min_gap: gap, threshold: params.collision_tolerance });
    }
    let c = params.coupling();
    // Half-angle sines and cosines turn each pair into a few multiplications:
    // sin((x_i−x_j)/2) = s_i c_j − c_i s_j, cos((x_i−x_j)/2) = c_i c_j + s_i s_j.
    let (sn, cs): (Vec<f64>, Vec<f64>) = x.iter().map(|v| (0.5 * v).sin_cos()).unzip();
    let cot = |i: usize, j: usize| (cs[i] * cs[j] + sn[i] * sn[j]) / (sn[i] * cs[j] - cs[i] * sn[j]);
    if n >= PARALLEL_THRESHOLD {
        let rows: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let (mut d, mut s) = (0.0, 0.0);
                for j in (0..n).filter(|&j| j != i) {
                    let cot = cot(i, j);
                    d += cot;
                    s += 0.5 * (1.0 + cot * cot);
                }
                (c * d, s)
            })
            .collect();
        let stiff = rows.iter().map(|r| r.1).fold(0.0, f64::max);
        return Ok((rows.into_iter().map(|r| r.0).collect(), c * stiff));
    }
    let mut drift = vec![0.0; n];
    let mut stiff = vec![0.0; if with_stiffness { n } else { 0 }];
    for i in 0..n {
        for j in i + 1..n {
            let cot = cot(i, j);
            drift[i] += cot;
            drift[j] -= cot;
            if with_stiffness {
                let q = 0.5 * (1.0 + cot * cot);
                stiff[i] += q;
                stiff[j] += q;
            }
        }
    }
    drift.iter_mut().for_each(|d| *d *= c);
    Ok((drift, c * stiff.into_iter().fold(0.0, f64::max)))
}

/// `(α/N²) Σ_{j≠i} cot((x_i − x_j)/2)` for every particle.
pub fn pairwise_drift(config: &LiftedConfiguration, params: &SDEParameters) -> Result<Vec<f64>> {
    params.check_config(config)?;
    Ok(drift_and_stiffness(config.positions(), params, false)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub confinement: f64,
    pub interaction: f64,
    pub total: f64,
}

/// `E_V = (1/N) Σ x_i²` on the stored lift and `E_W = (1/N²) Σ_{i≠j} −ln sin²((x_i−x_j)/2)`.
pub fn energy(config: &LiftedConfiguration) -> Result<Energy> {
    let x = config.positions();
    let nf = x.len() as f64;
    let confinement = x.iter().map(|v| v * v).sum::<f64>() / nf;
    let mut w = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let s = (0.5 * (x[i] - x[j])).sin();
            if s == 0.0 {
                return Err(DysonError::Collision { first: x[i], second: x[j] });
            }
            w -= 2.0 * (s * s).ln();
        }
    }
    let interaction = w / (nf * nf);
    Ok(Energy { confinement, interaction, total: confinement + interaction })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEnergy {
    pub confinement: f64,
    pub interaction: f64,
    pub total: f64,
}

/// `ψ(x) = (x/2) cot(x/2)`, continuous at 0.
pub fn psi(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        0.5 * x / (0.5 * x).tan()
    }
}

/// Closed-form generator applied to the energy.
pub fn generator_energy(config: &LiftedConfiguration, params: &SDEParameters) -> Result<GeneratorEnergy> {
    params.check_config(config)?;
    let x = config.positions();
    let nf = x.len() as f64;
    let (mut psi_sum, mut inv_sin2) = (0.0, 0.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i] - x[j];
            let s = (0.5 * d).sin();
            if s == 0.0 {
                return Err(DysonError::Collision { first: x[i], second: x[j] });
            }
            psi_sum += 2.0 * psi(d);
            inv_sin2 += 2.0 / (s * s);
        }
    }
    let (a, b) = (params.alpha, params.beta);
    let confinement = 2.0 * a / b + 2.0 * a / nf.powi(3) * psi_sum;
    let bracket = params.generator_bracket();
    let interaction = if bracket == 0.0 { 0.0 } else { bracket * inv_sin2 } + params.generator_constant();
    Ok(GeneratorEnergy { confinement, interaction, total: confinement + interaction })
}

/// `Σ_i Σ_{j≠i, k≠i, j≠k} cot((x_i−x_k)/2) cot((x_i−x_j)/2)`.
pub fn triple_cotangent_sum(config: &LiftedConfiguration) -> f64 {
    let x = config.positions();
    let n = x.len();
    let mut total = 0.0;
    for i in 0..n {
        let (mut s, mut s2) = (0.0, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let c = 1.0 / (0.5 * (x[i] - x[j])).tan();
            s += c;
            s2 += c * c;
        }
        total += s * s - s2;
    }
    total
}

/// `−N(N−1)(N−2)/3`.
pub fn triple_cotangent_closed_form(n: usize) -> f64 {
    let nf = n as f64;
    -nf * (nf - 1.0) * (nf - 2.0) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleTrajectory {
    pub parameters: SDEParameters,
    pub times: Vec<f64>,
    pub states: Vec<LiftedConfiguration>,
    pub seed: u64,
    pub rejected_steps: u64,
}

impl ParticleTrajectory {
    pub fn final_state(&self) -> &LiftedConfiguration {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// Smallest circular gap over all recorded states.
    pub fn min_gap(&self) -> f64 {
        self.states.iter().map(|s| s.min_gap()).fold(f64::INFINITY, f64::min)
    }
}

/// One macro step for several systems sharing a noise path; a proposal is
/// only accepted when every system accepts it.
///
/// With `monotone` set, sub-steps must also satisfy `h·max_i |∂b_i/∂x_i| ≤ 1`,
/// which makes the Euler map order preserving for coupled systems; the
/// condition is enforced for the first [`MONOTONE_HALVINGS`] levels only.
struct Stepper<'a> {
    params: &'a SDEParameters,
    noise: &'a NoiseStream,
    step: u64,
    rejected: u64,
    monotone: bool,
}

impl Stepper<'_> {
    fn root(&mut self, states: &mut [Vec<f64>], dt: f64) -> Result<()> {
        let n = self.params.n;
        let mut dw = vec![0.0; n];
        self.noise.normals(self.step, 0, &mut dw);
        let sq = dt.sqrt();
        dw.iter_mut().for_each(|z| *z *= sq);
        self.advance(states, dt, &dw, 1, 0, None)
    }

    /// `drifts` carries the drift at the current states when the caller already has it
    /// (the left half of a refined step starts where its parent did).
    fn advance(
        &mut self,
        states: &mut [Vec<f64>],
        h: f64,
        dw: &[f64],
        node: u64,
        depth: u32,
        drifts: Option<Vec<(Vec<f64>, f64)>>,
    ) -> Result<()> {
        let sigma = self.params.noise_scale;
        let drifts = match drifts {
            Some(d) => d,
            None => states
                .iter()
                .map(|x| drift_and_stiffness(x, self.params, self.monotone))
                .collect::<Result<Vec<_>>>()?,
        };
        let mut proposals = Vec::with_capacity(states.len());
        let mut accepted = true;
        for (x, (drift, stiffness)) in states.iter().zip(&drifts) {
            if self.monotone && depth < MONOTONE_HALVINGS && h * stiffness > 1.0 {
                accepted = false;
                break;
            }
            let y: Vec<f64> = x
                .iter()
                .zip(drift)
                .zip(dw)
                .map(|((xi, bi), wi)| xi + bi * h + sigma * wi)
                .collect();
            if !is_ordered(&y, self.params.collision_tolerance) {
                accepted = false;
                break;
            }
            proposals.push(y);
        }
        if accepted {
            for (x, y) in states.iter_mut().zip(proposals) {
                *x = y;
            }
            return Ok(());
        }
        if depth >= MAX_HALVINGS {
            let gap = states.iter().map(|x| min_gap(x)).fold(f64::INFINITY, f64::min);
            return Err(DysonError::Stiffness { halvings: depth, min_gap: gap });
        }
        self.rejected += 1;
        let mut z = vec![0.0; dw.len()];
        self.noise.normals(self.step, node, &mut z);
        let half = 0.5 * h.sqrt();
        let left: Vec<f64> = dw.iter().zip(&z).map(|(w, zi)| 0.5 * w + half * zi).collect();
        let right: Vec<f64> = dw.iter().zip(&left).map(|(w, l)| w - l).collect();
        self.advance(states, 0.5 * h, &left, 2 * node, depth + 1, Some(drifts))?;
        self.advance(states, 0.5 * h, &right, 2 * node + 1, depth + 1, None)
    }
}

/// Advances `config` by one macro step of length `dt`, refining on rejection.
/// Returns the new configuration and the number of halvings used.
pub fn em_step(
    config: &LiftedConfiguration,
    params: &SDEParameters,
    dt: f64,
    noise: &NoiseStream,
    step_index: u64,
) -> Result<(LiftedConfiguration, u64)> {
    params.check_config(config)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DysonError::Domain(format!("time step must be positive, got {dt}")));
    }
    let mut states = [config.positions().to_vec()];
    let mut stepper = Stepper { params, noise, step: step_index, rejected: 0, monotone: false };
    stepper.root(&mut states, dt)?;
    let [x] = states;
    Ok((LiftedConfiguration::from_step(x, config.reference()), stepper.rejected))
}

/// Step count and the `k`-th step size for a schedule that lands on `T` exactly.
fn schedule(t_end: f64, dt: f64) -> Result<usize> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(DysonError::Domain(format!("final time must be nonnegative, got {t_end}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DysonError::Domain(format!("time step must be positive, got {dt}")));
    }
    Ok((t_end / dt - 1e-9).ceil().max(0.0) as usize)
}

fn step_time(k: usize, steps: usize, t_end: f64, dt: f64) -> f64 {
    if k >= steps {
        t_end
    } else {
        k as f64 * dt
    }
}

fn run(
    initial: &[&LiftedConfiguration],
    params: &SDEParameters,
    t_end: f64,
    dt: f64,
    seed: u64,
    record_every: usize,
) -> Result<(Vec<f64>, Vec<Vec<LiftedConfiguration>>, u64)> {
    let steps = schedule(t_end, dt)?;
    let record_every = record_every.max(1);
    if !params.well_posed() {
        log::warn!(
            "beta = {} is below N²/2 = {}; collisions are possible",
            params.beta,
            (params.n * params.n) as f64 / 2.0
        );
    }
    let noise = NoiseStream::new(seed);
    let mut states: Vec<Vec<f64>> = initial.iter().map(|c| c.positions().to_vec()).collect();
    let mut references: Vec<f64> = initial.iter().map(|c| c.reference()).collect();
    let mut times = vec![0.0];
    let mut recorded: Vec<Vec<LiftedConfiguration>> = initial.iter().map(|c| vec![(*c).clone()]).collect();
    let mut stepper = Stepper { params, noise: &noise, step: 0, rejected: 0, monotone: initial.len() > 1 };
    for k in 0..steps {
        let t0 = step_time(k, steps, t_end, dt);
        let t1 = step_time(k + 1, steps, t_end, dt);
        stepper.step = k as u64;
        stepper.root(&mut states, t1 - t0)?;
        if (k + 1) % record_every == 0 || k + 1 == steps {
            times.push(t1);
            for ((rec, x), r) in recorded.iter_mut().zip(&states).zip(references.iter_mut()) {
                let c = LiftedConfiguration::from_step(x.clone(), *r);
                *r = c.reference();
                rec.push(c);
            }
        }
    }
    Ok((times, recorded, stepper.rejected))
}

/// Integrates the system from `initial` to `T`, recording every `record_every` steps and the final state.
pub fn simulate(
    initial: &LiftedConfiguration,
    params: &SDEParameters,
    t_end: f64,
    dt: f64,
    seed: u64,
    record_every: usize,
) -> Result<ParticleTrajectory> {
    params.check_config(initial)?;
    let (times, mut states, rejected_steps) = run(&[initial], params, t_end, dt, seed, record_every)?;
    Ok(ParticleTrajectory {
        parameters: *params,
        times,
        states: states.pop().unwrap_or_default(),
        seed,
        rejected_steps,
    })
}

/// Two systems driven by the same Brownian path with synchronized refinement.
pub fn coupled_simulate(
    lower: &LiftedConfiguration,
    upper: &LiftedConfiguration,
    params: &SDEParameters,
    t_end: f64,
    dt: f64,
    seed: u64,
    record_every: usize,
) -> Result<(ParticleTrajectory, ParticleTrajectory)> {
    params.check_config(lower)?;
    params.check_config(upper)?;
    if let Some(i) = (0..params.n).find(|&i| lower.positions()[i] > upper.positions()[i]) {
        return Err(DysonError::Precondition(format!(
            "coupled start not ordered at particle {i}: {} > {}",
            lower.positions()[i],
            upper.positions()[i]
        )));
    }
    let (times, mut states, rejected_steps) = run(&[lower, upper], params, t_end, dt, seed, record_every)?;
    let up = states.pop().unwrap_or_default();
    let low = states.pop().unwrap_or_default();
    let make = |states| ParticleTrajectory {
        parameters: *params,
        times: times.clone(),
        states,
        seed,
        rejected_steps,
    };
    Ok((make(low), make(up)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg(x: &[f64]) -> LiftedConfiguration {
        LiftedConfiguration::from_lift(x.to_vec()).unwrap()
    }

    #[test]
    fn dyson_preset() {
        let p = SDEParameters::dyson(16).unwrap();
        assert_eq!(p.alpha, 16.0);
        assert_eq!(p.beta, 128.0);
        assert!((p.noise_scale - 0.5).abs() < 1e-15);
        assert!(p.well_posed());
        assert_eq!(p.generator_bracket(), 0.0);
        assert!(!SDEParameters::new(4, 4.0, 7.9).unwrap().well_posed());
        assert!(SDEParameters::new(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn drift_examples() {
        let p3 = SDEParameters::dyson(3).unwrap();
        let d = pairwise_drift(&LiftedConfiguration::equally_spaced(3, 0.0), &p3).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-15));
        let p2 = SDEParameters::dyson(2).unwrap();
        let d = pairwise_drift(&cfg(&[0.0, PI]), &p2).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-15));
        let d = pairwise_drift(&cfg(&[0.0, FRAC_PI_2]), &p2).unwrap();
        assert!((d[0] + 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        let err = pairwise_drift(&cfg(&[0.0, 1e-13]), &p2).unwrap_err();
        assert!(matches!(err, DysonError::NearCollision { .. }));
    }

    #[test]
    fn energy_examples() {
        let e = energy(&cfg(&[0.0, PI])).unwrap();
        assert!((e.confinement - PI * PI / 2.0).abs() < 1e-14);
        assert!(e.interaction.abs() < 1e-15);
        let e = energy(&cfg(&[0.0, PI / 3.0])).unwrap();
        assert!((e.interaction - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn generator_n3_constant() {
        let p = SDEParameters::dyson(3).unwrap();
        let g = generator_energy(&cfg(&[0.1, 1.7, 4.0]), &p).unwrap();
        assert!((g.interaction - 16.0 / 27.0).abs() < 1e-14);
        assert!((triple_cotangent_sum(&cfg(&[0.1, 1.7, 4.0])) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_euler_step() {
        let p = SDEParameters::dyson(2).unwrap().deterministic();
        let noise = NoiseStream::new(0);
        let (c, rej) = em_step(&cfg(&[0.0, FRAC_PI_2]), &p, 0.01, &noise, 0).unwrap();
        assert_eq!(rej, 0);
        assert!((c.positions()[0] + 0.005).abs() < 1e-15);
        assert!((c.positions()[1] - FRAC_PI_2 - 0.005).abs() < 1e-15);
    }

    #[test]
    fn equally_spaced_is_fixed_without_noise() {
        let p = SDEParameters::dyson(4).unwrap().deterministic();
        let c0 = LiftedConfiguration::equally_spaced(4, 0.0);
        let (c, _) = em_step(&c0, &p, 0.3, &NoiseStream::new(1), 0).unwrap();
        for (a, b) in c.positions().iter().zip(c0.positions()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_keeps_initial_state() {
        let p = SDEParameters::dyson(4).unwrap();
        let c0 = LiftedConfiguration::equally_spaced(4, 0.2);
        let tr = simulate(&c0, &p, 0.0, 0.01, 3, 1).unwrap();
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states, vec![c0]);
    }

    #[test]
    fn bad_schedule_rejected() {
        let p = SDEParameters::dyson(4).unwrap();
        let c0 = LiftedConfiguration::equally_spaced(4, 0.2);
        assert!(simulate(&c0, &p, 1.0, 0.0, 3, 1).is_err());
        assert!(simulate(&c0, &p, -1.0, 0.1, 3, 1).is_err());
        assert!(em_step(&c0, &p, f64::NAN, &NoiseStream::new(0), 0).is_err());
    }

    #[test]
    fn schedule_lands_on_final_time() {
        let p = SDEParameters::dyson(4).unwrap();
        let c0 = LiftedConfiguration::equally_spaced(4, 0.0);
        let tr = simulate(&c0, &p, 0.25, 0.1, 9, 1).unwrap();
        assert_eq!(tr.times.len(), 4);
        assert_eq!(*tr.times.last().unwrap(), 0.25);
    }

    #[test]
    fn large_step_is_refined() {
        // a tight pair forces the monotonicity guard to halve the step
        let p = SDEParameters::dyson(3).unwrap();
        let c0 = cfg(&[0.0, 1e-3, 3.0]);
        let (c, rej) = em_step(&c0, &p, 0.5, &NoiseStream::new(4), 0).unwrap();
        assert!(rej > 0);
        assert!(LiftedConfiguration::is_strictly_ordered(c.positions()));
    }

    #[test]
    fn coupled_requires_order() {
        let p = SDEParameters::dyson(4).unwrap();
        let a = LiftedConfiguration::equally_spaced(4, 0.0);
        let b = a.rotated(-0.1);
        assert!(matches!(
            coupled_simulate(&a, &b, &p, 0.1, 0.01, 0, 1),
            Err(DysonError::Precondition(_))
        ));
    }
}
