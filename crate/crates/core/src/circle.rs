//! Geometry and measures on the circle `T = R / 2πZ`.
//!
//! Particle configurations are stored as strictly ordered lifts inside one
//! half-open window `[a, a + 2π)`; the periodic extension
//! `x[i] = x[i mod N] + 2π floor(i / N)` is computed on demand. Grid measures
//! live on the uniform grid `θ_j = 2πj / M`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DysonError, Result};

/// An angle with canonical representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Angle(f64);

impl Angle {
    pub fn new(x: f64) -> Result<Self> {
        wrap_angle(x)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Reduces `x` to its representative in `[0, 2π)`.
pub fn wrap_angle(x: f64) -> Result<Angle> {
    if !x.is_finite() {
        return Err(DysonError::Domain(format!("cannot wrap non-finite angle {x}")));
    }
    Ok(Angle(wrap_unchecked(x)))
}

pub(crate) fn wrap_unchecked(x: f64) -> f64 {
    // `%` is exact for floats; only the final addition of 2π can round up.
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Grid spacing of the uniform `M`-point grid on the circle.
pub fn grid_step(m: usize) -> f64 {
    TAU / m as f64
}

/// Nodes `2πj / M`, `j = 0..M`.
pub fn grid_nodes(m: usize) -> Vec<f64> {
    let h = grid_step(m);
    (0..m).map(|j| j as f64 * h).collect()
}

/// N circle particles as a strictly increasing lift inside `[reference, reference + 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedConfiguration {
    reference: f64,
    positions: Vec<f64>,
}

impl LiftedConfiguration {
    /// Builds a configuration from already lifted positions.
    ///
    /// Requires `reference <= x[0] < x[1] < ... < x[N-1] < reference + 2π`.
    pub fn from_positions(positions: Vec<f64>, reference: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(DysonError::Precondition("configuration needs at least one particle".into()));
        }
        if !reference.is_finite() || positions.iter().any(|x| !x.is_finite()) {
            return Err(DysonError::Domain("non-finite position".into()));
        }
        for w in positions.windows(2) {
            if w[1] <= w[0] {
                return Err(DysonError::Collision { first: w[0], second: w[1] });
            }
        }
        let first = positions[0];
        let last = positions[positions.len() - 1];
        if first < reference || last >= reference + TAU {
            return Err(DysonError::Precondition(format!(
                "positions [{first}, {last}] leave the window [{reference}, {reference} + 2π)"
            )));
        }
        Ok(Self { reference, positions })
    }

    /// Builds a configuration whose window starts at its first particle.
    pub fn from_lift(positions: Vec<f64>) -> Result<Self> {
        let reference = *positions
            .first()
            .ok_or_else(|| DysonError::Precondition("configuration needs at least one particle".into()))?;
        Self::from_positions(positions, reference)
    }

    /// `N` equally spaced particles `offset + 2πk/N`.
    pub fn equally_spaced(n: usize, offset: f64) -> Self {
        let positions = (0..n).map(|k| offset + TAU * k as f64 / n as f64).collect();
        Self { reference: offset, positions }
    }

    /// Window-preserving constructor used by the integrators: keeps the old
    /// reference when the lift still fits, otherwise re-anchors at `x[0]`.
    pub(crate) fn from_step(positions: Vec<f64>, reference: f64) -> Self {
        let first = positions[0];
        let last = positions[positions.len() - 1];
        let reference = if first >= reference && last < reference + TAU { reference } else { first };
        Self { reference, positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Position of particle `i ∈ Z` in the periodic extension.
    pub fn extended(&self, i: i64) -> f64 {
        let n = self.positions.len() as i64;
        let k = i.rem_euclid(n);
        let wraps = (i - k) / n;
        self.positions[k as usize] + TAU * wraps as f64
    }

    /// Smallest gap between neighbours, including the pair `(x[N-1], x[0] + 2π)`.
    pub fn min_gap(&self) -> f64 {
        let n = self.positions.len();
        if n < 2 {
            return TAU;
        }
        let inner = self
            .positions
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        inner.min(self.positions[0] + TAU - self.positions[n - 1])
    }

    /// True when the lift lies in `R^N_>`: strictly increasing with `x[N-1] < x[0] + 2π`.
    pub fn is_strictly_ordered(positions: &[f64]) -> bool {
        if positions.iter().any(|x| !x.is_finite()) {
            return false;
        }
        positions.windows(2).all(|w| w[1] > w[0])
            && positions.last().copied().unwrap_or(0.0) < positions[0] + TAU
    }

    /// Every particle rotated by `c`.
    pub fn rotated(&self, c: f64) -> Self {
        Self {
            reference: self.reference + c,
            positions: self.positions.iter().map(|x| x + c).collect(),
        }
    }

    /// Same configuration seen through the window shifted by `2πk`.
    pub fn shifted_window(&self, k: i64) -> Self {
        self.rotated(TAU * k as f64)
    }

    /// Canonical angles in `[0, 2π)`.
    pub fn angles(&self) -> Vec<Angle> {
        self.positions.iter().map(|&x| Angle(wrap_unchecked(x))).collect()
    }

    /// Sorted canonical angles.
    pub fn sorted_angles(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.positions.iter().map(|&x| wrap_unchecked(x)).collect();
        a.sort_by(f64::total_cmp);
        a
    }
}

/// Lifts circle angles into `[reference, reference + 2π)` and sorts them.
pub fn lift_configuration(angles: &[Angle], reference: f64) -> Result<LiftedConfiguration> {
    if angles.is_empty() {
        return Err(DysonError::Precondition("configuration needs at least one particle".into()));
    }
    if !reference.is_finite() {
        return Err(DysonError::Domain(format!("non-finite reference {reference}")));
    }
    let mut positions: Vec<f64> = angles
        .iter()
        .map(|a| {
            let p = reference + wrap_unchecked(a.value() - reference);
            if p >= reference + TAU {
                reference
            } else {
                p
            }
        })
        .collect();
    positions.sort_by(f64::total_cmp);
    for w in positions.windows(2) {
        if w[1] == w[0] {
            return Err(DysonError::Collision { first: w[0], second: w[1] });
        }
    }
    Ok(LiftedConfiguration { reference, positions })
}

/// Right-continuous pseudo-CDF of an empirical measure `(1/N) Σ δ_{x_i}`,
/// anchored so that `F(θ) = μ([0, θ])` on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(config: &LiftedConfiguration) -> Self {
        Self { sorted: config.sorted_angles() }
    }

    pub fn from_angles(angles: &[f64]) -> Self {
        let mut sorted: Vec<f64> = angles.iter().map(|&x| wrap_unchecked(x)).collect();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let turns = (theta / TAU).floor();
        let mut r = theta - TAU * turns;
        if r >= TAU {
            r = 0.0;
        }
        let count = self.sorted.partition_point(|&x| x <= r);
        count as f64 / self.sorted.len() as f64 + turns
    }

    /// Nodal values on the `M`-point grid, winding 1.
    pub fn on_grid(&self, m: usize) -> PseudoCDF {
        let h = grid_step(m);
        let values = (0..m).map(|j| self.eval(j as f64 * h)).collect();
        PseudoCDF { values, winding: 1.0 }
    }
}

/// `F(θ)` of the empirical measure of `config`.
pub fn empirical_cdf(config: &LiftedConfiguration, theta: f64) -> f64 {
    EmpiricalCdf::new(config).eval(theta)
}

/// Nondecreasing grid function with `F(θ + 2π) = F(θ) + winding`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoCDF {
    values: Vec<f64>,
    winding: f64,
}

impl PseudoCDF {
    pub fn new(values: Vec<f64>, winding: f64) -> Result<Self> {
        let cdf = Self { values, winding };
        cdf.validate()?;
        Ok(cdf)
    }

    /// Skips the monotonicity check; used for intermediate sums such as averages.
    pub fn new_unchecked(values: Vec<f64>, winding: f64) -> Self {
        Self { values, winding }
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() < 2 {
            return Err(DysonError::Shape("pseudo-CDF needs at least two nodes".into()));
        }
        if !self.winding.is_finite() || self.values.iter().any(|v| !v.is_finite()) {
            return Err(DysonError::Domain("non-finite pseudo-CDF value".into()));
        }
        if let Some(j) = (1..self.values.len()).find(|&j| self.values[j] < self.values[j - 1]) {
            return Err(DysonError::Precondition(format!(
                "pseudo-CDF decreases between nodes {} and {j}",
                j - 1
            )));
        }
        if self.values[0] + self.winding < self.values[self.values.len() - 1] {
            return Err(DysonError::Precondition("pseudo-CDF decreases across the period boundary".into()));
        }
        Ok(())
    }

    /// `F(θ) = θ / 2π`, the primitive of the uniform measure.
    pub fn uniform(m: usize) -> Self {
        Self { values: (0..m).map(|j| j as f64 / m as f64).collect(), winding: 1.0 }
    }

    /// Samples `f` at the grid nodes; `f` must satisfy `f(θ + 2π) = f(θ) + winding`.
    pub fn from_fn(m: usize, winding: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let h = grid_step(m);
        Self::new((0..m).map(|j| f(j as f64 * h)).collect(), winding)
    }

    /// Left-rectangle cumulative sum `F_j = Δθ Σ_{k<j} μ_k`; inverse of [`PseudoCDF::to_density`].
    pub fn from_density_cumulative(density: &PeriodicDensity) -> Self {
        let h = grid_step(density.len());
        let mut acc = 0.0;
        let values = density
            .values()
            .iter()
            .map(|&v| {
                let out = acc;
                acc += v * h;
                out
            })
            .collect();
        Self { values, winding: density.mass() }
    }

    /// Forward differences `(F_{j+1} - F_j) / Δθ` with winding extension.
    pub fn to_density(&self) -> PeriodicDensity {
        let m = self.values.len();
        let h = grid_step(m);
        let values = (0..m).map(|j| (self.at(j as i64 + 1) - self.values[j]) / h).collect();
        PeriodicDensity::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn winding(&self) -> f64 {
        self.winding
    }

    /// Nodal value at any integer index using the winding extension.
    pub fn at(&self, j: i64) -> f64 {
        let m = self.values.len() as i64;
        let k = j.rem_euclid(m);
        let wraps = (j - k) / m;
        self.values[k as usize] + self.winding * wraps as f64
    }

    /// Piecewise-linear interpolation between nodes, extended by winding.
    pub fn eval(&self, theta: f64) -> f64 {
        let h = grid_step(self.values.len());
        let s = theta / h;
        let j = s.floor();
        let frac = s - j;
        let j = j as i64;
        let lo = self.at(j);
        if frac == 0.0 {
            return lo;
        }
        lo + frac * (self.at(j + 1) - lo)
    }

    /// The datum `F(· - c)` for a shift of `cells` grid cells.
    pub fn shifted_cells(&self, cells: i64) -> Self {
        let m = self.values.len() as i64;
        Self {
            values: (0..m).map(|j| self.at(j - cells)).collect(),
            winding: self.winding,
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.validate().is_ok()
    }
}

/// Sup-norm distance between two pseudo-CDFs on the same grid.
pub fn cdf_distance(a: &PseudoCDF, b: &PseudoCDF) -> Result<f64> {
    if a.len() != b.len() {
        return Err(DysonError::Shape(format!(
            "grid sizes differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Density samples `μ(2πj/M)` on the uniform circle grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDensity {
    values: Vec<f64>,
    mass: f64,
}

impl PeriodicDensity {
    pub fn new(values: Vec<f64>) -> Self {
        let mass = grid_step(values.len()) * values.iter().sum::<f64>();
        Self { values, mass }
    }

    pub fn uniform(m: usize) -> Self {
        Self::new(vec![1.0 / TAU; m])
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::new(grid_nodes(m).into_iter().map(f).collect())
    }

    /// Von Mises bump `exp(κ cos(θ - center))`, rescaled to unit discrete mass.
    pub fn von_mises(m: usize, kappa: f64, center: f64) -> Self {
        let raw = Self::from_fn(m, |t| (kappa * ((t - center).cos() - 1.0)).exp());
        raw.scaled(1.0 / raw.mass)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.values)
    }

    pub fn argmin(&self) -> usize {
        argmax(&self.values.iter().map(|v| -v).collect::<Vec<_>>())
    }

    /// Discrete `L^p` norm `(Δθ Σ |μ_j|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let h = grid_step(self.values.len());
        (h * self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    /// Checks `|mass - 1| <= tol_mass` and `min >= -tol_neg`.
    pub fn check(&self, tol_mass: f64, tol_neg: f64) -> Result<()> {
        if (self.mass - 1.0).abs() > tol_mass {
            return Err(DysonError::Precondition(format!("density mass {} differs from 1", self.mass)));
        }
        if self.min() < -tol_neg {
            return Err(DysonError::Precondition(format!("density minimum {} is negative", self.min())));
        }
        Ok(())
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

/// Fourier coefficients `c_n = ∫ e^{-inθ} μ(dθ)` for `|n| <= max_mode`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    max_mode: usize,
    coefficients: Vec<Complex64>,
    pub aliasing_warning: bool,
}

impl FourierCoefficients {
    /// `coefficients[k]` holds mode `n = k - max_mode`.
    pub fn new(max_mode: usize, coefficients: Vec<Complex64>, aliasing_warning: bool) -> Result<Self> {
        if coefficients.len() != 2 * max_mode + 1 {
            return Err(DysonError::Shape(format!(
                "expected {} coefficients, got {}",
                2 * max_mode + 1,
                coefficients.len()
            )));
        }
        Ok(Self { max_mode, coefficients, aliasing_warning })
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn get(&self, n: i64) -> Complex64 {
        assert!(n.unsigned_abs() as usize <= self.max_mode, "mode {n} out of range");
        self.coefficients[(n + self.max_mode as i64) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.max_mode as i64;
        self.coefficients.iter().enumerate().map(move |(k, c)| (k as i64 - offset, *c))
    }
}
