//! Matrix-level unitary Dyson motion `U(t+h) = U(t) exp(i √(h/N) M)` with `M`
//! drawn from the GUE, and extraction of its eigenphases.

use std::f64::consts::TAU;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::circle::wrap_unchecked;
use crate::error::{DysonError, Result};
use crate::noise::NoiseStream;

const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const REORTHONORMALIZE_ABOVE: f64 = 1e-10;
const CLUSTER_GAP: f64 = 1e-8;
const PHASE_RESIDUAL_TOL: f64 = 1e-6;

/// Dense row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Row-major entries; `entries.len()` must be a perfect square.
    pub fn from_rows(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(DysonError::Shape(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        Ok(Self { n, data: entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |A_ij − B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            if a[(p, k)].norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out.data[i * n..(i + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Hermitian matrix; only the upper triangle is ever written independently.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `m` when `‖m − m†‖_max ≤ 1e-12` and symmetrizes it exactly.
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.max_abs_diff(&m.adjoint());
        if defect > 1e-12 {
            return Err(DysonError::Precondition(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        let n = m.dim();
        let mut h = m;
        for i in 0..n {
            h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
            for j in i + 1..n {
                h[(j, i)] = h[(i, j)].conj();
            }
        }
        Ok(Self(h))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_diagonal(&diag.iter().map(|&d| Complex64::new(d, 0.0)).collect::<Vec<_>>()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Unitary matrix together with its measured defect `‖U†U − I‖_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    m: CMatrix,
    defect: f64,
}

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect > 1e-8 {
            return Err(DysonError::Precondition(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(Self { m, defect })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: CMatrix::identity(n), defect: 0.0 }
    }

    /// `diag(e^{iθ_k})`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let diag: Vec<Complex64> = phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let m = CMatrix::from_diagonal(&diag);
        let defect = unitarity_defect(&m);
        Self { m, defect }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.defect
    }

    /// Newton polar iteration `U ← U(3I − U†U)/2` until the defect is at rounding level.
    pub fn reorthonormalized(&self) -> Self {
        let n = self.dim();
        let mut u = self.m.clone();
        for _ in 0..8 {
            let g = &u.adjoint() * &u;
            let correction = CMatrix::identity(n).scale(Complex64::new(3.0, 0.0)).sub(&g).scale(Complex64::new(0.5, 0.0));
            u = &u * &correction;
            if unitarity_defect(&u) <= 1e-14 {
                break;
            }
        }
        let defect = unitarity_defect(&u);
        Self { m: u, defect }
    }
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    (&m.adjoint() * m).max_abs_diff(&CMatrix::identity(m.dim()))
}

/// GUE sample: off-diagonal real and imaginary parts with variance 1/2, real diagonal with variance 1.
pub fn sample_gue(n: usize, noise: &NoiseStream, step: u64) -> HermitianMatrix {
    let mut z = vec![0.0; n * n];
    noise.normals(step, 0, &mut z);
    let mut m = CMatrix::zeros(n);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut k = 0;
    for i in 0..n {
        m[(i, i)] = Complex64::new(z[k], 0.0);
        k += 1;
        for j in i + 1..n {
            let v = Complex64::new(r * z[k], r * z[k + 1]);
            k += 2;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    HermitianMatrix(m)
}

/// Eigen-decomposition `H = V diag(λ) V†` with ascending `λ`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eig(h: &HermitianMatrix) -> Result<Eigen> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm();
    let off = |a: &CMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut converged = off(&a) <= OFF_DIAGONAL_TOL * norm;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(DysonError::Numerical(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-diagonal mass {:e})",
                off(&a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = off(&a) <= OFF_DIAGONAL_TOL * norm;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)];
        }
    }
    let defect = unitarity_defect(&vectors);
    Ok(Eigen { values, vectors: UnitaryMatrix { m: vectors, defect } })
}

/// One Jacobi rotation annihilating `a[p][q]`, accumulated into `v`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / r;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J has columns p = (c, -s e^{-iφ}) and q = (s e^{iφ}, c) in rows (p, q).
    let se = phase * s;
    let se_conj = se.conj();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c - se_conj * akq;
        a[(k, q)] = se * akp + akq * c;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c - se_conj * vkq;
        v[(k, q)] = se * vkp + vkq * c;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c - se * aqk;
        a[(q, k)] = se_conj * apk + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// `U exp(i s M)` with `s = √(h/N)`, re-orthonormalized when the defect exceeds `1e-10`.
pub fn unitary_step(u: &UnitaryMatrix, h: f64, m: &HermitianMatrix) -> Result<UnitaryMatrix> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(DysonError::Domain(format!("matrix step must be positive, got {h}")));
    }
    if u.dim() != m.dim() {
        return Err(DysonError::Shape(format!("dimensions differ: {} vs {}", u.dim(), m.dim())));
    }
    let n = u.dim();
    let s = (h / n as f64).sqrt();
    let eig = hermitian_eig(m)?;
    let w = eig.vectors.matrix();
    let mut scaled = w.clone();
    for j in 0..n {
        let e = Complex64::from_polar(1.0, s * eig.values[j]);
        for i in 0..n {
            scaled[(i, j)] *= e;
        }
    }
    let exp = &scaled * &w.adjoint();
    let next = &u.m * &exp;
    let defect = unitarity_defect(&next);
    let out = UnitaryMatrix { m: next, defect };
    Ok(if defect > REORTHONORMALIZE_ABOVE { out.reorthonormalized() } else { out })
}

/// Eigenphases in `[0, 2π)`, ascending.
pub fn eigenphases(u: &UnitaryMatrix) -> Result<Vec<f64>> {
    if u.unitarity_defect() > 1e-8 {
        return Err(DysonError::Precondition(format!(
            "unitarity defect {:e} too large for phase extraction",
            u.unitarity_defect()
        )));
    }
    let n = u.dim();
    let um = u.matrix();
    let ua = um.adjoint();
    let half = Complex64::new(0.5, 0.0);
    let cos_part = HermitianMatrix::new(um.add(&ua).scale(half))?;
    let sin_part = HermitianMatrix::new(um.sub(&ua).scale(Complex64::new(0.0, -0.5)))?;
    let eig = hermitian_eig(&cos_part)?;
    let v = eig.vectors.matrix();
    let mut basis: Vec<Vec<Complex64>> = (0..n).map(|j| v.column(j)).collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            resolve_cluster(&mut basis[start..end], sin_part.matrix())?;
        }
        start = end;
    }

    let mut phases = Vec::with_capacity(n);
    for vec in &basis {
        let uv = um.matvec(vec);
        let rayleigh: Complex64 = vec.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
        let theta = rayleigh.arg();
        let e = Complex64::from_polar(1.0, theta);
        let residual = uv.iter().zip(vec).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt();
        if residual > PHASE_RESIDUAL_TOL {
            return Err(DysonError::Numerical(format!("eigenphase residual {residual:e} exceeds {PHASE_RESIDUAL_TOL:e}")));
        }
        phases.push(wrap_unchecked(theta));
    }
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// Rotates a cluster basis so that it also diagonalizes the sine part.
fn resolve_cluster(basis: &mut [Vec<Complex64>], s: &CMatrix) -> Result<()> {
    let k = basis.len();
    let sv: Vec<Vec<Complex64>> = basis.iter().map(|b| s.matvec(b)).collect();
    let mut restricted = CMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            restricted[(i, j)] = basis[i].iter().zip(&sv[j]).map(|(a, b)| a.conj() * b).sum();
        }
    }
    let local = hermitian_eig(&HermitianMatrix::new(symmetrize(restricted))?)?;
    let w = local.vectors.matrix();
    let n = basis[0].len();
    let rotated: Vec<Vec<Complex64>> = (0..k)
        .map(|j| (0..n).map(|r| (0..k).map(|i| basis[i][r] * w[(i, j)]).sum()).collect())
        .collect();
    basis.clone_from_slice(&rotated);
    Ok(())
}

fn symmetrize(m: CMatrix) -> CMatrix {
    m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Recorded eigenphases of a matrix trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixTrajectory {
    pub times: Vec<f64>,
    pub phases: Vec<Vec<f64>>,
    pub seed: u64,
    /// Largest unitarity defect seen at a recorded time.
    pub max_defect: f64,
}

/// `diag(e^{2πik/N})`.
pub fn equally_spaced_unitary(n: usize) -> UnitaryMatrix {
    UnitaryMatrix::from_phases(&(0..n).map(|k| TAU * k as f64 / n as f64).collect::<Vec<_>>())
}

/// Iterates [`unitary_step`] from `initial` (default: equally spaced phases).
pub fn simulate_matrix(
    n: usize,
    t_end: f64,
    h: f64,
    seed: u64,
    record_every: usize,
    initial: Option<UnitaryMatrix>,
) -> Result<MatrixTrajectory> {
    if n < 2 {
        return Err(DysonError::Precondition(format!("need N >= 2, got {n}")));
    }
    if !(h > 0.0) || !h.is_finite() || !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(DysonError::Domain(format!("invalid schedule T = {t_end}, h = {h}")));
    }
    let mut u = initial.unwrap_or_else(|| equally_spaced_unitary(n));
    if u.dim() != n {
        return Err(DysonError::Shape(format!("initial matrix has dimension {}, expected {n}", u.dim())));
    }
    let record_every = record_every.max(1);
    let noise = NoiseStream::new(seed);
    let steps = (t_end / h - 1e-9).ceil().max(0.0) as usize;
    let mut times = vec![0.0];
    let mut phases = vec![eigenphases(&u)?];
    let mut max_defect = u.unitarity_defect();
    for k in 0..steps {
        let t0 = k as f64 * h;
        let t1 = if k + 1 == steps { t_end } else { (k + 1) as f64 * h };
        let m = sample_gue(n, &noise, k as u64);
        u = unitary_step(&u, t1 - t0, &m)?;
        if (k + 1) % record_every == 0 || k + 1 == steps {
            max_defect = max_defect.max(u.unitarity_defect());
            times.push(t1);
            phases.push(eigenphases(&u)?);
        }
    }
    Ok(MatrixTrajectory { times, phases, seed, max_defect })
}
