use std::f64::consts::TAU;

use dyson_core::diagnostics::{
    bound_report, entropy_dissipation, fourier_coefficients, free_entropy, free_entropy_quadrature, lower_bound_checks,
};
use dyson_core::spectral::{solve_density, DensitySolverOptions};
use dyson_core::{PeriodicDensity, ReportOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(1 + Σ a_n cos nθ + b_n sin nθ)/2π` with its exact free entropy `Σ (a_n² + b_n²)/(4n)`.
fn trig_density(rng: &mut impl Rng, m: usize, modes: usize, size: f64) -> (PeriodicDensity, f64) {
    let ab: Vec<(f64, f64)> = (1..=modes).map(|_| (rng.random_range(-size..size), rng.random_range(-size..size))).collect();
    let exact = ab.iter().enumerate().map(|(k, (a, b))| (a * a + b * b) / (4.0 * (k + 1) as f64)).sum();
    let mu = PeriodicDensity::from_fn(m, |t| {
        let s: f64 = ab.iter().enumerate().map(|(k, (a, b))| {
            let n = (k + 1) as f64;
            a * (n * t).cos() + b * (n * t).sin()
        }).sum();
        (1.0 + s) / TAU
    });
    (mu, exact)
}

#[test]
fn entropy_of_reference_densities() {
    assert_eq!(free_entropy(&PeriodicDensity::uniform(64), 31).unwrap().value, 0.0);
    let mu = PeriodicDensity::from_fn(256, |t| (1.0 + t.cos()) / TAU);
    assert!((free_entropy(&mu, 127).unwrap().value - 0.25).abs() <= 1e-8);
}

#[test]
fn fourier_and_quadrature_entropies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let (mu, exact) = trig_density(&mut rng, 128, 8, 0.2);
        let fourier = free_entropy(&mu, 63).unwrap().value;
        let quad = free_entropy_quadrature(mu.values(), 4).unwrap();
        assert!((fourier - exact).abs() <= 1e-12, "{fourier} vs {exact}");
        assert!((quad - exact).abs() <= 1e-6, "{quad} vs {exact}");
    }
}

#[test]
fn entropy_of_differences_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (mu, _) = trig_density(&mut rng, 64, 6, 0.3);
        let (nu, _) = trig_density(&mut rng, 64, 6, 0.3);
        let diff = PeriodicDensity::new(mu.values().iter().zip(nu.values()).map(|(a, b)| a - b).collect());
        assert!(diff.mass().abs() < 1e-14);
        assert!(free_entropy(&diff, 31).unwrap().value > 0.0);
    }
}

#[test]
fn dissipation_identity_on_band_limited_densities() {
    let mu = PeriodicDensity::from_fn(256, |t| (1.0 + t.cos()) / TAU);
    let (lhs, rhs) = entropy_dissipation(&mu).unwrap();
    assert!((lhs - 0.5).abs() <= 1e-6 && (rhs - 0.5).abs() <= 1e-6, "{lhs} {rhs}");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (mu, _) = trig_density(&mut rng, 256, 10, 0.08);
        let (lhs, rhs) = entropy_dissipation(&mu).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1e-12), "{lhs} vs {rhs}");
    }
}

#[test]
fn lower_bound_lemmas_hold_on_random_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let modes = rng.random_range(1..=6);
        let coeffs: Vec<(f64, f64)> = (0..modes).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let raw = PeriodicDensity::from_fn(256, |t| {
            coeffs.iter().enumerate().map(|(k, (a, b))| {
                let n = (k + 1) as f64;
                a * (n * t).cos() + b * (n * t).sin()
            }).sum::<f64>().exp()
        });
        let mu = raw.scaled(1.0 / raw.mass());
        let rec = lower_bound_checks(&mu).unwrap();
        assert!(rec.holds(), "{rec:?}");
    }
}

#[test]
fn aliasing_flag_tracks_resolution() {
    let smooth = PeriodicDensity::from_fn(64, |t| (1.0 + 0.5 * t.cos()) / TAU);
    assert!(!fourier_coefficients(&smooth, 20).unwrap().aliasing_warning);
    let sharp = PeriodicDensity::von_mises(64, 200.0, 1.0);
    assert!(fourier_coefficients(&sharp, 20).unwrap().aliasing_warning);
    let c = fourier_coefficients(&smooth, 3).unwrap();
    assert!((c.get(0).re - 1.0).abs() < 1e-14 && (c.get(1).re - 0.25).abs() < 1e-14);
}

#[test]
fn long_solve_approaches_uniform_and_passes_report() {
    let mu0 = PeriodicDensity::from_fn(128, |t| (1.0 + 0.5 * t.cos() + 0.3 * (3.0 * t).sin()) / TAU);
    let tr = solve_density(&mu0, 8.0, 1e-3, DensitySolverOptions { record_interval: 0.05, ..Default::default() }).unwrap();
    let c1 = fourier_coefficients(tr.final_state(), 4).unwrap().get(1);
    assert!(c1.norm() < 1e-3, "|c_1| = {}", c1.norm());
    let entropy: Vec<f64> = tr.states.iter().map(|s| free_entropy(s, 63).unwrap().value).collect();
    assert!(entropy.windows(2).all(|w| w[1] <= w[0] + 1e-8));
    let report = bound_report(&tr.times, &tr.states, &ReportOptions::default()).unwrap();
    for b in &report.bounds {
        assert!(b.passed, "{b:?}");
    }
}
