use std::f64::consts::TAU;

use dyson_core::primitive::{
    a0_quadrature, a0_split, cfl_bound, evolve, primitive_step, solve_primitive, A0Stencil, PrimitiveSolverOptions,
};
use dyson_core::{cdf_distance, DysonError, PrimitiveState, PseudoCDF};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random nondecreasing datum of winding 1: cumulative sum of positive increments.
fn random_cdf(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let inc: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = inc.iter().sum();
    let mut acc = rng.random_range(-0.5..0.5);
    inc.iter()
        .map(|d| {
            let v = acc;
            acc += d / total;
            v
        })
        .collect()
}

#[test]
fn ordered_pairs_stay_ordered() {
    let m = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let stencil = A0Stencil::new(m).unwrap();
    for _ in 0..50 {
        let lower = random_cdf(&mut rng, m);
        let mut upper = random_cdf(&mut rng, m);
        // lift the upper datum until it dominates
        let gap = lower.iter().zip(&upper).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        let lift = gap.max(0.0) + rng.random_range(0.0..0.05);
        upper.iter_mut().for_each(|v| *v += lift);
        let mut f = PrimitiveState::new(&PseudoCDF::new(lower, 1.0).unwrap(), 0.5).unwrap();
        let mut g = PrimitiveState::new(&PseudoCDF::new(upper, 1.0).unwrap(), 0.5).unwrap();
        for _ in 0..200 {
            let dt = cfl_bound(&f, &stencil).min(cfl_bound(&g, &stencil));
            f = primitive_step(&f, &stencil, dt).unwrap();
            g = primitive_step(&g, &stencil, dt).unwrap();
            assert!((0..m as i64).all(|j| f.at(j) <= g.at(j)), "ordering lost at t = {}", f.time);
            assert!(f.is_nondecreasing() && g.is_nondecreasing());
            assert_eq!(f.winding(), 1.0);
            assert_eq!(g.winding(), 1.0);
        }
    }
}

#[test]
fn grid_shifts_commute_with_the_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let m = 128;
    let f0 = PrimitiveState::new(&PseudoCDF::new(random_cdf(&mut rng, m), 1.0).unwrap(), 0.5).unwrap();
    let opts = PrimitiveSolverOptions::default();
    let (plain, _, _) = evolve(&f0, 0.3, opts).unwrap();
    for cells in [1i64, 17, -40, 128] {
        let (moved, _, _) = evolve(&f0.shifted_cells(cells), 0.3, opts).unwrap();
        let expected = plain.shifted_cells(cells);
        for j in 0..m as i64 {
            let (a, b) = (moved.at(j), expected.at(j));
            assert!((a - b).abs() <= 2.0 * f64::EPSILON * a.abs().max(1.0), "shift {cells}, node {j}");
        }
    }
}

#[test]
fn refinement_converges() {
    let f0 = |m: usize| PseudoCDF::from_fn(m, 1.0, |t| (t + 0.8 * t.sin()) / TAU).unwrap();
    let run = |m: usize| solve_primitive(&f0(m), 0.5, PrimitiveSolverOptions::default()).unwrap().final_state().clone();
    let reference = run(1024);
    let coarse = |m: usize| {
        let f = run(m);
        // compare on the coarse nodes
        let stride = 1024 / m;
        let r = PseudoCDF::new_unchecked((0..m).map(|j| reference.values()[j * stride]).collect(), 1.0);
        cdf_distance(&f, &r).unwrap()
    };
    let (e64, e128, e256) = (coarse(64), coarse(128), coarse(256));
    assert!(e128 < e64 && e256 < e128, "{e64} {e128} {e256}");
    assert!(e256 < 5e-3, "{e256}");
}

#[test]
fn quadrature_matches_multiplier_on_smooth_data() {
    // F = θ/2π + a sin θ has A₀F = 2π a sin θ; the trapezoid rule is second order
    let a = 0.05;
    let mut errs = Vec::new();
    for m in [64usize, 128, 256] {
        let f = PseudoCDF::from_fn(m, 1.0, |t| t / TAU + a * t.sin()).unwrap();
        let e = (0..m)
            .map(|j| {
                let t = j as f64 * TAU / m as f64;
                (a0_quadrature(&f, j).unwrap() - TAU * a * t.sin()).abs()
            })
            .fold(0.0, f64::max);
        errs.push(e);
    }
    assert!(errs[0] < 1e-2);
    assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0, "{errs:?}");
}

#[test]
fn split_adds_up() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = PseudoCDF::new(random_cdf(&mut rng, 64), 1.0).unwrap();
    for delta in [0.01, 0.3, 1.0, 3.0] {
        for j in [0, 7, 63] {
            let (local, far) = a0_split(&f, j, delta).unwrap();
            let total = a0_quadrature(&f, j).unwrap();
            assert!((local + far - total).abs() < 1e-12);
        }
    }
}

#[test]
fn oversized_step_is_rejected_with_a_suggestion() {
    let f = PseudoCDF::from_fn(64, 1.0, |t| (t + 0.9 * t.sin()) / TAU).unwrap();
    let s = PrimitiveState::new(&f, 0.5).unwrap();
    let stencil = A0Stencil::new(64).unwrap();
    let bound = cfl_bound(&s, &stencil);
    match primitive_step(&s, &stencil, 2.0 * bound) {
        Err(DysonError::Cfl { suggested_dt, .. }) => assert!(suggested_dt <= bound),
        other => panic!("expected a CFL error, got {other:?}"),
    }
}

#[test]
fn decreasing_data_are_rejected() {
    let mut v: Vec<f64> = (0..16).map(|j| j as f64 / 16.0).collect();
    v.swap(3, 4);
    assert!(PseudoCDF::new(v.clone(), 1.0).is_err());
    let bad = PseudoCDF::new_unchecked(v, 1.0);
    assert!(PrimitiveState::new(&bad, 0.5).is_err());
}
