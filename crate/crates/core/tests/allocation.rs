mod common;

use common::{exact_comp_oracle, lambert_lower_bisection, markov_grid_oracle, min_feasible_t};
use mdsplan::allocation::{exact_kkt_residual, fractional_optimal_loads, markov_kkt_residual};
use mdsplan::{
    exact_allocate_computation, lambert_w_minus1, markov_allocate, phi, sca_refine,
    EffectiveChannel, LinkParams, ScaConfig, ShiftedExp, UnitDelay,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn finite(thetas: &[f64]) -> Vec<UnitDelay> {
    thetas.iter().map(|&t| UnitDelay::Finite(t)).collect()
}

#[test]
fn markov_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let thetas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..5.0)).collect();
        let rows = rng.gen_range(10.0..1e4);
        let r = markov_allocate(&finite(&thetas), rows).unwrap();
        let oracle = markov_grid_oracle(&thetas, rows);
        assert!((r.t - oracle).abs() < 5e-3 * oracle, "{} vs {oracle}", r.t);
        assert!(r.diagnostics.kkt_residual < 1e-9);
        assert!((r.total_load() - 2.0 * rows).abs() < 1e-9 * rows);
    }
}

#[test]
fn markov_skips_unreachable_nodes() {
    let thetas = vec![
        UnitDelay::Finite(1.0),
        UnitDelay::Unreachable,
        UnitDelay::Finite(2.0),
    ];
    let r = markov_allocate(&thetas, 30.0).unwrap();
    assert_eq!(r.loads[1], 0.0);
    let only = markov_allocate(&finite(&[1.0, 2.0]), 30.0).unwrap();
    assert!((r.t - only.t).abs() < 1e-12);
    assert!(markov_allocate(&[UnitDelay::<f64>::Unreachable], 30.0).is_err());
}

#[test]
fn exact_matches_bisection_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let n = rng.gen_range(1..=3);
        let links: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(0.05..0.5);
                (1.0 / a, a)
            })
            .collect();
        let laws: Vec<ShiftedExp> = links.iter().map(|&(u, a)| ShiftedExp { u, a }).collect();
        let rows = rng.gen_range(10.0..1e4);
        let r = exact_allocate_computation(&laws, rows).unwrap();
        let oracle = exact_comp_oracle(&links, rows);
        assert!((r.t - oracle).abs() < 5e-3 * oracle, "{} vs {oracle}", r.t);
        assert!(
            r.diagnostics.kkt_residual < 1e-6,
            "{}",
            r.diagnostics.kkt_residual
        );
    }
}

#[test]
fn exact_beats_perturbed_allocations() {
    let links = [(4.0, 0.25), (2.0, 0.5), (1.0 / 0.3, 0.3)];
    let laws: Vec<ShiftedExp> = links.iter().map(|&(u, a)| ShiftedExp { u, a }).collect();
    let rows = 1e4;
    let r = exact_allocate_computation(&laws, rows).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let perturbed: Vec<f64> = r
            .loads
            .iter()
            .map(|&l| l * (1.0 + rng.gen_range(-0.05..0.05)))
            .collect();
        let t = min_feasible_t(&links, &perturbed, rows);
        assert!(t >= r.t - 1e-6, "{t} < {}", r.t);
    }
}

#[test]
fn kkt_residuals_flag_wrong_points() {
    let thetas = finite(&[1.0, 2.0]);
    let r = markov_allocate(&thetas, 100.0).unwrap();
    assert!(markov_kkt_residual(&thetas, 100.0, &r.loads, r.t) < 1e-12);
    assert!(markov_kkt_residual(&thetas, 100.0, &r.loads, 1.1 * r.t) > 1e-3);
    let laws = [ShiftedExp { u: 2.0, a: 0.5 }];
    let e = exact_allocate_computation(&laws, 100.0).unwrap();
    assert!(exact_kkt_residual(&laws, 100.0, &e.loads, e.t) < 1e-9);
    assert!(exact_kkt_residual(&laws, 100.0, &[e.loads[0] * 1.1], e.t) > 1e-3);
}

#[test]
fn fractional_loads_examples() {
    assert_eq!(fractional_optimal_loads(&finite(&[4.0]), 8.0), vec![1.0]);
    assert_eq!(
        fractional_optimal_loads(&finite(&[1.0, 2.0]), 2.0),
        vec![1.0, 0.5]
    );
    // At t = L / sum 1/(4 theta) the surrogate constraint holds with equality.
    let thetas = [1.0, 2.0, 5.0];
    let rows = 60.0;
    let t = rows / thetas.iter().map(|th| 0.25 / th).sum::<f64>();
    let loads = fractional_optimal_loads(&finite(&thetas), t);
    let covered: f64 = thetas
        .iter()
        .zip(&loads)
        .map(|(th, l)| l * (1.0 - th * l / t))
        .sum();
    assert!((covered - rows).abs() < 1e-9);
}

#[test]
fn lambert_agrees_with_bisection() {
    for i in 0..200 {
        // Log-spaced in distance from 0 over (-1/e, 0).
        let x = -(-1.0f64).exp() * 10f64.powf(-15.0 * i as f64 / 199.0);
        let x = if i == 0 { x * (1.0 - 1e-12) } else { x };
        let w = lambert_w_minus1(x).unwrap();
        let oracle = lambert_lower_bisection(x);
        assert!(
            (w - oracle).abs() < 1e-9 * oracle.abs(),
            "x={x}: {w} vs {oracle}"
        );
    }
}

#[test]
fn phi_solves_stationarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let a = rng.gen_range(0.01..3.0);
        let u = rng.gen_range(0.1..50.0);
        let p: f64 = phi(u, a).unwrap();
        let residual = (1.0 + u * p) * (u * (a - p)).exp() - 1.0;
        assert!(residual.abs() < 1e-10, "u={u} a={a}: {residual}");
        assert!(p > a);
    }
}

#[test]
fn sca_improves_average_markov_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0.0;
    let trials = 10;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let mut chans = vec![EffectiveChannel::local(&LinkParams::local(2.0, 0.5), 0.0)];
        for _ in 0..n {
            let a: f64 = rng.gen_range(0.2..0.3);
            chans.push(EffectiveChannel::new(
                &LinkParams::remote(2.0 / a, 1.0 / a, a),
                1.0,
                1.0,
                0.0,
            ));
        }
        let thetas: Vec<UnitDelay> = chans.iter().map(|c| c.unit_delay()).collect();
        let init = markov_allocate(&thetas, 1e4).unwrap();
        let r = sca_refine(&chans, 1e4, &init, &ScaConfig::default()).unwrap();
        assert!(r.t <= init.t);
        total += 1.0 - r.t / init.t;
    }
    assert!(total / trials as f64 > 0.03);
}

proptest! {
    #[test]
    fn lambert_round_trip(e in -300.0f64..-1e-3) {
        let x = -(-1.0f64).exp() * (1.0 - 10f64.powf(e / 20.0)).max(1e-300);
        let w = lambert_w_minus1(x).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs());
    }

    #[test]
    fn markov_surrogate_is_tight(thetas in proptest::collection::vec(0.05f64..10.0, 1..6), rows in 1.0f64..1e5) {
        let r = markov_allocate(&finite(&thetas), rows).unwrap();
        let covered: f64 = thetas.iter().zip(&r.loads).map(|(th, l)| l * (1.0 - th * l / r.t)).sum();
        prop_assert!((covered - rows).abs() < 1e-9 * rows);
    }
}
