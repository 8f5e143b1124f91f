//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use mdsplan::assignment::ValueMatrix;

/// Smallest `t` with `sum_n max_l l (1 - theta_n l / t) >= L`, the inner
/// maxima taken over a dense grid and the outer search by bisection.
pub fn markov_grid_oracle(thetas: &[f64], rows: f64) -> f64 {
    let best_at = |t: f64| -> f64 {
        thetas
            .iter()
            .map(|&th| {
                let hi = t / th;
                (0..=4000)
                    .map(|i| {
                        let l = hi * i as f64 / 4000.0;
                        l * (1.0 - th * l / t)
                    })
                    .fold(0.0, f64::max)
            })
            .sum()
    };
    bisect_min_t(|t| best_at(t) >= rows, 1e-9)
}

/// Smallest `t` such that shifted-exponential nodes `(u, a)` can cover `L`
/// in expectation; per-node maxima by ternary search (the objective is
/// concave in `l`).
pub fn exact_comp_oracle(links: &[(f64, f64)], rows: f64) -> f64 {
    let best_at = |t: f64| -> f64 {
        links
            .iter()
            .map(|&(u, a)| {
                let g = |l: f64| {
                    if l <= 0.0 {
                        0.0
                    } else {
                        l * shifted_cdf(u, a, l, t)
                    }
                };
                let (mut lo, mut hi) = (0.0, t / a);
                for _ in 0..300 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if g(m1) < g(m2) {
                        lo = m1;
                    } else {
                        hi = m2;
                    }
                }
                g(0.5 * (lo + hi))
            })
            .sum()
    };
    bisect_min_t(|t| best_at(t) >= rows, 1e-12)
}

pub fn shifted_cdf(u: f64, a: f64, l: f64, t: f64) -> f64 {
    let x = t - a * l;
    if x <= 0.0 {
        0.0
    } else {
        1.0 - (-(u / l) * x).exp()
    }
}

/// Smallest `t` at which fixed loads cover `L` in expectation.
pub fn min_feasible_t(links: &[(f64, f64)], loads: &[f64], rows: f64) -> f64 {
    let covered = |t: f64| -> f64 {
        links
            .iter()
            .zip(loads)
            .map(|(&(u, a), &l)| {
                if l <= 0.0 {
                    0.0
                } else {
                    l * shifted_cdf(u, a, l, t)
                }
            })
            .sum()
    };
    bisect_min_t(|t| covered(t) >= rows, 1e-13)
}

/// Bisection for the smallest `t > 0` with `feasible(t)`, assuming
/// monotonicity.
pub fn bisect_min_t(feasible: impl Fn(f64) -> bool, rel_tol: f64) -> f64 {
    let mut hi = 1.0;
    while !feasible(hi) {
        hi *= 2.0;
        assert!(hi < 1e15, "no feasible t");
    }
    let mut lo = 0.0;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Root of `w e^w = x` on the lower branch by bisection on `[-750, -1]`.
pub fn lambert_lower_bisection(x: f64) -> f64 {
    let (mut lo, mut hi) = (-750.0f64, -1.0f64);
    // w e^w decreases from 0- to -1/e on this interval.
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.exp() > x {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Best max-min value over all `M^N` dedicated assignments.
pub fn dedicated_optimum(values: &ValueMatrix) -> f64 {
    let m = values.num_masters();
    let n = values.num_workers();
    let mut owner = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let mut sums: Vec<f64> = (0..m).map(|i| values.get(i, 0)).collect();
        for (w, &o) in owner.iter().enumerate() {
            sums[o] += values.get(o, w + 1);
        }
        best = best.max(sums.into_iter().fold(f64::INFINITY, f64::min));
        // Next assignment in mixed radix.
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            owner[i] += 1;
            if owner[i] < m {
                break;
            }
            owner[i] = 0;
            i += 1;
        }
    }
}
