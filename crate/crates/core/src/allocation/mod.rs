//! Load allocation for one master given the nodes serving it.
//!
//! * [`markov_allocate`]: optimum of the Markov-bound surrogate, usable with
//!   any delay law whose mean is known.
//! * [`exact_allocate_computation`]: exact optimum when computation delay
//!   dominates (shifted-exponential nodes).
//! * [`fractional_optimal_loads`]: the stationarity rule `l = t / (2 theta)`.
//! * [`sca_refine`]: successive convex approximation on the true
//!   expected-completion constraint.

mod lambert;
mod sca;

pub use lambert::{lambert_w_minus1, phi};
pub use sca::{dc_split, sca_refine, DcTerm, ScaConfig, TwoStageConvex};

use crate::delay::UnitDelay;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics<T: Real = f64> {
    pub iterations: usize,
    pub kkt_residual: T,
    /// Value of the constraint function `L - E[X](l, t)` (or its surrogate)
    /// at the returned point; `<= 0` means feasible.
    pub surrogate_value: T,
}

/// Loads per node (local node first) and the predicted completion delay.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult<T: Real = f64> {
    pub loads: Vec<T>,
    pub t: T,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> AllocationResult<T> {
    pub fn total_load(&self) -> T {
        self.loads.iter().copied().sum()
    }
}

/// Shifted-exponential computation law: rate `u`, shift `a` per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedExp<T: Real = f64> {
    pub u: T,
    pub a: T,
}

fn check_task_size<T: Real>(task_rows: T) -> Result<()> {
    if task_rows > T::zero() && task_rows.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "task size must be positive, got {task_rows}"
        )))
    }
}

fn finite_thetas<T: Real>(thetas: &[UnitDelay<T>]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::Domain("no serving nodes".into()));
    }
    for (n, theta) in thetas.iter().enumerate() {
        if let UnitDelay::Finite(v) = theta {
            if !(*v > T::zero() && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "theta of node {n} must be finite and positive, got {v}"
                )));
            }
        }
    }
    if !thetas.iter().any(|t| t.is_finite()) {
        return Err(Error::Domain("every node is unreachable".into()));
    }
    Ok(())
}

/// Optimal loads for the Markov-bound surrogate
/// `sum_n l_n (1 - theta_n l_n / t) >= L`:
/// `l_n = L / (theta_n sum 1/(2 theta))`, `t = L / sum 1/(4 theta)`.
///
/// Unreachable nodes get zero load.
pub fn markov_allocate<T: Real>(
    thetas: &[UnitDelay<T>],
    task_rows: T,
) -> Result<AllocationResult<T>> {
    check_task_size(task_rows)?;
    finite_thetas(thetas)?;
    let rate_sum: T = thetas.iter().map(|th| th.inverse()).sum();
    let two = T::lit(2.0);
    let loads: Vec<T> = thetas
        .iter()
        .map(|th| two * task_rows * th.inverse() / rate_sum)
        .collect();
    let t = T::lit(4.0) * task_rows / rate_sum;
    let kkt_residual = markov_kkt_residual(thetas, task_rows, &loads, t);
    let surrogate_value = task_rows
        - thetas
            .iter()
            .zip(&loads)
            .filter(|(th, _)| th.is_finite())
            .map(|(th, &l)| l * (T::one() - th.theta() * l / t))
            .sum::<T>();
    Ok(AllocationResult {
        loads,
        t,
        diagnostics: Diagnostics {
            iterations: 0,
            kkt_residual,
            surrogate_value,
        },
    })
}

/// Largest violation of the optimality system of the Markov surrogate at
/// `(loads, t)`: stationarity `2 theta_n l_n / t = 1` for every reachable
/// node and the active constraint, relative to `L`.
pub fn markov_kkt_residual<T: Real>(thetas: &[UnitDelay<T>], task_rows: T, loads: &[T], t: T) -> T {
    let mut worst = T::zero();
    let mut received = T::zero();
    for (th, &l) in thetas.iter().zip(loads) {
        if let UnitDelay::Finite(theta) = th {
            worst = worst.max((T::lit(2.0) * *theta * l / t - T::one()).abs());
            received = received + l * (T::one() - *theta * l / t);
        }
    }
    worst.max((task_rows - received).abs() / task_rows)
}

/// Exact optimum of the expected-completion problem when every node's delay
/// is shifted exponential:
/// `l_n = L / (phi_n S)`, `t = L / S`, `S = sum u_n / (1 + u_n phi_n)`.
///
/// A communication-dominant instance can be approximated by passing the
/// communication rates as `u` with a small positive shift.
pub fn exact_allocate_computation<T: Real>(
    links: &[ShiftedExp<T>],
    task_rows: T,
) -> Result<AllocationResult<T>> {
    check_task_size(task_rows)?;
    if links.is_empty() {
        return Err(Error::Domain("no serving nodes".into()));
    }
    let phis = links
        .iter()
        .map(|l| phi(l.u, l.a))
        .collect::<Result<Vec<T>>>()?;
    let rate_sum: T = links
        .iter()
        .zip(&phis)
        .map(|(l, &p)| l.u / (T::one() + l.u * p))
        .sum();
    let t = task_rows / rate_sum;
    let loads: Vec<T> = phis.iter().map(|&p| t / p).collect();
    let kkt_residual = exact_kkt_residual(links, task_rows, &loads, t);
    let received: T = links
        .iter()
        .zip(&loads)
        .map(|(l, &x)| x * shifted_exp_cdf(l, x, t))
        .sum();
    Ok(AllocationResult {
        loads,
        t,
        diagnostics: Diagnostics {
            iterations: 0,
            kkt_residual,
            surrogate_value: task_rows - received,
        },
    })
}

fn shifted_exp_cdf<T: Real>(link: &ShiftedExp<T>, load: T, t: T) -> T {
    let x = t - link.a * load;
    if x <= T::zero() {
        T::zero()
    } else {
        -(-(link.u / load) * x).exp_m1()
    }
}

/// Largest violation of the optimality system of the computation-dominant
/// problem at `(loads, t)`: per-node stationarity
/// `(1 + u t / l) e^{u (a - t/l)} = 1` and the active constraint relative
/// to `L`.
pub fn exact_kkt_residual<T: Real>(links: &[ShiftedExp<T>], task_rows: T, loads: &[T], t: T) -> T {
    let mut worst = T::zero();
    let mut received = T::zero();
    for (link, &l) in links.iter().zip(loads) {
        let r = t / l;
        let stat = (T::one() + link.u * r) * (link.u * (link.a - r)).exp() - T::one();
        worst = worst.max(stat.abs());
        received = received + l * shifted_exp_cdf(link, l, t);
    }
    worst.max((task_rows - received).abs() / task_rows)
}

/// Stationary loads `l_n = t / (2 theta_n)` for a given delay `t`;
/// unreachable nodes get zero.
pub fn fractional_optimal_loads<T: Real>(thetas: &[UnitDelay<T>], t: T) -> Vec<T> {
    let half = T::lit(0.5);
    thetas.iter().map(|th| half * t * th.inverse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: &[f64]) -> Vec<UnitDelay> {
        v.iter().map(|&x| UnitDelay::Finite(x)).collect()
    }

    #[test]
    fn markov_single_node() {
        let r = markov_allocate(&fin(&[1.0]), 100.0).unwrap();
        assert!((r.loads[0] - 200.0).abs() < 1e-12);
        assert!((r.t - 400.0).abs() < 1e-12);
    }

    #[test]
    fn markov_two_nodes() {
        let r = markov_allocate(&fin(&[2.0, 1.0]), 100.0).unwrap();
        assert!((r.loads[0] - 200.0 / 3.0).abs() < 1e-12);
        assert!((r.loads[1] - 400.0 / 3.0).abs() < 1e-12);
        assert!((r.t - 800.0 / 3.0).abs() < 1e-12);
        let r = markov_allocate(&fin(&[1.0, 1.0]), 100.0).unwrap();
        assert_eq!(r.loads, vec![100.0, 100.0]);
        assert_eq!(r.t, 200.0);
    }

    #[test]
    fn markov_equalizes_expected_node_delay() {
        let r = markov_allocate(&fin(&[0.7, 1.3, 2.9, 0.4]), 5000.0).unwrap();
        let thetas = [0.7, 1.3, 2.9, 0.4];
        let first = thetas[0] * r.loads[0];
        for (th, l) in thetas.iter().zip(&r.loads) {
            assert!((th * l - first).abs() < 1e-9 * first);
        }
        assert!((r.total_load() - 10000.0).abs() < 1e-9);
        assert!(r.diagnostics.kkt_residual < 1e-12);
        assert!(r.diagnostics.surrogate_value.abs() < 1e-9);
    }

    #[test]
    fn markov_skips_unreachable() {
        let mut th = fin(&[1.0]);
        th.push(UnitDelay::Unreachable);
        let r = markov_allocate(&th, 100.0).unwrap();
        assert_eq!(r.loads[1], 0.0);
        assert!((r.t - 400.0).abs() < 1e-12);
    }

    #[test]
    fn markov_errors() {
        assert!(markov_allocate::<f64>(&[], 100.0).is_err());
        assert!(markov_allocate(&fin(&[f64::INFINITY]), 100.0).is_err());
        assert!(markov_allocate(&fin(&[1.0]), 0.0).is_err());
        assert!(markov_allocate(&[UnitDelay::<f64>::Unreachable], 1.0).is_err());
    }

    #[test]
    fn exact_single_and_pair() {
        let one = [ShiftedExp { u: 1.0, a: 1.0 }];
        let r = exact_allocate_computation(&one, 100.0).unwrap();
        assert!((r.t - 314.619_322_062_058_26_f64).abs() < 1e-9);
        assert!((r.loads[0] - 146.594_127_238_499_29_f64).abs() < 1e-9);
        let two = [ShiftedExp { u: 1.0, a: 1.0 }; 2];
        let r = exact_allocate_computation(&two, 100.0).unwrap();
        assert!((r.t - 157.309_661_031_029_13_f64).abs() < 1e-9);
        for l in &r.loads {
            assert!((l - 73.297_063_619_249_64_f64).abs() < 1e-9);
        }
        assert!(r.diagnostics.kkt_residual < 1e-9);
    }

    #[test]
    fn exact_ratio_is_phi() {
        let links: [ShiftedExp; 3] = [
            ShiftedExp { u: 4.0, a: 0.25 },
            ShiftedExp { u: 2.0, a: 0.5 },
            ShiftedExp { u: 9.0, a: 0.11 },
        ];
        let r = exact_allocate_computation(&links, 1e4).unwrap();
        for (l, x) in links.iter().zip(&r.loads) {
            let p = phi(l.u, l.a).unwrap();
            assert!((r.t / x - p).abs() < 1e-9 * p);
        }
    }

    #[test]
    fn exact_errors() {
        assert!(exact_allocate_computation::<f64>(&[], 1.0).is_err());
        assert!(exact_allocate_computation(&[ShiftedExp { u: 1.0, a: 0.0 }], 1.0).is_err());
    }

    #[test]
    fn fractional_loads() {
        assert_eq!(fractional_optimal_loads(&fin(&[4.0]), 8.0), vec![1.0]);
        assert_eq!(
            fractional_optimal_loads(&fin(&[1.0, 2.0]), 2.0),
            vec![1.0, 0.5]
        );
        let mut th = fin(&[1.0]);
        th.push(UnitDelay::Unreachable);
        assert_eq!(fractional_optimal_loads(&th, 2.0), vec![1.0, 0.0]);
    }

    #[test]
    fn fractional_loads_reduce_surrogate_to_linear_form() {
        // Substituting l = t/(2 theta) turns sum l (1 - theta l / t) into sum t/(4 theta).
        let thetas = [0.3, 1.7, 2.2];
        let t = 37.0;
        let loads = fractional_optimal_loads(&fin(&thetas), t);
        let received: f64 = thetas
            .iter()
            .zip(&loads)
            .map(|(th, l)| l * (1.0 - th * l / t))
            .sum();
        let linear: f64 = thetas.iter().map(|th| t / (4.0 * th)).sum();
        assert!((received - linear).abs() < 1e-12);
    }
}
