//! Successive convex approximation of the expected-completion constraint.
//!
//! A node with communication rate `p`, computation rate `q` (ordered so that
//! `p >= q`) and shift `s` per row returns `l (1 - S(t/l - s))` rows in
//! expectation by `t`, where `S(y) = (p e^{-qy} - q e^{-py}) / (p - q)` is
//! the survival function of `Exp(p) + Exp(q)`. Writing
//!
//! ```text
//! S = A - B,   B(y) = (q/p) e^{-py},   A = S + B
//! ```
//!
//! makes both `A` and `B` convex, so their perspectives `h+ = l A(t/l - s)`
//! and `h- = l B(t/l - s)` are jointly convex and `L - E[X]` is a
//! difference of convex functions. Linearizing `h-` at the current point
//! gives a convex upper bound; its minimum-`t` point is the next target.
//! `A` is evaluated with `expm1`, so equal rates need no special case.
//! Nodes without communication contribute the convex term
//! `-l + l exp(r s - r t / l)` directly.
//!
//! At fixed `t` the bound separates per node, so each subproblem is an outer
//! bisection on `t` with one golden-section search per node inside.

use crate::delay::{expected_completed, EffectiveChannel};
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{check_task_size, AllocationResult, Diagnostics};

const BISECTION_ITERS: usize = 200;
const GOLDEN_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaConfig<T: Real = f64> {
    /// Step-size decrease ratio in (0, 1).
    pub alpha: T,
    pub max_iters: usize,
    /// Stop once the subproblem improves `t` by less than this fraction.
    pub tol: T,
    /// Allowed violation of `E[X] >= L`, relative to `L`.
    pub feasibility_tol: T,
}

impl<T: Real> Default for ScaConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(0.995),
            max_iters: 500,
            tol: T::lit(1e-6),
            feasibility_tol: T::lit(1e-6),
        }
    }
}

/// `coef * l * exp(rate * shift - rate * t / l)`, zero at `l = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcTerm<T: Real = f64> {
    pub coef: T,
    pub rate: T,
    pub shift: T,
}

impl<T: Real> DcTerm<T> {
    fn exponential(&self, l: T, t: T) -> T {
        (self.rate * self.shift - self.rate * t / l).exp()
    }

    pub fn value(&self, l: T, t: T) -> T {
        if l <= T::zero() {
            return T::zero();
        }
        self.coef * l * self.exponential(l, t)
    }

    /// `(d/dl, d/dt)`.
    pub fn gradient(&self, l: T, t: T) -> (T, T) {
        if l <= T::zero() {
            return (T::zero(), T::zero());
        }
        let e = self.exponential(l, t);
        (
            self.coef * e * (T::one() + self.rate * t / l),
            -self.coef * self.rate * e,
        )
    }
}

/// `l * A(t/l - s)`: the convex part of a two-stage node's survival term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStageConvex<T: Real = f64> {
    pub fast: T,
    pub slow: T,
    pub shift: T,
}

impl<T: Real> TwoStageConvex<T> {
    /// `A(y) = S(y) + (q/p) e^{-py}`.
    pub fn unit(&self, y: T) -> T {
        let (p, q) = (self.fast, self.slow);
        let d = p - q;
        // (1 - e^{-dy}) / d, which tends to y as d -> 0.
        let ratio = if d * y == T::zero() {
            y
        } else {
            -(-d * y).exp_m1() / d
        };
        let survival = (-q * y).exp() * (T::one() + q * ratio);
        survival + q / p * (-p * y).exp()
    }

    pub fn value(&self, l: T, t: T) -> T {
        if l <= T::zero() {
            return T::zero();
        }
        l * self.unit(t / l - self.shift)
    }
}

/// Splits a communication-plus-computation node into `(h+, h-)` with
/// `h+ - h- = l S(t/l - s)`.
pub fn dc_split<T: Real>(comm_rate: T, comp_rate: T, shift: T) -> (TwoStageConvex<T>, DcTerm<T>) {
    let (fast, slow) = if comm_rate >= comp_rate {
        (comm_rate, comp_rate)
    } else {
        (comp_rate, comm_rate)
    };
    (
        TwoStageConvex { fast, slow, shift },
        DcTerm {
            coef: slow / fast,
            rate: fast,
            shift,
        },
    )
}

#[derive(Debug, Clone, Copy)]
enum NodeModel<T: Real> {
    /// No communication stage: constraint term `-l + h(l, t)`, convex.
    Single(DcTerm<T>),
    /// Communication and computation: `-l + h+ - h-`.
    Dual {
        plus: TwoStageConvex<T>,
        minus: DcTerm<T>,
    },
}

impl<T: Real> NodeModel<T> {
    fn from_channel(ch: &EffectiveChannel<T>) -> Self {
        let shift = ch.comp_shift;
        match ch.comm_rate {
            None => NodeModel::Single(DcTerm {
                coef: T::one(),
                rate: ch.comp_rate,
                shift,
            }),
            Some(comm) => {
                let (plus, minus) = dc_split(comm, ch.comp_rate, shift);
                NodeModel::Dual { plus, minus }
            }
        }
    }

    fn shift(&self) -> T {
        match self {
            NodeModel::Single(h) => h.shift,
            NodeModel::Dual { plus, .. } => plus.shift,
        }
    }
}

/// Convex upper bound of one node's constraint term, linearized at `(lz, tz)`.
#[derive(Debug, Clone, Copy)]
struct Surrogate<T: Real> {
    model: NodeModel<T>,
    /// `h-(z)`, `dh-/dl(z)`, `dh-/dt(z)`, `l_z`, `t_z`.
    lin: (T, T, T, T, T),
}

impl<T: Real> Surrogate<T> {
    fn at(model: NodeModel<T>, lz: T, tz: T) -> Self {
        let lin = match model {
            NodeModel::Single(_) => (T::zero(), T::zero(), T::zero(), lz, tz),
            NodeModel::Dual { minus, .. } => {
                let (gl, gt) = minus.gradient(lz, tz);
                (minus.value(lz, tz), gl, gt, lz, tz)
            }
        };
        Self { model, lin }
    }

    fn value(&self, l: T, t: T) -> T {
        match self.model {
            NodeModel::Single(h) => h.value(l, t) - l,
            NodeModel::Dual { plus, .. } => {
                let (h0, gl, gt, lz, tz) = self.lin;
                plus.value(l, t) - l - (h0 + gl * (l - lz) + gt * (t - tz))
            }
        }
    }

    /// Minimizes over `l` in `[0, upper]`; `hint` is always among the
    /// candidates so the result never exceeds the value there.
    fn minimize(&self, t: T, upper: T, hint: T) -> (T, T) {
        let inv_phi = T::lit(0.618_033_988_749_894_8);
        let (mut a, mut b) = (T::zero(), upper);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = self.value(c, t);
        let mut fd = self.value(d, t);
        for _ in 0..GOLDEN_ITERS {
            if b - a <= T::lit(4.0) * T::epsilon() * upper.max(T::one()) {
                break;
            }
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = self.value(c, t);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = self.value(d, t);
            }
        }
        let mut best = if fc < fd { (c, fc) } else { (d, fd) };
        for cand in [T::zero(), upper, hint.min(upper).max(T::zero())] {
            let v = self.value(cand, t);
            if v < best.1 {
                best = (cand, v);
            }
        }
        best
    }
}

struct Subproblem<T: Real> {
    nodes: Vec<Surrogate<T>>,
    task_rows: T,
    load_cap: T,
}

impl<T: Real> Subproblem<T> {
    fn upper(&self, model: &NodeModel<T>, t: T) -> T {
        let s = model.shift();
        if s > T::zero() {
            (t / s).min(self.load_cap)
        } else {
            self.load_cap
        }
    }

    /// Per-node minimizers at `t` and the bound value `L + sum min`.
    fn evaluate(&self, t: T, hints: &[T]) -> (Vec<T>, T) {
        let mut total = self.task_rows;
        let loads = self
            .nodes
            .iter()
            .zip(hints)
            .map(|(node, &hint)| {
                let (l, v) = node.minimize(t, self.upper(&node.model, t), hint);
                total = total + v;
                l
            })
            .collect();
        (loads, total)
    }

    /// Smallest feasible `t` in `(0, t_hi]`. The feasible set of the convex
    /// bound is an interval containing `t_hi`, so bisection applies.
    fn solve(&self, t_hi: T, hints: &[T]) -> Option<(Vec<T>, T)> {
        let (mut hi_loads, hi_val) = self.evaluate(t_hi, hints);
        if hi_val > T::zero() {
            return None;
        }
        let mut lo = T::zero();
        let mut hi = t_hi;
        for _ in 0..BISECTION_ITERS {
            if hi - lo <= T::lit(1e-12) * hi {
                break;
            }
            let mid = T::lit(0.5) * (lo + hi);
            let (loads, val) = self.evaluate(mid, &hi_loads);
            if val <= T::zero() {
                hi = mid;
                hi_loads = loads;
            } else {
                lo = mid;
            }
        }
        Some((hi_loads, hi))
    }
}

/// Refines a feasible allocation against the true constraint
/// `sum_n l_n P[T_n <= t] >= L`.
///
/// `nodes` describe the serving channels (local first); their `load` fields
/// are ignored, loads come from `init`. Every iterate stays feasible, and
/// the returned `t` never exceeds `init.t`.
pub fn sca_refine<T: Real>(
    nodes: &[EffectiveChannel<T>],
    task_rows: T,
    init: &AllocationResult<T>,
    cfg: &ScaConfig<T>,
) -> Result<AllocationResult<T>> {
    check_task_size(task_rows)?;
    if nodes.is_empty() || nodes.len() != init.loads.len() {
        return Err(Error::Domain(format!(
            "expected {} initial loads, found {}",
            nodes.len(),
            init.loads.len()
        )));
    }
    if !(cfg.alpha > T::zero() && cfg.alpha < T::one()) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 1), got {}",
            cfg.alpha
        )));
    }
    if !(init.t > T::zero()) {
        return Err(Error::Infeasible(format!(
            "initial delay must be positive, got {}",
            init.t
        )));
    }
    let violation = constraint_value(nodes, task_rows, &init.loads, init.t);
    if violation > cfg.feasibility_tol * task_rows {
        return Err(Error::Infeasible(format!(
            "initial point misses the task size by {violation}"
        )));
    }

    let models: Vec<NodeModel<T>> = nodes.iter().map(NodeModel::from_channel).collect();
    let init_total: T = init.loads.iter().copied().sum();
    let load_cap = T::lit(4.0) * task_rows.max(init_total);

    let mut z_loads = init.loads.clone();
    let mut z_t = init.t;
    let mut step = T::one();
    let mut gap = T::zero();
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let sub = Subproblem {
            nodes: models
                .iter()
                .zip(&z_loads)
                .map(|(&m, &l)| Surrogate::at(m, l, z_t))
                .collect(),
            task_rows,
            load_cap,
        };
        let Some((w_loads, w_t)) = sub.solve(z_t, &z_loads) else {
            // Rounding left the current point on the wrong side of the bound.
            break;
        };
        iterations += 1;
        gap = (z_t - w_t) / z_t;
        if gap < cfg.tol {
            break;
        }
        for (z, w) in z_loads.iter_mut().zip(&w_loads) {
            *z = *z + step * (*w - *z);
        }
        z_t = z_t + step * (w_t - z_t);
        step = step * (T::one() - cfg.alpha * step);
    }

    let violation = constraint_value(nodes, task_rows, &z_loads, z_t);
    if violation > cfg.feasibility_tol * task_rows {
        return Err(Error::Solver(format!(
            "refined point misses the task size by {violation}"
        )));
    }
    Ok(AllocationResult {
        loads: z_loads,
        t: z_t,
        diagnostics: Diagnostics {
            iterations,
            kkt_residual: gap.max(T::zero()),
            surrogate_value: violation,
        },
    })
}

/// `L - E[X](t)` with the exact delay laws.
fn constraint_value<T: Real>(nodes: &[EffectiveChannel<T>], task_rows: T, loads: &[T], t: T) -> T {
    let chans: Vec<EffectiveChannel<T>> = nodes
        .iter()
        .zip(loads)
        .map(|(ch, &l)| EffectiveChannel { load: l, ..*ch })
        .collect();
    task_rows - expected_completed(&chans, t)
}
