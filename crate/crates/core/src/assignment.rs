//! Worker assignment as max-min allocation.
//!
//! With the Markov-surrogate loads, master `m` finishes at
//! `1/t_m = v_{m,0} + sum_n k_{m,n} v_{m,n}` where `v_{m,n} = 1/(4 L_m theta_{m,n})`.
//! Minimizing the slowest master is then the max-min allocation of workers
//! (items) to masters (agents) with values `v`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::phi;
use crate::delay::{unit_delay, UnitDelay};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scenario::Scenario;

/// Which per-node value drives the assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueMode {
    /// `1/(4 L theta)` from the Markov surrogate.
    General,
    /// `u/(L (1 + u phi))` from the exact computation-dominant optimum.
    CompDominant,
}

/// `M x (N+1)` values, column 0 for local computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMatrix<T: Real = f64> {
    v: Vec<Vec<T>>,
}

impl<T: Real> ValueMatrix<T> {
    pub fn new(v: Vec<Vec<T>>) -> Result<Self> {
        let width = v.first().map(Vec::len).unwrap_or(0);
        if v.is_empty() || width == 0 {
            return Err(Error::invalid(
                "values",
                "need at least one master and the local column",
            ));
        }
        for (m, row) in v.iter().enumerate() {
            if row.len() != width {
                return Err(Error::invalid(format!("values[{m}]"), "ragged row"));
            }
            if let Some(n) = row.iter().position(|x| !(*x > T::zero() && x.is_finite())) {
                return Err(Error::invalid(
                    format!("values[{m}][{n}]"),
                    "must be finite and positive",
                ));
            }
        }
        Ok(Self { v })
    }

    pub fn num_masters(&self) -> usize {
        self.v.len()
    }

    pub fn num_workers(&self) -> usize {
        self.v[0].len() - 1
    }

    /// Value of node `n` (0 = local) for master `m`.
    pub fn get(&self, m: usize, n: usize) -> T {
        self.v[m][n]
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.v
    }

    fn worker(&self, m: usize, w: usize) -> T {
        self.v[m][w + 1]
    }
}

pub fn compute_values<T: Real>(scenario: &Scenario<T>, mode: ValueMode) -> Result<ValueMatrix<T>> {
    let four = T::lit(4.0);
    let v = (0..scenario.num_masters())
        .map(|m| {
            let rows = scenario.task_size(m);
            (0..=scenario.num_workers())
                .map(|n| {
                    let link = scenario.link(m, n);
                    match mode {
                        ValueMode::General => {
                            Ok(unit_delay(link, T::one(), T::one()).inverse() / (four * rows))
                        }
                        ValueMode::CompDominant => {
                            let p = phi(link.u, link.a)?;
                            Ok(link.u / (rows * (T::one() + link.u * p)))
                        }
                    }
                })
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ValueMatrix::new(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyTag {
    Dedicated,
    Fractional,
    UniformUncoded,
    UniformCoded,
    BruteForce,
}

/// Computing-power fractions `k` and bandwidth fractions `b`, both `M x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T: Real = f64> {
    pub k: Vec<Vec<T>>,
    pub b: Vec<Vec<T>>,
    pub policy: PolicyTag,
}

impl<T: Real> Assignment<T> {
    /// Binary assignment from each worker's master.
    pub fn dedicated(owner: &[usize], num_masters: usize, policy: PolicyTag) -> Self {
        let mut k = vec![vec![T::zero(); owner.len()]; num_masters];
        for (n, &m) in owner.iter().enumerate() {
            k[m][n] = T::one();
        }
        Self {
            b: k.clone(),
            k,
            policy,
        }
    }

    pub fn num_masters(&self) -> usize {
        self.k.len()
    }

    pub fn num_workers(&self) -> usize {
        self.k.first().map_or(0, Vec::len)
    }

    /// Whether master `m` uses worker `w` (0-based worker index).
    pub fn grants(&self, m: usize, w: usize) -> bool {
        self.k[m][w] > T::zero() && self.b[m][w] > T::zero()
    }

    /// `theta` of node `n` (0 = local) for master `m` under these fractions.
    pub fn unit_delay(&self, scenario: &Scenario<T>, m: usize, n: usize) -> UnitDelay<T> {
        if n == 0 {
            unit_delay(scenario.link(m, 0), T::one(), T::one())
        } else {
            unit_delay(scenario.link(m, n), self.k[m][n - 1], self.b[m][n - 1])
        }
    }

    /// `V_m = (1/L_m) sum_n 1/(4 theta_{m,n})`.
    pub fn sum_values(&self, scenario: &Scenario<T>) -> Vec<T> {
        (0..self.num_masters())
            .map(|m| master_value(self, scenario, m))
            .collect()
    }

    /// Checks column sums and, for binary policies, `k in {0,1}` with `b = k`.
    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(1e-9);
        for n in 0..self.num_workers() {
            let mut ks = T::zero();
            let mut bs = T::zero();
            for m in 0..self.num_masters() {
                let (k, b) = (self.k[m][n], self.b[m][n]);
                if !(k >= T::zero() && k <= T::one() && b >= T::zero() && b <= T::one()) {
                    return Err(Error::invalid(
                        format!("assignment[{m}][{n}]"),
                        "fraction outside [0, 1]",
                    ));
                }
                if matches!(
                    self.policy,
                    PolicyTag::Dedicated | PolicyTag::UniformCoded | PolicyTag::UniformUncoded
                ) && (k != b || (k != T::zero() && k != T::one()))
                {
                    return Err(Error::invalid(
                        format!("assignment[{m}][{n}]"),
                        "dedicated entries must be binary with b = k",
                    ));
                }
                ks = ks + k;
                bs = bs + b;
            }
            if ks > T::one() + tol || bs > T::one() + tol {
                return Err(Error::invalid(
                    format!("assignment[*][{n}]"),
                    "column sum exceeds 1",
                ));
            }
        }
        Ok(())
    }
}

fn master_value<T: Real>(asg: &Assignment<T>, scenario: &Scenario<T>, m: usize) -> T {
    let total: T = (0..=scenario.num_workers())
        .map(|n| asg.unit_delay(scenario, m, n).inverse())
        .sum();
    total / (T::lit(4.0) * scenario.task_size(m))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentOutcome<T: Real = f64> {
    pub assignment: Assignment<T>,
    pub sum_values: Vec<T>,
    pub min_value: T,
}

impl<T: Real> AssignmentOutcome<T> {
    fn from_owner(values: &ValueMatrix<T>, owner: &[usize]) -> Self {
        let sums = owner_sums(values, owner);
        Self {
            assignment: Assignment::dedicated(owner, values.num_masters(), PolicyTag::Dedicated),
            min_value: min_of(&sums),
            sum_values: sums,
        }
    }

    /// Master serving each worker, for dedicated assignments.
    pub fn owners(&self) -> Option<Vec<usize>> {
        (0..self.assignment.num_workers())
            .map(|n| {
                (0..self.assignment.num_masters()).find(|&m| self.assignment.k[m][n] == T::one())
            })
            .collect()
    }
}

fn owner_sums<T: Real>(values: &ValueMatrix<T>, owner: &[usize]) -> Vec<T> {
    let mut sums: Vec<T> = (0..values.num_masters())
        .map(|m| values.get(m, 0))
        .collect();
    for (w, &m) in owner.iter().enumerate() {
        sums[m] = sums[m] + values.worker(m, w);
    }
    sums
}

fn min_of<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().fold(T::infinity(), T::min)
}

/// Whether `a` beats `b` in the leximin order: ascending-sorted vectors
/// compared lexicographically. Implies `min a >= min b`, and holds whenever
/// `min a > min b`.
fn leximin_greater<T: Real>(a: &[T], b: &[T]) -> bool {
    let sorted = |x: &[T]| {
        let mut v = x.to_vec();
        v.sort_by(|p, q| p.partial_cmp(q).expect("finite values"));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    for (x, y) in a.iter().zip(&b) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// Index of the smallest entry, lowest index on ties.
fn argmin<T: Real>(xs: impl IntoIterator<Item = (usize, T)>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, x) in xs {
        if best.is_none_or(|(_, b)| x < b) {
            best = Some((i, x));
        }
    }
    best.map(|(i, _)| i)
}

/// Index of the largest entry, lowest index on ties.
fn argmax<T: Real>(xs: impl IntoIterator<Item = (usize, T)>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, x) in xs {
        if best.is_none_or(|(_, b)| x > b) {
            best = Some((i, x));
        }
    }
    best.map(|(i, _)| i)
}

/// Largest-value-first greedy: repeatedly give the currently poorest master
/// its most valuable remaining worker.
pub fn simple_greedy<T: Real>(values: &ValueMatrix<T>) -> AssignmentOutcome<T> {
    let m_count = values.num_masters();
    let mut sums: Vec<T> = (0..m_count).map(|m| values.get(m, 0)).collect();
    let mut owner = vec![usize::MAX; values.num_workers()];
    let mut remaining: Vec<usize> = (0..values.num_workers()).collect();
    while !remaining.is_empty() {
        let m = argmin(sums.iter().copied().enumerate()).expect("masters");
        let pos =
            argmax(remaining.iter().map(|&w| values.worker(m, w)).enumerate()).expect("workers");
        let w = remaining.remove(pos);
        owner[w] = m;
        sums[m] = sums[m] + values.worker(m, w);
    }
    AssignmentOutcome::from_owner(values, &owner)
}

fn simple_min_better<T: Real>(values: &ValueMatrix<T>, owner: &[usize], than: T) -> bool {
    min_of(&owner_sums(values, owner)) > than
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratedGreedyConfig {
    pub max_iters: usize,
    /// Fraction of workers removed and greedily reinserted per iteration.
    pub explore_fraction: f64,
    /// Stop after this many iterations without a new best.
    pub stall_limit: usize,
    pub seed: u64,
    pub reinsertion: Reinsertion,
}

/// How the exploration phase hands removed workers back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reinsertion {
    /// Repeatedly the (master, worker) pair with the largest value.
    GlobalArgmax,
    /// Repeatedly the poorest master takes its most valuable removed worker.
    PoorestFirst,
    /// Each removed worker goes to a uniformly drawn master.
    Random,
}

impl Default for IteratedGreedyConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            explore_fraction: 0.2,
            stall_limit: 20,
            seed: 0,
            reinsertion: Reinsertion::Random,
        }
    }
}

/// Result of [`iterated_greedy_traced`]: the best assignment plus the
/// minimum sum value observed after each interchange phase.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratedGreedyRun<T: Real = f64> {
    pub outcome: AssignmentOutcome<T>,
    pub trace: Vec<T>,
    pub initial_min: T,
}

pub fn iterated_greedy<T: Real>(
    values: &ValueMatrix<T>,
    cfg: &IteratedGreedyConfig,
) -> AssignmentOutcome<T> {
    iterated_greedy_traced(values, cfg).outcome
}

/// Iterated greedy: best-value initialization, then rounds of insertion,
/// interchange and random exploration. Returns the best assignment seen
/// after an interchange phase (or the initialization if nothing beat it).
pub fn iterated_greedy_traced<T: Real>(
    values: &ValueMatrix<T>,
    cfg: &IteratedGreedyConfig,
) -> IteratedGreedyRun<T> {
    let m_count = values.num_masters();
    let n_count = values.num_workers();

    let mut owner: Vec<usize> = (0..n_count)
        .map(|w| argmax((0..m_count).map(|m| (m, values.worker(m, w)))).expect("masters"))
        .collect();
    let initial_min = min_of(&owner_sums(values, &owner));
    // Start from the simple-greedy partition when it is better; the
    // per-worker argmax can leave a master with almost nothing.
    if let Some(simple) = simple_greedy(values).owners() {
        if simple_min_better(values, &simple, initial_min) {
            owner = simple;
        }
    }
    let mut sums = owner_sums(values, &owner);
    let mut best_owner = owner.clone();
    let mut best_min = min_of(&sums);
    let mut trace = Vec::new();

    if m_count < 2 || n_count == 0 {
        return IteratedGreedyRun {
            outcome: AssignmentOutcome::from_owner(values, &best_owner),
            trace,
            initial_min,
        };
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let explore =
        ((cfg.explore_fraction * n_count as f64).ceil() as usize).clamp(n_count.min(2), n_count);
    let mut stall = 0;

    for _ in 0..cfg.max_iters {
        // Insertion: move one worker when the sorted sums improve.
        #[allow(clippy::needless_range_loop)]
        for w in 0..n_count {
            let m1 = owner[w];
            for m2 in (0..m_count).filter(|&m| m != m1) {
                let mut trial = sums.clone();
                trial[m1] = trial[m1] - values.worker(m1, w);
                trial[m2] = trial[m2] + values.worker(m2, w);
                if leximin_greater(&trial, &sums) {
                    owner[w] = m2;
                    sums = trial;
                    break;
                }
            }
        }

        // Interchange: swap two workers of different masters likewise.
        for w1 in 0..n_count {
            for w2 in 0..n_count {
                let (m1, m2) = (owner[w1], owner[w2]);
                if w1 == w2 || m1 == m2 {
                    continue;
                }
                let mut trial = sums.clone();
                trial[m1] = trial[m1] - values.worker(m1, w1) + values.worker(m1, w2);
                trial[m2] = trial[m2] - values.worker(m2, w2) + values.worker(m2, w1);
                if leximin_greater(&trial, &sums) {
                    owner[w1] = m2;
                    owner[w2] = m1;
                    sums = trial;
                }
            }
        }

        let current = min_of(&sums);
        trace.push(current);
        if current > best_min {
            best_min = current;
            best_owner = owner.clone();
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.stall_limit {
                break;
            }
        }

        // Exploration: remove a random subset, then reinsert greedily.
        let mut removed: Vec<usize> = sample(&mut rng, n_count, explore).into_vec();
        removed.sort_unstable();
        for &w in &removed {
            let m = owner[w];
            sums[m] = sums[m] - values.worker(m, w);
        }
        while !removed.is_empty() {
            let (m, pos) = match cfg.reinsertion {
                Reinsertion::GlobalArgmax => {
                    let mut pick = (0, 0);
                    let mut best = T::neg_infinity();
                    for m in 0..m_count {
                        for (pos, &w) in removed.iter().enumerate() {
                            if values.worker(m, w) > best {
                                best = values.worker(m, w);
                                pick = (m, pos);
                            }
                        }
                    }
                    pick
                }
                Reinsertion::PoorestFirst => {
                    let m = argmin(sums.iter().copied().enumerate()).expect("masters");
                    let pos = argmax(removed.iter().map(|&w| values.worker(m, w)).enumerate())
                        .expect("workers");
                    (m, pos)
                }
                Reinsertion::Random => (rng.gen_range(0..m_count), 0),
            };
            let w = removed.remove(pos);
            owner[w] = m;
            sums[m] = sums[m] + values.worker(m, w);
        }
        // Recompute to keep rounding drift out of later comparisons.
        sums = owner_sums(values, &owner);
    }

    IteratedGreedyRun {
        outcome: AssignmentOutcome::from_owner(values, &best_owner),
        trace,
        initial_min,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalConfig {
    pub max_iters: usize,
    /// Stop once `max V - min V <= balance_tol * min V`.
    pub balance_tol: f64,
    /// Optional cap on the number of masters sharing one worker.
    pub max_masters_per_worker: Option<usize>,
}

impl Default for FractionalConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            balance_tol: 1e-6,
            max_masters_per_worker: None,
        }
    }
}

/// Balances a dedicated assignment by moving computing power and bandwidth
/// from the richest master to the poorest one.
///
/// A split moves the same fraction `x` of a worker's `k` and `b`. Because
/// `theta` scales as `1/x` when both fractions scale by `x`, each master's
/// value is linear in `x` and the equalizing split has a closed form.
pub fn fractional_greedy<T: Real>(
    scenario: &Scenario<T>,
    init: &AssignmentOutcome<T>,
    cfg: &FractionalConfig,
) -> AssignmentOutcome<T> {
    let m_count = scenario.num_masters();
    let mut asg = init.assignment.clone();
    asg.policy = PolicyTag::Fractional;
    let mut sums = asg.sum_values(scenario);
    let four = T::lit(4.0);

    for _ in 0..cfg.max_iters {
        if m_count < 2 {
            break;
        }
        let m1 = argmax(sums.iter().copied().enumerate()).expect("masters");
        let m2 = argmin(sums.iter().copied().enumerate()).expect("masters");
        if sums[m1] - sums[m2] <= T::lit(cfg.balance_tol) * sums[m2] {
            break;
        }
        let candidates = (0..asg.num_workers()).filter(|&w| {
            let shared = (0..m_count).filter(|&m| asg.k[m][w] > T::zero()).count();
            asg.k[m1][w] > T::zero()
                && asg.k[m2][w] == T::zero()
                && cfg.max_masters_per_worker.is_none_or(|cap| shared < cap)
        });
        let gain =
            |w: usize| unit_delay(scenario.link(m2, w + 1), asg.k[m1][w], asg.b[m1][w]).inverse();
        let Some(w) = argmax(candidates.map(|w| (w, gain(w)))) else {
            break;
        };
        let (k1, b1) = (asg.k[m1][w], asg.b[m1][w]);
        let c1 = asg.unit_delay(scenario, m1, w + 1).inverse() / (four * scenario.task_size(m1));
        let c2 = gain(w) / (four * scenario.task_size(m2));
        if sums[m1] - c1 <= sums[m2] + c2 {
            let x = ((sums[m1] - sums[m2]) / (c1 + c2)).min(T::one());
            asg.k[m2][w] = x * k1;
            asg.b[m2][w] = x * b1;
            asg.k[m1][w] = (T::one() - x) * k1;
            asg.b[m1][w] = (T::one() - x) * b1;
        } else {
            asg.k[m2][w] = k1;
            asg.b[m2][w] = b1;
            asg.k[m1][w] = T::zero();
            asg.b[m1][w] = T::zero();
        }
        sums[m1] = master_value(&asg, scenario, m1);
        sums[m2] = master_value(&asg, scenario, m2);
    }

    AssignmentOutcome {
        min_value: min_of(&sums),
        sum_values: sums,
        assignment: asg,
    }
}

/// Upper bound on the number of grid points [`brute_force_fractional`] visits.
type WorkerOption<T> = (Vec<T>, Vec<T>, Vec<T>);

pub const BRUTE_FORCE_MAX_POINTS: f64 = 2e8;

/// Exhaustive max-min search over `k`, `b` on a grid of the given step.
///
/// Giving a worker's spare capacity to any master never lowers a value, so
/// only grid points where each worker's fractions sum to one are visited;
/// the optimum over the full grid is among them. Workers without a
/// communication stage on every link use `b = k`.
pub fn brute_force_fractional<T: Real>(
    scenario: &Scenario<T>,
    step: f64,
) -> Result<AssignmentOutcome<T>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Domain(format!(
            "step must lie in (0, 1], got {step}"
        )));
    }
    let q = (1.0 / step).round() as usize;
    if ((q as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!("step {step} does not divide 1")));
    }
    let m_count = scenario.num_masters();
    let n_count = scenario.num_workers();
    let compositions = compositions(q, m_count);

    let comm = |w: usize| (0..m_count).any(|m| scenario.link(m, w + 1).gamma.is_some());
    let mut points = 1.0f64;
    for w in 0..n_count {
        let per = compositions.len() as f64;
        points *= if comm(w) { per * per } else { per };
    }
    if points > BRUTE_FORCE_MAX_POINTS {
        return Err(Error::ScaleGuard(format!(
            "{m_count} masters x {n_count} workers at step {step} needs {points:.3e} grid points (limit {BRUTE_FORCE_MAX_POINTS:.0e})"
        )));
    }

    let four = T::lit(4.0);
    let qf = T::count(q);
    let frac = |c: &[usize]| c.iter().map(|&x| T::count(x) / qf).collect::<Vec<T>>();
    // Per worker: (k column, b column, value contribution per master).
    let options: Vec<Vec<WorkerOption<T>>> = (0..n_count)
        .map(|w| {
            let mut out = Vec::new();
            for ck in &compositions {
                let k = frac(ck);
                let b_choices: Vec<Vec<T>> = if comm(w) {
                    compositions.iter().map(|cb| frac(cb)).collect()
                } else {
                    vec![k.clone()]
                };
                for b in b_choices {
                    let contrib = (0..m_count)
                        .map(|m| {
                            unit_delay(scenario.link(m, w + 1), k[m], b[m]).inverse()
                                / (four * scenario.task_size(m))
                        })
                        .collect();
                    out.push((k.clone(), b, contrib));
                }
            }
            out
        })
        .collect();

    let base: Vec<T> = (0..m_count)
        .map(|m| {
            unit_delay(scenario.link(m, 0), T::one(), T::one()).inverse()
                / (four * scenario.task_size(m))
        })
        .collect();

    let mut choice = vec![0usize; n_count];
    let mut best_choice = choice.clone();
    let mut best = T::neg_infinity();
    search(
        &options,
        0,
        &mut base.clone(),
        &mut choice,
        &mut best,
        &mut best_choice,
    );

    let mut k = vec![vec![T::zero(); n_count]; m_count];
    let mut b = k.clone();
    for (w, &c) in best_choice.iter().enumerate() {
        let (kc, bc, _) = &options[w][c];
        for m in 0..m_count {
            k[m][w] = kc[m];
            b[m][w] = bc[m];
        }
    }
    let assignment = Assignment {
        k,
        b,
        policy: PolicyTag::BruteForce,
    };
    let sums = assignment.sum_values(scenario);
    Ok(AssignmentOutcome {
        min_value: min_of(&sums),
        sum_values: sums,
        assignment,
    })
}

type GridOptions<T> = [Vec<(Vec<T>, Vec<T>, Vec<T>)>];

fn search<T: Real>(
    options: &GridOptions<T>,
    w: usize,
    sums: &mut Vec<T>,
    choice: &mut Vec<usize>,
    best: &mut T,
    best_choice: &mut Vec<usize>,
) {
    if w == options.len() {
        let value = min_of(sums);
        if value > *best {
            *best = value;
            best_choice.clone_from(choice);
        }
        return;
    }
    for (i, (_, _, contrib)) in options[w].iter().enumerate() {
        for (s, c) in sums.iter_mut().zip(contrib) {
            *s = *s + *c;
        }
        choice[w] = i;
        search(options, w + 1, sums, choice, best, best_choice);
        for (s, c) in sums.iter_mut().zip(contrib) {
            *s = *s - *c;
        }
    }
}

/// All ways to split `total` units among `parts` masters.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}
