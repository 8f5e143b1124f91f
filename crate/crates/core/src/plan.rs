//! Planning pipeline: worker assignment, then per-master load allocation.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::allocation::{
    exact_allocate_computation, markov_allocate, sca_refine, AllocationResult, Diagnostics,
    ScaConfig, ShiftedExp,
};
use crate::assignment::{
    brute_force_fractional, compute_values, fractional_greedy, iterated_greedy, simple_greedy,
    Assignment, FractionalConfig, IteratedGreedyConfig, PolicyTag, ValueMode,
};
use crate::delay::{EffectiveChannel, UnitDelay};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scenario::Scenario;

/// Relative slack when checking that a master's loads cover its task.
pub const LOAD_COVER_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    DedicatedIter,
    DedicatedSimple,
    Fractional,
    UniformUncoded,
    UniformCoded,
    BruteForce,
}

impl Policy {
    pub const ALL: [Policy; 6] = [
        Policy::DedicatedIter,
        Policy::DedicatedSimple,
        Policy::Fractional,
        Policy::UniformUncoded,
        Policy::UniformCoded,
        Policy::BruteForce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::DedicatedIter => "dedicated-iter",
            Policy::DedicatedSimple => "dedicated-simple",
            Policy::Fractional => "fractional",
            Policy::UniformUncoded => "uniform-uncoded",
            Policy::UniformCoded => "uniform-coded",
            Policy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocationKind {
    Markov,
    ExactComp,
    Sca,
    Uniform,
}

impl AllocationKind {
    pub fn name(self) -> &'static str {
        match self {
            AllocationKind::Markov => "markov",
            AllocationKind::ExactComp => "exact-comp",
            AllocationKind::Sca => "sca",
            AllocationKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for AllocationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AllocationKind {
    type Err = Error;

    /// Parses a user-selectable allocation; `uniform` is only produced by
    /// the uncoded benchmark and is not accepted here.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markov" => Ok(AllocationKind::Markov),
            "exact-comp" => Ok(AllocationKind::ExactComp),
            "sca" => Ok(AllocationKind::Sca),
            _ => Err(Error::Config(format!("unknown allocation '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanConfig<T: Real = f64> {
    pub policy: Policy,
    pub allocation: AllocationKind,
    /// Assignment values; defaults to comp-dominant for `exact-comp`
    /// allocation and general otherwise.
    pub value_mode: Option<ValueMode>,
    pub iterated: IteratedGreedyConfig,
    pub fractional: FractionalConfig,
    pub brute_force_step: f64,
    pub sca: ScaConfig<T>,
}

impl<T: Real> Default for PlanConfig<T> {
    fn default() -> Self {
        Self {
            policy: Policy::DedicatedIter,
            allocation: AllocationKind::Markov,
            value_mode: None,
            iterated: IteratedGreedyConfig::default(),
            fractional: FractionalConfig::default(),
            brute_force_step: 0.01,
            sca: ScaConfig::default(),
        }
    }
}

impl<T: Real> PlanConfig<T> {
    pub fn new(policy: Policy, allocation: AllocationKind) -> Self {
        Self {
            policy,
            allocation,
            ..Self::default()
        }
    }

    pub fn value_mode(&self) -> ValueMode {
        self.value_mode.unwrap_or(match self.allocation {
            AllocationKind::ExactComp => ValueMode::CompDominant,
            _ => ValueMode::General,
        })
    }
}

/// An assignment with loads (`M x (N+1)`, local first) and the predicted
/// completion delay of every master.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan<T: Real = f64> {
    pub assignment: Assignment<T>,
    pub loads: Vec<Vec<T>>,
    pub predicted_delay: Vec<T>,
    pub allocation: AllocationKind,
    pub diagnostics: Vec<Diagnostics<T>>,
}

impl<T: Real> Plan<T> {
    pub fn num_masters(&self) -> usize {
        self.loads.len()
    }

    pub fn max_predicted_delay(&self) -> T {
        self.predicted_delay
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }

    pub fn min_predicted_delay(&self) -> T {
        self.predicted_delay
            .iter()
            .copied()
            .fold(T::infinity(), T::min)
    }

    /// `l_{m,0} / sum_n l_{m,n}`.
    pub fn local_load_ratio(&self, m: usize) -> T {
        let total: T = self.loads[m].iter().copied().sum();
        self.loads[m][0] / total
    }

    pub fn validate(&self, scenario: &Scenario<T>) -> Result<()> {
        self.assignment.validate()?;
        if self.loads.len() != scenario.num_masters()
            || self.predicted_delay.len() != scenario.num_masters()
        {
            return Err(Error::invalid(
                "plan",
                "dimensions do not match the scenario",
            ));
        }
        for (m, row) in self.loads.iter().enumerate() {
            if row.len() != scenario.num_workers() + 1 {
                return Err(Error::invalid(
                    format!("loads[{m}]"),
                    "row length does not match the scenario",
                ));
            }
            for (n, &l) in row.iter().enumerate() {
                if !(l >= T::zero() && l.is_finite()) {
                    return Err(Error::invalid(
                        format!("loads[{m}][{n}]"),
                        "must be finite and non-negative",
                    ));
                }
                if n > 0 && l > T::zero() && !self.assignment.grants(m, n - 1) {
                    return Err(Error::invalid(
                        format!("loads[{m}][{n}]"),
                        "node is not assigned to this master",
                    ));
                }
            }
            let total: T = row.iter().copied().sum();
            let required = scenario.task_size(m);
            if total < required * (T::one() - T::lit(LOAD_COVER_REL_TOL)) {
                return Err(Error::InsufficientLoad {
                    master: m,
                    total: total.as_f64(),
                    required: required.as_f64(),
                });
            }
            let t = self.predicted_delay[m];
            if !(t > T::zero() && t.is_finite()) {
                return Err(Error::invalid(
                    format!("predicted_delay[{m}]"),
                    "must be finite and positive",
                ));
            }
        }
        Ok(())
    }

    /// Integer loads: floors every load and gives the missing rows to the
    /// loaded node with the smallest `theta`, so the total is the ceiling
    /// of the original total.
    pub fn rounded(&self, scenario: &Scenario<T>) -> Plan<T> {
        let mut out = self.clone();
        for (m, row) in out.loads.iter_mut().enumerate() {
            let total: T = row.iter().copied().sum();
            let target = (total - T::lit(LOAD_COVER_REL_TOL) * total).ceil();
            for l in row.iter_mut() {
                *l = l.floor();
            }
            let floored: T = row.iter().copied().sum();
            let deficit = target - floored;
            let fastest = (0..row.len())
                .filter(|&n| self.loads[m][n] > T::zero())
                .map(|n| (n, self.assignment.unit_delay(scenario, m, n).theta()))
                .fold(None, |best: Option<(usize, T)>, (n, th)| match best {
                    Some((_, b)) if b <= th => best,
                    _ => Some((n, th)),
                });
            if let Some((n, _)) = fastest {
                if deficit > T::zero() {
                    row[n] = row[n] + deficit;
                }
            }
        }
        out
    }

    /// Plan as pretty JSON: assignment fractions, loads and predicted delays.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct PlanFile {
            policy: PolicyTag,
            allocation: AllocationKind,
            k: Vec<Vec<f64>>,
            b: Vec<Vec<f64>>,
            loads: Vec<Vec<f64>>,
            predicted_delay: Vec<f64>,
        }
        let conv = |m: &Vec<Vec<T>>| {
            m.iter()
                .map(|r| r.iter().map(|x| x.as_f64()).collect())
                .collect()
        };
        let file = PlanFile {
            policy: self.assignment.policy,
            allocation: self.allocation,
            k: conv(&self.assignment.k),
            b: conv(&self.assignment.b),
            loads: conv(&self.loads),
            predicted_delay: self.predicted_delay.iter().map(|x| x.as_f64()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("plan serializes")
    }
}

/// Serving channels of master `m`: the local node and every granted worker,
/// as `(node index, channel)` with zero load.
pub fn serving_channels<T: Real>(
    scenario: &Scenario<T>,
    assignment: &Assignment<T>,
    m: usize,
) -> Vec<(usize, EffectiveChannel<T>)> {
    let mut out = vec![(0, EffectiveChannel::local(scenario.link(m, 0), T::zero()))];
    for w in 0..scenario.num_workers() {
        if assignment.grants(m, w) {
            let link = scenario.link(m, w + 1);
            out.push((
                w + 1,
                EffectiveChannel::new(link, assignment.k[m][w], assignment.b[m][w], T::zero()),
            ));
        }
    }
    out
}

/// Loads for master `m` under `assignment`, as a full `N+1` row.
pub fn allocate_master<T: Real>(
    scenario: &Scenario<T>,
    assignment: &Assignment<T>,
    m: usize,
    kind: AllocationKind,
    sca: &ScaConfig<T>,
) -> Result<AllocationResult<T>> {
    let nodes = serving_channels(scenario, assignment, m);
    let rows = scenario.task_size(m);
    let thetas: Vec<UnitDelay<T>> = nodes.iter().map(|(_, ch)| ch.unit_delay()).collect();
    let compact = match kind {
        AllocationKind::Markov => markov_allocate(&thetas, rows)?,
        AllocationKind::ExactComp => {
            let laws: Vec<ShiftedExp<T>> = nodes
                .iter()
                .map(|(_, ch)| ShiftedExp {
                    u: ch.comp_rate,
                    a: ch.comp_shift,
                })
                .collect();
            exact_allocate_computation(&laws, rows)
                .map_err(|e| Error::Config(format!("exact-comp allocation for master {m}: {e}")))?
        }
        AllocationKind::Sca => {
            let init = markov_allocate(&thetas, rows)?;
            let chans: Vec<EffectiveChannel<T>> = nodes.iter().map(|(_, ch)| *ch).collect();
            sca_refine(&chans, rows, &init, sca)?
        }
        AllocationKind::Uniform => {
            return Err(Error::Config(
                "uniform loads come from the uniform-uncoded policy".into(),
            ));
        }
    };
    let mut loads = vec![T::zero(); scenario.num_workers() + 1];
    for ((n, _), &l) in nodes.iter().zip(&compact.loads) {
        loads[*n] = l;
    }
    Ok(AllocationResult { loads, ..compact })
}

/// Loads every master under a fixed assignment.
pub fn allocate_plan<T: Real>(
    scenario: &Scenario<T>,
    assignment: Assignment<T>,
    kind: AllocationKind,
    sca: &ScaConfig<T>,
) -> Result<Plan<T>> {
    let mut loads = Vec::with_capacity(scenario.num_masters());
    let mut predicted = Vec::with_capacity(scenario.num_masters());
    let mut diagnostics = Vec::with_capacity(scenario.num_masters());
    for m in 0..scenario.num_masters() {
        let res = allocate_master(scenario, &assignment, m, kind, sca)?;
        loads.push(res.loads);
        predicted.push(res.t);
        diagnostics.push(res.diagnostics);
    }
    Ok(Plan {
        assignment,
        loads,
        predicted_delay: predicted,
        allocation: kind,
        diagnostics,
    })
}

/// Runs the configured assignment policy and load allocation.
///
/// The uniform benchmarks fix their own allocation: uncoded splits the task
/// evenly, coded uses the computation-dominant optimum.
pub fn build_plan<T: Real>(scenario: &Scenario<T>, cfg: &PlanConfig<T>) -> Result<Plan<T>> {
    let assignment = match cfg.policy {
        Policy::UniformUncoded => return uniform_assignment(scenario, false),
        Policy::UniformCoded => return uniform_assignment(scenario, true),
        Policy::DedicatedIter => {
            iterated_greedy(&compute_values(scenario, cfg.value_mode())?, &cfg.iterated).assignment
        }
        Policy::DedicatedSimple => {
            simple_greedy(&compute_values(scenario, cfg.value_mode())?).assignment
        }
        Policy::Fractional => {
            let values = compute_values(scenario, ValueMode::General)?;
            let init = iterated_greedy(&values, &cfg.iterated);
            fractional_greedy(scenario, &init, &cfg.fractional).assignment
        }
        Policy::BruteForce => brute_force_fractional(scenario, cfg.brute_force_step)?.assignment,
    };
    let plan = allocate_plan(scenario, assignment, cfg.allocation, &cfg.sca)?;
    plan.validate(scenario)?;
    Ok(plan)
}

/// `N/M` contiguous workers per master; with a remainder the lowest-index
/// masters get one extra worker.
fn uniform_blocks(num_masters: usize, num_workers: usize) -> Vec<usize> {
    let base = num_workers / num_masters;
    let extra = num_workers % num_masters;
    let mut owner = Vec::with_capacity(num_workers);
    for m in 0..num_masters {
        let count = base + usize::from(m < extra);
        owner.extend(std::iter::repeat_n(m, count));
    }
    owner
}

/// Equal-split benchmarks.
///
/// Uncoded: each master's task is split evenly over its workers with no
/// local load (a master without workers computes locally); the predicted
/// delay is the largest per-node mean delay. Coded: the
/// computation-dominant optimum over the local node and assigned workers.
pub fn uniform_assignment<T: Real>(scenario: &Scenario<T>, coded: bool) -> Result<Plan<T>> {
    let owner = uniform_blocks(scenario.num_masters(), scenario.num_workers());
    let tag = if coded {
        PolicyTag::UniformCoded
    } else {
        PolicyTag::UniformUncoded
    };
    let assignment = Assignment::dedicated(&owner, scenario.num_masters(), tag);
    if coded {
        return allocate_plan(
            scenario,
            assignment,
            AllocationKind::ExactComp,
            &ScaConfig::default(),
        );
    }

    let mut loads = Vec::with_capacity(scenario.num_masters());
    let mut predicted = Vec::with_capacity(scenario.num_masters());
    for m in 0..scenario.num_masters() {
        let rows = scenario.task_size(m);
        let mine: Vec<usize> = (0..scenario.num_workers())
            .filter(|&w| owner[w] == m)
            .collect();
        let mut row = vec![T::zero(); scenario.num_workers() + 1];
        if mine.is_empty() {
            row[0] = rows;
        } else {
            let share = rows / T::count(mine.len());
            for &w in &mine {
                row[w + 1] = share;
            }
        }
        let slowest = row
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > T::zero())
            .map(|(n, &l)| assignment.unit_delay(scenario, m, n).theta() * l)
            .fold(T::zero(), T::max);
        loads.push(row);
        predicted.push(slowest);
    }
    Ok(Plan {
        diagnostics: vec![Diagnostics::default(); scenario.num_masters()],
        assignment,
        loads,
        predicted_delay: predicted,
        allocation: AllocationKind::Uniform,
    })
}
