//! Monte Carlo evaluation of plans.

use std::io::Write;
use std::path::Path;

use crate::delay::{sample_total_delay, EffectiveChannel};
use crate::error::{Error, Result};
use crate::plan::{serving_channels, Plan, LOAD_COVER_REL_TOL};
use crate::rng::TrialRng;
use crate::scalar::Real;
use crate::scenario::Scenario;

/// Completion time of every master in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult<T: Real = f64> {
    pub per_master_completion: Vec<T>,
}

impl<T: Real> TrialResult<T> {
    pub fn max(&self) -> T {
        self.per_master_completion
            .iter()
            .copied()
            .fold(T::neg_infinity(), T::max)
    }
}

/// Earliest time at which the rows returned by finished nodes reach
/// `task_rows`: sort by delay and accumulate.
pub fn completion_from_samples<T: Real>(loads: &[T], delays: &[T], task_rows: T) -> Result<T> {
    if loads.len() != delays.len() {
        return Err(Error::Domain(format!(
            "{} loads but {} delays",
            loads.len(),
            delays.len()
        )));
    }
    let needed = task_rows * (T::one() - T::lit(LOAD_COVER_REL_TOL));
    let mut order: Vec<usize> = (0..loads.len()).filter(|&i| loads[i] > T::zero()).collect();
    // Stable sort: ties keep node order.
    order.sort_by(|&i, &j| delays[i].partial_cmp(&delays[j]).expect("finite delays"));
    let mut got = T::zero();
    for i in order {
        got = got + loads[i];
        if got >= needed {
            return Ok(delays[i]);
        }
    }
    Err(Error::InsufficientLoad {
        master: 0,
        total: got.as_f64(),
        required: task_rows.as_f64(),
    })
}

/// Channels with their loads, per master; built once per simulation.
struct Prepared<T: Real> {
    masters: Vec<Vec<(usize, EffectiveChannel<T>)>>,
    task_rows: Vec<T>,
    links_per_master: usize,
}

impl<T: Real> Prepared<T> {
    fn new(scenario: &Scenario<T>, plan: &Plan<T>) -> Result<Self> {
        if plan.num_masters() != scenario.num_masters() {
            return Err(Error::invalid(
                "plan",
                "master count does not match the scenario",
            ));
        }
        let mut masters = Vec::with_capacity(scenario.num_masters());
        for m in 0..scenario.num_masters() {
            let chans: Vec<(usize, EffectiveChannel<T>)> =
                serving_channels(scenario, &plan.assignment, m)
                    .into_iter()
                    .map(|(n, ch)| {
                        (
                            n,
                            EffectiveChannel {
                                load: plan.loads[m][n],
                                ..ch
                            },
                        )
                    })
                    .filter(|(_, ch)| ch.load > T::zero())
                    .collect();
            let total: T = chans.iter().map(|(_, ch)| ch.load).sum();
            let required = scenario.task_size(m);
            if total < required * (T::one() - T::lit(LOAD_COVER_REL_TOL)) {
                return Err(Error::InsufficientLoad {
                    master: m,
                    total: total.as_f64(),
                    required: required.as_f64(),
                });
            }
            masters.push(chans);
        }
        Ok(Self {
            masters,
            task_rows: (0..scenario.num_masters())
                .map(|m| scenario.task_size(m))
                .collect(),
            links_per_master: scenario.num_workers() + 1,
        })
    }

    fn trial(&self, rng: &mut TrialRng) -> TrialResult<T> {
        let per_master_completion = self
            .masters
            .iter()
            .enumerate()
            .map(|(m, chans)| {
                let delays: Vec<T> = chans
                    .iter()
                    .map(|(n, ch)| sample_total_delay(ch, &mut rng.link(m, *n)))
                    .collect();
                let loads: Vec<T> = chans.iter().map(|(_, ch)| ch.load).collect();
                completion_from_samples(&loads, &delays, self.task_rows[m])
                    .expect("coverage checked on construction")
            })
            .collect();
        TrialResult {
            per_master_completion,
        }
    }
}

/// One trial of `plan`. Each `(master, node)` delay is drawn from its own
/// block of `rng`, so adding or removing loaded nodes leaves the other
/// draws unchanged.
pub fn simulate_once<T: Real>(
    scenario: &Scenario<T>,
    plan: &Plan<T>,
    rng: &mut TrialRng,
) -> Result<TrialResult<T>> {
    Ok(Prepared::new(scenario, plan)?.trial(rng))
}

/// Aggregated Monte Carlo output. Sample arrays are sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayStats<T: Real = f64> {
    pub per_master_mean: Vec<T>,
    pub mean_of_max: T,
    /// Maximum completion over masters, one per trial.
    pub max_samples: Vec<T>,
    pub per_master_samples: Vec<Vec<T>>,
}

impl<T: Real> DelayStats<T> {
    /// Builds statistics from trials in trial order.
    pub fn from_trials(trials: &[TrialResult<T>]) -> Result<Self> {
        let Some(first) = trials.first() else {
            return Err(Error::Domain("no trials".into()));
        };
        let masters = first.per_master_completion.len();
        let n = T::count(trials.len());
        let mut per_master_samples = vec![Vec::with_capacity(trials.len()); masters];
        let mut max_samples = Vec::with_capacity(trials.len());
        let mut sums = vec![T::zero(); masters];
        let mut max_sum = T::zero();
        for tr in trials {
            for (m, &c) in tr.per_master_completion.iter().enumerate() {
                sums[m] = sums[m] + c;
                per_master_samples[m].push(c);
            }
            let mx = tr.max();
            max_sum = max_sum + mx;
            max_samples.push(mx);
        }
        max_samples.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        for s in &mut per_master_samples {
            s.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        }
        Ok(Self {
            per_master_mean: sums.into_iter().map(|s| s / n).collect(),
            mean_of_max: max_sum / n,
            max_samples,
            per_master_samples,
        })
    }

    pub fn trials(&self) -> usize {
        self.max_samples.len()
    }

    /// Smallest max-completion sample whose empirical CDF reaches `rho`.
    pub fn quantile(&self, rho: f64) -> Result<T> {
        quantile(&self.max_samples, rho)
    }

    pub fn master_quantile(&self, m: usize, rho: f64) -> Result<T> {
        quantile(&self.per_master_samples[m], rho)
    }

    /// Empirical `P[max completion <= t]`.
    pub fn cdf_at(&self, t: T) -> f64 {
        let count = self.max_samples.partition_point(|&x| x <= t);
        count as f64 / self.max_samples.len() as f64
    }

    /// `(t, F(t))` pairs of the max-completion ECDF, one per sample.
    pub fn ecdf(&self) -> Vec<(T, f64)> {
        let n = self.max_samples.len() as f64;
        self.max_samples
            .iter()
            .enumerate()
            .map(|(i, &t)| (t, (i + 1) as f64 / n))
            .collect()
    }

    pub fn write_ecdf_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let file = std::fs::File::create(path).map_err(io)?;
        let mut w = std::io::BufWriter::new(file);
        writeln!(w, "t,F").map_err(io)?;
        for (t, f) in self.ecdf() {
            writeln!(w, "{},{}", t.as_f64(), f).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Ceiling-rank quantile of sorted samples: the `ceil(rho * n)`-th smallest.
pub fn quantile<T: Real>(sorted: &[T], rho: f64) -> Result<T> {
    if sorted.is_empty() {
        return Err(Error::Domain("quantile of an empty sample".into()));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    let n = sorted.len();
    // Guard against `rho * n` landing just above an integer through rounding.
    let rank = ((rho * n as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[rank.min(n) - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Runs `cfg.trials` independent trials. Trial `i` draws from stream `i`
/// of the seeded generator, and results are reduced in trial order, so the
/// output does not depend on `cfg.threads`.
pub fn monte_carlo<T: Real>(
    scenario: &Scenario<T>,
    plan: &Plan<T>,
    cfg: &MonteCarloConfig,
) -> Result<DelayStats<T>> {
    if cfg.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let prepared = Prepared::new(scenario, plan)?;
    let threads = cfg.threads.clamp(1, cfg.trials);
    let chunk = cfg.trials.div_ceil(threads);
    let run = |range: std::ops::Range<usize>| -> Vec<TrialResult<T>> {
        range
            .map(|i| {
                prepared.trial(&mut TrialRng::new(
                    cfg.seed,
                    i as u64,
                    prepared.links_per_master,
                ))
            })
            .collect()
    };
    let trials: Vec<TrialResult<T>> = if threads == 1 {
        run(0..cfg.trials)
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|c| {
                    let range = (c * chunk).min(cfg.trials)..((c + 1) * chunk).min(cfg.trials);
                    scope.spawn(move || run(range))
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("simulation thread panicked"))
                .collect()
        })
    };
    DelayStats::from_trials(&trials)
}
