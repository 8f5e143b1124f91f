//! Policy comparisons and parameter sweeps with TSV/CSV output.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::plan::{build_plan, AllocationKind, Plan, PlanConfig, Policy};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::simulator::{monte_carlo, DelayStats, MonteCarloConfig};

/// A policy with an optional allocation override, written `name[:alloc]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicySpec {
    pub policy: Policy,
    pub allocation: Option<AllocationKind>,
}

impl PolicySpec {
    pub fn new(policy: Policy, allocation: Option<AllocationKind>) -> Self {
        Self { policy, allocation }
    }

    pub fn config<T: Real>(&self, base: &PlanConfig<T>) -> PlanConfig<T> {
        PlanConfig {
            policy: self.policy,
            allocation: self.allocation.unwrap_or(base.allocation),
            ..base.clone()
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, alloc) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse()?)),
            None => (s, None),
        };
        Ok(Self {
            policy: name.trim().parse()?,
            allocation: alloc,
        })
    }
}

/// Parses a comma-separated policy list.
pub fn parse_policy_list(s: &str) -> Result<Vec<PolicySpec>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse())
        .collect()
}

fn label<T: Real>(plan: &Plan<T>, policy: Policy) -> String {
    format!("{}:{}", policy, plan.allocation)
}

#[derive(Debug, Clone)]
pub struct CompareRow<T: Real = f64> {
    pub label: String,
    pub plan: Plan<T>,
    pub stats: DelayStats<T>,
    pub quantile: T,
}

/// Plans and simulates every policy on the same scenario and seed.
pub fn compare<T: Real>(
    scenario: &Scenario<T>,
    specs: &[PolicySpec],
    base: &PlanConfig<T>,
    mc: &MonteCarloConfig,
    rho: f64,
) -> Result<Vec<CompareRow<T>>> {
    if specs.len() < 2 {
        return Err(Error::Config(format!(
            "compare needs at least 2 policies, got {}",
            specs.len()
        )));
    }
    specs
        .iter()
        .map(|spec| {
            let plan = build_plan(scenario, &spec.config(base))?;
            let stats = monte_carlo(scenario, &plan, mc)?;
            Ok(CompareRow {
                label: label(&plan, spec.policy),
                quantile: stats.quantile(rho)?,
                plan,
                stats,
            })
        })
        .collect()
}

pub fn compare_tsv<T: Real>(rows: &[CompareRow<T>], rho: f64) -> String {
    let masters = rows.first().map_or(0, |r| r.stats.per_master_mean.len());
    let mut out = format!("policy\tpredicted_max\tmean_max\tquantile_{rho}");
    for m in 0..masters {
        let _ = write!(out, "\tmean_m{m}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}",
            r.label,
            r.plan.max_predicted_delay().as_f64(),
            r.stats.mean_of_max.as_f64(),
            r.quantile.as_f64()
        );
        for mean in &r.stats.per_master_mean {
            let _ = write!(out, "\t{}", mean.as_f64());
        }
        out.push('\n');
    }
    out
}

/// File-name-safe form of a row label.
pub fn file_stem(label: &str) -> String {
    label.replace([':', '/'], "_")
}

/// Writes `summary.tsv` and one `cdf_<policy>.csv` per row into `dir`.
pub fn write_compare<T: Real>(
    dir: impl AsRef<Path>,
    rows: &[CompareRow<T>],
    rho: f64,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    write_text(dir.join("summary.tsv"), &compare_tsv(rows, rho))?;
    for (i, r) in rows.iter().enumerate() {
        let name = format!("cdf_{i}_{}.csv", file_stem(&r.label));
        r.stats.write_ecdf_csv(dir.join(name))?;
    }
    Ok(())
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T: Real = f64> {
    pub ratio: f64,
    pub mean_of_max: T,
    pub quantile: T,
    /// `l_{m,0} / sum_n l_{m,n}` per master.
    pub local_ratio: Vec<T>,
}

impl<T: Real> SweepRow<T> {
    pub fn mean_local_ratio(&self) -> T {
        self.local_ratio.iter().copied().sum::<T>() / T::count(self.local_ratio.len())
    }
}

/// Re-plans and simulates with every worker's `gamma = ratio * u`.
pub fn sweep<T: Real>(
    scenario: &Scenario<T>,
    spec: &PolicySpec,
    ratios: &[f64],
    base: &PlanConfig<T>,
    mc: &MonteCarloConfig,
    rho: f64,
) -> Result<Vec<SweepRow<T>>> {
    if ratios.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let cfg = spec.config(base);
    ratios
        .iter()
        .map(|&ratio| {
            if !(ratio > 0.0 && ratio.is_finite()) {
                return Err(Error::Config(format!(
                    "sweep values must be positive, got {ratio}"
                )));
            }
            let scen = scenario.with_gamma_ratio(T::lit(ratio))?;
            let plan = build_plan(&scen, &cfg)?;
            let stats = monte_carlo(&scen, &plan, mc)?;
            Ok(SweepRow {
                ratio,
                mean_of_max: stats.mean_of_max,
                quantile: stats.quantile(rho)?,
                local_ratio: (0..plan.num_masters())
                    .map(|m| plan.local_load_ratio(m))
                    .collect(),
            })
        })
        .collect()
}

pub fn sweep_tsv<T: Real>(rows: &[SweepRow<T>], rho: f64) -> String {
    let masters = rows.first().map_or(0, |r| r.local_ratio.len());
    let mut out = format!("gamma_ratio\tmean_max\tquantile_{rho}\tmean_local_ratio");
    for m in 0..masters {
        let _ = write!(out, "\tlocal_ratio_m{m}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}",
            r.ratio,
            r.mean_of_max.as_f64(),
            r.quantile.as_f64(),
            r.mean_local_ratio().as_f64()
        );
        for x in &r.local_ratio {
            let _ = write!(out, "\t{}", x.as_f64());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_spec_parsing() {
        let s: PolicySpec = "dedicated-iter:sca".parse().unwrap();
        assert_eq!(
            s,
            PolicySpec::new(Policy::DedicatedIter, Some(AllocationKind::Sca))
        );
        let s: PolicySpec = "uniform-coded".parse().unwrap();
        assert_eq!(s.allocation, None);
        assert!("dedicated-iter:foo".parse::<PolicySpec>().is_err());
        assert_eq!(
            parse_policy_list("fractional, uniform-uncoded")
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn file_stems() {
        assert_eq!(file_stem("dedicated-iter:sca"), "dedicated-iter_sca");
    }
}
