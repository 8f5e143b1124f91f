//! Problem instances: per-link delay parameters, the JSON scenario file and
//! the randomized generator used by the experiments.
//!
//! Time is in milliseconds and rates are in coded rows per millisecond.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Delay parameters of one (master, node) link.
///
/// `gamma` is `None` when no communication delay applies: always for the
/// master-local link (node 0), and for worker links of a computation-only
/// instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams<T: Real = f64> {
    /// Communication rate with the full bandwidth.
    pub gamma: Option<T>,
    /// Computation rate with the full computing power.
    pub u: T,
    /// Computation shift, ms per coded row.
    pub a: T,
}

impl<T: Real> LinkParams<T> {
    pub fn local(u: T, a: T) -> Self {
        Self { gamma: None, u, a }
    }

    pub fn remote(gamma: T, u: T, a: T) -> Self {
        Self {
            gamma: Some(gamma),
            u,
            a,
        }
    }
}

/// A full problem instance with `M` masters and `N` workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T: Real = f64> {
    task_rows: Vec<u64>,
    /// `links[m][0]` is master `m`'s local computation, `links[m][n]` its link
    /// to worker `n`.
    links: Vec<Vec<LinkParams<T>>>,
    seed: Option<u64>,
}

impl<T: Real> Scenario<T> {
    /// Builds and validates a scenario.
    pub fn new(task_rows: Vec<u64>, links: Vec<Vec<LinkParams<T>>>) -> Result<Self> {
        let s = Self {
            task_rows,
            links,
            seed: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn num_masters(&self) -> usize {
        self.task_rows.len()
    }

    pub fn num_workers(&self) -> usize {
        self.links.first().map_or(0, |row| row.len() - 1)
    }

    pub fn task_rows(&self) -> &[u64] {
        &self.task_rows
    }

    /// `L_m` as a scalar.
    pub fn task_size(&self, m: usize) -> T {
        T::lit(self.task_rows[m] as f64)
    }

    pub fn link(&self, m: usize, n: usize) -> &LinkParams<T> {
        &self.links[m][n]
    }

    pub fn links(&self) -> &[Vec<LinkParams<T>>] {
        &self.links
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Copy with every worker's communication rate set to `ratio * u`.
    pub fn with_gamma_ratio(&self, ratio: T) -> Result<Self> {
        if !(ratio > T::zero() && ratio.is_finite()) {
            return Err(Error::Domain(format!(
                "gamma ratio must be positive, got {ratio}"
            )));
        }
        let mut out = self.clone();
        for row in &mut out.links {
            for link in row.iter_mut().skip(1) {
                link.gamma = Some(ratio * link.u);
            }
        }
        Ok(out)
    }

    /// Copy with communication delay removed from every worker link.
    pub fn computation_only(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.links {
            for link in row.iter_mut().skip(1) {
                link.gamma = None;
            }
        }
        out
    }

    /// Whether any worker link models communication delay.
    pub fn has_communication(&self) -> bool {
        self.links
            .iter()
            .any(|row| row.iter().skip(1).any(|l| l.gamma.is_some()))
    }

    /// Converts every numeric field to another scalar type.
    pub fn cast<U: Real>(&self) -> Scenario<U> {
        let conv = |x: T| U::lit(x.as_f64());
        Scenario {
            task_rows: self.task_rows.clone(),
            links: self
                .links
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|l| LinkParams {
                            gamma: l.gamma.map(conv),
                            u: conv(l.u),
                            a: conv(l.a),
                        })
                        .collect()
                })
                .collect(),
            seed: self.seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let m_count = self.task_rows.len();
        if m_count == 0 {
            return Err(Error::invalid("masters", "at least one master is required"));
        }
        for (m, &rows) in self.task_rows.iter().enumerate() {
            if rows == 0 {
                return Err(Error::invalid(format!("masters[{m}].L"), "must be >= 1"));
            }
        }
        if self.links.len() != m_count {
            return Err(Error::invalid(
                "links",
                format!("expected {m_count} rows, found {}", self.links.len()),
            ));
        }
        let width = self.links[0].len();
        if width == 0 {
            return Err(Error::invalid("links[0]", "missing the local link"));
        }
        for (m, row) in self.links.iter().enumerate() {
            if row.len() != width {
                return Err(Error::invalid(
                    format!("links[{m}]"),
                    format!("expected {width} links, found {}", row.len()),
                ));
            }
            for (n, link) in row.iter().enumerate() {
                let at = |f: &str| format!("links[{m}][{n}].{f}");
                if !(link.u > T::zero() && link.u.is_finite()) {
                    return Err(Error::invalid(
                        at("u"),
                        format!("must be positive, got {}", link.u),
                    ));
                }
                if !(link.a >= T::zero() && link.a.is_finite()) {
                    return Err(Error::invalid(
                        at("a"),
                        format!("must be non-negative, got {}", link.a),
                    ));
                }
                match (n, link.gamma) {
                    (0, Some(_)) => {
                        return Err(Error::invalid(
                            at("gamma"),
                            "not applicable to the local link",
                        ))
                    }
                    (_, Some(g)) if !(g > T::zero() && g.is_finite()) => {
                        return Err(Error::invalid(
                            at("gamma"),
                            format!("must be positive, got {g}"),
                        ))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<MetaFile>,
    masters: Vec<MasterFile>,
    #[serde(default)]
    workers: Vec<Vec<WorkerLinkFile>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct MetaFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MasterFile {
    #[serde(rename = "L")]
    task_rows: f64,
    local: LocalLinkFile,
}

/// `{u, a}` fragment; also the shape printed by the fitting command.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LocalLinkFile {
    pub u: f64,
    pub a: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct WorkerLinkFile {
    gamma: Option<f64>,
    u: f64,
    a: f64,
}

impl<T: Real> Scenario<T> {
    /// Parses the JSON scenario schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let m_count = file.masters.len();
        if !file.workers.is_empty() && file.workers.len() != m_count {
            return Err(Error::invalid(
                "workers",
                format!(
                    "expected one list per master ({m_count}), found {}",
                    file.workers.len()
                ),
            ));
        }
        let mut task_rows = Vec::with_capacity(m_count);
        let mut links = Vec::with_capacity(m_count);
        for (m, master) in file.masters.iter().enumerate() {
            let rows = master.task_rows;
            if !(rows >= 1.0 && rows.fract() == 0.0 && rows <= u64::MAX as f64) {
                return Err(Error::invalid(
                    format!("masters[{m}].L"),
                    format!("must be a positive integer, got {rows}"),
                ));
            }
            task_rows.push(rows as u64);
            let mut row = vec![LinkParams::local(
                T::lit(master.local.u),
                T::lit(master.local.a),
            )];
            if let Some(workers) = file.workers.get(m) {
                row.extend(workers.iter().map(|w| LinkParams {
                    gamma: w.gamma.map(T::lit),
                    u: T::lit(w.u),
                    a: T::lit(w.a),
                }));
            }
            links.push(row);
        }
        let seed = file.meta.and_then(|m| m.seed);
        Ok(Self::new(task_rows, links)?.with_seed(seed))
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            meta: self.seed.map(|seed| MetaFile { seed: Some(seed) }),
            masters: self
                .task_rows
                .iter()
                .zip(&self.links)
                .map(|(&rows, row)| MasterFile {
                    task_rows: rows as f64,
                    local: LocalLinkFile {
                        u: row[0].u.as_f64(),
                        a: row[0].a.as_f64(),
                    },
                })
                .collect(),
            workers: self
                .links
                .iter()
                .map(|row| {
                    row[1..]
                        .iter()
                        .map(|l| WorkerLinkFile {
                            gamma: l.gamma.map(Real::as_f64),
                            u: l.u.as_f64(),
                            a: l.a.as_f64(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }
}

pub fn load_scenario<T: Real>(path: impl AsRef<Path>) -> Result<Scenario<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    Scenario::from_json(&text)
}

pub fn save_scenario<T: Real>(scenario: &Scenario<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scenario.to_json() + "\n").map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

// ---------------------------------------------------------------------------
// Generator
// ---------------------------------------------------------------------------

/// How a computation shift `a` is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDist {
    /// Uniformly from a finite set.
    Choices(Vec<f64>),
    /// Uniformly from `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
}

impl ShiftDist {
    fn check(&self, field: &str) -> Result<()> {
        match self {
            ShiftDist::Choices(c) if c.is_empty() => {
                Err(Error::invalid(field, "choice set is empty"))
            }
            ShiftDist::Choices(c) if c.iter().any(|&x| !(x > 0.0 && x.is_finite())) => {
                Err(Error::invalid(field, "choices must be positive"))
            }
            ShiftDist::Uniform { lo, hi } if !(*lo > 0.0 && lo <= hi && hi.is_finite()) => {
                Err(Error::invalid(field, format!("bad range [{lo}, {hi}]")))
            }
            _ => Ok(()),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ShiftDist::Choices(c) => c[rng.gen_range(0..c.len())],
            ShiftDist::Uniform { lo, hi } if lo == hi => *lo,
            ShiftDist::Uniform { lo, hi } => rng.gen_range(*lo..=*hi),
        }
    }
}

/// Parameters of the randomized instance generator.
///
/// Worker and master shifts are drawn independently per (master, node); the
/// rate is `u = 1/a` and the communication rate `gamma = gamma_multiplier * u`
/// (`None` yields a computation-only instance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub num_masters: usize,
    pub num_workers: usize,
    pub task_rows: Vec<u64>,
    pub worker_shift: ShiftDist,
    pub master_shift: ShiftDist,
    pub gamma_multiplier: Option<f64>,
}

impl ScenarioSpec {
    /// Two masters, five workers; worker `a` from {0.2, 0.25, 0.3} ms, master
    /// `a` from {0.4, 0.5} ms, `L = 10^4`.
    pub fn small_scale(gamma_multiplier: Option<f64>) -> Self {
        Self {
            num_masters: 2,
            num_workers: 5,
            task_rows: vec![10_000; 2],
            worker_shift: ShiftDist::Choices(vec![0.2, 0.25, 0.3]),
            master_shift: ShiftDist::Choices(vec![0.4, 0.5]),
            gamma_multiplier,
        }
    }

    /// Four masters, fifty workers; every `a` uniform on [0.05, 0.5] ms,
    /// `L = 10^4`.
    pub fn large_scale(gamma_multiplier: Option<f64>) -> Self {
        Self {
            num_masters: 4,
            num_workers: 50,
            task_rows: vec![10_000; 4],
            worker_shift: ShiftDist::Uniform { lo: 0.05, hi: 0.5 },
            master_shift: ShiftDist::Uniform { lo: 0.05, hi: 0.5 },
            gamma_multiplier,
        }
    }
}

/// Draws a scenario from `spec`; identical `(spec, seed)` give identical output.
pub fn generate_scenario<T: Real>(spec: &ScenarioSpec, seed: u64) -> Result<Scenario<T>> {
    if spec.num_masters == 0 {
        return Err(Error::invalid("num_masters", "must be >= 1"));
    }
    if spec.task_rows.len() != spec.num_masters {
        return Err(Error::invalid(
            "task_rows",
            format!(
                "expected {} entries, found {}",
                spec.num_masters,
                spec.task_rows.len()
            ),
        ));
    }
    spec.worker_shift.check("worker_shift")?;
    spec.master_shift.check("master_shift")?;
    if let Some(g) = spec.gamma_multiplier {
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::invalid(
                "gamma_multiplier",
                format!("must be positive, got {g}"),
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links = (0..spec.num_masters)
        .map(|_| {
            let a0 = T::lit(spec.master_shift.draw(&mut rng));
            let mut row = vec![LinkParams::local(a0.recip(), a0)];
            row.extend((0..spec.num_workers).map(|_| {
                let a = T::lit(spec.worker_shift.draw(&mut rng));
                let u = a.recip();
                LinkParams {
                    gamma: spec.gamma_multiplier.map(|g| T::lit(g) * u),
                    u,
                    a,
                }
            }));
            row
        })
        .collect();
    Ok(Scenario::new(spec.task_rows.clone(), links)?.with_seed(Some(seed)))
}
