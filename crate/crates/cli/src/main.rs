//! `mdsplan` command-line front end.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mdsplan::report::{self, PolicySpec};
use mdsplan::scenario::ScenarioSpec;
use mdsplan::{
    build_plan, fit_shifted_exponential, generate_scenario, load_samples, load_scenario,
    monte_carlo, save_scenario, AllocationKind, MonteCarloConfig, PlanConfig64, Policy, Scenario64,
    ValueMode,
};

#[derive(Parser)]
#[command(name = "mdsplan", version)]
#[command(about = "Plan and simulate coded matrix-vector multiplication across shared workers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a worker assignment and load allocation
    Plan {
        #[command(flatten)]
        planning: Planning,
        /// Where to write the plan (JSON); stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan, then estimate the completion delay by Monte Carlo
    Simulate {
        #[command(flatten)]
        planning: Planning,
        #[command(flatten)]
        sim: Simulation,
        /// Floor loads to whole rows, giving the remainder to the fastest node
        #[arg(long)]
        integer_loads: bool,
        /// Directory for summary.tsv and cdf.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate several policies on the same scenario and seed
    Compare {
        #[command(flatten)]
        planning: Planning,
        #[command(flatten)]
        sim: Simulation,
        /// Policies to compare, comma-separated, each `name[:allocation]`
        #[arg(long, required = true)]
        policies: String,
        /// Directory for summary.tsv and one CDF CSV per policy
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a shifted exponential to measured per-row delays
    Fit {
        /// CSV file with one delay (ms) per line
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vary gamma/u for every worker link, re-planning each time
    Sweep {
        #[command(flatten)]
        planning: Planning,
        #[command(flatten)]
        sim: Simulation,
        /// gamma/u ratios, comma-separated
        #[arg(long, required = true)]
        values: String,
        /// Where to write the TSV table; stdout only if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random scenario with the published experiment settings
    Gen {
        #[arg(long, value_enum, default_value = "small")]
        preset: Preset,
        /// gamma = multiplier * u; omit for computation-only workers
        #[arg(long)]
        gamma_multiplier: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// 2 masters, 5 workers
    Small,
    /// 4 masters, 50 workers
    Large,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Values {
    General,
    CompDominant,
}

#[derive(Args)]
struct Planning {
    /// Scenario file (JSON)
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "dedicated-iter")]
    policy: String,
    /// markov, exact-comp or sca
    #[arg(long, default_value = "sca")]
    allocation: String,
    /// Assignment values; defaults follow the allocation
    #[arg(long = "value-mode", value_enum)]
    value_mode: Option<Values>,
    /// Seed for planning and simulation; defaults to the scenario's seed, else 0
    #[arg(long)]
    seed: Option<u64>,
    /// Grid step for brute-force
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Args)]
struct Simulation {
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    /// Worker threads; results do not depend on this
    #[arg(long)]
    threads: Option<usize>,
}

struct Loaded {
    scenario: Scenario64,
    config: PlanConfig64,
    seed: u64,
}

impl Planning {
    fn load(&self) -> Result<Loaded> {
        let scenario: Scenario64 = load_scenario(&self.scenario)?;
        let seed = self.seed.or(scenario.seed()).unwrap_or(0);
        let policy: Policy = self.policy.parse()?;
        let allocation: AllocationKind = self.allocation.parse()?;
        let mut config = PlanConfig64::new(policy, allocation);
        config.value_mode = self.value_mode.map(|v| match v {
            Values::General => ValueMode::General,
            Values::CompDominant => ValueMode::CompDominant,
        });
        config.iterated.seed = seed;
        config.brute_force_step = self.step;
        Ok(Loaded {
            scenario,
            config,
            seed,
        })
    }
}

impl Simulation {
    fn config(&self, seed: u64) -> Result<MonteCarloConfig> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            bail!("--rho must lie in (0, 1), got {}", self.rho);
        }
        let mut cfg = MonteCarloConfig {
            trials: self.trials,
            seed,
            ..MonteCarloConfig::default()
        };
        if let Some(t) = self.threads {
            if t == 0 {
                bail!("--threads must be at least 1");
            }
            cfg.threads = t;
        }
        Ok(cfg)
    }
}

fn parse_ratios(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .with_context(|| format!("--values: '{v}' is not a number"))
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Plan { planning, out } => {
            let Loaded {
                scenario, config, ..
            } = planning.load()?;
            let plan = build_plan(&scenario, &config)?;
            let json = plan.to_json();
            match out {
                Some(path) => report::write_text(&path, &json)?,
                None => println!("{json}"),
            }
            eprintln!(
                "predicted delay: min {} ms, max {} ms",
                plan.min_predicted_delay(),
                plan.max_predicted_delay()
            );
        }
        Command::Simulate {
            planning,
            sim,
            integer_loads,
            out,
        } => {
            let Loaded {
                scenario,
                config,
                seed,
            } = planning.load()?;
            let mc = sim.config(seed)?;
            let mut plan = build_plan(&scenario, &config)?;
            if integer_loads {
                plan = plan.rounded(&scenario);
            }
            let stats = monte_carlo(&scenario, &plan, &mc)?;
            let row = report::CompareRow {
                label: format!("{}:{}", config.policy, plan.allocation),
                quantile: stats.quantile(sim.rho)?,
                plan,
                stats,
            };
            let table = report::compare_tsv(std::slice::from_ref(&row), sim.rho);
            if let Some(dir) = out {
                ensure_dir(&dir)?;
                report::write_text(dir.join("summary.tsv"), &table)?;
                row.stats.write_ecdf_csv(dir.join("cdf.csv"))?;
            }
            print!("{table}");
        }
        Command::Compare {
            planning,
            sim,
            policies,
            out,
        } => {
            let Loaded {
                scenario,
                config,
                seed,
            } = planning.load()?;
            let mc = sim.config(seed)?;
            let specs: Vec<PolicySpec> = report::parse_policy_list(&policies)?;
            let rows = report::compare(&scenario, &specs, &config, &mc, sim.rho)?;
            if let Some(dir) = out {
                report::write_compare(&dir, &rows, sim.rho)?;
            }
            print!("{}", report::compare_tsv(&rows, sim.rho));
        }
        Command::Fit { samples, out } => {
            let data: Vec<f64> = load_samples(&samples)?;
            let fit = fit_shifted_exponential(&data)?;
            let json = fit.to_json();
            if let Some(path) = out {
                report::write_text(&path, &json)?;
            }
            println!("{json}");
        }
        Command::Sweep {
            planning,
            sim,
            values,
            out,
        } => {
            let Loaded {
                scenario,
                config,
                seed,
            } = planning.load()?;
            let mc = sim.config(seed)?;
            let ratios = parse_ratios(&values)?;
            let spec = PolicySpec::new(config.policy, Some(config.allocation));
            let rows = report::sweep(&scenario, &spec, &ratios, &config, &mc, sim.rho)?;
            let table = report::sweep_tsv(&rows, sim.rho);
            if let Some(path) = out {
                report::write_text(&path, &table)?;
            }
            print!("{table}");
        }
        Command::Gen {
            preset,
            gamma_multiplier,
            seed,
            out,
        } => {
            let spec = match preset {
                Preset::Small => ScenarioSpec::small_scale(gamma_multiplier),
                Preset::Large => ScenarioSpec::large_scale(gamma_multiplier),
            };
            let scenario: Scenario64 = generate_scenario(&spec, seed)?.with_seed(Some(seed));
            save_scenario(&scenario, &out)?;
            eprintln!(
                "wrote {} ({} masters, {} workers)",
                out.display(),
                scenario.num_masters(),
                scenario.num_workers()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Help and version go to stdout as usual.
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
