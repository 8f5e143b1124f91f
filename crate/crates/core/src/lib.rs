//! Planning and Monte Carlo simulation for MDS-coded distributed
//! matrix-vector multiplication with several masters sharing heterogeneous
//! workers.
//!
//! Each master `m` encodes its task of `L_m` rows and hands coded rows to
//! its own processor and to the workers it is assigned. A worker's link
//! has an exponential communication delay and a shifted-exponential
//! computation delay. The planner picks worker assignments (dedicated or
//! fractional) and coded loads that minimize the slowest master's
//! completion delay; the simulator checks plans by sampling.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below fix the scalar.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod assignment;
pub mod delay;
pub mod error;
pub mod fitting;
pub mod plan;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod scenario;
pub mod simulator;

pub use allocation::{
    exact_allocate_computation, lambert_w_minus1, markov_allocate, phi, sca_refine,
    AllocationResult, ScaConfig, ShiftedExp,
};
pub use assignment::{
    brute_force_fractional, compute_values, fractional_greedy, iterated_greedy, simple_greedy,
    Assignment, AssignmentOutcome, FractionalConfig, IteratedGreedyConfig, PolicyTag, Reinsertion,
    ValueMatrix, ValueMode,
};
pub use delay::{unit_delay, EffectiveChannel, UnitDelay};
pub use error::{Error, Result};
pub use fitting::{fit_shifted_exponential, load_samples, FitResult};
pub use plan::{build_plan, uniform_assignment, AllocationKind, Plan, PlanConfig, Policy};
pub use scalar::Real;
pub use scenario::{
    generate_scenario, load_scenario, save_scenario, LinkParams, Scenario, ScenarioSpec,
};
pub use simulator::{monte_carlo, simulate_once, DelayStats, MonteCarloConfig, TrialResult};

pub type Scenario64 = Scenario<f64>;
pub type Scenario32 = Scenario<f32>;
pub type LinkParams64 = LinkParams<f64>;
pub type LinkParams32 = LinkParams<f32>;
pub type Plan64 = Plan<f64>;
pub type Plan32 = Plan<f32>;
pub type PlanConfig64 = PlanConfig<f64>;
pub type PlanConfig32 = PlanConfig<f32>;
pub type DelayStats64 = DelayStats<f64>;
pub type DelayStats32 = DelayStats<f32>;
