//! The full solver loop and the multi-run batch driver.
//!
//! One iteration evaluates the complete schedule, runs the two elimination
//! passes, and rebuilds. The best penalty ever seen is tracked across
//! iterations and only strictly better schedules replace the incumbent.
//!
//! Everything is driven by a single [`SolverRng`] seeded from
//! [`SolverParams::seed`]. Per iteration the draw order is fixed: one
//! threshold draw, one survival draw per assigned nurse in ascending order,
//! then the rebuild draws in ascending nurse order. Identical instance,
//! params and seed therefore reproduce the run exactly, on any platform.

use crate::eval::{evaluate_all, FitnessWeights};
use crate::instance::{Instance, PatternId, Violation};
use crate::perturb::{eliminate_at_rate, eliminate_by_fitness, PerturbationParams};
use crate::rebuild::{reconstruct, RuleParamError, RuleParams};
use crate::roster::{CostBreakdown, Roster};
use crate::SolverRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Cost reported for a run whose best schedule still has unmet demand.
pub const CENSORED_COST: u64 = 255;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid instance: {} violations, first: {}", .0.len(), .0[0])]
    InvalidInstance(Vec<Violation>),
    #[error("invalid rule params: {0}")]
    InvalidRules(#[from] RuleParamError),
    #[error("removal rate must be within [0, 1], got {0}")]
    InvalidRemovalRate(f64),
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("runs_per_instance must be at least 1")]
    NoRuns,
}

/// Everything a single run needs besides the instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub eval_weights: FitnessWeights,
    pub perturbation: PerturbationParams,
    pub rules: RuleParams,
    /// Penalty per unit of unmet demand in the objective.
    pub demand_penalty: u64,
    pub max_iterations: u64,
    /// Stop early once the best penalty reaches this value.
    pub target_cost: Option<u64>,
    pub seed: u64,
    /// Record one [`IterationRecord`] per iteration in the report.
    pub collect_trace: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            eval_weights: FitnessWeights::default(),
            perturbation: PerturbationParams::default(),
            rules: RuleParams::default(),
            demand_penalty: 200,
            max_iterations: 50_000,
            target_cost: None,
            seed: 0,
            collect_trace: false,
        }
    }
}

impl SolverParams {
    /// Defaults sized for an instance with `grades` levels.
    pub fn for_grades(grades: usize) -> Self {
        Self { rules: RuleParams::for_grades(grades), ..Self::default() }
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<(), EngineError> {
        self.rules.validate(instance.grades)?;
        let rate = self.perturbation.removal_rate;
        if !(0.0..=1.0).contains(&rate) || rate.is_nan() {
            return Err(EngineError::InvalidRemovalRate(rate));
        }
        if self.max_iterations == 0 {
            return Err(EngineError::NoIterations);
        }
        Ok(())
    }
}

/// Test seams for ablation studies; both default to off.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineHooks {
    /// Start from an empty schedule instead of a random complete one.
    pub start_empty: bool,
    /// Skip evaluation and both elimination passes entirely (no draws),
    /// leaving pure greedy construction.
    pub skip_perturbations: bool,
}

/// One iteration's numbers, for convergence traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationRecord {
    pub iteration: u64,
    /// Penalty of the schedule this iteration produced.
    pub penalty: u64,
    /// Best penalty seen so far, including this iteration.
    pub best_penalty: u64,
    /// Nurses removed by the fitness threshold pass.
    pub eliminated_unfit: usize,
    /// Nurses removed by the random pass.
    pub eliminated_random: usize,
}

/// Outcome of one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Best penalty, or [`CENSORED_COST`] when the best schedule is
    /// infeasible.
    pub best_cost: u64,
    /// The best schedule, one pattern id per nurse.
    pub assignment: Vec<PatternId>,
    /// Uncensored breakdown of the best schedule.
    pub cost: CostBreakdown,
    pub feasible: bool,
    /// Iterations actually executed (early stop counts fewer).
    pub iterations: u64,
    pub trace: Option<Vec<IterationRecord>>,
    /// Wall-clock duration; ignored by [`RunReport::same_outcome`].
    pub wall_time: Duration,
}

impl RunReport {
    /// Equality of everything except wall time, the determinism yardstick.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        self.best_cost == other.best_cost
            && self.assignment == other.assignment
            && self.cost == other.cost
            && self.feasible == other.feasible
            && self.iterations == other.iterations
            && self.trace == other.trace
    }
}

/// A uniformly random feasible pattern for every nurse.
///
/// The instance must be valid (in particular, no empty feasible sets).
pub fn initial_solution<'a>(instance: &'a Instance, rng: &mut SolverRng) -> Roster<'a> {
    let mut roster = Roster::new(instance);
    for nurse in 0..instance.nurse_count() {
        let feasible = &instance.nurses[nurse].feasible;
        let pick = feasible[rng.random_range(0..feasible.len())].pattern;
        roster.assign(nurse, pick).expect("drawn from the feasible set");
    }
    roster
}

/// Runs the solver once with default hooks.
pub fn chap_solve(instance: &Instance, params: &SolverParams) -> Result<RunReport, EngineError> {
    chap_solve_with_hooks(instance, params, EngineHooks::default())
}

/// Runs the solver once. Infeasibility is reported, never an error; errors
/// only flag invalid instances or parameters up front.
pub fn chap_solve_with_hooks(
    instance: &Instance,
    params: &SolverParams,
    hooks: EngineHooks,
) -> Result<RunReport, EngineError> {
    let violations = instance.validate();
    if !violations.is_empty() {
        return Err(EngineError::InvalidInstance(violations));
    }
    params.validate_for(instance)?;

    let start = Instant::now();
    let mut rng = SolverRng::seed_from_u64(params.seed);
    let mut roster = if hooks.start_empty {
        Roster::new(instance)
    } else {
        initial_solution(instance, &mut rng)
    };

    let mut best: Option<(Vec<PatternId>, CostBreakdown)> = None;
    if roster.is_complete() {
        let breakdown = roster.cost_breakdown(params.demand_penalty);
        best = Some((roster.complete_assignment().expect("complete"), breakdown));
    }

    let mut trace = params.collect_trace.then(Vec::new);
    let mut iterations = 0u64;
    for iteration in 0..params.max_iterations {
        if let (Some(target), Some((_, incumbent))) = (params.target_cost, best.as_ref()) {
            if incumbent.penalty <= target {
                break;
            }
        }

        // An empty instance or an empty starting schedule has nothing to
        // evaluate; elimination only ever applies to assigned nurses.
        let run_elimination = !hooks.skip_perturbations
            && instance.nurse_count() > 0
            && roster.is_complete();
        let (eliminated_unfit, eliminated_random) = if run_elimination {
            let fitness =
                evaluate_all(&roster, &params.eval_weights).expect("complete schedule");
            let unfit = eliminate_by_fitness(&mut roster, &fitness, &mut rng).len();
            let random =
                eliminate_at_rate(&mut roster, params.perturbation.removal_rate, &mut rng)
                    .len();
            (unfit, random)
        } else {
            (0, 0)
        };

        reconstruct(&mut roster, &params.rules, &mut rng);
        let breakdown = roster.cost_breakdown(params.demand_penalty);
        let improved = best
            .as_ref()
            .is_none_or(|(_, incumbent)| breakdown.penalty < incumbent.penalty);
        if improved {
            best = Some((roster.complete_assignment().expect("rebuilt"), breakdown));
        }
        iterations = iteration + 1;

        if let Some(records) = trace.as_mut() {
            records.push(IterationRecord {
                iteration,
                penalty: breakdown.penalty,
                best_penalty: best.as_ref().expect("set above").1.penalty,
                eliminated_unfit,
                eliminated_random,
            });
        }
    }

    let (assignment, cost) = best.expect("at least one complete schedule was built");
    let feasible = cost.is_feasible();
    Ok(RunReport {
        best_cost: if feasible { cost.penalty } else { CENSORED_COST },
        assignment,
        cost,
        feasible,
        iterations,
        trace,
        wall_time: start.elapsed(),
    })
}

/// An instance queued for a batch, with its optimum when known.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    pub instance: Instance,
    /// Known optimal penalty, enabling early stop and hit-rate columns.
    pub target: Option<u64>,
}

/// Aggregates over the runs of one instance, benchmark-table style.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub name: String,
    pub runs: usize,
    /// Best feasible penalty, or `None` when every run was infeasible.
    pub best: Option<u64>,
    /// Mean cost with infeasible runs counted at [`CENSORED_COST`].
    pub mean: f64,
    /// Number of infeasible runs.
    pub infeasible: usize,
    /// Feasible runs that hit the target exactly; `None` without a target.
    pub optimal: Option<usize>,
    /// Feasible runs within 3 of the target; `None` without a target.
    pub within_three: Option<usize>,
}

/// Runs every instance `runs` times in parallel (run `r` uses seed
/// `params.seed + r`, so reports do not depend on scheduling) and aggregates
/// per instance, preserving input order.
pub fn chap_batch(
    instances: &[BenchInstance],
    params: &SolverParams,
    runs: usize,
) -> Result<Vec<BatchReport>, EngineError> {
    if runs == 0 {
        return Err(EngineError::NoRuns);
    }
    for bench in instances {
        params.validate_for(&bench.instance)?;
    }

    let jobs: Vec<(usize, u64)> = (0..instances.len())
        .flat_map(|i| (0..runs as u64).map(move |r| (i, r)))
        .collect();
    let mut reports: Vec<(usize, u64, RunReport)> = jobs
        .into_par_iter()
        .map(|(i, r)| {
            let bench = &instances[i];
            let run_params = SolverParams {
                seed: params.seed + r,
                target_cost: bench.target.or(params.target_cost),
                collect_trace: false,
                ..params.clone()
            };
            let report = chap_solve(&bench.instance, &run_params)
                .expect("validated before dispatch");
            (i, r, report)
        })
        .collect();
    reports.sort_by_key(|&(i, r, _)| (i, r));

    Ok(instances
        .iter()
        .enumerate()
        .map(|(i, bench)| {
            let mine: Vec<&RunReport> = reports
                .iter()
                .filter(|&&(j, _, _)| j == i)
                .map(|(_, _, report)| report)
                .collect();
            let best = mine
                .iter()
                .filter(|r| r.feasible)
                .map(|r| r.cost.penalty)
                .min();
            let mean = mine.iter().map(|r| r.best_cost as f64).sum::<f64>() / runs as f64;
            let infeasible = mine.iter().filter(|r| !r.feasible).count();
            let hit = |slack: u64| {
                bench.target.map(|target| {
                    mine.iter()
                        .filter(|r| r.feasible && r.cost.penalty <= target + slack)
                        .count()
                })
            };
            BatchReport {
                name: bench.name.clone(),
                runs,
                best,
                mean,
                infeasible,
                optimal: hit(0),
                within_three: hit(3),
            }
        })
        .collect())
}
