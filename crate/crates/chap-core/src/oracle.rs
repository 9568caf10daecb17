//! Reference baselines: exhaustive search for small instances and one-shot
//! greedy construction. Both give the solver something objective to be
//! measured against.

use crate::engine::{chap_solve_with_hooks, EngineError, EngineHooks, RunReport, SolverParams};
use crate::instance::{Instance, NurseId, PatternId};
use crate::rebuild::RuleParams;
use crate::roster::Roster;
use crate::SolverRng;
use thiserror::Error;

/// Assignment-space ceiling for [`exhaustive_solve`].
pub const DEFAULT_SEARCH_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceExceeded { size: u128, cap: u128 },
    #[error("nurse {nurse} has no feasible patterns")]
    EmptyFeasibleSet { nurse: NurseId },
}

/// What exhaustive search found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Minimum penalty over every complete assignment.
    pub optimal_cost: u64,
    /// An optimal assignment; among ties, the lexicographically smallest
    /// vector of pattern ids.
    pub assignment: Vec<PatternId>,
    /// Size of the enumerated space, the product of feasible-set sizes.
    pub explored: u128,
}

/// Enumerates every assignment and returns the true optimum under the given
/// demand penalty. Refuses instances whose assignment space exceeds
/// [`DEFAULT_SEARCH_CAP`].
pub fn exhaustive_solve(instance: &Instance, demand_penalty: u64) -> Result<OracleResult, OracleError> {
    exhaustive_solve_capped(instance, demand_penalty, DEFAULT_SEARCH_CAP)
}

pub fn exhaustive_solve_capped(
    instance: &Instance,
    demand_penalty: u64,
    cap: u128,
) -> Result<OracleResult, OracleError> {
    let mut size: u128 = 1;
    for (nurse, profile) in instance.nurses.iter().enumerate() {
        if profile.feasible.is_empty() {
            return Err(OracleError::EmptyFeasibleSet { nurse });
        }
        size = size.saturating_mul(profile.feasible.len() as u128);
    }
    if size > cap {
        return Err(OracleError::SearchSpaceExceeded { size, cap });
    }

    // Candidates sorted by pattern id per nurse, so depth-first order is
    // lexicographic and the first optimum found is the smallest one.
    let candidates: Vec<Vec<(PatternId, u32)>> = instance
        .nurses
        .iter()
        .map(|profile| {
            let mut list: Vec<(PatternId, u32)> = profile
                .feasible
                .iter()
                .map(|fs| (fs.pattern, fs.cost))
                .collect();
            list.sort_unstable();
            list
        })
        .collect();

    // Cheapest possible preference total over nurses i.., for pruning.
    let n = instance.nurse_count();
    let mut suffix_min = vec![0u64; n + 1];
    for nurse in (0..n).rev() {
        let cheapest = candidates[nurse]
            .iter()
            .map(|&(_, cost)| u64::from(cost))
            .min()
            .expect("non-empty");
        suffix_min[nurse] = suffix_min[nurse + 1] + cheapest;
    }

    struct Search<'a> {
        instance: &'a Instance,
        candidates: &'a [Vec<(PatternId, u32)>],
        suffix_min: &'a [u64],
        demand_penalty: u64,
        current: Vec<PatternId>,
        best: Option<(u64, Vec<PatternId>)>,
    }

    impl Search<'_> {
        fn walk(&mut self, roster: &mut Roster, nurse: usize, preference: u64) {
            let n = self.instance.nurse_count();
            // The bound ignores shortfall, so it never over-prunes; ties are
            // kept out because only strictly better costs replace the best,
            // and anything pruned here costs at least the incumbent.
            if let Some((best_cost, _)) = &self.best {
                if preference + self.suffix_min[nurse] >= *best_cost {
                    return;
                }
            }
            if nurse == n {
                let breakdown = roster.cost_breakdown(self.demand_penalty);
                let cost = breakdown.penalty;
                if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                    self.best = Some((cost, self.current.clone()));
                }
                return;
            }
            for &(pattern, cost) in &self.candidates[nurse] {
                roster.assign(nurse, pattern).expect("candidate is feasible");
                self.current.push(pattern);
                self.walk(roster, nurse + 1, preference + u64::from(cost));
                self.current.pop();
                roster.unassign(nurse).expect("just assigned");
            }
        }
    }

    let mut search = Search {
        instance,
        candidates: &candidates,
        suffix_min: &suffix_min,
        demand_penalty,
        current: Vec::with_capacity(n),
        best: None,
    };
    let mut roster = Roster::new(instance);
    search.walk(&mut roster, 0, 0);
    let (optimal_cost, assignment) = search.best.expect("space is non-empty");
    Ok(OracleResult { optimal_cost, assignment, explored: size })
}

/// One pass of pure greedy construction from an empty schedule: no
/// evaluation, no elimination, exactly the rebuild rules once.
///
/// The rng draw stream matches a hooked solver run with perturbations
/// disabled, which is what makes ablation comparisons meaningful.
pub fn greedy_construct(
    instance: &Instance,
    rules: &RuleParams,
    demand_penalty: u64,
    seed: u64,
) -> Result<RunReport, EngineError> {
    let params = SolverParams {
        rules: rules.clone(),
        demand_penalty,
        max_iterations: 1,
        seed,
        ..SolverParams::default()
    };
    chap_solve_with_hooks(
        instance,
        &params,
        EngineHooks { start_empty: true, skip_perturbations: true },
    )
}

/// The rebuild rules applied once to an empty roster, sharing `rng` with the
/// caller. [`greedy_construct`] is the self-contained version.
pub fn greedy_fill<'a>(
    instance: &'a Instance,
    rules: &RuleParams,
    rng: &mut SolverRng,
) -> Roster<'a> {
    let mut roster = Roster::new(instance);
    crate::rebuild::reconstruct(&mut roster, rules, rng);
    roster
}
