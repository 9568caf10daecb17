//! The two elimination passes that precede each rebuild.
//!
//! The first pass draws a single threshold for the whole schedule and drops
//! every nurse whose fitness does not clear it, so low scorers go together.
//! The second pass gives each survivor an independent chance of elimination,
//! keeping the search from stalling when everyone scores well.

use crate::eval::ComponentFitness;
use crate::instance::NurseId;
use crate::roster::Roster;
use crate::SolverRng;
use rand::Rng;

/// Rate of the random elimination pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationParams {
    /// Probability in `[0, 1]` that a surviving nurse is unassigned anyway.
    pub removal_rate: f64,
}

impl Default for PerturbationParams {
    fn default() -> Self {
        Self { removal_rate: 0.05 }
    }
}

/// Draws one threshold uniformly from `[0, 1)` and unassigns every nurse
/// whose combined fitness is at or below it. Returns the eliminated nurses
/// in ascending order. `fitness` must have one entry per nurse; unassigned
/// nurses are skipped.
pub fn eliminate_by_fitness(
    roster: &mut Roster,
    fitness: &[ComponentFitness],
    rng: &mut SolverRng,
) -> Vec<NurseId> {
    assert_eq!(
        fitness.len(),
        roster.instance().nurse_count(),
        "one fitness entry per nurse"
    );
    let threshold: f64 = rng.random();
    let mut eliminated = Vec::new();
    for nurse in 0..fitness.len() {
        if roster.assignment_of(nurse).is_some() && fitness[nurse].combined <= threshold {
            roster.unassign(nurse).expect("nurse is assigned");
            eliminated.push(nurse);
        }
    }
    eliminated
}

/// Independently unassigns each still-assigned nurse with probability
/// `removal_rate`, drawing once per assigned nurse in ascending order.
pub fn eliminate_at_rate(
    roster: &mut Roster,
    removal_rate: f64,
    rng: &mut SolverRng,
) -> Vec<NurseId> {
    let mut eliminated = Vec::new();
    for nurse in 0..roster.instance().nurse_count() {
        if roster.assignment_of(nurse).is_none() {
            continue;
        }
        if rng.random::<f64>() < removal_rate {
            roster.unassign(nurse).expect("nurse is assigned");
            eliminated.push(nurse);
        }
    }
    eliminated
}
