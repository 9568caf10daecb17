//! Mutable weekly schedules with incrementally maintained coverage counts.
//!
//! A [`Roster`] assigns at most one pattern to each nurse and keeps a
//! [`CoverageLedger`] in sync on every change, so shortfall queries cost a
//! lookup instead of a recount.

use crate::instance::{Instance, NurseId, PatternId, ShiftPattern, PERIODS};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RosterError {
    #[error("nurse {nurse} does not exist")]
    UnknownNurse { nurse: NurseId },
    #[error("pattern {pattern} is not feasible for nurse {nurse}")]
    InfeasiblePattern { nurse: NurseId, pattern: PatternId },
    #[error("nurse {nurse} is not assigned")]
    NotAssigned { nurse: NurseId },
}

/// Cover counts per (period, level): how many assigned nurses of the level's
/// band or better work each period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageLedger {
    levels: usize,
    cover: Vec<u32>,
}

impl CoverageLedger {
    fn new(levels: usize) -> Self {
        Self {
            levels,
            cover: vec![0; PERIODS * levels],
        }
    }

    pub fn cover(&self, period: usize, level: usize) -> u32 {
        self.cover[period * self.levels + level]
    }

    /// Demand still unmet at (period, level), clamped at zero.
    pub fn shortfall(&self, instance: &Instance, period: usize, level: usize) -> u32 {
        instance
            .demand_at(period, level)
            .saturating_sub(self.cover(period, level))
    }

    pub fn total_shortfall(&self, instance: &Instance) -> u64 {
        let mut total = 0u64;
        for period in 0..PERIODS {
            for level in 0..self.levels {
                total += u64::from(self.shortfall(instance, period, level));
            }
        }
        total
    }

    fn add(&mut self, pattern: &ShiftPattern, from_level: usize) {
        for period in pattern.periods() {
            for level in from_level..self.levels {
                self.cover[period * self.levels + level] += 1;
            }
        }
    }

    fn remove(&mut self, pattern: &ShiftPattern, from_level: usize) {
        for period in pattern.periods() {
            for level in from_level..self.levels {
                self.cover[period * self.levels + level] -= 1;
            }
        }
    }
}

/// Cost summary of a schedule under the demand penalty weight.
///
/// `penalty = preference_total + demand_penalty * shortfall_total`. For a
/// partial schedule `preference_total` covers assigned nurses only and
/// `complete` is false; such breakdowns stay internal to the search loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostBreakdown {
    pub preference_total: u64,
    pub shortfall_total: u64,
    pub penalty: u64,
    pub complete: bool,
}

impl CostBreakdown {
    pub fn is_feasible(&self) -> bool {
        self.shortfall_total == 0
    }
}

/// A (possibly partial) assignment of patterns to nurses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster<'a> {
    instance: &'a Instance,
    assignment: Vec<Option<PatternId>>,
    ledger: CoverageLedger,
    assigned: usize,
}

impl<'a> Roster<'a> {
    /// An empty schedule: every nurse unassigned, ledger all zero.
    pub fn new(instance: &'a Instance) -> Self {
        Self {
            instance,
            assignment: vec![None; instance.nurse_count()],
            ledger: CoverageLedger::new(instance.grades),
            assigned: 0,
        }
    }

    /// Builds a complete roster from one pattern id per nurse.
    pub fn from_assignment(
        instance: &'a Instance,
        assignment: &[PatternId],
    ) -> Result<Self, RosterError> {
        let mut roster = Self::new(instance);
        for (nurse, &pattern) in assignment.iter().enumerate() {
            roster.assign(nurse, pattern)?;
        }
        Ok(roster)
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn assignment_of(&self, nurse: NurseId) -> Option<PatternId> {
        self.assignment[nurse]
    }

    pub fn assignments(&self) -> &[Option<PatternId>] {
        &self.assignment
    }

    pub fn assigned_count(&self) -> usize {
        self.assigned
    }

    pub fn is_complete(&self) -> bool {
        self.assigned == self.assignment.len()
    }

    pub fn unassigned(&self) -> impl Iterator<Item = NurseId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_none())
            .map(|(nurse, _)| nurse)
    }

    pub fn ledger(&self) -> &CoverageLedger {
        &self.ledger
    }

    pub fn shortfall_at(&self, period: usize, level: usize) -> u32 {
        self.ledger.shortfall(self.instance, period, level)
    }

    /// Assigns `pattern` to `nurse`, replacing any previous assignment.
    /// The pattern must be in the nurse's feasible set.
    pub fn assign(&mut self, nurse: NurseId, pattern: PatternId) -> Result<(), RosterError> {
        let profile = self
            .instance
            .nurses
            .get(nurse)
            .ok_or(RosterError::UnknownNurse { nurse })?;
        if !profile.allows(pattern) {
            return Err(RosterError::InfeasiblePattern { nurse, pattern });
        }
        let from_level = profile.grade_index();
        if let Some(previous) = self.assignment[nurse].replace(pattern) {
            self.ledger
                .remove(&self.instance.patterns[previous], from_level);
        } else {
            self.assigned += 1;
        }
        self.ledger.add(&self.instance.patterns[pattern], from_level);
        Ok(())
    }

    /// Removes `nurse`'s assignment, returning the pattern they held.
    pub fn unassign(&mut self, nurse: NurseId) -> Result<PatternId, RosterError> {
        if nurse >= self.assignment.len() {
            return Err(RosterError::UnknownNurse { nurse });
        }
        let pattern = self.assignment[nurse]
            .take()
            .ok_or(RosterError::NotAssigned { nurse })?;
        let from_level = self.instance.nurses[nurse].grade_index();
        self.ledger
            .remove(&self.instance.patterns[pattern], from_level);
        self.assigned -= 1;
        Ok(pattern)
    }

    /// The assignment as one pattern per nurse, or `None` while partial.
    pub fn complete_assignment(&self) -> Option<Vec<PatternId>> {
        self.assignment.iter().copied().collect()
    }

    /// Preference total plus weighted coverage shortfall.
    pub fn cost_breakdown(&self, demand_penalty: u64) -> CostBreakdown {
        let mut preference_total = 0u64;
        for (nurse, assigned) in self.assignment.iter().enumerate() {
            if let Some(pattern) = assigned {
                let cost = self.instance.nurses[nurse]
                    .cost_of(*pattern)
                    .expect("assigned patterns are feasible");
                preference_total += u64::from(cost);
            }
        }
        let shortfall_total = self.ledger.total_shortfall(self.instance);
        CostBreakdown {
            preference_total,
            shortfall_total,
            penalty: preference_total + demand_penalty * shortfall_total,
            complete: self.is_complete(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{FeasibleShift, NurseProfile};

    fn pattern(mask: &str) -> ShiftPattern {
        ShiftPattern::from_mask_str(mask).unwrap()
    }

    /// Three grades, two patterns (Mon-Fri days, Mon-Fri nights).
    fn instance() -> Instance {
        Instance {
            grades: 3,
            patterns: vec![
                pattern("11111000000000"),
                pattern("00000001111100"),
            ],
            nurses: vec![
                NurseProfile {
                    grade: 2,
                    feasible: vec![
                        FeasibleShift { pattern: 0, cost: 10 },
                        FeasibleShift { pattern: 1, cost: 40 },
                    ],
                },
                NurseProfile {
                    grade: 1,
                    feasible: vec![FeasibleShift { pattern: 1, cost: 0 }],
                },
            ],
            demand: vec![vec![0, 0, 0]; PERIODS],
        }
    }

    #[test]
    fn assign_updates_levels_from_own_band_up() {
        let instance = instance();
        let mut roster = Roster::new(&instance);
        roster.assign(0, 0).unwrap();
        // Band 2 counts at levels 1 and 2 but not at level 0.
        assert_eq!(roster.ledger().cover(0, 0), 0);
        assert_eq!(roster.ledger().cover(0, 1), 1);
        assert_eq!(roster.ledger().cover(0, 2), 1);
        assert_eq!(roster.ledger().cover(5, 1), 0);
    }

    #[test]
    fn reassign_replaces_previous_pattern() {
        let instance = instance();
        let mut roster = Roster::new(&instance);
        roster.assign(0, 0).unwrap();
        roster.assign(0, 1).unwrap();
        assert_eq!(roster.assignment_of(0), Some(1));
        assert_eq!(roster.assigned_count(), 1);
        assert_eq!(roster.ledger().cover(0, 1), 0);
        assert_eq!(roster.ledger().cover(7, 1), 1);
    }

    #[test]
    fn unassign_restores_empty_ledger() {
        let instance = instance();
        let mut roster = Roster::new(&instance);
        roster.assign(0, 0).unwrap();
        assert_eq!(roster.unassign(0), Ok(0));
        assert_eq!(roster, Roster::new(&instance));
        assert_eq!(
            roster.unassign(0),
            Err(RosterError::NotAssigned { nurse: 0 })
        );
    }

    #[test]
    fn infeasible_assignment_is_rejected() {
        let instance = instance();
        let mut roster = Roster::new(&instance);
        assert_eq!(
            roster.assign(1, 0),
            Err(RosterError::InfeasiblePattern { nurse: 1, pattern: 0 })
        );
        assert_eq!(
            roster.assign(7, 0),
            Err(RosterError::UnknownNurse { nurse: 7 })
        );
    }

    #[test]
    fn shortfall_clamps_at_zero() {
        let mut instance = instance();
        instance.demand[0] = vec![0, 2, 2];
        let mut roster = Roster::new(&instance);
        assert_eq!(roster.shortfall_at(0, 1), 2);
        roster.assign(0, 0).unwrap();
        assert_eq!(roster.shortfall_at(0, 1), 1);
        // Band 1 nurse on nights does not help Monday day.
        roster.assign(1, 1).unwrap();
        assert_eq!(roster.shortfall_at(0, 1), 1);
        assert_eq!(roster.shortfall_at(0, 0), 0);
    }

    #[test]
    fn one_uncovered_slot_costs_the_demand_penalty() {
        let mut instance = instance();
        // Monday day, top level only, short by one; preference cost zero.
        instance.demand[0] = vec![1, 1, 1];
        instance.nurses[0].feasible[0].cost = 0;
        let mut roster = Roster::new(&instance);
        roster.assign(0, 0).unwrap();
        roster.assign(1, 1).unwrap();
        let breakdown = roster.cost_breakdown(200);
        assert_eq!(breakdown.preference_total, 0);
        assert_eq!(breakdown.shortfall_total, 1);
        assert_eq!(breakdown.penalty, 200);
        assert!(breakdown.complete);
        assert!(!breakdown.is_feasible());
    }

    #[test]
    fn partial_breakdown_is_flagged() {
        let instance = instance();
        let mut roster = Roster::new(&instance);
        roster.assign(0, 0).unwrap();
        let breakdown = roster.cost_breakdown(200);
        assert_eq!(breakdown.preference_total, 10);
        assert!(!breakdown.complete);
    }

    #[test]
    fn from_assignment_checks_feasibility() {
        let instance = instance();
        let roster = Roster::from_assignment(&instance, &[0, 1]).unwrap();
        assert!(roster.is_complete());
        assert_eq!(roster.complete_assignment(), Some(vec![0, 1]));
        assert_eq!(
            Roster::from_assignment(&instance, &[1, 0]).unwrap_err(),
            RosterError::InfeasiblePattern { nurse: 1, pattern: 0 }
        );
    }
}
