//! Per-nurse fitness of a complete schedule.
//!
//! Each nurse is scored on two axes, both normalized to `[0, 1]` across the
//! current schedule: how cheap their assigned pattern is relative to the
//! other nurses' assignments, and how much of the cover they provide would
//! actually be missed without them. High fitness means worth keeping.

use crate::instance::NurseId;
use crate::roster::Roster;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("cannot evaluate an instance with no nurses")]
    EmptySchedule,
    #[error("schedule is incomplete: {unassigned} nurses unassigned")]
    Incomplete { unassigned: usize },
    #[error("nurse {nurse} is not assigned")]
    NotAssigned { nurse: NurseId },
}

/// Blend of the two normalized scores; the weights must sum to 1.
///
/// Constructed through [`FitnessWeights::new`] so the invariant always holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessWeights {
    preference: f64,
    coverage: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum WeightError {
    #[error("fitness weights must be non-negative, got ({preference}, {coverage})")]
    Negative { preference: f64, coverage: f64 },
    #[error("fitness weights must sum to 1, got {sum}")]
    BadSum { sum: f64 },
}

impl FitnessWeights {
    pub fn new(preference: f64, coverage: f64) -> Result<Self, WeightError> {
        if preference < 0.0 || coverage < 0.0 {
            return Err(WeightError::Negative { preference, coverage });
        }
        let sum = preference + coverage;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(WeightError::BadSum { sum });
        }
        Ok(Self { preference, coverage })
    }

    /// Splits a single share: `preference` for cost, the rest for coverage.
    pub fn from_preference_share(preference: f64) -> Result<Self, WeightError> {
        Self::new(preference, 1.0 - preference)
    }

    pub fn preference(&self) -> f64 {
        self.preference
    }

    pub fn coverage(&self) -> f64 {
        self.coverage
    }
}

impl Default for FitnessWeights {
    fn default() -> Self {
        Self { preference: 0.5, coverage: 0.5 }
    }
}

/// One nurse's scores for the current schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentFitness {
    /// Normalized preference score: 1 for the cheapest assignment on the
    /// schedule, 0 for the most expensive.
    pub preference: f64,
    /// Normalized coverage score: 1 for the largest contribution, 0 for the
    /// smallest.
    pub coverage: f64,
    /// Weighted blend of the two, in `[0, 1]`.
    pub combined: f64,
    /// Raw contribution count behind the coverage score.
    pub contribution: u32,
}

/// Counts the (period, level) slots where removing this nurse would leave
/// cover below demand: slots their pattern works, at levels they qualify
/// for, where cover minus one falls short.
pub fn coverage_contribution(roster: &Roster, nurse: NurseId) -> Result<u32, EvalError> {
    let instance = roster.instance();
    let pattern_id = roster
        .assignment_of(nurse)
        .ok_or(EvalError::NotAssigned { nurse })?;
    let pattern = &instance.patterns[pattern_id];
    let from_level = instance.nurses[nurse].grade_index();
    let mut contribution = 0u32;
    for period in pattern.periods() {
        for level in from_level..instance.grades {
            if roster.ledger().cover(period, level) <= instance.demand_at(period, level) {
                contribution += 1;
            }
        }
    }
    Ok(contribution)
}

/// Scores every nurse on a complete schedule.
///
/// Normalization is degenerate when all nurses tie on an axis; that axis then
/// scores 1.0 for everyone (nothing distinguishes them, nobody looks bad).
pub fn evaluate_all(
    roster: &Roster,
    weights: &FitnessWeights,
) -> Result<Vec<ComponentFitness>, EvalError> {
    let instance = roster.instance();
    let n = instance.nurse_count();
    if n == 0 {
        return Err(EvalError::EmptySchedule);
    }
    if !roster.is_complete() {
        return Err(EvalError::Incomplete {
            unassigned: n - roster.assigned_count(),
        });
    }

    let mut costs = Vec::with_capacity(n);
    let mut contributions = Vec::with_capacity(n);
    for nurse in 0..n {
        let pattern = roster.assignment_of(nurse).expect("complete schedule");
        let cost = instance.nurses[nurse]
            .cost_of(pattern)
            .expect("assigned patterns are feasible");
        costs.push(cost);
        contributions.push(coverage_contribution(roster, nurse)?);
    }

    let cost_max = *costs.iter().max().expect("n > 0");
    let cost_min = *costs.iter().min().expect("n > 0");
    let contrib_max = *contributions.iter().max().expect("n > 0");
    let contrib_min = *contributions.iter().min().expect("n > 0");

    let scores = (0..n)
        .map(|nurse| {
            let preference = if cost_max == cost_min {
                1.0
            } else {
                f64::from(cost_max - costs[nurse]) / f64::from(cost_max - cost_min)
            };
            let coverage = if contrib_max == contrib_min {
                1.0
            } else {
                f64::from(contributions[nurse] - contrib_min)
                    / f64::from(contrib_max - contrib_min)
            };
            ComponentFitness {
                preference,
                coverage,
                combined: weights.preference * preference + weights.coverage * coverage,
                contribution: contributions[nurse],
            }
        })
        .collect();
    Ok(scores)
}
