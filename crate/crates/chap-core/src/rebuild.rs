//! Greedy repair of partial schedules.
//!
//! Unassigned nurses are processed in ascending id order. For each one a
//! single draw picks a rule: the cover rule (chase the most urgent uncovered
//! level), the combined rule (blend preference cost with weighted shortfall
//! reduction), or a uniformly random feasible pattern. The chosen pattern is
//! assigned immediately, so later nurses score against updated cover. Ties
//! go to the earliest pattern in the nurse's feasible list.

use crate::instance::{NurseId, PatternId, ShiftPattern, PERIODS};
use crate::roster::{Roster, RosterError};
use crate::SolverRng;
use rand::Rng;
use thiserror::Error;

/// Which grade levels the cover rule scans for unmet demand, and in what
/// order, relative to the nurse's own band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradeCascade {
    /// Own level first, then broader levels (those the nurse also serves).
    #[default]
    BroaderLevels,
    /// Own level first, then stricter levels (higher bands only). A nurse's
    /// pattern never changes cover there, but shortfall still marks periods
    /// as urgent.
    StricterLevels,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleParamError {
    #[error("rule rates must be non-negative, got ({cover}, {combined}, {random})")]
    NegativeRate { cover: f64, combined: f64, random: f64 },
    #[error("rule rates must sum to 1, got {sum}")]
    RateSum { sum: f64 },
    #[error("expected one grade weight per level ({grades}), got {got}")]
    GradeWeightCount { grades: usize, got: usize },
    #[error("grade weights must be finite and non-negative")]
    BadGradeWeight,
    #[error("preference weight must be finite and non-negative, got {got}")]
    BadPreferenceWeight { got: f64 },
}

/// Parameters of the repair rules.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleParams {
    /// Probability of the cover rule.
    pub cover_rate: f64,
    /// Probability of the combined rule.
    pub combined_rate: f64,
    /// Probability of a uniformly random feasible pattern.
    pub random_rate: f64,
    /// Weight of `(100 - cost)` in the combined score.
    pub preference_weight: f64,
    /// Per-level weights on shortfall in the combined score; stricter levels
    /// weigh more. Length must match the instance's grade count.
    pub grade_weights: Vec<f64>,
    pub cascade: GradeCascade,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            cover_rate: 0.80,
            combined_rate: 0.18,
            random_rate: 0.02,
            preference_weight: 1.0,
            grade_weights: vec![8.0, 2.0, 1.0],
            cascade: GradeCascade::default(),
        }
    }
}

impl RuleParams {
    /// Defaults with grade weights sized for `grades` levels. Three levels
    /// keep the standard (8, 2, 1); fewer drop from the front, more extend
    /// the front by quadrupling, preserving the strictest-counts-most shape.
    pub fn for_grades(grades: usize) -> Self {
        let mut weights = vec![8.0, 2.0, 1.0];
        if grades <= 3 {
            weights.drain(..3 - grades);
        } else {
            for _ in 3..grades {
                let top = weights[0];
                weights.insert(0, top * 4.0);
            }
        }
        Self { grade_weights: weights, ..Self::default() }
    }

    pub fn validate(&self, grades: usize) -> Result<(), RuleParamError> {
        if self.cover_rate < 0.0 || self.combined_rate < 0.0 || self.random_rate < 0.0 {
            return Err(RuleParamError::NegativeRate {
                cover: self.cover_rate,
                combined: self.combined_rate,
                random: self.random_rate,
            });
        }
        let sum = self.cover_rate + self.combined_rate + self.random_rate;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(RuleParamError::RateSum { sum });
        }
        if self.grade_weights.len() != grades {
            return Err(RuleParamError::GradeWeightCount {
                grades,
                got: self.grade_weights.len(),
            });
        }
        if self.grade_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(RuleParamError::BadGradeWeight);
        }
        if !self.preference_weight.is_finite() || self.preference_weight < 0.0 {
            return Err(RuleParamError::BadPreferenceWeight {
                got: self.preference_weight,
            });
        }
        Ok(())
    }
}

/// The level the cover rule would chase for this nurse: the first level in
/// cascade order with unmet demand on any period.
fn urgent_level(roster: &Roster, grade_index: usize, cascade: GradeCascade) -> Option<usize> {
    let grades = roster.instance().grades;
    let has_shortfall =
        |level: usize| (0..PERIODS).any(|period| roster.shortfall_at(period, level) > 0);
    match cascade {
        GradeCascade::BroaderLevels => (grade_index..grades).find(|&s| has_shortfall(s)),
        GradeCascade::StricterLevels => (0..=grade_index).rev().find(|&s| has_shortfall(s)),
    }
}

/// Periods the pattern works that are still short at `level`.
fn short_periods_worked(roster: &Roster, pattern: &ShiftPattern, level: usize) -> u32 {
    pattern
        .periods()
        .filter(|&period| roster.shortfall_at(period, level) > 0)
        .count() as u32
}

/// Cover-rule score: on the nurse's most urgent uncovered level, the number
/// of still-short periods this pattern would work. Zero when nothing the
/// cascade sees is short.
pub fn cover_score(
    roster: &Roster,
    nurse: NurseId,
    pattern: PatternId,
    cascade: GradeCascade,
) -> Result<u32, RosterError> {
    let profile = &roster.instance().nurses[nurse];
    if !profile.allows(pattern) {
        return Err(RosterError::InfeasiblePattern { nurse, pattern });
    }
    let Some(level) = urgent_level(roster, profile.grade_index(), cascade) else {
        return Ok(0);
    };
    Ok(short_periods_worked(
        roster,
        &roster.instance().patterns[pattern],
        level,
    ))
}

/// Combined-rule score: preference appeal plus weighted shortfall the
/// pattern would absorb across every level the nurse serves.
pub fn combined_score(
    roster: &Roster,
    nurse: NurseId,
    pattern: PatternId,
    params: &RuleParams,
) -> Result<f64, RosterError> {
    let profile = &roster.instance().nurses[nurse];
    let cost = profile
        .cost_of(pattern)
        .ok_or(RosterError::InfeasiblePattern { nurse, pattern })?;
    Ok(combined_score_raw(roster, profile.grade_index(), pattern, cost, params))
}

fn combined_score_raw(
    roster: &Roster,
    grade_index: usize,
    pattern: PatternId,
    cost: u32,
    params: &RuleParams,
) -> f64 {
    let instance = roster.instance();
    let shape = &instance.patterns[pattern];
    let mut score = params.preference_weight * f64::from(100 - cost.min(100));
    for level in grade_index..instance.grades {
        let mut shortfall = 0u64;
        for period in shape.periods() {
            shortfall += u64::from(roster.shortfall_at(period, level));
        }
        score += params.grade_weights[level] * shortfall as f64;
    }
    score
}

/// Assigns every unassigned nurse, in ascending id order, by the rule drawn
/// for them. Each nurse consumes one rule draw, plus one index draw when the
/// random rule comes up. Requires `params` valid for the instance and every
/// feasible set non-empty.
pub fn reconstruct(roster: &mut Roster, params: &RuleParams, rng: &mut SolverRng) {
    for nurse in 0..roster.instance().nurse_count() {
        if roster.assignment_of(nurse).is_some() {
            continue;
        }
        let profile = &roster.instance().nurses[nurse];
        let feasible = &profile.feasible;
        let draw: f64 = rng.random();
        let choice = if draw < params.cover_rate {
            match urgent_level(roster, profile.grade_index(), params.cascade) {
                Some(level) => {
                    let instance = roster.instance();
                    pick_best(feasible.iter().map(|fs| {
                        short_periods_worked(roster, &instance.patterns[fs.pattern], level)
                    }))
                }
                // Nothing is short, so every pattern scores zero.
                None => 0,
            }
        } else if draw < params.cover_rate + params.combined_rate {
            let grade_index = profile.grade_index();
            pick_best(feasible.iter().map(|fs| {
                combined_score_raw(roster, grade_index, fs.pattern, fs.cost, params)
            }))
        } else {
            rng.random_range(0..feasible.len())
        };
        let pattern = feasible[choice].pattern;
        roster.assign(nurse, pattern).expect("chosen from feasible set");
    }
}

/// Index of the strict maximum, first index on ties.
fn pick_best<T: PartialOrd>(scores: impl Iterator<Item = T>) -> usize {
    let mut best = 0;
    let mut best_score: Option<T> = None;
    for (index, score) in scores.enumerate() {
        match &best_score {
            Some(current) if score <= *current => {}
            _ => {
                best = index;
                best_score = Some(score);
            }
        }
    }
    best
}
