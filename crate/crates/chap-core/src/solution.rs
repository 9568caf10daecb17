//! On-disk artifacts around a run: solution files, benchmark target
//! sidecars, and convergence traces.

use crate::engine::{IterationRecord, RunReport};
use crate::instance::{Instance, PatternId};
use crate::roster::{CostBreakdown, Roster, RosterError};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use thiserror::Error;

/// A saved schedule: the assignment plus the cost claimed for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    /// One pattern id per nurse, in nurse order.
    pub assignment: Vec<PatternId>,
    pub cost: CostBreakdown,
}

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("solution parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Why a solution file does not check out against its instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("assignment covers {found} nurses, instance has {expected}")]
    AssignmentLength { expected: usize, found: usize },
    #[error(transparent)]
    Infeasible(#[from] RosterError),
    #[error(
        "claimed cost (preference {}, shortfall {}, penalty {}) does not match \
         recomputed cost (preference {}, shortfall {}, penalty {})",
        claimed.preference_total, claimed.shortfall_total, claimed.penalty,
        actual.preference_total, actual.shortfall_total, actual.penalty
    )]
    CostMismatch {
        claimed: CostBreakdown,
        actual: CostBreakdown,
    },
}

impl SolutionFile {
    pub fn from_report(report: &RunReport) -> Self {
        Self {
            assignment: report.assignment.clone(),
            cost: report.cost,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SolutionError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("solution serializes");
        text.push('\n');
        text
    }

    /// Recomputes the cost from scratch and compares it to the claim.
    pub fn verify(&self, instance: &Instance, demand_penalty: u64) -> Result<(), VerifyError> {
        if self.assignment.len() != instance.nurse_count() {
            return Err(VerifyError::AssignmentLength {
                expected: instance.nurse_count(),
                found: self.assignment.len(),
            });
        }
        let roster = Roster::from_assignment(instance, &self.assignment)?;
        let actual = roster.cost_breakdown(demand_penalty);
        if actual != self.cost {
            return Err(VerifyError::CostMismatch { claimed: self.cost, actual });
        }
        Ok(())
    }
}

/// A sidecar parse failure, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("targets line {line}: {problem}")]
pub struct SidecarError {
    pub line: usize,
    pub problem: String,
}

/// Parses a benchmark targets sidecar: one `name cost` pair per line, blank
/// lines and `#` comments ignored.
pub fn parse_targets(text: &str) -> Result<Vec<(String, u64)>, SidecarError> {
    let mut targets = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let [name, cost] = fields[..] else {
            return Err(SidecarError {
                line,
                problem: format!("expected `name cost`, got {} fields", fields.len()),
            });
        };
        let cost: u64 = cost.parse().map_err(|_| SidecarError {
            line,
            problem: format!("cost {cost:?} is not an unsigned integer"),
        })?;
        targets.push((name.to_string(), cost));
    }
    Ok(targets)
}

/// Writes a convergence trace as CSV, one row per iteration.
pub fn write_trace(mut writer: impl Write, records: &[IterationRecord]) -> io::Result<()> {
    writeln!(
        writer,
        "iteration,penalty,best_penalty,eliminated_unfit,eliminated_random"
    )?;
    for r in records {
        writeln!(
            writer,
            "{},{},{},{},{}",
            r.iteration, r.penalty, r.best_penalty, r.eliminated_unfit, r.eliminated_random
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{FeasibleShift, NurseProfile, ShiftPattern, PERIODS};

    fn instance() -> Instance {
        Instance {
            grades: 1,
            patterns: vec![
                ShiftPattern::from_mask_str("11111000000000").unwrap(),
                ShiftPattern::from_mask_str("00000001111100").unwrap(),
            ],
            nurses: vec![
                NurseProfile {
                    grade: 1,
                    feasible: vec![
                        FeasibleShift { pattern: 0, cost: 10 },
                        FeasibleShift { pattern: 1, cost: 3 },
                    ],
                },
                NurseProfile {
                    grade: 1,
                    feasible: vec![FeasibleShift { pattern: 0, cost: 0 }],
                },
            ],
            demand: vec![vec![0]; PERIODS],
        }
    }

    fn good_solution() -> SolutionFile {
        SolutionFile {
            assignment: vec![1, 0],
            cost: CostBreakdown {
                preference_total: 3,
                shortfall_total: 0,
                penalty: 3,
                complete: true,
            },
        }
    }

    #[test]
    fn solution_round_trips_and_verifies() {
        let instance = instance();
        let solution = good_solution();
        let text = solution.to_canonical_json();
        let back = SolutionFile::from_json(text.as_bytes()).unwrap();
        assert_eq!(back, solution);
        assert_eq!(back.to_canonical_json(), text);
        assert_eq!(back.verify(&instance, 200), Ok(()));
    }

    #[test]
    fn verify_catches_each_kind_of_tampering() {
        let instance = instance();

        let mut wrong_cost = good_solution();
        wrong_cost.cost.penalty = 4;
        assert!(matches!(
            wrong_cost.verify(&instance, 200),
            Err(VerifyError::CostMismatch { .. })
        ));

        let mut infeasible = good_solution();
        infeasible.assignment[1] = 1;
        assert_eq!(
            infeasible.verify(&instance, 200),
            Err(VerifyError::Infeasible(RosterError::InfeasiblePattern {
                nurse: 1,
                pattern: 1
            }))
        );

        let mut short = good_solution();
        short.assignment.pop();
        assert_eq!(
            short.verify(&instance, 200),
            Err(VerifyError::AssignmentLength { expected: 2, found: 1 })
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"assignment": [0], "cost": {"preference_total": 0,
            "shortfall_total": 0, "penalty": 0, "complete": true}, "extra": 1}"#;
        assert!(SolutionFile::from_json(text.as_bytes()).is_err());
    }

    #[test]
    fn targets_sidecar_parses_names_and_costs() {
        let text = "\n# weekly benchmarks\nward-01 8\n  ward-04\t17 \n\n";
        assert_eq!(
            parse_targets(text).unwrap(),
            vec![("ward-01".into(), 8), ("ward-04".into(), 17)]
        );
        let err = parse_targets("ward-01 8 9").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_targets("good 1\nbad minus").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_targets("negative -3").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn trace_csv_has_one_row_per_record() {
        let records = vec![
            IterationRecord {
                iteration: 0,
                penalty: 12,
                best_penalty: 12,
                eliminated_unfit: 3,
                eliminated_random: 1,
            },
            IterationRecord {
                iteration: 1,
                penalty: 9,
                best_penalty: 9,
                eliminated_unfit: 0,
                eliminated_random: 0,
            },
        ];
        let mut out = Vec::new();
        write_trace(&mut out, &records).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "iteration,penalty,best_penalty,eliminated_unfit,eliminated_random\n\
             0,12,12,3,1\n1,9,9,0,0\n"
        );
    }
}
