//! Rostering instances: the shift pattern catalogue, nurse profiles, the
//! graded demand table, and the canonical JSON file format.
//!
//! A week has 14 periods: seven day shifts (indices 0..7, Monday first)
//! followed by seven night shifts (indices 7..14). Grade bands are 1-based
//! and ordered by qualification, band 1 being the most qualified. The demand
//! table is cumulative across bands: `demand[k][s]` counts the nurses of
//! band `s + 1` *or better* required on period `k`, so every row must be
//! non-decreasing. All ids and indices in files and error messages are
//! 0-based; only the band label itself is 1-based.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::io::{self, Read, Write};
use thiserror::Error;

/// Periods in one week: seven day shifts followed by seven night shifts.
pub const PERIODS: usize = 14;

/// Index into [`Instance::patterns`].
pub type PatternId = usize;
/// Index into [`Instance::nurses`].
pub type NurseId = usize;

/// A weekly work pattern, one on/off flag per period.
///
/// Serialized as a string of `'0'`/`'1'` characters, e.g. `"11111000000000"`
/// for five day shifts. Masks of the wrong length survive parsing so that
/// validation can point at them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftPattern {
    mask: Vec<bool>,
}

/// A mask string contained something other than `'0'` or `'1'`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid mask character {found:?} at position {position}, expected '0' or '1'")]
pub struct MaskParseError {
    pub found: char,
    pub position: usize,
}

impl ShiftPattern {
    pub fn new(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Parses a `'0'`/`'1'` string; length is checked later by validation.
    pub fn from_mask_str(s: &str) -> Result<Self, MaskParseError> {
        let mut mask = Vec::with_capacity(s.len());
        for (position, ch) in s.chars().enumerate() {
            match ch {
                '0' => mask.push(false),
                '1' => mask.push(true),
                found => return Err(MaskParseError { found, position }),
            }
        }
        Ok(Self { mask })
    }

    pub fn mask_str(&self) -> String {
        self.mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// True when the pattern works period `k`; out-of-range periods are off.
    pub fn covers(&self, period: usize) -> bool {
        self.mask.get(period).copied().unwrap_or(false)
    }

    /// Iterates the period indices this pattern works, ascending.
    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(k, _)| k)
    }

    /// Number of periods in the mask (14 for a well-formed pattern).
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    /// Number of worked periods.
    pub fn work_count(&self) -> usize {
        self.mask.iter().filter(|&&on| on).count()
    }
}

impl Serialize for ShiftPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.mask_str())
    }
}

impl<'de> Deserialize<'de> for ShiftPattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        ShiftPattern::from_mask_str(&raw).map_err(D::Error::custom)
    }
}

/// One pattern a nurse is willing to work, with its preference cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibleShift {
    pub pattern: PatternId,
    /// Preference cost in `[0, 100]`; 0 marks the nurse's ideal pattern.
    pub cost: u32,
}

/// A nurse: qualification band plus the ordered set of acceptable patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NurseProfile {
    /// Qualification band, 1-based; band 1 is the most qualified.
    pub grade: u32,
    pub feasible: Vec<FeasibleShift>,
}

impl NurseProfile {
    /// 0-based grade level of this nurse's own band.
    pub fn grade_index(&self) -> usize {
        (self.grade as usize).saturating_sub(1)
    }

    /// A nurse counts toward every level at or below their qualification:
    /// band `b` covers levels `b - 1 .. grades`.
    pub fn qualifies(&self, level: usize) -> bool {
        self.grade_index() <= level
    }

    pub fn allows(&self, pattern: PatternId) -> bool {
        self.feasible.iter().any(|fs| fs.pattern == pattern)
    }

    pub fn cost_of(&self, pattern: PatternId) -> Option<u32> {
        self.feasible
            .iter()
            .find(|fs| fs.pattern == pattern)
            .map(|fs| fs.cost)
    }
}

/// A complete rostering instance.
///
/// Fields are public for construction; anything loaded from disk has passed
/// [`Instance::validate`], and solver entry points re-validate cheaply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    /// Number of grade bands, at least 1.
    pub grades: usize,
    pub patterns: Vec<ShiftPattern>,
    pub nurses: Vec<NurseProfile>,
    /// `demand[k][s]`: cumulative head-count required on period `k` at level `s`.
    pub demand: Vec<Vec<u32>>,
}

/// A structural problem found by [`Instance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoGrades,
    MaskLength { pattern: PatternId, len: usize },
    IdlePattern { pattern: PatternId },
    GradeOutOfRange { nurse: NurseId, grade: u32 },
    EmptyFeasibleSet { nurse: NurseId },
    UnknownPattern { nurse: NurseId, pattern: PatternId },
    DuplicateFeasiblePattern { nurse: NurseId, pattern: PatternId },
    CostOutOfRange { nurse: NurseId, pattern: PatternId, cost: u32 },
    DemandRowCount { rows: usize },
    DemandColumnCount { period: usize, cols: usize },
    /// `demand[period][level] > demand[period][level + 1]`.
    DemandNotCumulative { period: usize, level: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NoGrades => write!(f, "grades must be at least 1"),
            Violation::MaskLength { pattern, len } => write!(
                f,
                "pattern {pattern}: mask has {len} periods, expected {PERIODS}"
            ),
            Violation::IdlePattern { pattern } => {
                write!(f, "pattern {pattern}: works no periods")
            }
            Violation::GradeOutOfRange { nurse, grade } => {
                write!(f, "nurse {nurse}: grade {grade} outside 1..=grades")
            }
            Violation::EmptyFeasibleSet { nurse } => {
                write!(f, "nurse {nurse}: feasible set is empty")
            }
            Violation::UnknownPattern { nurse, pattern } => {
                write!(f, "nurse {nurse}: feasible pattern {pattern} not in catalogue")
            }
            Violation::DuplicateFeasiblePattern { nurse, pattern } => {
                write!(f, "nurse {nurse}: pattern {pattern} listed twice")
            }
            Violation::CostOutOfRange { nurse, pattern, cost } => write!(
                f,
                "nurse {nurse}: cost {cost} for pattern {pattern} outside 0..=100"
            ),
            Violation::DemandRowCount { rows } => {
                write!(f, "demand has {rows} rows, expected {PERIODS}")
            }
            Violation::DemandColumnCount { period, cols } => write!(
                f,
                "demand row {period}: has {cols} columns, expected one per grade"
            ),
            Violation::DemandNotCumulative { period, level } => write!(
                f,
                "demand row {period}: level {level} exceeds level {}; \
                 rows must be non-decreasing across levels",
                level + 1
            ),
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(Violation::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Why an instance file could not be loaded.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("instance parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Instance {
    pub fn nurse_count(&self) -> usize {
        self.nurses.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    pub fn demand_at(&self, period: usize, level: usize) -> u32 {
        self.demand[period][level]
    }

    /// Checks every structural invariant, collecting all violations rather
    /// than stopping at the first.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        if self.grades == 0 {
            violations.push(Violation::NoGrades);
        }
        for (id, pattern) in self.patterns.iter().enumerate() {
            if pattern.len() != PERIODS {
                violations.push(Violation::MaskLength {
                    pattern: id,
                    len: pattern.len(),
                });
            }
            if pattern.work_count() == 0 {
                violations.push(Violation::IdlePattern { pattern: id });
            }
        }
        for (id, nurse) in self.nurses.iter().enumerate() {
            if nurse.grade == 0 || nurse.grade as usize > self.grades {
                violations.push(Violation::GradeOutOfRange {
                    nurse: id,
                    grade: nurse.grade,
                });
            }
            if nurse.feasible.is_empty() {
                violations.push(Violation::EmptyFeasibleSet { nurse: id });
            }
            let mut seen = vec![false; self.patterns.len()];
            for fs in &nurse.feasible {
                if fs.pattern >= self.patterns.len() {
                    violations.push(Violation::UnknownPattern {
                        nurse: id,
                        pattern: fs.pattern,
                    });
                } else if seen[fs.pattern] {
                    violations.push(Violation::DuplicateFeasiblePattern {
                        nurse: id,
                        pattern: fs.pattern,
                    });
                } else {
                    seen[fs.pattern] = true;
                }
                if fs.cost > 100 {
                    violations.push(Violation::CostOutOfRange {
                        nurse: id,
                        pattern: fs.pattern,
                        cost: fs.cost,
                    });
                }
            }
        }
        if self.demand.len() != PERIODS {
            violations.push(Violation::DemandRowCount {
                rows: self.demand.len(),
            });
        }
        for (period, row) in self.demand.iter().enumerate() {
            if row.len() != self.grades {
                violations.push(Violation::DemandColumnCount {
                    period,
                    cols: row.len(),
                });
            }
            for level in 1..row.len() {
                if row[level - 1] > row[level] {
                    violations.push(Violation::DemandNotCumulative {
                        period,
                        level: level - 1,
                    });
                }
            }
        }
        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Parses and validates an instance from JSON bytes.
    pub fn from_json(bytes: &[u8]) -> Result<Self, LoadError> {
        let instance: Instance = serde_json::from_slice(bytes)?;
        let violations = instance.validate();
        if violations.is_empty() {
            Ok(instance)
        } else {
            Err(LoadError::Invalid(violations))
        }
    }

    pub fn from_json_reader(mut reader: impl Read) -> Result<Self, LoadError> {
        let mut buf = Vec::new();
        reader.read_to_end(&mut buf)?;
        Self::from_json(&buf)
    }

    /// Canonical serialization: pretty JSON with fixed field order and a
    /// trailing newline, so save -> load -> save is byte-identical.
    pub fn to_canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("instance serializes");
        text.push('\n');
        text
    }

    pub fn write_canonical_json(&self, mut writer: impl Write) -> io::Result<()> {
        writer.write_all(self.to_canonical_json().as_bytes())
    }
}
