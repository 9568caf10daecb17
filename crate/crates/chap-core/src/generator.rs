//! Random instances with a planted feasible schedule.
//!
//! The generator first draws patterns and nurses, then secretly assigns
//! every nurse a pattern and sets demand to a `tightness` fraction of the
//! cover that hidden schedule achieves. Demand can therefore always be met,
//! which keeps generated benchmarks honest: an infeasible run is the
//! solver's fault, not the instance's.

use crate::instance::{FeasibleShift, Instance, NurseProfile, PatternId, ShiftPattern, PERIODS};
use crate::SolverRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub nurses: usize,
    /// Catalogue size, at least 1.
    pub patterns: usize,
    /// Grade bands, at least 1.
    pub grades: usize,
    /// Demand as a fraction of the hidden schedule's cover, in `[0, 1]`.
    /// 1.0 pins demand exactly to that cover.
    pub tightness: f64,
    pub seed: u64,
    /// Smallest feasible-set size a nurse may get.
    pub feasible_min: usize,
    /// Largest feasible-set size; clamped to the catalogue size, so the
    /// default means "up to the whole catalogue".
    pub feasible_max: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            nurses: 10,
            patterns: 8,
            grades: 3,
            tightness: 0.8,
            seed: 0,
            feasible_min: 1,
            feasible_max: usize::MAX,
        }
    }
}

impl GeneratorConfig {
    pub fn new(nurses: usize, patterns: usize, grades: usize, tightness: f64, seed: u64) -> Self {
        Self { nurses, patterns, grades, tightness, seed, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeneratorError {
    #[error("pattern catalogue must have at least one pattern")]
    NoPatterns,
    #[error("grades must be at least 1")]
    NoGrades,
    #[error("tightness must be within [0, 1], got {0}")]
    BadTightness(f64),
    #[error("feasible range [{min}, {max}] is empty or exceeds the catalogue")]
    BadFeasibleRange { min: usize, max: usize },
}

/// Generates an instance; same config, same instance, bit for bit.
pub fn generate(config: &GeneratorConfig) -> Result<Instance, GeneratorError> {
    generate_with_witness(config).map(|(instance, _)| instance)
}

/// Generates an instance along with the hidden assignment whose cover the
/// demand was derived from. The witness has zero shortfall by construction.
pub fn generate_with_witness(
    config: &GeneratorConfig,
) -> Result<(Instance, Vec<PatternId>), GeneratorError> {
    if config.patterns == 0 {
        return Err(GeneratorError::NoPatterns);
    }
    if config.grades == 0 {
        return Err(GeneratorError::NoGrades);
    }
    if !(0.0..=1.0).contains(&config.tightness) || config.tightness.is_nan() {
        return Err(GeneratorError::BadTightness(config.tightness));
    }
    let feasible_max = config.feasible_max.min(config.patterns);
    if config.feasible_min == 0 || config.feasible_min > feasible_max {
        return Err(GeneratorError::BadFeasibleRange {
            min: config.feasible_min,
            max: config.feasible_max,
        });
    }

    let mut rng = SolverRng::seed_from_u64(config.seed);

    // Patterns: a block of 3 to 5 shifts on either the day or the night half
    // of the week. Duplicates are allowed, as in hand-written rosters.
    let patterns: Vec<ShiftPattern> = (0..config.patterns)
        .map(|_| {
            let nights = rng.random::<bool>();
            let worked = rng.random_range(3..=5usize);
            let mut mask = vec![false; PERIODS];
            for offset in sample(&mut rng, 7, worked) {
                mask[if nights { 7 + offset } else { offset }] = true;
            }
            ShiftPattern::new(mask)
        })
        .collect();

    let nurses: Vec<NurseProfile> = (0..config.nurses)
        .map(|_| {
            let grade = rng.random_range(1..=config.grades as u32);
            let size = rng.random_range(config.feasible_min..=feasible_max);
            let mut chosen: Vec<usize> = sample(&mut rng, config.patterns, size).into_vec();
            chosen.sort_unstable();
            let feasible = chosen
                .into_iter()
                .map(|pattern| {
                    // Squaring biases costs toward the happy end.
                    let cost = (rng.random::<f64>().powi(2) * 100.0) as u32;
                    FeasibleShift { pattern, cost }
                })
                .collect();
            NurseProfile { grade, feasible }
        })
        .collect();

    let witness: Vec<PatternId> = nurses
        .iter()
        .map(|profile| profile.feasible[rng.random_range(0..profile.feasible.len())].pattern)
        .collect();

    // Cover achieved by the hidden assignment, counted level by level.
    let mut cover = vec![vec![0u32; config.grades]; PERIODS];
    for (profile, &pattern) in nurses.iter().zip(&witness) {
        for period in patterns[pattern].periods() {
            for level in profile.grade_index()..config.grades {
                cover[period][level] += 1;
            }
        }
    }

    let demand = cover
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| ((f64::from(c) * config.tightness).floor() as u32).min(c))
                .collect()
        })
        .collect();

    let instance = Instance {
        grades: config.grades,
        patterns,
        nurses,
        demand,
    };
    debug_assert!(instance.is_valid());
    Ok((instance, witness))
}
