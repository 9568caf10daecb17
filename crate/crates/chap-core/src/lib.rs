//! Weekly nurse rostering by iterated component elimination and greedy
//! repair.
//!
//! Each nurse works one shift pattern per week; the goal is to cover graded
//! staffing demand at minimum preference cost. The solver keeps a complete
//! schedule at all times: every iteration scores the nurses on it, throws
//! out the ones the schedule can live without (plus a small random sample),
//! and rebuilds the gaps greedily. The best schedule ever seen wins.
//!
//! Modules, in data-flow order:
//! - [`instance`]: the problem model and its JSON format
//! - [`generator`]: random instances with a planted feasible schedule
//! - [`roster`]: mutable schedules with incremental coverage counts
//! - [`eval`]: per-nurse fitness of a complete schedule
//! - [`perturb`]: the two elimination passes
//! - [`rebuild`]: the greedy repair rules
//! - [`engine`]: the full loop and the batch driver
//! - [`oracle`]: exhaustive and greedy baselines
//! - [`solution`]: solution files, target sidecars, trace export

pub mod engine;
pub mod eval;
pub mod generator;
pub mod instance;
pub mod oracle;
pub mod perturb;
pub mod rebuild;
pub mod roster;
pub mod solution;

/// The one random number generator used everywhere: seedable, portable, and
/// stable across platforms and releases, so seeds written in reports stay
/// reproducible.
pub type SolverRng = rand_chacha::ChaCha8Rng;

pub use engine::{
    chap_batch, chap_solve, chap_solve_with_hooks, BatchReport, BenchInstance, RunReport,
    SolverParams, CENSORED_COST,
};
pub use instance::{Instance, NurseId, PatternId, ShiftPattern, PERIODS};
pub use roster::{CostBreakdown, Roster};
