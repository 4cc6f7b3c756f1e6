//! Per-run result type shared by every algorithm.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::objective::{AllocationOutcome, EvalContext, MetricsReport, ObjectiveBreakdown, Position};

/// The algorithms the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Improved moth-flame optimizer: aware initialization, hierarchical
    /// flaming, lifetime re-pairing.
    Mfi,
    /// Original moth-flame optimizer.
    Mfo,
    /// Capacity-blind greedy assignment.
    Greedy,
    /// Uniform random search with the same evaluation budget as the swarms.
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Mfi,
        Algorithm::Mfo,
        Algorithm::Greedy,
        Algorithm::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mfi => "mfi",
            Algorithm::Mfo => "mfo",
            Algorithm::Greedy => "greedy",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mfi" => Ok(Algorithm::Mfi),
            "mfo" => Ok(Algorithm::Mfo),
            "greedy" => Ok(Algorithm::Greedy),
            "random" => Ok(Algorithm::Random),
            other => Err(format!("unknown algorithm name: {other:?}")),
        }
    }
}

/// Everything one optimizer run produces: the best strategy found, its
/// objective breakdown and metric set, and the per-iteration best-objective
/// convergence history. `wall` is the only field that is not a deterministic
/// function of the inputs.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Best position found; `None` for algorithms that build an allocation
    /// directly (greedy).
    pub best_position: Option<Position>,
    pub outcome: AllocationOutcome,
    pub breakdown: ObjectiveBreakdown,
    pub metrics: MetricsReport,
    /// Best objective after each iteration.
    pub history: Vec<f64>,
    /// Some node ended above its maximum capacity.
    pub overloaded: bool,
    pub wall: Duration,
}

pub(crate) fn finalize_run(
    algorithm: Algorithm,
    seed: u64,
    best_position: Option<Position>,
    outcome: AllocationOutcome,
    history: Vec<f64>,
    ctx: &EvalContext<'_>,
    started: std::time::Instant,
) -> RunReport {
    let breakdown = ctx.breakdown(&outcome);
    let metrics = crate::objective::metrics(&outcome, &breakdown, ctx.scenario());
    let overloaded = ctx.is_overloaded(&outcome);
    RunReport {
        algorithm,
        seed,
        best_position,
        outcome,
        breakdown,
        metrics,
        history,
        overloaded,
        wall: started.elapsed(),
    }
}
