//! Brute-force optimum over every decodable allocation of a tiny scenario.
//!
//! The decoder only looks at which half-interval each coordinate falls in,
//! so its image is fully covered by the 2^K side patterns. Enumerating one
//! representative position per pattern therefore finds the exact best
//! outcome any position vector can decode to.

use serde::Serialize;
use thiserror::Error;

use crate::objective::{DimensionMismatch, EvalContext, ObjectiveBreakdown, Position};
use crate::topology::{CostMatrix, Side};
use crate::workload::Scenario;

/// Enumeration is 2^K evaluations; refuse anything bigger than this.
pub const MAX_EXHAUSTIVE_TASKS: usize = 20;

#[derive(Debug, Error)]
pub enum ExhaustiveError {
    #[error("scenario has {tasks} tasks; exhaustive search is capped at {max}")]
    TooManyTasks { tasks: usize, max: usize },
    #[error(transparent)]
    Dimension(#[from] DimensionMismatch),
}

/// The best decodable outcome of a scenario.
#[derive(Debug, Clone, Serialize)]
pub struct ExhaustiveResult {
    pub best_objective: f64,
    /// One character per task in id order: `C` for cloud, `E` for edge.
    pub best_pattern: String,
    pub breakdown: ObjectiveBreakdown,
    pub allocated_count: usize,
    pub evaluations: usize,
}

/// A position that decodes to the given side pattern: cloud coordinates sit
/// at `ub/4`, edge coordinates at `3*ub/4`.
pub fn representative_position(pattern: &[Side], ub: f64) -> Position {
    Position::new(
        pattern
            .iter()
            .map(|side| match side {
                Side::Cloud => 0.25 * ub,
                Side::Edge => 0.75 * ub,
            })
            .collect(),
    )
}

fn pattern_of(mask: u64, dim: usize) -> Vec<Side> {
    (0..dim)
        .map(|bit| {
            if mask & (1 << bit) == 0 {
                Side::Cloud
            } else {
                Side::Edge
            }
        })
        .collect()
}

/// Evaluate every side pattern and return the minimum-objective one (the
/// first such pattern in mask order on exact ties).
pub fn exhaustive_optimum(
    scenario: &Scenario,
    costs: &CostMatrix,
    ub: f64,
) -> Result<ExhaustiveResult, ExhaustiveError> {
    let dim = scenario.task_count();
    if dim > MAX_EXHAUSTIVE_TASKS {
        return Err(ExhaustiveError::TooManyTasks {
            tasks: dim,
            max: MAX_EXHAUSTIVE_TASKS,
        });
    }
    let ctx = EvalContext::new(scenario, costs, ub);
    let mut best: Option<(Vec<Side>, ObjectiveBreakdown, usize)> = None;
    let evaluations = 1usize << dim;
    for mask in 0..evaluations as u64 {
        let pattern = pattern_of(mask, dim);
        let position = representative_position(&pattern, ub);
        let (outcome, breakdown) = ctx.evaluate(&position)?;
        if best
            .as_ref()
            .is_none_or(|(_, b, _)| breakdown.objective < b.objective)
        {
            best = Some((pattern, breakdown, outcome.allocated_count));
        }
    }
    let (pattern, breakdown, allocated_count) = best.expect("at least one pattern exists");
    Ok(ExhaustiveResult {
        best_objective: breakdown.objective,
        best_pattern: pattern
            .iter()
            .map(|side| match side {
                Side::Cloud => 'C',
                Side::Edge => 'E',
            })
            .collect(),
        breakdown,
        allocated_count,
        evaluations,
    })
}
