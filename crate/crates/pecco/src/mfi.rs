//! The improved moth-flame optimizer.
//!
//! Three mechanisms distinguish it from the original:
//!
//! * **Aware initialization** — instead of uniform positions, each task's
//!   coordinate is drawn inside the half-interval of the side that scores
//!   better for that task alone (computation cost plus `lambda` times
//!   profit plus the cheapest communication cost to that side). The
//!   initializer oversamples by 1.5x, then repeatedly merges the two
//!   closest rows into their mean until `nsa` rows remain, so the starting
//!   population is also spread out.
//! * **Hierarchical flaming** — a moth whose flame survives pursues a blend
//!   of its own flame with the two or three best flames,
//!   `(own + w * sum(leaders)) / (1 + len(leaders) * w)`, where `w` grows
//!   linearly from 0 to 1 over the run, shifting from exploration toward
//!   the leaders.
//! * **Lifetime re-pairing** — a moth whose flame was eliminated draws a
//!   lifetime value `tau` in `[0, 1)`. Above the threshold it restarts
//!   against a fresh random stand-in flame; otherwise it re-pairs with a
//!   uniformly chosen surviving flame. Either way the stand-in is blended
//!   with the leaders as above, and stand-ins are pursuit targets only:
//!   they never join the flame set or consume a fitness evaluation.
//!
//! RNG draw order per iteration: pairing draws first (one `tau` per
//! orphaned moth in ascending moth order, plus that moth's stand-in draws),
//! then the spiral `t` draws moth-major. Movement is skipped once fewer
//! than two flames survive; selection still runs every iteration, so the
//! convergence history has exactly `max_iter` entries.

use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mfo::{
    flame_count, random_position, spiral_step, t_lower_bound, MfoParams, OptimizeError,
    SwarmState,
};
use crate::objective::{EvalContext, Position};
use crate::report::{finalize_run, Algorithm, RunReport};
use crate::topology::{CostMatrix, Side};
use crate::workload::{Scenario, Task};

/// How many candidate rows the aware initializer draws per requested row.
pub const OVERSAMPLE_FACTOR: f64 = 1.5;

/// Parameters of the improved optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct MfiParams {
    pub base: MfoParams,
    /// Lifetime draws above this threshold re-initialize the orphaned
    /// moth's stand-in flame instead of re-pairing with a survivor.
    pub lifetime_threshold: f64,
}

impl Default for MfiParams {
    fn default() -> Self {
        Self {
            base: MfoParams::default(),
            lifetime_threshold: 0.8,
        }
    }
}

impl MfiParams {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        self.base.validate()?;
        if !(0.0..=1.0).contains(&self.lifetime_threshold) {
            return Err(OptimizeError::InvalidParams(
                "lifetime_threshold must be in [0, 1]".to_string(),
            ));
        }
        Ok(())
    }
}

/// The side a task would rather run on, judged in isolation: per-side score
/// is `cost + lambda * profit` plus the cheapest communication cost from
/// the task's initial node to any node of that side. A side with no
/// reachable node scores infinity; ties go to the cloud.
pub fn side_preference(task: &Task, scenario: &Scenario, costs: &CostMatrix) -> Side {
    let min_comm = |side: Side| {
        scenario
            .topology
            .nodes
            .iter()
            .filter(|node| node.kind == side)
            .map(|node| costs.get(task.initial_node, node.id))
            .fold(f64::INFINITY, f64::min)
    };
    let cloud = (task.cost_cloud + scenario.lambda * task.profit_cloud) + min_comm(Side::Cloud);
    let edge = (task.cost_edge + scenario.lambda * task.profit_edge) + min_comm(Side::Edge);
    if cloud <= edge {
        Side::Cloud
    } else {
        Side::Edge
    }
}

/// Candidate rows drawn before density merging.
pub fn oversample_count(nsa: usize) -> usize {
    (nsa as f64 * OVERSAMPLE_FACTOR).ceil() as usize
}

/// Merge the closest pair of rows (minimum L2 distance, ties to the
/// lexicographically smallest index pair) into their coordinate-wise mean
/// until `target` rows remain. The merged row is appended at the end.
/// Returns the surviving rows and the number of merges performed.
pub fn merge_down(mut rows: Vec<Position>, target: usize) -> (Vec<Position>, usize) {
    let mut merges = 0;
    while rows.len() > target {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..rows.len() {
            for j in (i + 1)..rows.len() {
                let dist: f64 = rows[i]
                    .values
                    .iter()
                    .zip(&rows[j].values)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if best.is_none_or(|(_, _, d)| dist < d) {
                    best = Some((i, j, dist));
                }
            }
        }
        let (i, j, _) = best.expect("at least two rows remain");
        let merged = Position::new(
            rows[i]
                .values
                .iter()
                .zip(&rows[j].values)
                .map(|(a, b)| (a + b) / 2.0)
                .collect(),
        );
        rows.remove(j);
        rows.remove(i);
        rows.push(merged);
        merges += 1;
    }
    (rows, merges)
}

/// The oversampled candidate rows of the aware initializer: each
/// coordinate sits in its task's preferred half-interval (`[0, ub/2)` for
/// cloud, `[ub/2, ub)` for edge), one uniform draw per coordinate,
/// row-major.
pub fn aware_candidates(
    nsa: usize,
    scenario: &Scenario,
    costs: &CostMatrix,
    ub: f64,
    rng: &mut impl Rng,
) -> Vec<Position> {
    let mut tasks: Vec<&Task> = scenario.tasks.iter().collect();
    tasks.sort_unstable_by_key(|task| task.id);
    let preferences: Vec<Side> = tasks
        .iter()
        .map(|task| side_preference(task, scenario, costs))
        .collect();

    let half = ub / 2.0;
    (0..oversample_count(nsa))
        .map(|_| {
            let values = preferences
                .iter()
                .map(|side| {
                    let u = rng.random::<f64>();
                    match side {
                        Side::Cloud => u * half,
                        Side::Edge => half + u * half,
                    }
                })
                .collect();
            Position::new(values)
        })
        .collect()
}

/// Profit-, cost- and density-aware initialization: draw
/// `ceil(1.5 * nsa)` candidate rows via [`aware_candidates`], then merge
/// the closest pairs down to `nsa` rows.
pub fn aware_initialize(
    nsa: usize,
    scenario: &Scenario,
    costs: &CostMatrix,
    ub: f64,
    rng: &mut impl Rng,
) -> Vec<Position> {
    let candidates = aware_candidates(nsa, scenario, costs, ub, rng);
    let (rows, _merges) = merge_down(candidates, nsa);
    rows
}

/// Blend a moth's pursuit target from its paired (or stand-in) flame and
/// the current leader flames: `(paired + w * sum(leaders)) / (1 + len * w)`.
/// With `w = 0` this is exactly the paired flame.
pub fn hierarchical_target(paired: &Position, leaders: &[&Position], omega: f64) -> Position {
    let denom = 1.0 + leaders.len() as f64 * omega;
    let values = (0..paired.dim())
        .map(|c| {
            let leader_sum: f64 = leaders.iter().map(|leader| leader.values[c]).sum();
            (paired.values[c] + omega * leader_sum) / denom
        })
        .collect();
    Position::new(values)
}

/// Pursuit target for a moth whose own flame was eliminated. Draws the
/// lifetime value `tau`; above the threshold the stand-in flame is freshly
/// random, otherwise it is a uniformly chosen surviving flame. The stand-in
/// is then blended with the leaders.
pub fn lifetime_repair(
    surviving_flames: &[Position],
    leaders: &[&Position],
    omega: f64,
    lifetime_threshold: f64,
    ub: f64,
    dim: usize,
    rng: &mut impl Rng,
) -> Position {
    debug_assert!(surviving_flames.len() >= 2);
    let tau: f64 = rng.random();
    let stand_in = if tau > lifetime_threshold {
        random_position(dim, ub, rng)
    } else {
        surviving_flames[rng.random_range(0..surviving_flames.len())].clone()
    };
    hierarchical_target(&stand_in, leaders, omega)
}

/// Run the improved optimizer. Deterministic given the seed.
pub fn run_pecco_mfi(
    scenario: &Scenario,
    costs: &CostMatrix,
    params: &MfiParams,
) -> Result<RunReport, OptimizeError> {
    params.validate()?;
    let started = Instant::now();
    let dim = scenario.task_count();
    let nsa = params.base.nsa;
    let max_iter = params.base.max_iter;
    let ub = params.base.ub;
    let ctx = EvalContext::new(scenario, costs, ub);
    let mut rng = ChaCha8Rng::seed_from_u64(params.base.seed);

    let moths = aware_initialize(nsa, scenario, costs, ub, &mut rng);
    let mut state = SwarmState::new(moths);
    let mut history = Vec::with_capacity(max_iter);

    for current_iter in 1..=max_iter {
        state.iteration = current_iter;
        state.evaluate(&ctx)?;
        let k = flame_count(nsa, current_iter, max_iter);
        state.select_flames(k, params.base.elitism);
        history.push(state.flame_objectives[0]);

        // Pairing needs at least two surviving flames; once the schedule
        // reaches one flame the population stops moving.
        if k < 2 {
            continue;
        }

        let omega = current_iter as f64 / max_iter as f64;
        let leaders: Vec<&Position> = state.flames[..k.min(3)].iter().collect();
        let targets: Vec<Position> = (0..nsa)
            .map(|i| {
                if i < k {
                    hierarchical_target(&state.flames[i], &leaders, omega)
                } else {
                    lifetime_repair(
                        &state.flames,
                        &leaders,
                        omega,
                        params.lifetime_threshold,
                        ub,
                        dim,
                        &mut rng,
                    )
                }
            })
            .collect();

        let t_floor = t_lower_bound(current_iter, max_iter);
        for (i, target) in targets.iter().enumerate() {
            let t: Vec<f64> = (0..dim).map(|_| rng.random_range(t_floor..=1.0)).collect();
            let next = spiral_step(&state.moths[i], target, params.base.b, &t, ub);
            state.moths[i] = next;
        }
    }

    let (best, _) = state.best();
    let best = best.clone();
    let outcome = ctx.decode(&best)?;
    Ok(finalize_run(
        Algorithm::Mfi,
        params.base.seed,
        Some(best),
        outcome,
        history,
        &ctx,
        started,
    ))
}
