//! Non-swarm reference algorithms: a capacity-blind greedy assignment and a
//! uniform random search with the same evaluation budget as the swarms.

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::mfi::side_preference;
use crate::mfo::{random_position, MfoParams, OptimizeError};
use crate::objective::{AllocationOutcome, EvalContext, Position};
use crate::report::{finalize_run, Algorithm, RunReport};
use crate::topology::{CostMatrix, NodeId};
use crate::workload::{Scenario, Task};

/// Assign every task to its preferred side's closest node (minimum
/// communication cost from the initial node, ties by ascending id),
/// ignoring capacity entirely. Nodes can end up overloaded; the report
/// flags that. Deterministic: no randomness at all.
pub fn run_greedy(scenario: &Scenario, costs: &CostMatrix) -> RunReport {
    let started = Instant::now();
    let ctx = EvalContext::new(scenario, costs, 1.0);

    let mut nodes: Vec<_> = scenario.topology.nodes.iter().collect();
    nodes.sort_unstable_by_key(|node| node.id);
    let mut tasks: Vec<&Task> = scenario.tasks.iter().collect();
    tasks.sort_unstable_by_key(|task| task.id);

    let mut node_load: Vec<f64> = nodes.iter().map(|node| node.cap_min).collect();
    let mut assignment: Vec<Option<NodeId>> = vec![None; tasks.len()];
    for task in &tasks {
        let side = side_preference(task, scenario, costs);
        let closest = nodes
            .iter()
            .filter(|node| node.kind == side)
            .map(|node| (costs.get(task.initial_node, node.id), node.id))
            .filter(|(comm, _)| comm.is_finite())
            .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)))
            .map(|(_, id)| id)
            .expect("the task's own side is always reachable");
        node_load[closest.index()] += task.wl;
        assignment[(task.id - 1) as usize] = Some(closest);
    }

    let outcome = AllocationOutcome {
        allocated_count: assignment.iter().filter(|a| a.is_some()).count(),
        assignment,
        node_load,
    };
    let objective = ctx.breakdown(&outcome).objective;
    finalize_run(
        Algorithm::Greedy,
        0,
        None,
        outcome,
        vec![objective],
        &ctx,
        started,
    )
}

/// Evaluate `nsa * max_iter` uniform random positions and keep the best.
/// Positions are drawn in batches of `nsa`; each batch is evaluated in
/// parallel and the history records the best objective after each batch.
pub fn run_random_search(
    scenario: &Scenario,
    costs: &CostMatrix,
    params: &MfoParams,
) -> Result<RunReport, OptimizeError> {
    // Unlike the swarms, a single sample is a legal budget here.
    if params.nsa < 1 || params.max_iter < 1 {
        return Err(OptimizeError::InvalidParams(
            "random search needs nsa >= 1 and max_iter >= 1".to_string(),
        ));
    }
    if !params.ub.is_finite() || params.ub <= 0.0 {
        return Err(OptimizeError::InvalidParams(
            "ub must be positive and finite".to_string(),
        ));
    }
    let started = Instant::now();
    let dim = scenario.task_count();
    let ctx = EvalContext::new(scenario, costs, params.ub);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut best: Option<(Position, f64)> = None;
    let mut history = Vec::with_capacity(params.max_iter);
    for _ in 0..params.max_iter {
        let batch: Vec<Position> = (0..params.nsa)
            .map(|_| random_position(dim, params.ub, &mut rng))
            .collect();
        let objectives = batch
            .par_iter()
            .map(|position| ctx.evaluate_objective(position))
            .collect::<Result<Vec<_>, _>>()?;
        for (position, objective) in batch.into_iter().zip(objectives) {
            if best.as_ref().is_none_or(|(_, b)| objective < *b) {
                best = Some((position, objective));
            }
        }
        history.push(best.as_ref().expect("batch is nonempty").1);
    }

    let (best_position, _) = best.expect("at least one sample was drawn");
    let outcome = ctx.decode(&best_position)?;
    Ok(finalize_run(
        Algorithm::Random,
        params.seed,
        Some(best_position),
        outcome,
        history,
        &ctx,
        started,
    ))
}
