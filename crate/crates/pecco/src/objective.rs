//! Decoding position vectors into capacity-feasible allocations and scoring
//! them.
//!
//! A position is a length-K vector in `[0, ub]`. Coordinate k picks the side
//! for task k: values below `ub/2` mean cloud, values from `ub/2` up mean
//! edge. Within the chosen side the task goes to the node with the cheapest
//! communication cost from its initial node (ties broken by ascending node
//! id) that still has capacity for it; if no node fits, the task stays
//! unallocated and contributes neither cost nor profit.
//!
//! The overall objective is `(comm + comp) + lambda * profit` with `lambda`
//! negative, so minimizing it trades cost against profit. All operations
//! here are pure functions of immutable inputs and safe to call from many
//! threads at once.

use serde::Serialize;
use thiserror::Error;

use crate::topology::{CostMatrix, Node, NodeId, Side};
use crate::workload::{Scenario, Task};

/// A search candidate: one offloading strategy encoded as a vector in
/// `[0, ub]^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Position {
    pub values: Vec<f64>,
}

impl Position {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// The decoded form of a position: per-task node assignments (or none), the
/// resulting per-node loads (starting from each node's idle baseline), and
/// how many tasks found a home.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationOutcome {
    /// Indexed by task id - 1.
    pub assignment: Vec<Option<NodeId>>,
    /// Indexed by node id - 1; starts at `cap_min`.
    pub node_load: Vec<f64>,
    pub allocated_count: usize,
}

/// Objective value and its three components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveBreakdown {
    pub comm: f64,
    pub comp: f64,
    pub profit: f64,
    pub objective: f64,
}

/// Every benchmark metric for one allocation (or for aggregated averages:
/// the ratio fields divide whatever aggregates they are fed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricsReport {
    pub objective: f64,
    pub profit: f64,
    pub cost: f64,
    pub profit_cost_ratio: f64,
    pub allocated_count: f64,
    pub profit_per_allocation: f64,
    pub cost_per_allocation: f64,
    pub utilization_percent: f64,
    pub profit_per_utilization: f64,
    pub cost_per_utilization: f64,
}

impl MetricsReport {
    /// Build the full metric set from aggregate values. Ratios with a zero
    /// denominator are reported as 0 rather than failing, so aggregate
    /// tables stay total; renderers flag them.
    pub fn from_aggregates(
        objective: f64,
        profit: f64,
        cost: f64,
        allocated: f64,
        utilization_percent: f64,
    ) -> Self {
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        Self {
            objective,
            profit,
            cost,
            profit_cost_ratio: ratio(profit, cost),
            allocated_count: allocated,
            profit_per_allocation: ratio(profit, allocated),
            cost_per_allocation: ratio(cost, allocated),
            utilization_percent,
            profit_per_utilization: ratio(profit, utilization_percent),
            cost_per_utilization: ratio(cost, utilization_percent),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("position has {got} coordinates but the scenario has {expected} tasks")]
pub struct DimensionMismatch {
    pub expected: usize,
    pub got: usize,
}

/// Reusable decoding context: node and task lookups in id order plus, for
/// every (initial node, side) pair, the candidate nodes sorted by ascending
/// communication cost then id, unreachable nodes excluded. Building it once
/// per optimizer run keeps decoding cheap.
pub struct EvalContext<'a> {
    scenario: &'a Scenario,
    costs: &'a CostMatrix,
    ub: f64,
    nodes: Vec<&'a Node>,
    tasks: Vec<&'a Task>,
    candidates: Vec<[Vec<(usize, f64)>; 2]>,
}

fn side_slot(side: Side) -> usize {
    match side {
        Side::Cloud => 0,
        Side::Edge => 1,
    }
}

impl<'a> EvalContext<'a> {
    /// `scenario` must validate cleanly and `costs` must be the matrix of
    /// its topology.
    pub fn new(scenario: &'a Scenario, costs: &'a CostMatrix, ub: f64) -> Self {
        let n = scenario.topology.nodes.len();
        let mut nodes: Vec<&Node> = scenario.topology.nodes.iter().collect();
        nodes.sort_unstable_by_key(|node| node.id);
        let mut tasks: Vec<&Task> = scenario.tasks.iter().collect();
        tasks.sort_unstable_by_key(|task| task.id);

        let mut candidates = Vec::with_capacity(n);
        for source in &nodes {
            let mut per_side: [Vec<(usize, f64)>; 2] = [Vec::new(), Vec::new()];
            for node in &nodes {
                let comm = costs.get(source.id, node.id);
                if comm.is_finite() {
                    per_side[side_slot(node.kind)].push((node.id.index(), comm));
                }
            }
            for list in &mut per_side {
                list.sort_unstable_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
            }
            candidates.push(per_side);
        }

        Self {
            scenario,
            costs,
            ub,
            nodes,
            tasks,
            candidates,
        }
    }

    pub fn ub(&self) -> f64 {
        self.ub
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn costs(&self) -> &'a CostMatrix {
        self.costs
    }

    /// Decode a position into a capacity-feasible allocation. Tasks are
    /// processed in ascending id order; a task lands on the first candidate
    /// of its chosen side whose load can still absorb it.
    pub fn decode(&self, position: &Position) -> Result<AllocationOutcome, DimensionMismatch> {
        if position.dim() != self.tasks.len() {
            return Err(DimensionMismatch {
                expected: self.tasks.len(),
                got: position.dim(),
            });
        }
        let half = self.ub / 2.0;
        let mut node_load: Vec<f64> = self.nodes.iter().map(|n| n.cap_min).collect();
        let mut assignment: Vec<Option<NodeId>> = vec![None; self.tasks.len()];
        let mut allocated_count = 0;

        for (slot, task) in self.tasks.iter().enumerate() {
            let side = if position.values[slot] < half {
                Side::Cloud
            } else {
                Side::Edge
            };
            let list = &self.candidates[task.initial_node.index()][side_slot(side)];
            for &(node_idx, _comm) in list {
                if node_load[node_idx] + task.wl <= self.nodes[node_idx].cap_max {
                    node_load[node_idx] += task.wl;
                    assignment[slot] = Some(self.nodes[node_idx].id);
                    allocated_count += 1;
                    break;
                }
            }
        }

        Ok(AllocationOutcome {
            assignment,
            node_load,
            allocated_count,
        })
    }

    /// Decode and score in one step.
    pub fn evaluate(
        &self,
        position: &Position,
    ) -> Result<(AllocationOutcome, ObjectiveBreakdown), DimensionMismatch> {
        let outcome = self.decode(position)?;
        let breakdown = self.breakdown(&outcome);
        Ok((outcome, breakdown))
    }

    /// Objective value only; used on optimizer hot paths.
    pub fn evaluate_objective(&self, position: &Position) -> Result<f64, DimensionMismatch> {
        Ok(self.evaluate(position)?.1.objective)
    }

    pub fn breakdown(&self, outcome: &AllocationOutcome) -> ObjectiveBreakdown {
        let comm = communication_cost(outcome, self.scenario, self.costs);
        let comp = computation_cost(outcome, self.scenario);
        let profit_total = profit(outcome, self.scenario);
        ObjectiveBreakdown {
            comm,
            comp,
            profit: profit_total,
            objective: (comm + comp) + self.scenario.lambda * profit_total,
        }
    }

    /// True when some node carries more than its maximum capacity. Never
    /// true for decoded outcomes; baseline algorithms can produce it.
    pub fn is_overloaded(&self, outcome: &AllocationOutcome) -> bool {
        outcome
            .node_load
            .iter()
            .zip(&self.nodes)
            .any(|(&load, node)| load > node.cap_max)
    }
}

fn tasks_in_id_order(scenario: &Scenario) -> Vec<&Task> {
    let mut tasks: Vec<&Task> = scenario.tasks.iter().collect();
    tasks.sort_unstable_by_key(|task| task.id);
    tasks
}

fn side_of(scenario: &Scenario, id: NodeId) -> Side {
    scenario
        .topology
        .node(id)
        .expect("assignment references an existing node")
        .kind
}

/// Decode a position against a scenario. Convenience wrapper that builds a
/// fresh context; optimizers keep a context alive instead.
pub fn decode(
    position: &Position,
    scenario: &Scenario,
    costs: &CostMatrix,
    ub: f64,
) -> Result<AllocationOutcome, DimensionMismatch> {
    EvalContext::new(scenario, costs, ub).decode(position)
}

/// Total migration cost: for every allocated task, the optimal
/// communication cost from its initial node to its assigned node, summed in
/// ascending task id order. Unallocated tasks contribute 0.
pub fn communication_cost(
    outcome: &AllocationOutcome,
    scenario: &Scenario,
    costs: &CostMatrix,
) -> f64 {
    let mut total = 0.0;
    for task in tasks_in_id_order(scenario) {
        if let Some(node) = outcome.assignment[(task.id - 1) as usize] {
            total += costs.get(task.initial_node, node);
        }
    }
    total
}

/// Total execution cost: each allocated task pays its cloud-side or
/// edge-side cost depending on where it landed.
pub fn computation_cost(outcome: &AllocationOutcome, scenario: &Scenario) -> f64 {
    let mut total = 0.0;
    for task in tasks_in_id_order(scenario) {
        if let Some(node) = outcome.assignment[(task.id - 1) as usize] {
            total += match side_of(scenario, node) {
                Side::Cloud => task.cost_cloud,
                Side::Edge => task.cost_edge,
            };
        }
    }
    total
}

/// Total profit earned by allocated tasks, by assigned side.
pub fn profit(outcome: &AllocationOutcome, scenario: &Scenario) -> f64 {
    let mut total = 0.0;
    for task in tasks_in_id_order(scenario) {
        if let Some(node) = outcome.assignment[(task.id - 1) as usize] {
            total += match side_of(scenario, node) {
                Side::Cloud => task.profit_cloud,
                Side::Edge => task.profit_edge,
            };
        }
    }
    total
}

/// Decode then score a position: `objective = (comm + comp) + lambda * profit`.
pub fn evaluate(
    position: &Position,
    scenario: &Scenario,
    costs: &CostMatrix,
    ub: f64,
) -> Result<ObjectiveBreakdown, DimensionMismatch> {
    let ctx = EvalContext::new(scenario, costs, ub);
    Ok(ctx.evaluate(position)?.1)
}

/// Fill the full metric set for one outcome. Utilization is the mean over
/// nodes of `load / cap_max`, in percent.
pub fn metrics(
    outcome: &AllocationOutcome,
    breakdown: &ObjectiveBreakdown,
    scenario: &Scenario,
) -> MetricsReport {
    let mut nodes: Vec<&Node> = scenario.topology.nodes.iter().collect();
    nodes.sort_unstable_by_key(|node| node.id);
    let mut ratio_sum = 0.0;
    for (node, &load) in nodes.iter().zip(&outcome.node_load) {
        if node.cap_max > 0.0 {
            ratio_sum += load / node.cap_max;
        }
    }
    let utilization_percent = 100.0 * ratio_sum / nodes.len() as f64;
    MetricsReport::from_aggregates(
        breakdown.objective,
        breakdown.profit,
        breakdown.comm + breakdown.comp,
        outcome.allocated_count as f64,
        utilization_percent,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{all_pairs_optimal_cost, Link, Topology};

    fn node(id: u32, kind: Side, cap_min: f64, cap_max: f64) -> Node {
        Node {
            id: NodeId(id),
            kind,
            cap_min,
            cap_max,
        }
    }

    fn link(src: u32, dst: u32, length: f64, unit_weight: f64) -> Link {
        Link {
            src: NodeId(src),
            dst: NodeId(dst),
            length,
            unit_weight,
        }
    }

    fn task(id: u32, wl: f64, initial: u32) -> Task {
        Task {
            id,
            wl,
            cost_cloud: 1.0,
            cost_edge: 1.0,
            profit_cloud: 1.0,
            profit_edge: 1.0,
            initial_node: NodeId(initial),
        }
    }

    fn scenario(nodes: Vec<Node>, links: Vec<Link>, tasks: Vec<Task>, lambda: f64) -> Scenario {
        Scenario {
            name: "test".to_string(),
            seed: 0,
            lambda,
            topology: Topology { nodes, links },
            tasks,
        }
    }

    #[test]
    fn half_interval_boundary_belongs_to_edge() {
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![task(1, 1.0, 1)],
            -1.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let ctx = EvalContext::new(&s, &costs, 1.0);
        let cloud = ctx.decode(&Position::new(vec![0.3])).unwrap();
        assert_eq!(cloud.assignment[0], Some(NodeId(1)));
        let edge = ctx.decode(&Position::new(vec![0.7])).unwrap();
        assert_eq!(edge.assignment[0], Some(NodeId(2)));
        let boundary = ctx.decode(&Position::new(vec![0.5])).unwrap();
        assert_eq!(boundary.assignment[0], Some(NodeId(2)));
    }

    #[test]
    fn task_stays_on_cheapest_feasible_node() {
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![task(1, 1.0, 1)],
            -1.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let ctx = EvalContext::new(&s, &costs, 1.0);
        let outcome = ctx.decode(&Position::new(vec![0.0])).unwrap();
        assert_eq!(outcome.assignment[0], Some(NodeId(1)));
        assert_eq!(communication_cost(&outcome, &s, &costs), 0.0);
    }

    #[test]
    fn capacity_exhaustion_leaves_second_task_unallocated() {
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 4.0), node(2, Side::Edge, 0.0, 0.5)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![task(1, 3.0, 1), task(2, 3.0, 1)],
            -1.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let ctx = EvalContext::new(&s, &costs, 1.0);
        let outcome = ctx.decode(&Position::new(vec![0.1, 0.1])).unwrap();
        assert_eq!(outcome.assignment[0], Some(NodeId(1)));
        assert_eq!(outcome.assignment[1], None);
        assert_eq!(outcome.allocated_count, 1);
        assert_eq!(outcome.node_load[0], 3.0);
    }

    #[test]
    fn migration_costs_sum_over_allocated_tasks() {
        let s = scenario(
            vec![
                node(1, Side::Cloud, 0.0, 10.0),
                node(2, Side::Cloud, 0.0, 10.0),
                node(3, Side::Edge, 0.0, 10.0),
            ],
            vec![
                link(1, 2, 2.0, 1.0),
                link(2, 1, 2.0, 1.0),
                link(2, 3, 5.0, 1.0),
                link(3, 2, 5.0, 1.0),
                link(1, 3, 7.0, 1.0),
                link(3, 1, 7.0, 1.0),
            ],
            vec![task(1, 1.0, 2), task(2, 1.0, 1), task(3, 1.0, 2)],
            -1.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        // Task 1 migrates 2->1 (cost 2), task 2 stays on 1 (0), task 3
        // migrates 2->3 (5).
        let outcome = AllocationOutcome {
            assignment: vec![Some(NodeId(1)), Some(NodeId(1)), Some(NodeId(3))],
            node_load: vec![2.0, 0.0, 1.0],
            allocated_count: 3,
        };
        assert_eq!(communication_cost(&outcome, &s, &costs), 7.0);
    }

    #[test]
    fn computation_cost_uses_assigned_side() {
        let mut t = task(1, 1.0, 1);
        t.cost_cloud = 2.0;
        t.cost_edge = 9.0;
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![t],
            -1.0,
        );
        let on_cloud = AllocationOutcome {
            assignment: vec![Some(NodeId(1))],
            node_load: vec![1.0, 0.0],
            allocated_count: 1,
        };
        assert_eq!(computation_cost(&on_cloud, &s), 2.0);
        let on_edge = AllocationOutcome {
            assignment: vec![Some(NodeId(2))],
            node_load: vec![0.0, 1.0],
            allocated_count: 1,
        };
        assert_eq!(computation_cost(&on_edge, &s), 9.0);
        let unallocated = AllocationOutcome {
            assignment: vec![None],
            node_load: vec![0.0, 0.0],
            allocated_count: 0,
        };
        assert_eq!(computation_cost(&unallocated, &s), 0.0);
        assert_eq!(profit(&unallocated, &s), 0.0);
    }

    #[test]
    fn profit_sums_by_side() {
        let mut t1 = task(1, 1.0, 1);
        t1.profit_cloud = 3.0;
        let mut t2 = task(2, 1.0, 1);
        t2.profit_cloud = 4.0;
        let mut t3 = task(3, 1.0, 2);
        t3.profit_edge = 10.0;
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![t1, t2, t3],
            -1.0,
        );
        let both_cloud = AllocationOutcome {
            assignment: vec![Some(NodeId(1)), Some(NodeId(1)), None],
            node_load: vec![2.0, 0.0],
            allocated_count: 2,
        };
        assert_eq!(profit(&both_cloud, &s), 7.0);
        let edge_only = AllocationOutcome {
            assignment: vec![None, None, Some(NodeId(2))],
            node_load: vec![0.0, 1.0],
            allocated_count: 1,
        };
        assert_eq!(profit(&edge_only, &s), 10.0);
    }

    #[test]
    fn objective_combines_components_with_lambda() {
        // comm 3 (one migration over a cost-3 path), comp 2, profit 10,
        // lambda -8 => objective 5 - 80 = -75.
        let mut t = task(1, 1.0, 1);
        t.cost_edge = 2.0;
        t.profit_edge = 10.0;
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 3.0, 1.0), link(2, 1, 3.0, 1.0)],
            vec![t],
            -8.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let breakdown = evaluate(&Position::new(vec![0.9]), &s, &costs, 1.0).unwrap();
        assert_eq!(breakdown.comm, 3.0);
        assert_eq!(breakdown.comp, 2.0);
        assert_eq!(breakdown.profit, 10.0);
        assert_eq!(breakdown.objective, -75.0);
    }

    #[test]
    fn zero_profit_objective_is_pure_cost() {
        let mut t = task(1, 1.0, 1);
        t.profit_cloud = 0.0;
        t.cost_cloud = 4.0;
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![t],
            -8.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let breakdown = evaluate(&Position::new(vec![0.0]), &s, &costs, 1.0).unwrap();
        assert_eq!(breakdown.objective, breakdown.comm + breakdown.comp);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![task(1, 1.0, 1)],
            -1.0,
        );
        let costs = all_pairs_optimal_cost(&s.topology);
        let err = decode(&Position::new(vec![0.1, 0.2]), &s, &costs, 1.0).unwrap_err();
        assert_eq!(err, DimensionMismatch { expected: 1, got: 2 });
    }

    #[test]
    fn ratio_cells_round_to_reference_values() {
        let m = MetricsReport::from_aggregates(0.0, 6229.31, 1765.0, 179.3, 95.0);
        assert_eq!(format!("{:.2}", m.profit_cost_ratio), "3.53");
        assert_eq!(format!("{:.2}", m.cost_per_allocation), "9.84");
    }

    #[test]
    fn zero_denominators_report_zero_ratios() {
        let m = MetricsReport::from_aggregates(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(m.profit_cost_ratio, 0.0);
        assert_eq!(m.profit_per_allocation, 0.0);
        assert_eq!(m.cost_per_allocation, 0.0);
        assert_eq!(m.profit_per_utilization, 0.0);
        assert_eq!(m.cost_per_utilization, 0.0);
    }

    #[test]
    fn utilization_is_mean_over_nodes() {
        let s = scenario(
            vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 20.0)],
            vec![link(1, 2, 1.0, 1.0), link(2, 1, 1.0, 1.0)],
            vec![task(1, 5.0, 1)],
            -1.0,
        );
        let outcome = AllocationOutcome {
            assignment: vec![Some(NodeId(1))],
            node_load: vec![5.0, 10.0],
            allocated_count: 1,
        };
        let breakdown = ObjectiveBreakdown {
            comm: 0.0,
            comp: 1.0,
            profit: 1.0,
            objective: 0.0,
        };
        let m = metrics(&outcome, &breakdown, &s);
        // (5/10 + 10/20) / 2 = 0.5
        assert_eq!(m.utilization_percent, 50.0);
    }
}
