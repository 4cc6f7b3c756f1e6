//! Shared test support: independent oracles and random instance builders.
//! Each test binary uses its own subset of these helpers.
#![allow(dead_code)]
//!
//! The oracles here deliberately avoid the library's own code paths: the
//! all-pairs oracle relaxes raw edges instead of running per-source
//! searches, and the pattern oracle re-derives allocations and cost sums
//! from scratch. Both accumulate path costs edge by edge from source to
//! destination, the same summation order the library uses, so agreement is
//! exact where the tests demand it.

use pecco::topology::{link_cost, Link, Node, NodeId, Side, Topology};
use pecco::workload::{Scenario, Task};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// All-pairs optimal costs by iterated edge relaxation (dynamic programming
/// over path length). Every tentative value is the left-to-right
/// accumulation of some path's link costs, so the fixpoint equals the
/// minimum left-accumulated cost over all paths.
pub fn oracle_all_pairs(topo: &Topology) -> Vec<Vec<f64>> {
    let n = topo.nodes.len();
    let edges: Vec<(usize, usize, f64)> = topo
        .links
        .iter()
        .map(|link| (link.src.index(), link.dst.index(), link_cost(link)))
        .collect();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (source, row) in dist.iter_mut().enumerate() {
        row[source] = 0.0;
        for _round in 0..n {
            let mut changed = false;
            for &(u, v, w) in &edges {
                let candidate = row[u] + w;
                if candidate < row[v] {
                    row[v] = candidate;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }
    dist
}

/// Independent evaluation of one side pattern: replay the allocation rules
/// (cheapest reachable node of the chosen side with spare capacity, ties by
/// id, tasks in id order) and sum communication cost, computation cost and
/// profit directly from the oracle distance matrix and task attributes.
pub fn oracle_pattern_evaluate(
    pattern: &[Side],
    scenario: &Scenario,
    dist: &[Vec<f64>],
) -> (f64, f64, f64, f64) {
    let mut nodes: Vec<&Node> = scenario.topology.nodes.iter().collect();
    nodes.sort_by_key(|node| node.id.0);
    let mut tasks: Vec<&Task> = scenario.tasks.iter().collect();
    tasks.sort_by_key(|task| task.id);

    let mut load: Vec<f64> = nodes.iter().map(|node| node.cap_min).collect();
    let (mut comm, mut comp, mut profit) = (0.0, 0.0, 0.0);
    for (slot, task) in tasks.iter().enumerate() {
        let side = pattern[slot];
        let mut candidates: Vec<(f64, usize)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, node)| node.kind == side)
            .map(|(idx, _)| (dist[task.initial_node.index()][idx], idx))
            .filter(|(cost, _)| cost.is_finite())
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for (cost, idx) in candidates {
            if load[idx] + task.wl <= nodes[idx].cap_max {
                load[idx] += task.wl;
                comm += cost;
                match side {
                    Side::Cloud => {
                        comp += task.cost_cloud;
                        profit += task.profit_cloud;
                    }
                    Side::Edge => {
                        comp += task.cost_edge;
                        profit += task.profit_edge;
                    }
                }
                break;
            }
        }
    }
    let objective = (comm + comp) + scenario.lambda * profit;
    (comm, comp, profit, objective)
}

/// A random valid topology with at most 12 nodes and 40 links. Links may
/// be parallel, self-looping, or leave parts of the graph unreachable.
pub fn random_topology(rng: &mut ChaCha8Rng) -> Topology {
    let n_cloud = rng.random_range(1..=6usize);
    let n_edge = rng.random_range(1..=6usize);
    let n = n_cloud + n_edge;
    let nodes = (1..=n as u32)
        .map(|id| {
            let cap_max = rng.random_range(5.0..=30.0);
            Node {
                id: NodeId(id),
                kind: if (id as usize) <= n_cloud {
                    Side::Cloud
                } else {
                    Side::Edge
                },
                cap_min: rng.random_range(0.0..=cap_max / 2.0),
                cap_max,
            }
        })
        .collect();
    let n_links = rng.random_range(0..=40usize);
    let links = (0..n_links)
        .map(|_| Link {
            src: NodeId(rng.random_range(1..=n as u32)),
            dst: NodeId(rng.random_range(1..=n as u32)),
            length: rng.random_range(0.0..=10.0),
            unit_weight: rng.random_range(0.0..=5.0),
        })
        .collect();
    Topology { nodes, links }
}

pub fn approx_eq_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1.0_f64.max(a.abs()).max(b.abs())
}
