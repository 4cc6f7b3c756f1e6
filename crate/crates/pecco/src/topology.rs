//! Edge-cloud graph with heterogeneous directed communication costs.
//!
//! The environment is a directed graph of cloud and edge nodes. Every link
//! carries its own length and per-unit-length weight, so communication costs
//! may be asymmetric and distance-dependent, and node pairs on the same side
//! may still differ. The per-link cost is `length * unit_weight`; the cost of
//! moving a task from node `i` to node `j` is the minimum over all directed
//! paths of the accumulated link costs, precomputed once per scenario into a
//! [`CostMatrix`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// 1-based node identifier. Valid topologies number nodes contiguously
/// `1..=N`, cloud nodes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based position of this node in id order.
    pub fn index(self) -> usize {
        debug_assert!(self.0 >= 1, "node ids are 1-based");
        (self.0 - 1) as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the environment a node sits on, and equally which side a
/// task is executed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Cloud,
    Edge,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Cloud => "cloud",
            Side::Edge => "edge",
        }
    }
}

/// A computing node. `cap_min` is the baseline workload already present when
/// the node is idle; `cap_max` is the most workload it can hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: Side,
    pub cap_min: f64,
    pub cap_max: f64,
}

/// A directed communication link. Links need not come in symmetric pairs and
/// parallel links between the same endpoints are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    pub length: f64,
    pub unit_weight: f64,
}

/// The full edge-cloud graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
}

impl Topology {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// All invariant violations in this topology. An empty report means the
    /// topology is usable by every other operation.
    pub fn validate(&self) -> Vec<Violation> {
        validate_topology(self)
    }
}

/// A single invariant violation. Violations are data, not failures: callers
/// decide whether to reject the topology.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateNodeId { id: NodeId },
    NonContiguousIds { expected: u32, found: Vec<u32> },
    CapacityInverted { id: NodeId },
    NegativeCapacity { id: NodeId },
    NonFiniteCapacity { id: NodeId },
    MissingSide { side: Side },
    DanglingEndpoint { src: NodeId, dst: NodeId, missing: NodeId },
    NegativeLength { src: NodeId, dst: NodeId },
    NegativeWeight { src: NodeId, dst: NodeId },
    NonFiniteLink { src: NodeId, dst: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNodeId { id } => write!(f, "duplicate node id {id}"),
            Violation::NonContiguousIds { expected, found } => write!(
                f,
                "node ids are not contiguous 1..={expected}: found {found:?}"
            ),
            Violation::CapacityInverted { id } => {
                write!(f, "cap_min > cap_max on node {id}")
            }
            Violation::NegativeCapacity { id } => {
                write!(f, "negative capacity on node {id}")
            }
            Violation::NonFiniteCapacity { id } => {
                write!(f, "non-finite capacity on node {id}")
            }
            Violation::MissingSide { side } => {
                write!(f, "topology has no {} node", side.as_str())
            }
            Violation::DanglingEndpoint { src, dst, missing } => write!(
                f,
                "dangling endpoint: link {src}->{dst} references missing node {missing}"
            ),
            Violation::NegativeLength { src, dst } => {
                write!(f, "negative length on link {src}->{dst}")
            }
            Violation::NegativeWeight { src, dst } => {
                write!(f, "negative unit_weight on link {src}->{dst}")
            }
            Violation::NonFiniteLink { src, dst } => {
                write!(f, "non-finite length or weight on link {src}->{dst}")
            }
        }
    }
}

/// Collect every invariant violation: duplicate or non-contiguous ids,
/// inverted or negative capacities, a missing side, dangling link endpoints,
/// negative lengths or weights.
pub fn validate_topology(topo: &Topology) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut ids: Vec<u32> = Vec::with_capacity(topo.nodes.len());
    for node in &topo.nodes {
        if ids.contains(&node.id.0) {
            violations.push(Violation::DuplicateNodeId { id: node.id });
        }
        ids.push(node.id.0);

        if !node.cap_min.is_finite() || !node.cap_max.is_finite() {
            violations.push(Violation::NonFiniteCapacity { id: node.id });
        } else {
            if node.cap_min < 0.0 || node.cap_max < 0.0 {
                violations.push(Violation::NegativeCapacity { id: node.id });
            }
            if node.cap_min > node.cap_max {
                violations.push(Violation::CapacityInverted { id: node.id });
            }
        }
    }

    let n = topo.nodes.len() as u32;
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted != (1..=n).collect::<Vec<_>>() {
        violations.push(Violation::NonContiguousIds {
            expected: n,
            found: sorted,
        });
    }

    for side in [Side::Cloud, Side::Edge] {
        if !topo.nodes.iter().any(|node| node.kind == side) {
            violations.push(Violation::MissingSide { side });
        }
    }

    for link in &topo.links {
        for endpoint in [link.src, link.dst] {
            if topo.node(endpoint).is_none() {
                violations.push(Violation::DanglingEndpoint {
                    src: link.src,
                    dst: link.dst,
                    missing: endpoint,
                });
            }
        }
        if !link.length.is_finite() || !link.unit_weight.is_finite() {
            violations.push(Violation::NonFiniteLink {
                src: link.src,
                dst: link.dst,
            });
        } else {
            if link.length < 0.0 {
                violations.push(Violation::NegativeLength {
                    src: link.src,
                    dst: link.dst,
                });
            }
            if link.unit_weight < 0.0 {
                violations.push(Violation::NegativeWeight {
                    src: link.src,
                    dst: link.dst,
                });
            }
        }
    }

    violations
}

/// Cost of traversing one link: its length times its per-unit weight.
pub fn link_cost(link: &Link) -> f64 {
    link.length * link.unit_weight
}

/// Precomputed minimum communication cost between every ordered node pair.
///
/// Entry `(i, j)` is the cheapest directed path cost from `i` to `j`,
/// accumulated link by link from source to destination; `+inf` when `j` is
/// unreachable from `i`; exactly `0` on the diagonal. Immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    comm: Vec<f64>,
}

impl CostMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, from: NodeId, to: NodeId) -> f64 {
        self.comm[from.index() * self.n + to.index()]
    }
}

/// Compute the full optimal-communication-cost matrix with one
/// single-source shortest-path run per node (nonnegative link costs).
///
/// Rows are independent, so they are computed in parallel; each row is
/// produced sequentially and the result does not depend on scheduling.
pub fn all_pairs_optimal_cost(topo: &Topology) -> CostMatrix {
    let n = topo.nodes.len();
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for link in &topo.links {
        // Self-loops never shorten a path.
        if link.src == link.dst {
            continue;
        }
        adjacency[link.src.index()].push((link.dst.index(), link_cost(link)));
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|source| single_source_costs(&adjacency, source, n))
        .collect();

    let mut comm = Vec::with_capacity(n * n);
    for row in rows {
        comm.extend(row);
    }
    CostMatrix { n, comm }
}

#[derive(PartialEq)]
struct QueueEntry {
    cost: f64,
    node: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the cheapest entry first.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn single_source_costs(adjacency: &[Vec<(usize, f64)>], source: usize, n: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(QueueEntry {
        cost: 0.0,
        node: source,
    });

    while let Some(QueueEntry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(next, link_cost) in &adjacency[node] {
            let candidate = cost + link_cost;
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(QueueEntry {
                    cost: candidate,
                    node: next,
                });
            }
        }
    }

    dist
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn valid_two_node_topology_has_empty_report() {
        let topo = Topology {
            nodes: vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            links: vec![link(1, 2, 1.0, 2.0)],
        };
        assert!(topo.validate().is_empty());
    }

    #[test]
    fn dangling_link_endpoint_is_reported() {
        let topo = Topology {
            nodes: vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            links: vec![link(1, 3, 1.0, 1.0)],
        };
        let report = topo.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].to_string().contains("dangling endpoint"));
    }

    #[test]
    fn inverted_capacity_is_reported() {
        let topo = Topology {
            nodes: vec![node(1, Side::Cloud, 5.0, 3.0), node(2, Side::Edge, 0.0, 10.0)],
            links: vec![],
        };
        let report = topo.validate();
        assert_eq!(report.len(), 1);
        assert!(report[0].to_string().contains("cap_min > cap_max"));
    }

    #[test]
    fn link_cost_is_length_times_weight() {
        assert_eq!(link_cost(&link(1, 2, 2.0, 2.0)), 4.0);
        assert_eq!(link_cost(&link(1, 2, 0.0, 7.5)), 0.0);
        assert_eq!(link_cost(&link(2, 3, 3.5, 6.0)), 21.0);
    }

    #[test]
    fn single_link_matrix_has_infinite_reverse_cost() {
        let topo = Topology {
            nodes: vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            links: vec![link(1, 2, 2.0, 2.0)],
        };
        let costs = all_pairs_optimal_cost(&topo);
        assert_eq!(costs.get(NodeId(1), NodeId(2)), 4.0);
        assert_eq!(costs.get(NodeId(2), NodeId(1)), f64::INFINITY);
    }

    #[test]
    fn triangle_prefers_two_hop_path() {
        let topo = Topology {
            nodes: vec![
                node(1, Side::Cloud, 0.0, 10.0),
                node(2, Side::Edge, 0.0, 10.0),
                node(3, Side::Edge, 0.0, 10.0),
            ],
            links: vec![
                link(1, 2, 5.0, 1.0),
                link(2, 3, 5.0, 1.0),
                link(1, 3, 12.0, 1.0),
            ],
        };
        let costs = all_pairs_optimal_cost(&topo);
        assert_eq!(costs.get(NodeId(1), NodeId(3)), 10.0);
    }

    #[test]
    fn diagonal_is_zero() {
        let topo = Topology {
            nodes: vec![
                node(1, Side::Cloud, 0.0, 10.0),
                node(2, Side::Edge, 0.0, 10.0),
                node(3, Side::Edge, 1.0, 4.0),
            ],
            links: vec![link(1, 2, 5.0, 1.0), link(3, 1, 2.0, 3.0)],
        };
        let costs = all_pairs_optimal_cost(&topo);
        for id in 1..=3 {
            assert_eq!(costs.get(NodeId(id), NodeId(id)), 0.0);
        }
    }

    #[test]
    fn parallel_links_take_the_cheaper_and_self_loops_are_ignored() {
        let topo = Topology {
            nodes: vec![node(1, Side::Cloud, 0.0, 10.0), node(2, Side::Edge, 0.0, 10.0)],
            links: vec![
                link(1, 2, 9.0, 1.0),
                link(1, 2, 3.0, 1.0),
                link(1, 1, 100.0, 100.0),
            ],
        };
        let costs = all_pairs_optimal_cost(&topo);
        assert_eq!(costs.get(NodeId(1), NodeId(2)), 3.0);
        assert_eq!(costs.get(NodeId(1), NodeId(1)), 0.0);
    }
}
