//! Tasks, scenarios, the seeded synthetic generator, and the scenario file
//! format.
//!
//! A scenario bundles a topology, the task set, and the profit ratio
//! `lambda` (negative: profit is subtracted from cost in the objective).
//! Scenarios are serialized as a single JSON document with top-level keys
//! `name`, `seed`, `lambda`, `nodes`, `links`, `tasks`; numbers round-trip
//! losslessly, so `load(save(s)) == s` exactly.
//!
//! The generator is a deterministic function of `(config, seed)`. It draws,
//! in a fixed order: node capacities (cloud nodes first), a random
//! Hamiltonian-cycle backbone so every ordered node pair stays reachable,
//! density-sampled directed links, then per-task attributes. Link weights are
//! drawn uniformly from `[0.5*mean, 1.5*mean]` of the class mean for the
//! link's direction (cloud-cloud, edge-edge, cloud-edge, edge-cloud).

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Link, Node, NodeId, Side, Topology};

/// A unit of work. Costs and profits are heterogeneous per side: executing
/// the same task on the cloud or on the edge yields different money amounts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub wl: f64,
    pub cost_cloud: f64,
    pub cost_edge: f64,
    pub profit_cloud: f64,
    pub profit_edge: f64,
    pub initial_node: NodeId,
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Seed the scenario was generated from; 0 for hand-written files.
    pub seed: u64,
    /// Profit ratio, always negative.
    pub lambda: f64,
    #[serde(flatten)]
    pub topology: Topology,
    pub tasks: Vec<Task>,
}

impl Scenario {
    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// Check every scenario invariant: negative lambda, a clean topology,
    /// contiguous task ids, positive workloads, finite nonnegative money
    /// amounts, and initial nodes that exist.
    pub fn validate(&self) -> Result<(), WorkloadError> {
        if !self.lambda.is_finite() || self.lambda >= 0.0 {
            return Err(WorkloadError::Invalid(
                "lambda must be negative".to_string(),
            ));
        }
        let violations = self.topology.validate();
        if !violations.is_empty() {
            return Err(WorkloadError::Invalid(format!(
                "topology is invalid: {}",
                violations[0]
            )));
        }
        let mut ids: Vec<u32> = self.tasks.iter().map(|t| t.id).collect();
        ids.sort_unstable();
        let expected: Vec<u32> = (1..=self.tasks.len() as u32).collect();
        if ids != expected {
            return Err(WorkloadError::Invalid(
                "task ids must be unique and contiguous from 1".to_string(),
            ));
        }
        for task in &self.tasks {
            if !task.wl.is_finite() || task.wl <= 0.0 {
                return Err(WorkloadError::Invalid(format!(
                    "task {} must have positive finite workload",
                    task.id
                )));
            }
            for (label, value) in [
                ("cost_cloud", task.cost_cloud),
                ("cost_edge", task.cost_edge),
                ("profit_cloud", task.profit_cloud),
                ("profit_edge", task.profit_edge),
            ] {
                if !value.is_finite() || value < 0.0 {
                    return Err(WorkloadError::Invalid(format!(
                        "task {}: {label} must be finite and nonnegative",
                        task.id
                    )));
                }
            }
            if self.topology.node(task.initial_node).is_none() {
                return Err(WorkloadError::Invalid(format!(
                    "task {}: initial_node {} does not exist",
                    task.id, task.initial_node
                )));
            }
        }
        Ok(())
    }
}

/// Mean per-unit-length weights of the four communication directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightMeans {
    pub cloud_cloud: f64,
    pub edge_edge: f64,
    pub cloud_edge: f64,
    pub edge_cloud: f64,
}

impl WeightMeans {
    fn mean_for(&self, src: Side, dst: Side) -> f64 {
        match (src, dst) {
            (Side::Cloud, Side::Cloud) => self.cloud_cloud,
            (Side::Edge, Side::Edge) => self.edge_edge,
            (Side::Cloud, Side::Edge) => self.cloud_edge,
            (Side::Edge, Side::Cloud) => self.edge_cloud,
        }
    }
}

/// Inclusive sampling range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

impl ValueRange {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        rng.random_range(self.min..=self.max)
    }

    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && 0.0 <= self.min && self.min <= self.max
    }
}

/// Knobs of the synthetic scenario generator. Defaults mirror the reference
/// experimental regime: 20 cloud + 30 edge nodes, 200 tasks, and direction
/// weight means of 1 (cloud-cloud), 6 (edge-edge), 2 (cloud-edge),
/// 4 (edge-cloud).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_cloud: usize,
    pub n_edge: usize,
    pub n_tasks: usize,
    pub weight_means: WeightMeans,
    pub length_range: ValueRange,
    pub capacity_range: ValueRange,
    pub wl_range: ValueRange,
    pub cost_cloud_range: ValueRange,
    pub cost_edge_range: ValueRange,
    pub profit_cloud_range: ValueRange,
    pub profit_edge_range: ValueRange,
    /// Probability that any ordered node pair gets a direct link, on top of
    /// the reachability backbone.
    pub link_density: f64,
    pub lambda: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_cloud: 20,
            n_edge: 30,
            n_tasks: 200,
            weight_means: WeightMeans {
                cloud_cloud: 1.0,
                edge_edge: 6.0,
                cloud_edge: 2.0,
                edge_cloud: 4.0,
            },
            length_range: ValueRange::new(1.0, 10.0),
            capacity_range: ValueRange::new(7.0, 22.0),
            wl_range: ValueRange::new(1.0, 6.0),
            cost_cloud_range: ValueRange::new(1.0, 15.0),
            cost_edge_range: ValueRange::new(1.0, 15.0),
            profit_cloud_range: ValueRange::new(10.0, 60.0),
            profit_edge_range: ValueRange::new(10.0, 60.0),
            link_density: 0.15,
            lambda: -8.0,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<(), WorkloadError> {
        if self.n_cloud == 0 || self.n_edge == 0 {
            return Err(WorkloadError::InvalidConfig(
                "the model requires at least one cloud node and one edge node".to_string(),
            ));
        }
        if self.n_tasks == 0 {
            return Err(WorkloadError::InvalidConfig(
                "n_tasks must be at least 1".to_string(),
            ));
        }
        for (label, range) in [
            ("length_range", self.length_range),
            ("capacity_range", self.capacity_range),
            ("wl_range", self.wl_range),
            ("cost_cloud_range", self.cost_cloud_range),
            ("cost_edge_range", self.cost_edge_range),
            ("profit_cloud_range", self.profit_cloud_range),
            ("profit_edge_range", self.profit_edge_range),
        ] {
            if !range.is_valid() {
                return Err(WorkloadError::InvalidConfig(format!(
                    "{label} must satisfy 0 <= min <= max"
                )));
            }
        }
        if self.wl_range.min <= 0.0 {
            return Err(WorkloadError::InvalidConfig(
                "wl_range.min must be positive".to_string(),
            ));
        }
        for (label, mean) in [
            ("cloud_cloud", self.weight_means.cloud_cloud),
            ("edge_edge", self.weight_means.edge_edge),
            ("cloud_edge", self.weight_means.cloud_edge),
            ("edge_cloud", self.weight_means.edge_cloud),
        ] {
            if !mean.is_finite() || mean <= 0.0 {
                return Err(WorkloadError::InvalidConfig(format!(
                    "weight mean {label} must be positive"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.link_density) {
            return Err(WorkloadError::InvalidConfig(
                "link_density must be in [0, 1]".to_string(),
            ));
        }
        if !self.lambda.is_finite() || self.lambda >= 0.0 {
            return Err(WorkloadError::InvalidConfig(
                "lambda must be negative".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Generate a scenario deterministically from `(cfg, seed)`.
///
/// Nodes are numbered cloud-first (`1..=n_cloud` cloud, then edge). The same
/// inputs always produce a byte-identical scenario.
pub fn generate_scenario(cfg: &GeneratorConfig, seed: u64) -> Result<Scenario, WorkloadError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.n_cloud + cfg.n_edge;

    let mut nodes = Vec::with_capacity(n);
    for id in 1..=n as u32 {
        let kind = if (id as usize) <= cfg.n_cloud {
            Side::Cloud
        } else {
            Side::Edge
        };
        let cap_max = cfg.capacity_range.sample(&mut rng);
        // Idle baseline load: up to a quarter of the node's capacity.
        let cap_min = rng.random_range(0.0..=cap_max / 4.0);
        nodes.push(Node {
            id: NodeId(id),
            kind,
            cap_min,
            cap_max,
        });
    }

    let side_of = |id: NodeId| nodes[id.index()].kind;
    let mut links = Vec::new();
    let sample_link = |src: NodeId, dst: NodeId, rng: &mut ChaCha8Rng| {
        let length = cfg.length_range.sample(rng);
        let mean = cfg.weight_means.mean_for(side_of(src), side_of(dst));
        let unit_weight = rng.random_range(0.5 * mean..=1.5 * mean);
        Link {
            src,
            dst,
            length,
            unit_weight,
        }
    };

    // Backbone: a directed Hamiltonian cycle over a random permutation keeps
    // every ordered pair reachable regardless of density.
    let mut order: Vec<u32> = (1..=n as u32).collect();
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    for i in 0..order.len() {
        let src = NodeId(order[i]);
        let dst = NodeId(order[(i + 1) % order.len()]);
        let link = sample_link(src, dst, &mut rng);
        links.push(link);
    }

    // Density links, ordered pairs scanned in ascending (src, dst) order.
    for src in 1..=n as u32 {
        for dst in 1..=n as u32 {
            if src == dst {
                continue;
            }
            if rng.random::<f64>() < cfg.link_density {
                let link = sample_link(NodeId(src), NodeId(dst), &mut rng);
                links.push(link);
            }
        }
    }

    let mut tasks = Vec::with_capacity(cfg.n_tasks);
    for id in 1..=cfg.n_tasks as u32 {
        let wl = cfg.wl_range.sample(&mut rng);
        let cost_cloud = cfg.cost_cloud_range.sample(&mut rng);
        let cost_edge = cfg.cost_edge_range.sample(&mut rng);
        let profit_cloud = cfg.profit_cloud_range.sample(&mut rng);
        let profit_edge = cfg.profit_edge_range.sample(&mut rng);
        let initial_node = NodeId(rng.random_range(1..=n as u32));
        tasks.push(Task {
            id,
            wl,
            cost_cloud,
            cost_edge,
            profit_cloud,
            profit_edge,
            initial_node,
        });
    }

    Ok(Scenario {
        name: format!("synthetic-n{}-k{}-seed{}", n, cfg.n_tasks, seed),
        seed,
        lambda: cfg.lambda,
        topology: Topology { nodes, links },
        tasks,
    })
}

/// Serialize a scenario to its JSON document form.
pub fn save_scenario(scenario: &Scenario) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(scenario).expect("scenario serialization is total");
    bytes.push(b'\n');
    bytes
}

/// Parse and validate a scenario document. Schema problems report the path
/// of the offending field; invariant problems report what is violated.
pub fn load_scenario(bytes: &[u8]) -> Result<Scenario, WorkloadError> {
    let mut deserializer = serde_json::Deserializer::from_slice(bytes);
    let scenario: Scenario =
        serde_path_to_error::deserialize(&mut deserializer).map_err(|err| {
            WorkloadError::Schema {
                path: err.path().to_string(),
                message: err.inner().to_string(),
            }
        })?;
    scenario.validate()?;
    Ok(scenario)
}
