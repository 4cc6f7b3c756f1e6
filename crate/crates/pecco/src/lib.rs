//! Profit- and cost-oriented computation offloading in an edge-cloud
//! environment, optimized with moth-flame metaheuristics.
//!
//! The model: a directed graph of cloud and edge nodes with per-link
//! communication costs (`length * unit_weight`), a set of tasks that each
//! carry side-dependent execution costs and profits, and the objective
//! `(comm + comp) + lambda * profit` with negative `lambda`, minimized over
//! capacity-feasible task-to-node assignments.
//!
//! The optimizers: [`mfo`] is the original moth-flame algorithm, [`mfi`] an
//! improved variant (aware initialization, hierarchical flaming, lifetime
//! re-pairing), plus greedy and random-search baselines in [`baselines`].
//! [`bench`] runs them side by side over repeated seeds and renders the
//! comparison tables; [`exhaustive`] brute-forces tiny instances for ground
//! truth.

pub mod baselines;
pub mod bench;
pub mod exhaustive;
pub mod mfi;
pub mod mfo;
pub mod objective;
pub mod report;
pub mod topology;
pub mod workload;

pub use objective::{
    communication_cost, computation_cost, decode, evaluate, metrics, profit, AllocationOutcome,
    EvalContext, MetricsReport, ObjectiveBreakdown, Position,
};
pub use report::{Algorithm, RunReport};
pub use topology::{
    all_pairs_optimal_cost, link_cost, validate_topology, CostMatrix, Link, Node, NodeId, Side,
    Topology, Violation,
};
pub use workload::{
    generate_scenario, load_scenario, save_scenario, GeneratorConfig, Scenario, Task, ValueRange,
    WeightMeans, WorkloadError,
};
