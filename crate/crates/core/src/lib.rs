//! Exact solver suite for the electric vehicle routing problem with time
//! windows and mixed charging options: vehicles recharge either at fixed
//! stations (full recharge, fixed `g*Q` duration) or continuously along
//! road segments equipped with wireless charging, described per arc by a
//! coverage fraction `omega` and a transfer rate `w`.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! instance file ──> Instance ──> RoutingGraph ──> solve / enumerate_oracle
//!                      │              │                    │
//!                      └── scenario ──┘                    └──> Solution
//!                                                                 │
//!                              validate / export LP / bench / SVG ┘
//! ```
//!
//! Solving is deterministic and single-threaded per instance; the bench
//! harness fans independent (instance, coverage) cells out across a rayon
//! pool when the `parallel` feature (default) is enabled.

pub mod bench;
pub mod eval;
pub mod graph;
pub mod instance;
pub mod milp;
pub mod oracle;
pub mod plot;
pub mod solver;
pub mod synth;

mod par;

pub use eval::{
    evaluate_route, objective_of, validate_solution, EvaluatedRoute, Infeasibility,
    ObjectiveValue, ResourceState, RouteError, Solution, ValidationReport,
};
pub use graph::{build_graph, Arc, GraphNode, GraphNodeKind, NodeId, RoutingGraph};
pub use instance::{
    CoverageScenario, Instance, Node, NodeKind, ParseError, ScenarioError, VehicleParams, Weights,
};
pub use solver::{solve, SearchLimits, SolveResult, SolveStats, SolveStatus, SolverConfig};

/// Absolute tolerance used for all resource-feasibility comparisons
/// (time windows, battery, cargo) to absorb floating-point drift.
pub const FEASIBILITY_EPS: f64 = 1e-6;
