//! Exposure-aware route planning.
//!
//! Routes minimize `sum(length * (1 + alpha * risk))` over a road graph,
//! where `risk` is a patient-weighted score of the conditions in each edge's
//! zone at departure time.
//!
//! - [`graph`]: road graph, Dijkstra and A*.
//! - [`env`]: zone-indexed environmental timelines.
//! - [`risk`]: patient profiles and risk scoring.
//! - [`planner`]: route planning and model comparisons.
//! - [`scenario`]: scenario documents and the synthetic grid generator.
//! - [`bench`]: benchmark matrices and reports.

pub mod bench;
pub mod env;
pub mod fixtures;
pub mod graph;
pub mod planner;
pub mod risk;
pub mod scenario;

pub use graph::{Edge, Node, RoadGraph};
pub use planner::{compare_variants, plan_route, Algorithm, Model, RouteOutcome, RouteRequest, RouteResult};
pub use risk::{derive_weights, HeuristicVariant, PatientProfile, SensitivityWeights};
pub use scenario::{generate_grid, load_scenario, save_scenario, GeneratorParams, Scenario};
