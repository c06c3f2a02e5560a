//! Route requests over a scenario.
//!
//! The objective is the sum over path edges of
//! `length_m * (1 + alpha * h_env)`, with the environment frozen at the
//! departure time. Risk is folded into the edge cost rather than the A*
//! guide, and A* is guided by the straight-line distance to the
//! destination. Because every edge costs at least its length, and every
//! length is at least the straight-line distance between its endpoints,
//! that guide never overestimates and both algorithms return the same
//! optimum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{lookup_env, EnvError, EnvTimeline};
use crate::graph::{astar, dijkstra, Edge, EdgeIdx, NodeIdx, SearchError, SearchOutcome, LENGTH_TOLERANCE};
use crate::risk::{
    derive_weights_with, factor_risk, score_sample, Factor, PatientProfile, RiskBreakdown, SensitivityWeights,
    WeightConfig, WeightsError,
};
use crate::scenario::Scenario;

pub use crate::risk::HeuristicVariant;

/// Default trade-off between distance and environmental risk.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Fraction of free-flow speed lost at full traffic saturation.
pub const TRAFFIC_SLOWDOWN: f64 = 0.6;

/// Scale applied to the straight-line guide so it stays below any edge
/// length admitted by graph validation.
const GUIDE_SCALE: f64 = 1.0 - LENGTH_TOLERANCE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Dijkstra,
    Astar,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dijkstra => "dijkstra",
            Algorithm::Astar => "astar",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dijkstra" => Ok(Algorithm::Dijkstra),
            "astar" => Ok(Algorithm::Astar),
            _ => Err(format!("unknown algorithm {s:?} (expected dijkstra or astar)")),
        }
    }
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_variant() -> HeuristicVariant {
    HeuristicVariant::Combined
}

fn default_algorithm() -> Algorithm {
    Algorithm::Astar
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteRequest {
    pub origin: String,
    pub dest: String,
    pub profile: PatientProfile,
    #[serde(default)]
    pub depart_t: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_variant")]
    pub variant: HeuristicVariant,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
}

impl RouteRequest {
    pub fn new(origin: impl Into<String>, dest: impl Into<String>, profile: PatientProfile) -> Self {
        Self {
            origin: origin.into(),
            dest: dest.into(),
            profile,
            depart_t: 0.0,
            alpha: DEFAULT_ALPHA,
            variant: HeuristicVariant::Combined,
            algorithm: Algorithm::Astar,
        }
    }
}

/// Knobs shared by every request.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub weights: WeightConfig,
    /// When set, alpha is multiplied by this factor for patients with a
    /// family history of asthma. Off by default.
    pub family_history_alpha: Option<f64>,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("depart_t must be finite, got {0}")]
    InvalidDepartTime(f64),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Search(SearchError),
}

impl From<SearchError> for PlanError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::UnknownNode(id) => PlanError::UnknownNode(id),
            other => PlanError::Search(other),
        }
    }
}

/// Cost of one edge given its risk score.
pub fn cost_from_risk(length_m: f64, alpha: f64, h_env_total: f64) -> f64 {
    length_m * (1.0 + alpha * h_env_total)
}

/// `length_m * (1 + alpha * h_env)` for `edge` at `depart_t`.
pub fn edge_cost(
    edge: &Edge,
    depart_t: f64,
    weights: &SensitivityWeights,
    timeline: &EnvTimeline,
    alpha: f64,
    variant: HeuristicVariant,
) -> Result<f64, EnvError> {
    let risk = crate::risk::h_env(edge, depart_t, weights, timeline, variant)?;
    Ok(cost_from_risk(edge.length_m, alpha, risk.total))
}

/// Per-edge annotation of a planned route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub edge: usize,
    pub from: String,
    pub to: String,
    pub zone: String,
    pub length_m: f64,
    /// Risk under the requested variant; this is what the cost uses.
    pub risk: RiskBreakdown,
    /// Risk under all factors, independent of the variant.
    pub exposure: f64,
    pub cost: f64,
    pub travel_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteResult {
    pub origin: String,
    pub dest: String,
    pub algorithm: Algorithm,
    pub variant: HeuristicVariant,
    /// Alpha actually applied, after any family-history multiplier.
    pub alpha: f64,
    pub depart_t: f64,
    pub weights: SensitivityWeights,
    pub path: Vec<String>,
    pub total_distance_m: f64,
    pub total_risk_cost: f64,
    pub total_cost: f64,
    /// Sum over edges of `length_m * exposure`; comparable across variants.
    pub exposure_cost: f64,
    pub travel_time_s: f64,
    pub edges_count: usize,
    pub nodes_expanded: usize,
    pub per_edge: Vec<EdgeReport>,
}

impl RouteResult {
    /// Exposure per meter travelled; zero for an empty route.
    pub fn mean_exposure(&self) -> f64 {
        if self.total_distance_m > 0.0 {
            self.exposure_cost / self.total_distance_m
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoRoute {
    pub origin: String,
    pub dest: String,
    pub nodes_expanded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RouteOutcome {
    Found(Box<RouteResult>),
    NoRoute(NoRoute),
}

impl RouteOutcome {
    pub fn route(&self) -> Option<&RouteResult> {
        match self {
            RouteOutcome::Found(r) => Some(r),
            RouteOutcome::NoRoute(_) => None,
        }
    }

    pub fn into_route(self) -> Option<RouteResult> {
        match self {
            RouteOutcome::Found(r) => Some(*r),
            RouteOutcome::NoRoute(_) => None,
        }
    }
}

/// Plans a route with the default [`PlannerConfig`].
pub fn plan_route(request: &RouteRequest, scenario: &Scenario) -> Result<RouteOutcome, PlanError> {
    plan_route_with(request, scenario, &PlannerConfig::default())
}

pub fn plan_route_with(
    request: &RouteRequest,
    scenario: &Scenario,
    config: &PlannerConfig,
) -> Result<RouteOutcome, PlanError> {
    let weights = derive_weights_with(&request.profile, &config.weights)?;
    let alpha = match config.family_history_alpha {
        Some(m) if request.profile.family_history => request.alpha * m,
        _ => request.alpha,
    };
    plan_with_weights(request, alpha, &weights, scenario)
}

/// Plans a route with explicit sensitivity weights and alpha, bypassing
/// profile derivation. `request.profile` and `request.alpha` are ignored.
pub fn plan_with_weights(
    request: &RouteRequest,
    alpha: f64,
    weights: &SensitivityWeights,
    scenario: &Scenario,
) -> Result<RouteOutcome, PlanError> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(PlanError::InvalidAlpha(alpha));
    }
    if !request.depart_t.is_finite() {
        return Err(PlanError::InvalidDepartTime(request.depart_t));
    }
    let graph = scenario.graph();
    let dest = graph.node_index(&request.dest).map_err(|_| PlanError::UnknownNode(request.dest.clone()))?;
    graph.node_index(&request.origin).map_err(|_| PlanError::UnknownNode(request.origin.clone()))?;

    // Environment is frozen at departure, so risk is per zone, not per edge.
    let zone_risk = graph
        .zone_ids()
        .iter()
        .map(|zone| {
            let sample = lookup_env(scenario.timeline(), zone, request.depart_t)?;
            let (w, t) = (&sample.weather, &sample.traffic);
            Ok(ZoneRisk {
                risk: score_sample(weights, w, t, request.variant),
                exposure: score_sample(weights, w, t, HeuristicVariant::Combined).total,
                traffic: factor_risk(Factor::Traffic, w, t),
            })
        })
        .collect::<Result<Vec<_>, EnvError>>()?;

    let costs: Vec<f64> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| cost_from_risk(e.length_m, alpha, zone_risk[graph.edge_zone_slot(EdgeIdx(i))].risk.total))
        .collect();
    let cost = |e: EdgeIdx, _: &Edge| costs[e.0];

    let outcome: SearchOutcome = match request.algorithm {
        Algorithm::Dijkstra => dijkstra(graph, cost, &request.origin, &request.dest)?,
        Algorithm::Astar => {
            let guide = |n: NodeIdx| graph.straight_line_m(n, dest) * GUIDE_SCALE;
            astar(graph, cost, guide, &request.origin, &request.dest)?
        }
    };

    let Some(path) = outcome.path else {
        return Ok(RouteOutcome::NoRoute(NoRoute {
            origin: request.origin.clone(),
            dest: request.dest.clone(),
            nodes_expanded: outcome.nodes_expanded,
        }));
    };

    let mut per_edge = Vec::with_capacity(path.edges.len());
    let (mut distance, mut risk_cost, mut exposure_cost, mut travel) = (0.0, 0.0, 0.0, 0.0);
    for &e in &path.edges {
        let edge = graph.edge(e);
        let z = &zone_risk[graph.edge_zone_slot(e)];
        let time = edge.length_m / (edge.base_speed_mps * (1.0 - TRAFFIC_SLOWDOWN * z.traffic));
        distance += edge.length_m;
        risk_cost += edge.length_m * alpha * z.risk.total;
        exposure_cost += edge.length_m * z.exposure;
        travel += time;
        per_edge.push(EdgeReport {
            edge: e.0,
            from: edge.from.clone(),
            to: edge.to.clone(),
            zone: edge.zone.clone(),
            length_m: edge.length_m,
            risk: z.risk,
            exposure: z.exposure,
            cost: costs[e.0],
            travel_time_s: time,
        });
    }

    Ok(RouteOutcome::Found(Box::new(RouteResult {
        origin: request.origin.clone(),
        dest: request.dest.clone(),
        algorithm: request.algorithm,
        variant: request.variant,
        alpha,
        depart_t: request.depart_t,
        weights: *weights,
        path: path.nodes.iter().map(|&n| graph.node(n).id.clone()).collect(),
        total_distance_m: distance,
        total_risk_cost: risk_cost,
        total_cost: path.cost,
        exposure_cost,
        travel_time_s: travel,
        edges_count: path.edges.len(),
        nodes_expanded: outcome.nodes_expanded,
        per_edge,
    })))
}

struct ZoneRisk {
    risk: RiskBreakdown,
    exposure: f64,
    traffic: f64,
}

/// The six model rows of a comparison, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "A* Standard")]
    AstarStandard,
    #[serde(rename = "Dijkstra")]
    Dijkstra,
    #[serde(rename = "Heuristic A* (Distance)")]
    HeuristicDistance,
    #[serde(rename = "Heuristic A* (Traffic)")]
    HeuristicTraffic,
    #[serde(rename = "Heuristic A* (Weather)")]
    HeuristicWeather,
    #[serde(rename = "Heuristic A* (Traffic - Weather - Distance)")]
    HeuristicCombined,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::AstarStandard,
        Model::Dijkstra,
        Model::HeuristicDistance,
        Model::HeuristicTraffic,
        Model::HeuristicWeather,
        Model::HeuristicCombined,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Model::AstarStandard => "A* Standard",
            Model::Dijkstra => "Dijkstra",
            Model::HeuristicDistance => "Heuristic A* (Distance)",
            Model::HeuristicTraffic => "Heuristic A* (Traffic)",
            Model::HeuristicWeather => "Heuristic A* (Weather)",
            Model::HeuristicCombined => "Heuristic A* (Traffic - Weather - Distance)",
        }
    }

    pub fn algorithm(self) -> Algorithm {
        match self {
            Model::Dijkstra => Algorithm::Dijkstra,
            _ => Algorithm::Astar,
        }
    }

    pub fn variant(self) -> HeuristicVariant {
        match self {
            Model::AstarStandard | Model::Dijkstra | Model::HeuristicDistance => HeuristicVariant::DistanceOnly,
            Model::HeuristicTraffic => HeuristicVariant::TrafficOnly,
            Model::HeuristicWeather => HeuristicVariant::WeatherOnly,
            Model::HeuristicCombined => HeuristicVariant::Combined,
        }
    }

    /// `request` rewritten to this model's algorithm and variant.
    pub fn apply(self, request: &RouteRequest) -> RouteRequest {
        RouteRequest { algorithm: self.algorithm(), variant: self.variant(), ..request.clone() }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL.into_iter().find(|m| m.label() == s).ok_or_else(|| format!("unknown model {s:?}"))
    }
}

/// One row per [`Model`], in [`Model::ALL`] order. The variant and algorithm
/// of `request` are overridden per row.
pub fn compare_variants(request: &RouteRequest, scenario: &Scenario) -> Result<Vec<(Model, RouteOutcome)>, PlanError> {
    compare_variants_with(request, scenario, &PlannerConfig::default())
}

pub fn compare_variants_with(
    request: &RouteRequest,
    scenario: &Scenario,
    config: &PlannerConfig,
) -> Result<Vec<(Model, RouteOutcome)>, PlanError> {
    Model::ALL.into_iter().map(|m| plan_route_with(&m.apply(request), scenario, config).map(|o| (m, o))).collect()
}
