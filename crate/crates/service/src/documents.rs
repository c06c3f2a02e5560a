//! Request and response documents. The CLI and the HTTP API build their
//! JSON output through these functions so both surfaces emit the same shape.

use healthroute_core::graph::{CoordSystem, Edge, Node};
use healthroute_core::planner::{
    compare_variants, plan_route, Algorithm, Model, RouteOutcome, RouteRequest, RouteResult,
};
use healthroute_core::risk::{HeuristicVariant, PatientProfile};
use healthroute_core::scenario::{BBox, GeneratorParams, Scenario, Zone};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Body of `POST /api/route`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteBody {
    pub scenario: String,
    pub origin: String,
    pub dest: String,
    pub profile: PatientProfile,
    #[serde(default)]
    pub depart_t: f64,
    /// Falls back to the server's default alpha.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub variant: Option<HeuristicVariant>,
    #[serde(default)]
    pub algorithm: Option<Algorithm>,
}

impl RouteBody {
    pub fn request(&self, default_alpha: f64) -> RouteRequest {
        let mut request = RouteRequest::new(self.origin.clone(), self.dest.clone(), self.profile);
        request.depart_t = self.depart_t;
        request.alpha = self.alpha.unwrap_or(default_alpha);
        if let Some(variant) = self.variant {
            request.variant = variant;
        }
        if let Some(algorithm) = self.algorithm {
            request.algorithm = algorithm;
        }
        request
    }
}

/// Body of `POST /api/compare`. Each model fixes its own variant and
/// algorithm, so neither is accepted here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBody {
    pub scenario: String,
    pub origin: String,
    pub dest: String,
    pub profile: PatientProfile,
    #[serde(default)]
    pub depart_t: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl CompareBody {
    pub fn request(&self, default_alpha: f64) -> RouteRequest {
        let mut request = RouteRequest::new(self.origin.clone(), self.dest.clone(), self.profile);
        request.depart_t = self.depart_t;
        request.alpha = self.alpha.unwrap_or(default_alpha);
        request
    }
}

/// Parses `bytes` as `T`, reporting the JSON path of any failure.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ServiceError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(&mut de).map_err(ServiceError::from_path_error)?;
    de.end().map_err(|e| {
        ServiceError::invalid(
            "trailing characters after JSON document",
            serde_json::json!({ "path": ".", "line": e.line(), "column": e.column() }),
        )
    })?;
    Ok(value)
}

/// Plans one route; a missing route is an error so callers can map it to
/// their own status (exit 2 or HTTP 422).
pub fn route(request: &RouteRequest, scenario: &Scenario) -> Result<RouteResult, ServiceError> {
    match plan_route(request, scenario)? {
        RouteOutcome::Found(result) => Ok(*result),
        RouteOutcome::NoRoute(no_route) => Err(ServiceError::NoRoute(no_route)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub model: Model,
    pub route: RouteResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareDocument {
    pub origin: String,
    pub dest: String,
    pub alpha: f64,
    pub depart_t: f64,
    pub results: Vec<CompareRow>,
}

/// Runs every model on one request. Reachability does not depend on the
/// cost, so either every model finds a route or none does.
pub fn compare(request: &RouteRequest, scenario: &Scenario) -> Result<CompareDocument, ServiceError> {
    let mut results = Vec::with_capacity(Model::ALL.len());
    for (model, outcome) in compare_variants(request, scenario)? {
        match outcome {
            RouteOutcome::Found(route) => results.push(CompareRow { model, route: *route }),
            RouteOutcome::NoRoute(no_route) => return Err(ServiceError::NoRoute(no_route)),
        }
    }
    Ok(CompareDocument {
        origin: request.origin.clone(),
        dest: request.dest.clone(),
        alpha: request.alpha,
        depart_t: request.depart_t,
        results,
    })
}

/// Entry of `GET /api/scenarios`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub coord_system: CoordSystem,
    pub node_count: usize,
    pub edge_count: usize,
    pub zone_count: usize,
    pub frame_count: usize,
    pub frame_interval_s: f64,
}

impl ScenarioInfo {
    pub fn of(scenario: &Scenario) -> Self {
        Self {
            name: scenario.name().to_owned(),
            seed: scenario.meta().seed,
            coord_system: scenario.graph().coord_system(),
            node_count: scenario.graph().node_count(),
            edge_count: scenario.graph().edge_count(),
            zone_count: scenario.zones().len(),
            frame_count: scenario.timeline().frames.len(),
            frame_interval_s: scenario.timeline().frame_interval_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSummary {
    pub id: String,
    pub bbox: BBox,
    /// Air quality index of the frame in effect at the summary's `at`.
    pub aqi: f64,
}

/// Body of `GET /api/scenarios/{name}`: graph and zones without frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorParams>,
    pub coord_system: CoordSystem,
    pub frame_interval_s: f64,
    pub frame_timestamps_s: Vec<f64>,
    pub at: f64,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub zones: Vec<ZoneSummary>,
}

impl ScenarioSummary {
    pub fn of(scenario: &Scenario, at: f64) -> Result<Self, ServiceError> {
        if !at.is_finite() {
            return Err(ServiceError::invalid(
                format!("t must be finite, got {at}"),
                serde_json::json!({ "path": "t" }),
            ));
        }
        let timeline = scenario.timeline();
        let frame = timeline.frame_at(at).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let zones = scenario
            .zones()
            .iter()
            .map(|Zone { id, bbox }| ZoneSummary {
                id: id.clone(),
                bbox: *bbox,
                aqi: frame.zones.get(id).map_or(0.0, |s| s.weather.aqi),
            })
            .collect();
        Ok(Self {
            name: scenario.name().to_owned(),
            generator: scenario.meta().generator.clone(),
            coord_system: scenario.graph().coord_system(),
            frame_interval_s: timeline.frame_interval_s,
            frame_timestamps_s: timeline.frames.iter().map(|f| f.timestamp_s).collect(),
            at,
            nodes: scenario.graph().nodes().to_vec(),
            edges: scenario.graph().edges().to_vec(),
            zones,
        })
    }
}
