//! Scenarios: a road graph, its zone partition and an environmental timeline.
//!
//! Scenarios are exchanged as a single JSON document with the top-level keys
//! `meta`, `nodes`, `edges`, `zones` and `frames`. Floating-point values are
//! written with at most nine significant digits, and [`save_scenario`] is a
//! fixed point of `load` followed by `save`.
//!
//! [`generate_grid`] builds synthetic grid cities deterministically from a
//! 64-bit seed using xoshiro256** seeded through SplitMix64.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::env::{timeline_violations, EnvFrame, EnvTimeline, EnvViolation, TrafficSample, WeatherSample, ZoneSample};
use crate::graph::{CoordSystem, Edge, GraphError, GraphViolation, Node, RoadGraph};

/// Probability that a grid cell receives a diagonal shortcut.
pub const DIAGONAL_DENSITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub id: String,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Baseline,
    /// High pollen (level 4 or 5) in every zone and frame.
    SpringPollen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub rows: usize,
    pub cols: usize,
    pub cell_m: f64,
    /// Zones span `zone_cell` x `zone_cell` grid cells.
    pub zone_cell: usize,
    pub frames: usize,
    pub frame_interval_s: f64,
    pub hotspot_count: usize,
    pub seed: u64,
    #[serde(default)]
    pub preset: Preset,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            rows: 10,
            cols: 10,
            cell_m: 100.0,
            zone_cell: 3,
            frames: 4,
            frame_interval_s: 900.0,
            hotspot_count: 2,
            seed: 1,
            preset: Preset::Baseline,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorParams>,
}

impl ScenarioMeta {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), seed: None, generator: None }
    }
}

/// One reason a scenario fails validation.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioViolation {
    Graph(GraphViolation),
    Timeline(EnvViolation),
    UnknownEdgeZone { edge: usize, zone: String },
    DuplicateZone { id: String },
    InvalidBBox { id: String },
}

impl fmt::Display for ScenarioViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Graph(v) => v.fmt(f),
            Self::Timeline(v) => v.fmt(f),
            Self::UnknownEdgeZone { edge, zone } => write!(f, "edge {edge}: zone {zone:?} is not declared in zones"),
            Self::DuplicateZone { id } => write!(f, "zone {id:?}: duplicate id"),
            Self::InvalidBBox { id } => write!(f, "zone {id:?}: bbox must be finite with min <= max"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed scenario document at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario ({} violations): {}", .0.len(), join(.0))]
    Validation(Vec<ScenarioViolation>),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn join(v: &[ScenarioViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Validated, immutable scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    meta: ScenarioMeta,
    graph: RoadGraph,
    zones: Vec<Zone>,
    timeline: EnvTimeline,
}

impl Scenario {
    /// Validates all parts together and reports every violation found.
    pub fn new(
        meta: ScenarioMeta,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        zones: Vec<Zone>,
        timeline: EnvTimeline,
    ) -> Result<Self, ScenarioError> {
        let mut violations = Vec::new();

        let mut declared = HashSet::new();
        for z in &zones {
            if !declared.insert(z.id.as_str()) {
                violations.push(ScenarioViolation::DuplicateZone { id: z.id.clone() });
            }
            let b = &z.bbox;
            let finite = [b.min_x, b.min_y, b.max_x, b.max_y].iter().all(|v| v.is_finite());
            if !finite || b.min_x > b.max_x || b.min_y > b.max_y {
                violations.push(ScenarioViolation::InvalidBBox { id: z.id.clone() });
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if !e.zone.is_empty() && !declared.contains(e.zone.as_str()) {
                violations.push(ScenarioViolation::UnknownEdgeZone { edge: i, zone: e.zone.clone() });
            }
        }

        let edge_zones: BTreeSet<&str> = edges.iter().map(|e| e.zone.as_str()).collect();
        violations.extend(
            timeline_violations(&timeline, edge_zones.iter().copied()).into_iter().map(ScenarioViolation::Timeline),
        );

        let graph = match RoadGraph::new(nodes, edges) {
            Ok(g) => Some(g),
            Err(GraphError::Invalid(v)) => {
                violations.splice(0..0, v.into_iter().map(ScenarioViolation::Graph));
                None
            }
            Err(e @ GraphError::UnknownNode(_)) => unreachable!("graph construction does not look up nodes: {e}"),
        };

        match graph {
            Some(graph) if violations.is_empty() => Ok(Self { meta, graph, zones, timeline }),
            _ => Err(ScenarioError::Validation(violations)),
        }
    }

    pub fn meta(&self) -> &ScenarioMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn graph(&self) -> &RoadGraph {
        &self.graph
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn timeline(&self) -> &EnvTimeline {
        &self.timeline
    }

    /// Copy with every zone sample rewritten by `f`; used for what-if runs.
    pub fn map_samples(&self, mut f: impl FnMut(&str, &mut ZoneSample)) -> Result<Self, ScenarioError> {
        let mut timeline = self.timeline.clone();
        for frame in &mut timeline.frames {
            for (zone, sample) in frame.zones.iter_mut() {
                f(zone, sample);
            }
        }
        Self::new(
            self.meta.clone(),
            self.graph.nodes().to_vec(),
            self.graph.edges().to_vec(),
            self.zones.clone(),
            timeline,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct DocumentMeta {
    #[serde(flatten)]
    meta: ScenarioMeta,
    frame_interval_s: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDocument {
    meta: DocumentMeta,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    zones: Vec<Zone>,
    frames: Vec<EnvFrame>,
}

/// Parses and validates a scenario document.
pub fn load_scenario(document: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDocument = serde_json::from_str(document).map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let timeline = EnvTimeline { frame_interval_s: doc.meta.frame_interval_s, frames: doc.frames };
    Scenario::new(doc.meta.meta, doc.nodes, doc.edges, doc.zones, timeline)
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    load_scenario(&text)
}

/// Serializes a scenario as a pretty-printed JSON document ending in a newline.
pub fn save_scenario(scenario: &Scenario) -> String {
    let doc = ScenarioDocument {
        meta: DocumentMeta { meta: scenario.meta.clone(), frame_interval_s: scenario.timeline.frame_interval_s },
        nodes: scenario.graph.nodes().to_vec(),
        edges: scenario.graph.edges().to_vec(),
        zones: scenario.zones.clone(),
        frames: scenario.timeline.frames.clone(),
    };
    let mut value = serde_json::to_value(&doc).expect("scenario serializes to JSON");
    round_floats(&mut value);
    let mut out = serde_json::to_string_pretty(&value).expect("JSON value prints");
    out.push('\n');
    out
}

/// Rounds `x` to nine significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig9(n.as_f64().expect("f64 number"));
            *n = serde_json::Number::from_f64(r).expect("finite float");
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Seeded stream of uniform draws on top of xoshiro256**.
///
/// Draws are defined on raw 64-bit outputs so other implementations can
/// reproduce them: `unit()` is `(next >> 11) * 2^-53`, `below(n)` is
/// `next % n`.
pub struct ScenarioRng(Xoshiro256StarStar);

impl ScenarioRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn node_id(r: usize, c: usize) -> String {
    format!("r{r}c{c}")
}

const ARTERIAL_SPEED_MPS: f64 = 16.7;
const LOCAL_SPEED_MPS: f64 = 11.1;

fn check_params(p: &GeneratorParams) -> Result<(), ScenarioError> {
    let bad = |m: &str| Err(ScenarioError::InvalidParams(m.to_owned()));
    if p.rows < 2 || p.cols < 2 {
        return bad("rows and cols must be >= 2");
    }
    if !(p.cell_m.is_finite() && p.cell_m > 0.0) {
        return bad("cell_m must be finite and > 0");
    }
    if p.zone_cell == 0 {
        return bad("zone_cell must be >= 1");
    }
    if p.frames == 0 {
        return bad("frames must be >= 1");
    }
    if !(p.frame_interval_s.is_finite() && p.frame_interval_s > 0.0) {
        return bad("frame_interval_s must be finite and > 0");
    }
    Ok(())
}

/// Builds a synthetic grid city.
///
/// Nodes sit on a `rows` x `cols` lattice spaced `cell_m` apart, connected in
/// both directions to their four neighbours. Each cell independently gets a
/// two-way diagonal shortcut with probability [`DIAGONAL_DENSITY`]. Zones
/// are `zone_cell` x `zone_cell` blocks of cells; an edge belongs to the
/// zone containing its midpoint. Hotspot zones carry AQI in `[200, 300]` and
/// traffic at 1.5 to 2.5 times capacity in every frame, all other zones stay
/// below AQI 120 and 90% of capacity.
pub fn generate_grid(params: &GeneratorParams) -> Result<Scenario, ScenarioError> {
    check_params(params)?;
    let GeneratorParams { rows, cols, cell_m, zone_cell: k, .. } = *params;
    let mut rng = ScenarioRng::new(params.seed);

    let nodes: Vec<Node> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| Node {
            id: node_id(r, c),
            x: c as f64 * cell_m,
            y: r as f64 * cell_m,
            coord_system: CoordSystem::Planar,
        })
        .collect();

    let zone_rows = (rows - 1).div_ceil(k);
    let zone_cols = (cols - 1).div_ceil(k);
    let zone_id = |zr: usize, zc: usize| format!("z{zr}_{zc}");
    // Doubled lattice coordinates keep midpoints integral.
    let zone_of = |r2: usize, c2: usize| zone_id((r2 / (2 * k)).min(zone_rows - 1), (c2 / (2 * k)).min(zone_cols - 1));
    let speed = |r: usize, c: usize, horizontal: bool| {
        let arterial = if horizontal { r.is_multiple_of(5) } else { c.is_multiple_of(5) };
        if arterial {
            ARTERIAL_SPEED_MPS
        } else {
            LOCAL_SPEED_MPS
        }
    };

    let mut edges = Vec::new();
    let mut both_ways = |a: (usize, usize), b: (usize, usize), length_m: f64, speed: f64| {
        let zone = zone_of(a.0 + b.0, a.1 + b.1);
        for (from, to) in [(a, b), (b, a)] {
            edges.push(Edge {
                from: node_id(from.0, from.1),
                to: node_id(to.0, to.1),
                length_m,
                base_speed_mps: speed,
                zone: zone.clone(),
            });
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                both_ways((r, c), (r, c + 1), cell_m, speed(r, c, true));
            }
            if r + 1 < rows {
                both_ways((r, c), (r + 1, c), cell_m, speed(r, c, false));
            }
        }
    }
    let diagonal = round_sig9(cell_m * std::f64::consts::SQRT_2);
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let take = rng.unit() < DIAGONAL_DENSITY;
            let rising = rng.unit() < 0.5;
            if take {
                if rising {
                    both_ways((r, c), (r + 1, c + 1), diagonal, LOCAL_SPEED_MPS);
                } else {
                    both_ways((r, c + 1), (r + 1, c), diagonal, LOCAL_SPEED_MPS);
                }
            }
        }
    }

    let span = |i: usize, n: usize| ((i * k) as f64 * cell_m, (((i + 1) * k).min(n - 1)) as f64 * cell_m);
    let zones: Vec<Zone> = (0..zone_rows)
        .flat_map(|zr| (0..zone_cols).map(move |zc| (zr, zc)))
        .map(|(zr, zc)| {
            let (min_y, max_y) = span(zr, rows);
            let (min_x, max_x) = span(zc, cols);
            Zone { id: zone_id(zr, zc), bbox: BBox { min_x, min_y, max_x, max_y } }
        })
        .collect();

    if params.hotspot_count > zones.len() {
        return Err(ScenarioError::InvalidParams(format!(
            "hotspot_count {} exceeds the {} zones of the grid",
            params.hotspot_count,
            zones.len()
        )));
    }
    // Partial Fisher-Yates over zone positions.
    let mut order: Vec<usize> = (0..zones.len()).collect();
    for i in 0..params.hotspot_count {
        let j = i + rng.below((order.len() - i) as u64) as usize;
        order.swap(i, j);
    }
    let hotspots: HashSet<usize> = order[..params.hotspot_count].iter().copied().collect();

    let mut frames = Vec::with_capacity(params.frames);
    for _ in 0..params.frames {
        let mut map = BTreeMap::new();
        for (zi, zone) in zones.iter().enumerate() {
            map.insert(zone.id.clone(), draw_sample(&mut rng, hotspots.contains(&zi), params.preset));
        }
        frames.push(map);
    }

    let meta = ScenarioMeta {
        name: format!("grid-{rows}x{cols}-s{}", params.seed),
        seed: Some(params.seed),
        generator: Some(params.clone()),
    };
    Scenario::new(meta, nodes, edges, zones, EnvTimeline::from_zone_maps(params.frame_interval_s, frames))
}

fn draw_sample(rng: &mut ScenarioRng, hotspot: bool, preset: Preset) -> ZoneSample {
    // Fixed draw order: every branch consumes the same number of values.
    let temperature_c = round2(rng.uniform(8.0, 30.0));
    let humidity_pct = round2(rng.uniform(25.0, 75.0));
    let wind_speed_mps = round2(rng.uniform(0.0, 12.0));
    let aqi_draw = rng.unit();
    let pollen_draw = rng.below(4) as f64;
    let pressure_hpa = round2(rng.uniform(995.0, 1030.0));
    let raining = rng.unit() < 0.2;
    let rain_amount = rng.uniform(0.0, 10.0);
    let uv_index = round2(rng.uniform(0.0, 10.0));
    let volume_draw = rng.unit();
    let spring_draw = rng.below(2) as f64;

    let aqi = round2(if hotspot { 200.0 + 100.0 * aqi_draw } else { 10.0 + 110.0 * aqi_draw });
    let pollen_level = match preset {
        Preset::Baseline => pollen_draw,
        Preset::SpringPollen => 4.0 + spring_draw,
    };
    let capacity = crate::env::DEFAULT_CAPACITY;
    let vehicle_volume = round2(if hotspot { capacity * (1.5 + volume_draw) } else { capacity * 0.9 * volume_draw });

    ZoneSample {
        weather: WeatherSample {
            temperature_c,
            humidity_pct,
            wind_speed_mps,
            aqi,
            pollen_level,
            pressure_hpa,
            rainfall_mm: if raining { round2(rain_amount) } else { 0.0 },
            uv_index,
        },
        traffic: TrafficSample { vehicle_volume, capacity },
    }
}
