#![allow(dead_code)]

use std::collections::BTreeMap;

use healthroute_core::env::{EnvTimeline, TrafficSample, WeatherSample, ZoneSample};
use healthroute_core::graph::{CoordSystem, Edge, Node};
use healthroute_core::planner::{edge_cost, Algorithm, HeuristicVariant, RouteRequest};
use healthroute_core::risk::{derive_weights, PatientProfile};
use healthroute_core::scenario::{BBox, GeneratorParams, Scenario, ScenarioMeta, ScenarioRng, Zone};

pub const ZONES: [&str; 3] = ["z0", "z1", "z2"];

pub fn random_sample(rng: &mut ScenarioRng) -> ZoneSample {
    ZoneSample {
        weather: WeatherSample {
            temperature_c: rng.uniform(-15.0, 45.0),
            humidity_pct: rng.uniform(0.0, 100.0),
            wind_speed_mps: rng.uniform(0.0, 20.0),
            aqi: rng.uniform(0.0, 400.0),
            pollen_level: rng.below(6) as f64,
            pressure_hpa: rng.uniform(950.0, 1050.0),
            rainfall_mm: rng.uniform(0.0, 30.0),
            uv_index: rng.uniform(0.0, 14.0),
        },
        traffic: TrafficSample { vehicle_volume: rng.uniform(0.0, 250.0), capacity: rng.uniform(50.0, 200.0) },
    }
}

pub fn random_profile(rng: &mut ScenarioRng) -> PatientProfile {
    let all = PatientProfile::all();
    all[rng.below(all.len() as u64) as usize]
}

pub fn random_variant(rng: &mut ScenarioRng) -> HeuristicVariant {
    HeuristicVariant::ALL[rng.below(4) as usize]
}

/// Random planar graph with at most `max_nodes` nodes and random edges (parallel
/// edges allowed) spread over three zones, with one to three frames.
pub fn random_small_scenario(rng: &mut ScenarioRng, max_nodes: u64) -> Scenario {
    let n = 2 + rng.below(max_nodes - 1) as usize;
    let nodes: Vec<Node> = (0..n)
        .map(|i| Node {
            id: format!("v{i}"),
            x: rng.uniform(0.0, 1000.0),
            y: rng.uniform(0.0, 1000.0),
            coord_system: CoordSystem::Planar,
        })
        .collect();
    let density = rng.uniform(0.15, 0.6);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let copies = if rng.unit() < density { 1 + (rng.unit() < 0.1) as usize } else { 0 };
            for _ in 0..copies {
                let straight = (nodes[a].x - nodes[b].x).hypot(nodes[a].y - nodes[b].y);
                edges.push(Edge {
                    from: nodes[a].id.clone(),
                    to: nodes[b].id.clone(),
                    length_m: straight * rng.uniform(1.0, 1.6) + 1.0,
                    base_speed_mps: rng.uniform(3.0, 30.0),
                    zone: ZONES[rng.below(3) as usize].to_string(),
                });
            }
        }
    }
    let zones = ZONES
        .iter()
        .map(|z| Zone { id: z.to_string(), bbox: BBox { min_x: 0.0, min_y: 0.0, max_x: 1000.0, max_y: 1000.0 } })
        .collect();
    let frames = 1 + rng.below(3) as usize;
    let maps = (0..frames)
        .map(|_| ZONES.iter().map(|z| (z.to_string(), random_sample(rng))).collect::<BTreeMap<_, _>>())
        .collect();
    Scenario::new(ScenarioMeta::named("random"), nodes, edges, zones, EnvTimeline::from_zone_maps(300.0, maps))
        .expect("random scenario is valid")
}

pub fn random_grid_params(rng: &mut ScenarioRng, max_side: u64, seed: u64) -> GeneratorParams {
    let rows = 2 + rng.below(max_side - 1) as usize;
    let cols = 2 + rng.below(max_side - 1) as usize;
    let zone_cell = 1 + rng.below(4) as usize;
    let zones = (rows - 1).div_ceil(zone_cell) * (cols - 1).div_ceil(zone_cell);
    GeneratorParams {
        rows,
        cols,
        cell_m: rng.uniform(20.0, 200.0).round(),
        zone_cell,
        frames: 1 + rng.below(3) as usize,
        frame_interval_s: 600.0,
        hotspot_count: rng.below(zones.min(4) as u64 + 1) as usize,
        seed,
        preset: Default::default(),
    }
}

pub fn random_request(rng: &mut ScenarioRng, scenario: &Scenario) -> RouteRequest {
    let nodes = scenario.graph().nodes();
    let n = nodes.len() as u64;
    let frames = scenario.timeline().frames.len() as f64;
    RouteRequest {
        origin: nodes[rng.below(n) as usize].id.clone(),
        dest: nodes[rng.below(n) as usize].id.clone(),
        profile: random_profile(rng),
        depart_t: rng.uniform(0.0, frames * scenario.timeline().frame_interval_s),
        alpha: rng.uniform(0.0, 5.0),
        variant: random_variant(rng),
        algorithm: if rng.unit() < 0.5 { Algorithm::Dijkstra } else { Algorithm::Astar },
    }
}

/// Minimum objective over every simple origin->dest path, by exhaustive
/// enumeration with per-edge costs from `edge_cost`. `None` if unreachable.
pub fn brute_force_min_cost(scenario: &Scenario, request: &RouteRequest) -> Option<f64> {
    let graph = scenario.graph();
    let weights = derive_weights(&request.profile);
    let costs: Vec<f64> = graph
        .edges()
        .iter()
        .map(|e| edge_cost(e, request.depart_t, &weights, scenario.timeline(), request.alpha, request.variant).unwrap())
        .collect();
    let origin = graph.node_index(&request.origin).unwrap();
    let dest = graph.node_index(&request.dest).unwrap();

    fn walk(
        graph: &healthroute_core::RoadGraph,
        costs: &[f64],
        at: usize,
        dest: usize,
        acc: f64,
        on_path: &mut Vec<bool>,
        best: &mut Option<f64>,
    ) {
        if at == dest {
            *best = Some(best.map_or(acc, |b: f64| b.min(acc)));
            return;
        }
        on_path[at] = true;
        for (i, e) in graph.edges().iter().enumerate() {
            let from = graph.node_index(&e.from).unwrap().0;
            let to = graph.node_index(&e.to).unwrap().0;
            if from == at && !on_path[to] {
                walk(graph, costs, to, dest, acc + costs[i], on_path, best);
            }
        }
        on_path[at] = false;
    }

    let mut best = None;
    let mut on_path = vec![false; graph.node_count()];
    walk(graph, &costs, origin.0, dest.0, 0.0, &mut on_path, &mut best);
    best
}
