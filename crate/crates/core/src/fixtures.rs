//! Small hand-built scenarios shared by tests and the service.

use std::collections::BTreeMap;

use crate::env::{EnvTimeline, ZoneSample};
use crate::graph::{CoordSystem, Edge, Node};
use crate::planner::{Algorithm, HeuristicVariant, RouteRequest};
use crate::risk::PatientProfile;
use crate::scenario::{BBox, Scenario, ScenarioMeta, Zone};

/// Length of each edge on the clean route A-B-D.
pub const DIAMOND_CLEAN_EDGE_M: f64 = 100.0;
/// Length of each edge on the polluted route A-C-D.
pub const DIAMOND_DIRTY_EDGE_M: f64 = 75.0;

/// Two routes from `A` to `D`: A-B-D (200 m, zone `clean`) and A-C-D
/// (150 m, zone `dirty`). Every factor risk is zero except AQI in the dirty
/// zone, which is set to `dirty_aqi`. Two identical frames, 600 s apart.
pub fn diamond(dirty_aqi: f64) -> Scenario {
    let node = |id: &str, x: f64, y: f64| Node { id: id.into(), x, y, coord_system: CoordSystem::Planar };
    let edge = |from: &str, to: &str, length_m: f64, zone: &str| Edge {
        from: from.into(),
        to: to.into(),
        length_m,
        base_speed_mps: 10.0,
        zone: zone.into(),
    };
    let nodes = vec![node("A", 0.0, 0.0), node("B", 30.0, 30.0), node("C", 30.0, -20.0), node("D", 60.0, 0.0)];
    let edges = vec![
        edge("A", "B", DIAMOND_CLEAN_EDGE_M, "clean"),
        edge("B", "D", DIAMOND_CLEAN_EDGE_M, "clean"),
        edge("A", "C", DIAMOND_DIRTY_EDGE_M, "dirty"),
        edge("C", "D", DIAMOND_DIRTY_EDGE_M, "dirty"),
    ];
    let zones = vec![
        Zone { id: "clean".into(), bbox: BBox { min_x: 0.0, min_y: 0.0, max_x: 60.0, max_y: 30.0 } },
        Zone { id: "dirty".into(), bbox: BBox { min_x: 0.0, min_y: -20.0, max_x: 60.0, max_y: 0.0 } },
    ];
    let mut dirty = ZoneSample::calm();
    dirty.weather.aqi = dirty_aqi;
    let frame = BTreeMap::from([("clean".to_string(), ZoneSample::calm()), ("dirty".to_string(), dirty)]);
    let timeline = EnvTimeline::from_zone_maps(600.0, vec![frame.clone(), frame]);
    Scenario::new(ScenarioMeta::named("diamond"), nodes, edges, zones, timeline).expect("diamond fixture is valid")
}

/// A to D for the baseline profile, combined variant, A*, alpha 1.
pub fn diamond_request() -> RouteRequest {
    RouteRequest {
        origin: "A".into(),
        dest: "D".into(),
        profile: PatientProfile::baseline(),
        depart_t: 0.0,
        alpha: 1.0,
        variant: HeuristicVariant::Combined,
        algorithm: Algorithm::Astar,
    }
}
