//! Zone-indexed environmental state over time.
//!
//! An [`EnvTimeline`] is a sequence of equally spaced [`EnvFrame`]s. Each frame
//! holds one weather sample and one traffic sample per zone. Lookups are
//! piecewise constant: a query at time `t` sees the latest frame whose
//! timestamp is `<= t`, clamped to the first and last frames.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::RoadGraph;

/// Saturation reference used when a traffic sample omits `capacity`.
pub const DEFAULT_CAPACITY: f64 = 100.0;

/// Absolute tolerance, in seconds, on frame timestamps vs `index * interval`.
const TIMESTAMP_TOLERANCE_S: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatherSample {
    pub temperature_c: f64,
    pub humidity_pct: f64,
    pub wind_speed_mps: f64,
    pub aqi: f64,
    /// Ordinal 0..=5.
    pub pollen_level: f64,
    pub pressure_hpa: f64,
    pub rainfall_mm: f64,
    pub uv_index: f64,
}

impl WeatherSample {
    /// Mild, clean conditions: every normalized factor risk is zero.
    pub fn calm() -> Self {
        Self {
            temperature_c: 20.0,
            humidity_pct: 40.0,
            wind_speed_mps: 0.0,
            aqi: 0.0,
            pollen_level: 0.0,
            pressure_hpa: 1013.0,
            rainfall_mm: 0.0,
            uv_index: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficSample {
    pub vehicle_volume: f64,
    #[serde(default = "default_capacity")]
    pub capacity: f64,
}

fn default_capacity() -> f64 {
    DEFAULT_CAPACITY
}

impl TrafficSample {
    pub fn empty() -> Self {
        Self { vehicle_volume: 0.0, capacity: DEFAULT_CAPACITY }
    }
}

/// Environmental state of one zone in one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneSample {
    pub weather: WeatherSample,
    pub traffic: TrafficSample,
}

impl ZoneSample {
    pub fn calm() -> Self {
        Self { weather: WeatherSample::calm(), traffic: TrafficSample::empty() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvFrame {
    pub timestamp_s: f64,
    pub zones: BTreeMap<String, ZoneSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvTimeline {
    pub frame_interval_s: f64,
    pub frames: Vec<EnvFrame>,
}

impl EnvTimeline {
    /// A timeline whose frames sit at `index * frame_interval_s`.
    pub fn from_zone_maps(frame_interval_s: f64, frames: Vec<BTreeMap<String, ZoneSample>>) -> Self {
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, zones)| EnvFrame { timestamp_s: i as f64 * frame_interval_s, zones })
            .collect();
        Self { frame_interval_s, frames }
    }

    /// Index of the frame in effect at time `t`.
    pub fn frame_index_at(&self, t: f64) -> Result<usize, EnvError> {
        if self.frames.is_empty() {
            return Err(EnvError::EmptyTimeline);
        }
        let after = self.frames.partition_point(|f| f.timestamp_s <= t);
        Ok(after.saturating_sub(1))
    }

    pub fn frame_at(&self, t: f64) -> Result<&EnvFrame, EnvError> {
        Ok(&self.frames[self.frame_index_at(t)?])
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("unknown zone {zone:?} in frame {frame}")]
    UnknownZone { zone: String, frame: usize },
    #[error("timeline has no frames")]
    EmptyTimeline,
}

/// Weather and traffic for `zone` at time `t`.
pub fn lookup_env<'a>(timeline: &'a EnvTimeline, zone: &str, t: f64) -> Result<&'a ZoneSample, EnvError> {
    let frame = timeline.frame_index_at(t)?;
    timeline.frames[frame].zones.get(zone).ok_or_else(|| EnvError::UnknownZone { zone: zone.to_owned(), frame })
}

/// One problem found by [`validate_timeline`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvViolation {
    pub frame: Option<usize>,
    pub zone: Option<String>,
    pub field: String,
    pub reason: String,
}

impl EnvViolation {
    fn new(frame: Option<usize>, zone: Option<&str>, field: &str, reason: impl Into<String>) -> Self {
        Self { frame, zone: zone.map(str::to_owned), field: field.to_owned(), reason: reason.into() }
    }
}

impl fmt::Display for EnvViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(frame) = self.frame {
            write!(f, "frame {frame}")?;
        } else {
            write!(f, "timeline")?;
        }
        if let Some(zone) = &self.zone {
            write!(f, " zone {zone:?}")?;
        }
        write!(f, " field {}: {}", self.field, self.reason)
    }
}

/// Checks the timeline against its own invariants and against the zones the
/// graph's edges reference. Returns every violation found.
pub fn validate_timeline(timeline: &EnvTimeline, graph: &RoadGraph) -> Result<(), Vec<EnvViolation>> {
    let out = timeline_violations(timeline, graph.zone_ids().iter().map(String::as_str));
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Every violation of the timeline invariants, given the zone ids that each
/// frame must cover.
pub fn timeline_violations<'a>(
    timeline: &EnvTimeline,
    required_zones: impl Iterator<Item = &'a str> + Clone,
) -> Vec<EnvViolation> {
    let mut out = Vec::new();
    let interval = timeline.frame_interval_s;
    if !(interval.is_finite() && interval > 0.0) {
        out.push(EnvViolation::new(None, None, "frame_interval_s", format!("must be finite and > 0, got {interval}")));
    }
    if timeline.frames.is_empty() {
        out.push(EnvViolation::new(None, None, "frames", "timeline must contain at least one frame"));
    }

    for (i, frame) in timeline.frames.iter().enumerate() {
        let expected = i as f64 * interval;
        let ordered = i == 0 || frame.timestamp_s > timeline.frames[i - 1].timestamp_s;
        let on_grid = (frame.timestamp_s - expected).abs() <= TIMESTAMP_TOLERANCE_S;
        if !ordered || !on_grid {
            out.push(EnvViolation::new(
                Some(i),
                None,
                "timestamp_s",
                format!(
                    "timestamps must be strictly increasing and equal index * frame_interval_s (expected {expected}, got {})",
                    frame.timestamp_s
                ),
            ));
        }
        for zone in required_zones.clone() {
            if !frame.zones.contains_key(zone) {
                out.push(EnvViolation::new(Some(i), Some(zone), "zones", "zone referenced by an edge has no sample"));
            }
        }
        for (zone, sample) in &frame.zones {
            check_sample(i, zone, sample, &mut out);
        }
    }
    out
}

fn check_sample(frame: usize, zone: &str, s: &ZoneSample, out: &mut Vec<EnvViolation>) {
    let mut check = |field: &str, value: f64, ok: bool, range: &str| {
        if !value.is_finite() {
            out.push(EnvViolation::new(Some(frame), Some(zone), field, format!("must be finite, got {value}")));
        } else if !ok {
            out.push(EnvViolation::new(Some(frame), Some(zone), field, format!("{value} outside {range}")));
        }
    };
    let w = &s.weather;
    check("temperature_c", w.temperature_c, true, "");
    check("humidity_pct", w.humidity_pct, (0.0..=100.0).contains(&w.humidity_pct), "[0,100]");
    check("wind_speed_mps", w.wind_speed_mps, w.wind_speed_mps >= 0.0, "[0,inf)");
    check("aqi", w.aqi, w.aqi >= 0.0, "[0,inf)");
    check("pollen_level", w.pollen_level, (0.0..=5.0).contains(&w.pollen_level), "[0,5]");
    check("pressure_hpa", w.pressure_hpa, w.pressure_hpa > 0.0, "(0,inf)");
    check("rainfall_mm", w.rainfall_mm, w.rainfall_mm >= 0.0, "[0,inf)");
    check("uv_index", w.uv_index, (0.0..=14.0).contains(&w.uv_index), "[0,14]");
    let t = &s.traffic;
    check("vehicle_volume", t.vehicle_volume, t.vehicle_volume >= 0.0, "[0,inf)");
    check("capacity", t.capacity, t.capacity > 0.0, "(0,inf)");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CoordSystem, Edge, Node};

    fn sample(aqi: f64) -> ZoneSample {
        let mut s = ZoneSample::calm();
        s.weather.aqi = aqi;
        s
    }

    fn two_frames() -> EnvTimeline {
        let f0 = BTreeMap::from([("z".to_string(), sample(10.0))]);
        let f1 = BTreeMap::from([("z".to_string(), sample(99.0))]);
        EnvTimeline::from_zone_maps(600.0, vec![f0, f1])
    }

    fn graph(zones: &[&str]) -> RoadGraph {
        let nodes = (0..=zones.len())
            .map(|i| Node { id: format!("n{i}"), x: i as f64, y: 0.0, coord_system: CoordSystem::Planar })
            .collect();
        let edges = zones
            .iter()
            .enumerate()
            .map(|(i, z)| Edge {
                from: format!("n{i}"),
                to: format!("n{}", i + 1),
                length_m: 1.0,
                base_speed_mps: 10.0,
                zone: z.to_string(),
            })
            .collect();
        RoadGraph::new(nodes, edges).unwrap()
    }

    #[test]
    fn lookup_floor_and_clamp() {
        let tl = two_frames();
        assert_eq!(lookup_env(&tl, "z", 0.0).unwrap().weather.aqi, 10.0);
        assert_eq!(lookup_env(&tl, "z", 599.0).unwrap().weather.aqi, 10.0);
        assert_eq!(lookup_env(&tl, "z", 600.0).unwrap().weather.aqi, 99.0);
        assert_eq!(lookup_env(&tl, "z", 10_000.0).unwrap().weather.aqi, 99.0);
        assert_eq!(lookup_env(&tl, "z", -50.0).unwrap().weather.aqi, 10.0);
    }

    #[test]
    fn lookup_unknown_zone() {
        let tl = two_frames();
        assert_eq!(lookup_env(&tl, "q", 0.0).unwrap_err(), EnvError::UnknownZone { zone: "q".into(), frame: 0 });
        let empty = EnvTimeline { frame_interval_s: 1.0, frames: vec![] };
        assert_eq!(lookup_env(&empty, "z", 0.0).unwrap_err(), EnvError::EmptyTimeline);
    }

    #[test]
    fn valid_timeline_passes() {
        assert_eq!(validate_timeline(&two_frames(), &graph(&["z"])), Ok(()));
    }

    #[test]
    fn missing_zone_reported_once() {
        let mut tl = two_frames();
        tl.frames[1].zones.insert("w".into(), sample(0.0));
        let v = validate_timeline(&tl, &graph(&["z", "w"])).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].frame, Some(0));
        assert_eq!(v[0].zone.as_deref(), Some("w"));
    }

    #[test]
    fn humidity_out_of_range_cites_bound() {
        let maps = (0..3).map(|_| BTreeMap::from([("z".to_string(), sample(0.0))])).collect();
        let mut tl = EnvTimeline::from_zone_maps(60.0, maps);
        tl.frames[2].zones.get_mut("z").unwrap().weather.humidity_pct = 140.0;
        let v = validate_timeline(&tl, &graph(&["z"])).unwrap_err();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].frame, Some(2));
        assert_eq!(v[0].field, "humidity_pct");
        assert!(v[0].reason.contains("[0,100]"), "{}", v[0].reason);
    }

    #[test]
    fn out_of_order_timestamps_rejected() {
        let mut tl = two_frames();
        tl.frames.swap(0, 1);
        let v = validate_timeline(&tl, &graph(&["z"])).unwrap_err();
        assert!(v.iter().all(|x| x.field == "timestamp_s"));
        assert!(v[0].reason.contains("strictly increasing"));
    }

    #[test]
    fn capacity_defaults_when_absent() {
        let t: TrafficSample = serde_json::from_str(r#"{"vehicle_volume": 12}"#).unwrap();
        assert_eq!(t.capacity, DEFAULT_CAPACITY);
    }

    #[test]
    fn non_finite_and_nonpositive_fields() {
        let mut tl = two_frames();
        let s = tl.frames[0].zones.get_mut("z").unwrap();
        s.weather.temperature_c = f64::NAN;
        s.traffic.capacity = 0.0;
        let v = validate_timeline(&tl, &graph(&["z"])).unwrap_err();
        let fields: Vec<_> = v.iter().map(|x| x.field.as_str()).collect();
        assert_eq!(fields, ["temperature_c", "capacity"]);
    }
}
