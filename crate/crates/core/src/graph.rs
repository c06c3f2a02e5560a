//! Road graph representation and best-first search.
//!
//! A [`RoadGraph`] is a validated, immutable directed multigraph whose nodes
//! carry planar or geodetic positions and whose edges carry a physical length,
//! a free-flow speed and the id of the zone they belong to. Searches take an
//! arbitrary per-edge cost function, so the same graph serves plain shortest
//! distance queries and exposure-weighted ones.
//!
//! Both [`dijkstra`] and [`astar`] break frontier ties by insertion order,
//! which makes every result reproducible across runs.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mean Earth radius used for great-circle distances, in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Relative slack allowed when checking `length_m` against the straight-line
/// distance between an edge's endpoints.
pub const LENGTH_TOLERANCE: f64 = 1e-3;

/// Upper bound on `base_speed_mps`.
pub const MAX_SPEED_MPS: f64 = 70.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordSystem {
    /// `x` is meters east, `y` is meters north.
    Planar,
    /// `x` is longitude in degrees, `y` is latitude in degrees.
    Geodetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub coord_system: CoordSystem,
}

/// A directed road segment. Endpoints are node ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub length_m: f64,
    pub base_speed_mps: f64,
    pub zone: String,
}

/// Dense index of a node inside a [`RoadGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeIdx(pub usize);

/// Dense index of an edge inside a [`RoadGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeIdx(pub usize);

/// One reason a node/edge set cannot form a [`RoadGraph`].
#[derive(Debug, Clone, PartialEq)]
pub enum GraphViolation {
    DuplicateNode { id: String },
    MixedCoordSystems { id: String },
    NonFiniteCoordinate { id: String },
    MissingEndpoint { edge: usize, node: String },
    SelfLoop { edge: usize, node: String },
    NonPositiveLength { edge: usize, length_m: f64 },
    ShorterThanStraightLine { edge: usize, from: String, to: String, length_m: f64, straight_m: f64 },
    SpeedOutOfRange { edge: usize, speed_mps: f64 },
    EmptyZone { edge: usize },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateNode { id } => write!(f, "node {id:?}: duplicate id"),
            Self::MixedCoordSystems { id } => {
                write!(f, "node {id:?}: coord_system differs from the rest of the graph")
            }
            Self::NonFiniteCoordinate { id } => write!(f, "node {id:?}: coordinates must be finite"),
            Self::MissingEndpoint { edge, node } => {
                write!(f, "edge {edge}: endpoint {node:?} is not a node of the graph")
            }
            Self::SelfLoop { edge, node } => write!(f, "edge {edge}: self-loop on {node:?}"),
            Self::NonPositiveLength { edge, length_m } => {
                write!(f, "edge {edge}: length_m must be finite and > 0, got {length_m}")
            }
            Self::ShorterThanStraightLine { edge, from, to, length_m, straight_m } => write!(
                f,
                "edge {edge} ({from} -> {to}): length_m {length_m} is shorter than the straight-line distance {straight_m:.3}"
            ),
            Self::SpeedOutOfRange { edge, speed_mps } => {
                write!(f, "edge {edge}: base_speed_mps must be in (0, {MAX_SPEED_MPS}], got {speed_mps}")
            }
            Self::EmptyZone { edge } => write!(f, "edge {edge}: zone id is empty"),
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph is invalid: {}", join_violations(.0))]
    Invalid(Vec<GraphViolation>),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}

fn join_violations(v: &[GraphViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("cost function returned {cost} for edge {edge}")]
    NegativeCost { edge: usize, cost: f64 },
    #[error("heuristic returned {value} for node {node:?}")]
    HeuristicNegative { node: String, value: f64 },
}

/// Immutable directed road graph.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, NodeIdx>,
    endpoints: Vec<(NodeIdx, NodeIdx)>,
    outgoing: Vec<Vec<EdgeIdx>>,
    zone_ids: Vec<String>,
    edge_zone: Vec<usize>,
}

impl RoadGraph {
    /// Validates and indexes the given nodes and edges.
    ///
    /// Every problem is collected, so a failing graph reports all offending
    /// nodes and edges at once.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        let violations = validate(&nodes, &edges);
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations));
        }

        let index: HashMap<String, NodeIdx> =
            nodes.iter().enumerate().map(|(i, n)| (n.id.clone(), NodeIdx(i))).collect();
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut endpoints = Vec::with_capacity(edges.len());
        let mut zone_ids: Vec<String> = Vec::new();
        let mut zone_lookup: HashMap<&str, usize> = HashMap::new();
        let mut edge_zone = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let from = index[&e.from];
            let to = index[&e.to];
            outgoing[from.0].push(EdgeIdx(i));
            endpoints.push((from, to));
            let z = *zone_lookup.entry(e.zone.as_str()).or_insert_with(|| {
                zone_ids.push(e.zone.clone());
                zone_ids.len() - 1
            });
            edge_zone.push(z);
        }

        Ok(Self { nodes, edges, index, endpoints, outgoing, zone_ids, edge_zone })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, idx: NodeIdx) -> &Node {
        &self.nodes[idx.0]
    }

    pub fn edge(&self, idx: EdgeIdx) -> &Edge {
        &self.edges[idx.0]
    }

    pub fn node_index(&self, id: &str) -> Result<NodeIdx, GraphError> {
        self.index.get(id).copied().ok_or_else(|| GraphError::UnknownNode(id.to_owned()))
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn endpoints(&self, edge: EdgeIdx) -> (NodeIdx, NodeIdx) {
        self.endpoints[edge.0]
    }

    pub fn outgoing(&self, node: NodeIdx) -> &[EdgeIdx] {
        &self.outgoing[node.0]
    }

    /// Coordinate system shared by all nodes; planar for an empty graph.
    pub fn coord_system(&self) -> CoordSystem {
        self.nodes.first().map_or(CoordSystem::Planar, |n| n.coord_system)
    }

    /// Distinct zone ids referenced by edges, in first-use order.
    pub fn zone_ids(&self) -> &[String] {
        &self.zone_ids
    }

    /// Position of the edge's zone in [`RoadGraph::zone_ids`].
    pub fn edge_zone_slot(&self, edge: EdgeIdx) -> usize {
        self.edge_zone[edge.0]
    }

    /// Straight-line distance in meters between two indexed nodes.
    pub fn straight_line_m(&self, a: NodeIdx, b: NodeIdx) -> f64 {
        point_distance(&self.nodes[a.0], &self.nodes[b.0])
    }
}

fn point_distance(a: &Node, b: &Node) -> f64 {
    match a.coord_system {
        CoordSystem::Planar => (a.x - b.x).hypot(a.y - b.y),
        CoordSystem::Geodetic => haversine_m(a.y, a.x, b.y, b.x),
    }
}

/// Great-circle distance between two latitude/longitude pairs in degrees.
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Lower bound, in meters, on the length of any path from `node` to `dest`.
pub fn straight_line_lower_bound(graph: &RoadGraph, node: &str, dest: &str) -> Result<f64, GraphError> {
    let a = graph.node_index(node)?;
    let b = graph.node_index(dest)?;
    Ok(graph.straight_line_m(a, b))
}

fn validate(nodes: &[Node], edges: &[Edge]) -> Vec<GraphViolation> {
    let mut out = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::with_capacity(nodes.len());
    let coord = nodes.first().map(|n| n.coord_system);
    for (i, n) in nodes.iter().enumerate() {
        if seen.insert(n.id.as_str(), i).is_some() {
            out.push(GraphViolation::DuplicateNode { id: n.id.clone() });
        }
        if Some(n.coord_system) != coord {
            out.push(GraphViolation::MixedCoordSystems { id: n.id.clone() });
        }
        if !n.x.is_finite() || !n.y.is_finite() {
            out.push(GraphViolation::NonFiniteCoordinate { id: n.id.clone() });
        }
    }

    for (i, e) in edges.iter().enumerate() {
        let from = seen.get(e.from.as_str()).map(|&k| &nodes[k]);
        let to = seen.get(e.to.as_str()).map(|&k| &nodes[k]);
        if from.is_none() {
            out.push(GraphViolation::MissingEndpoint { edge: i, node: e.from.clone() });
        }
        if to.is_none() {
            out.push(GraphViolation::MissingEndpoint { edge: i, node: e.to.clone() });
        }
        if e.from == e.to {
            out.push(GraphViolation::SelfLoop { edge: i, node: e.from.clone() });
        }
        if !(e.length_m.is_finite() && e.length_m > 0.0) {
            out.push(GraphViolation::NonPositiveLength { edge: i, length_m: e.length_m });
        } else if let (Some(a), Some(b)) = (from, to) {
            let straight = point_distance(a, b);
            if e.length_m < straight * (1.0 - LENGTH_TOLERANCE) {
                out.push(GraphViolation::ShorterThanStraightLine {
                    edge: i,
                    from: e.from.clone(),
                    to: e.to.clone(),
                    length_m: e.length_m,
                    straight_m: straight,
                });
            }
        }
        if !(e.base_speed_mps > 0.0 && e.base_speed_mps <= MAX_SPEED_MPS) {
            out.push(GraphViolation::SpeedOutOfRange { edge: i, speed_mps: e.base_speed_mps });
        }
        if e.zone.is_empty() {
            out.push(GraphViolation::EmptyZone { edge: i });
        }
    }
    out
}

/// A simple path found by a search, with its accumulated cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    pub edges: Vec<EdgeIdx>,
    pub nodes: Vec<NodeIdx>,
    /// Sum of the edge costs in path order.
    pub cost: f64,
}

impl Path {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Result of a search. `path` is `None` when the destination is unreachable.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub path: Option<Path>,
    /// Nodes popped from the frontier and settled, including the destination.
    pub nodes_expanded: usize,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    key: f64,
    seq: u64,
    g: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Reversed so the max-heap pops the smallest key, then the oldest entry.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Shortest path from `origin` to `dest` under `cost`.
///
/// `cost` must return a finite, nonnegative value for every edge it is
/// asked about; anything else aborts the search with
/// [`SearchError::NegativeCost`].
pub fn dijkstra<C>(graph: &RoadGraph, cost: C, origin: &str, dest: &str) -> Result<SearchOutcome, SearchError>
where
    C: Fn(EdgeIdx, &Edge) -> f64,
{
    best_first(graph, cost, |_| 0.0, origin, dest)
}

/// A* search guided by `heuristic`, a lower bound on the remaining cost from
/// a node to `dest`.
///
/// With an admissible heuristic the returned cost equals [`dijkstra`]'s.
/// Settled nodes are reopened when a cheaper route to them turns up, so
/// admissibility alone (not consistency) is enough.
pub fn astar<C, H>(
    graph: &RoadGraph,
    cost: C,
    heuristic: H,
    origin: &str,
    dest: &str,
) -> Result<SearchOutcome, SearchError>
where
    C: Fn(EdgeIdx, &Edge) -> f64,
    H: Fn(NodeIdx) -> f64,
{
    best_first(graph, cost, heuristic, origin, dest)
}

fn best_first<C, H>(
    graph: &RoadGraph,
    cost: C,
    heuristic: H,
    origin: &str,
    dest: &str,
) -> Result<SearchOutcome, SearchError>
where
    C: Fn(EdgeIdx, &Edge) -> f64,
    H: Fn(NodeIdx) -> f64,
{
    let unknown = |id: &str| SearchError::UnknownNode(id.to_owned());
    let origin = graph.node_index(origin).map_err(|_| unknown(origin))?;
    let dest = graph.node_index(dest).map_err(|_| unknown(dest))?;

    let n = graph.node_count();
    let mut best_g = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<EdgeIdx>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut nodes_expanded = 0usize;

    let h = |node: NodeIdx| -> Result<f64, SearchError> {
        let value = heuristic(node);
        if value >= 0.0 && value.is_finite() {
            Ok(value)
        } else {
            Err(SearchError::HeuristicNegative { node: graph.node(node).id.clone(), value })
        }
    };

    best_g[origin.0] = 0.0;
    heap.push(Entry { key: h(origin)?, seq, g: 0.0, node: origin.0 });

    while let Some(Entry { g, node, .. }) = heap.pop() {
        if g > best_g[node] {
            continue;
        }
        nodes_expanded += 1;
        if node == dest.0 {
            let path = reconstruct(graph, &parent, origin, dest, g);
            return Ok(SearchOutcome { path: Some(path), nodes_expanded });
        }
        for &e in graph.outgoing(NodeIdx(node)) {
            let c = cost(e, graph.edge(e));
            if !(c >= 0.0 && c.is_finite()) {
                return Err(SearchError::NegativeCost { edge: e.0, cost: c });
            }
            let (_, to) = graph.endpoints(e);
            let next_g = g + c;
            if next_g < best_g[to.0] {
                best_g[to.0] = next_g;
                parent[to.0] = Some(e);
                seq += 1;
                heap.push(Entry { key: next_g + h(to)?, seq, g: next_g, node: to.0 });
            }
        }
    }

    Ok(SearchOutcome { path: None, nodes_expanded })
}

fn reconstruct(graph: &RoadGraph, parent: &[Option<EdgeIdx>], origin: NodeIdx, dest: NodeIdx, cost: f64) -> Path {
    let mut edges = Vec::new();
    let mut nodes = vec![dest];
    let mut cur = dest;
    while cur != origin {
        let e = parent[cur.0].expect("settled node has a parent edge");
        edges.push(e);
        cur = graph.endpoints(e).0;
        nodes.push(cur);
    }
    edges.reverse();
    nodes.reverse();
    Path { edges, nodes, cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planar(id: &str, x: f64, y: f64) -> Node {
        Node { id: id.into(), x, y, coord_system: CoordSystem::Planar }
    }

    fn edge(from: &str, to: &str, length_m: f64) -> Edge {
        Edge { from: from.into(), to: to.into(), length_m, base_speed_mps: 10.0, zone: "z".into() }
    }

    fn triangle() -> RoadGraph {
        RoadGraph::new(
            vec![planar("A", 0.0, 0.0), planar("B", 0.5, 0.0), planar("C", 1.0, 0.0)],
            vec![edge("A", "B", 1.0), edge("B", "C", 1.0), edge("A", "C", 3.0)],
        )
        .unwrap()
    }

    fn by_length(_: EdgeIdx, e: &Edge) -> f64 {
        e.length_m
    }

    fn ids(g: &RoadGraph, p: &Path) -> Vec<String> {
        p.nodes.iter().map(|&n| g.node(n).id.clone()).collect()
    }

    #[test]
    fn dijkstra_prefers_two_short_hops() {
        let g = triangle();
        let out = dijkstra(&g, by_length, "A", "C").unwrap();
        let p = out.path.unwrap();
        assert_eq!(ids(&g, &p), ["A", "B", "C"]);
        assert_eq!(p.cost, 2.0);
        assert_eq!(p.nodes.len(), p.edges.len() + 1);
    }

    #[test]
    fn origin_equals_dest_is_empty_path() {
        let g = triangle();
        let p = dijkstra(&g, by_length, "B", "B").unwrap().path.unwrap();
        assert!(p.edges.is_empty());
        assert_eq!(p.cost, 0.0);
        assert_eq!(ids(&g, &p), ["B"]);
    }

    #[test]
    fn unreachable_is_no_route() {
        let g = triangle();
        let out = dijkstra(&g, by_length, "C", "A").unwrap();
        assert!(out.path.is_none());
        assert_eq!(out.nodes_expanded, 1);
    }

    #[test]
    fn unknown_node_is_error() {
        let g = triangle();
        assert_eq!(dijkstra(&g, by_length, "A", "Q").unwrap_err(), SearchError::UnknownNode("Q".into()));
        assert!(matches!(
            straight_line_lower_bound(&g, "Q", "A"),
            Err(GraphError::UnknownNode(id)) if id == "Q"
        ));
    }

    #[test]
    fn negative_cost_is_hard_error() {
        let g = triangle();
        let err = dijkstra(&g, |_, _| -1.0, "A", "C").unwrap_err();
        assert!(matches!(err, SearchError::NegativeCost { .. }));
        let err = dijkstra(&g, |_, _| f64::NAN, "A", "C").unwrap_err();
        assert!(matches!(err, SearchError::NegativeCost { .. }));
    }

    #[test]
    fn negative_heuristic_is_error() {
        let g = triangle();
        let err = astar(&g, by_length, |_| -0.5, "A", "C").unwrap_err();
        assert!(matches!(err, SearchError::HeuristicNegative { .. }));
    }

    #[test]
    fn single_edge_astar_expands_two_nodes() {
        let g = RoadGraph::new(vec![planar("A", 0.0, 0.0), planar("B", 5.0, 0.0)], vec![edge("A", "B", 5.0)]).unwrap();
        let b = g.node_index("B").unwrap();
        let out = astar(&g, by_length, |n| if n == b { 0.0 } else { 5.0 }, "A", "B").unwrap();
        assert_eq!(out.path.unwrap().cost, 5.0);
        assert_eq!(out.nodes_expanded, 2);
    }

    #[test]
    fn zero_heuristic_matches_dijkstra() {
        let g = triangle();
        let d = dijkstra(&g, by_length, "A", "C").unwrap();
        let a = astar(&g, by_length, |_| 0.0, "A", "C").unwrap();
        assert_eq!(d, a);
    }

    #[test]
    fn equal_keys_pop_in_insertion_order() {
        // Two equal-cost routes A-B-D and A-C-D: B is pushed first, so it wins.
        let g = RoadGraph::new(
            vec![planar("A", 0.0, 0.0), planar("B", 0.0, 0.0), planar("C", 0.0, 0.0), planar("D", 0.0, 0.0)],
            vec![edge("A", "B", 1.0), edge("A", "C", 1.0), edge("C", "D", 1.0), edge("B", "D", 1.0)],
        )
        .unwrap();
        for _ in 0..3 {
            let p = dijkstra(&g, by_length, "A", "D").unwrap().path.unwrap();
            assert_eq!(ids(&g, &p), ["A", "B", "D"]);
        }
    }

    #[test]
    fn inconsistent_but_admissible_heuristic_stays_optimal() {
        // h(C) = 10 equals the true remaining cost but is inconsistent across
        // C->D, so D is first settled via B and must be reopened.
        let g = RoadGraph::new(
            vec![
                planar("A", 0.0, 0.0),
                planar("B", 0.0, 0.0),
                planar("C", 0.0, 0.0),
                planar("D", 0.0, 0.0),
                planar("E", 0.0, 0.0),
            ],
            vec![
                edge("A", "B", 4.0),
                edge("A", "C", 1.0),
                edge("B", "D", 1.0),
                edge("C", "D", 1.0),
                edge("D", "E", 9.0),
            ],
        )
        .unwrap();
        let idx = |s: &str| g.node_index(s).unwrap();
        let c = idx("C");
        let h = move |n: NodeIdx| if n == c { 10.0 } else { 0.0 };
        let a = astar(&g, by_length, h, "A", "E").unwrap().path.unwrap();
        assert_eq!(a.cost, 11.0);
    }

    #[test]
    fn straight_line_planar_and_geodetic() {
        let g = RoadGraph::new(vec![planar("a", 0.0, 0.0), planar("b", 3.0, 4.0)], vec![]).unwrap();
        assert_eq!(straight_line_lower_bound(&g, "a", "b").unwrap(), 5.0);
        assert_eq!(straight_line_lower_bound(&g, "a", "a").unwrap(), 0.0);

        let geo =
            |id: &str, lon: f64, lat: f64| Node { id: id.into(), x: lon, y: lat, coord_system: CoordSystem::Geodetic };
        let g = RoadGraph::new(vec![geo("p", 0.0, 0.0), geo("q", 0.0, 1.0)], vec![]).unwrap();
        // R * pi / 180 = 111194.926...
        let d = straight_line_lower_bound(&g, "p", "q").unwrap();
        assert!((d - 111_194.9).abs() < 1.0, "{d}");
    }

    #[test]
    fn validation_collects_every_violation() {
        let err = RoadGraph::new(
            vec![planar("A", 0.0, 0.0), planar("B", 10.0, 0.0), planar("A", 1.0, 1.0)],
            vec![
                edge("A", "Z", 1.0),
                edge("B", "B", 1.0),
                edge("A", "B", 5.0),
                Edge { base_speed_mps: 80.0, ..edge("B", "A", 10.0) },
            ],
        )
        .unwrap_err();
        let GraphError::Invalid(v) = err else { panic!() };
        assert!(v.contains(&GraphViolation::DuplicateNode { id: "A".into() }));
        assert!(v.contains(&GraphViolation::MissingEndpoint { edge: 0, node: "Z".into() }));
        assert!(v.contains(&GraphViolation::SelfLoop { edge: 1, node: "B".into() }));
        assert!(v.iter().any(|x| matches!(x, GraphViolation::ShorterThanStraightLine { edge: 2, .. })));
        assert!(v.contains(&GraphViolation::SpeedOutOfRange { edge: 3, speed_mps: 80.0 }));
    }

    #[test]
    fn length_tolerance_is_one_permille() {
        let nodes = || vec![planar("A", 0.0, 0.0), planar("B", 1000.0, 0.0)];
        assert!(RoadGraph::new(nodes(), vec![edge("A", "B", 999.5)]).is_ok());
        assert!(RoadGraph::new(nodes(), vec![edge("A", "B", 998.9)]).is_err());
    }

    #[test]
    fn mixed_coord_systems_rejected() {
        let geo = Node { id: "g".into(), x: 0.0, y: 0.0, coord_system: CoordSystem::Geodetic };
        let err = RoadGraph::new(vec![planar("A", 0.0, 0.0), geo], vec![]).unwrap_err();
        assert!(
            matches!(err, GraphError::Invalid(v) if v == vec![GraphViolation::MixedCoordSystems { id: "g".into() }])
        );
    }

    #[test]
    fn parallel_edges_allowed() {
        let g = RoadGraph::new(
            vec![planar("A", 0.0, 0.0), planar("B", 1.0, 0.0)],
            vec![edge("A", "B", 3.0), edge("A", "B", 2.0)],
        )
        .unwrap();
        let p = dijkstra(&g, by_length, "A", "B").unwrap().path.unwrap();
        assert_eq!(p.edges, vec![EdgeIdx(1)]);
        assert_eq!(g.outgoing(NodeIdx(0)).len(), 2);
    }
}
