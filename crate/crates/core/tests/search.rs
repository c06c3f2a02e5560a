//! Search properties checked against independent oracles.

mod common;

use healthroute_core::graph::{astar, dijkstra, straight_line_lower_bound, Edge, EdgeIdx, RoadGraph};
use healthroute_core::scenario::{generate_grid, ScenarioRng};
use proptest::prelude::*;

fn by_length(_: EdgeIdx, e: &Edge) -> f64 {
    e.length_m
}

/// Every simple-path cost from `from` to `to`, enumerated edge by edge.
fn all_path_costs(g: &RoadGraph, cost: &dyn Fn(usize) -> f64, from: &str, to: &str) -> Vec<f64> {
    fn go(
        g: &RoadGraph,
        cost: &dyn Fn(usize) -> f64,
        at: &str,
        to: &str,
        acc: f64,
        seen: &mut Vec<String>,
        out: &mut Vec<f64>,
    ) {
        if at == to {
            out.push(acc);
            return;
        }
        seen.push(at.to_owned());
        for (i, e) in g.edges().iter().enumerate() {
            if e.from == at && !seen.contains(&e.to) {
                go(g, cost, &e.to, to, acc + cost(i), seen, out);
            }
        }
        seen.pop();
    }
    let mut out = Vec::new();
    go(g, cost, from, to, 0.0, &mut Vec::new(), &mut out);
    out
}

#[test]
fn dijkstra_matches_enumeration_on_small_graphs() {
    let mut rng = ScenarioRng::new(0x5eed);
    for _ in 0..300 {
        let s = common::random_small_scenario(&mut rng, 10);
        let g = s.graph();
        let weights: Vec<f64> = (0..g.edge_count()).map(|_| rng.uniform(0.0, 50.0)).collect();
        let n = g.node_count() as u64;
        let a = g.nodes()[rng.below(n) as usize].id.clone();
        let b = g.nodes()[rng.below(n) as usize].id.clone();
        let oracle = all_path_costs(g, &|i| weights[i], &a, &b).into_iter().reduce(f64::min);
        let got = dijkstra(g, |e, _| weights[e.0], &a, &b).unwrap().path.map(|p| p.cost);
        match (oracle, got) {
            (None, None) => {}
            (Some(o), Some(c)) => assert!((o - c).abs() <= 1e-9, "{o} vs {c}"),
            other => panic!("reachability mismatch {other:?}"),
        }
    }
}

#[test]
fn dijkstra_paths_are_simple_and_connected() {
    let mut rng = ScenarioRng::new(17);
    for _ in 0..200 {
        let s = common::random_small_scenario(&mut rng, 10);
        let g = s.graph();
        let n = g.node_count() as u64;
        let a = g.nodes()[rng.below(n) as usize].id.clone();
        let b = g.nodes()[rng.below(n) as usize].id.clone();
        let Some(p) = dijkstra(g, by_length, &a, &b).unwrap().path else { continue };
        assert_eq!(p.nodes.len(), p.edges.len() + 1);
        let mut seen = p.nodes.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), p.nodes.len());
        for (i, &e) in p.edges.iter().enumerate() {
            assert_eq!(g.endpoints(e), (p.nodes[i], p.nodes[i + 1]));
        }
    }
}

#[test]
fn prefixes_of_optimal_paths_are_optimal() {
    let mut rng = ScenarioRng::new(99);
    let mut checked = 0;
    while checked < 50 {
        let s = common::random_small_scenario(&mut rng, 10);
        let g = s.graph();
        let n = g.node_count() as u64;
        let a = g.nodes()[rng.below(n) as usize].id.clone();
        let b = g.nodes()[rng.below(n) as usize].id.clone();
        let Some(p) = dijkstra(g, by_length, &a, &b).unwrap().path else { continue };
        let mut acc = 0.0;
        for (k, &e) in p.edges.iter().enumerate() {
            acc += g.edge(e).length_m;
            let mid = &g.node(p.nodes[k + 1]).id;
            let best = dijkstra(g, by_length, &a, mid).unwrap().path.unwrap().cost;
            assert!((best - acc).abs() <= 1e-9, "prefix to {mid}: {acc} vs {best}");
        }
        checked += 1;
    }
}

#[test]
fn astar_matches_dijkstra_on_seeded_grids() {
    let mut rng = ScenarioRng::new(4242);
    for seed in 0..100 {
        let params = common::random_grid_params(&mut rng, 20, seed);
        let s = generate_grid(&params).unwrap();
        let g = s.graph();
        let n = g.node_count() as u64;
        let a = g.nodes()[rng.below(n) as usize].id.clone();
        let b = g.nodes()[rng.below(n) as usize].id.clone();
        let dest = g.node_index(&b).unwrap();
        let d = dijkstra(g, by_length, &a, &b).unwrap();
        let h = |v| g.straight_line_m(v, dest) * 0.999;
        let x = astar(g, by_length, h, &a, &b).unwrap();
        let (dc, xc) = (d.path.unwrap().cost, x.path.unwrap().cost);
        assert!((dc - xc).abs() <= 1e-9, "seed {seed}: {dc} vs {xc}");
        assert!(x.nodes_expanded <= d.nodes_expanded, "seed {seed}: {} > {}", x.nodes_expanded, d.nodes_expanded);
    }
}

#[test]
fn straight_line_never_exceeds_path_length() {
    let mut rng = ScenarioRng::new(5);
    for _ in 0..100 {
        let s = common::random_small_scenario(&mut rng, 10);
        let g = s.graph();
        for a in g.nodes() {
            for b in g.nodes() {
                if let Some(p) = dijkstra(g, by_length, &a.id, &b.id).unwrap().path {
                    let bound = straight_line_lower_bound(g, &a.id, &b.id).unwrap();
                    assert!(bound <= p.cost * (1.0 + 1e-12));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_heuristic_astar_is_dijkstra(seed in any::<u64>()) {
        let mut rng = ScenarioRng::new(seed);
        let s = common::random_small_scenario(&mut rng, 10);
        let g = s.graph();
        let n = g.node_count() as u64;
        let a = g.nodes()[rng.below(n) as usize].id.clone();
        let b = g.nodes()[rng.below(n) as usize].id.clone();
        let d = dijkstra(g, by_length, &a, &b).unwrap();
        let x = astar(g, by_length, |_| 0.0, &a, &b).unwrap();
        prop_assert_eq!(d, x);
    }
}
