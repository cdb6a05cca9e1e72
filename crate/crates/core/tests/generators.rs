mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use tree_route_core::failures::{clustered_probability, edge_distances};
use tree_route_core::rng::derive_seed;
use tree_route_core::{
    clustered_failures, erdos_renyi, erdos_renyi_giant, random_failures, random_regular, Decay,
    Edge, Graph,
};

#[test]
fn erdos_renyi_mean_edge_count() {
    let total: usize = (0..1000u64).map(|s| erdos_renyi(10, 0.5, s).unwrap().graph.edge_count()).sum();
    let mean = total as f64 / 1000.0;
    assert!((mean - 22.5).abs() <= 3.0, "mean {mean}");
}

#[test]
fn erdos_renyi_is_deterministic_and_connected() {
    for seed in 0..50 {
        let a = erdos_renyi(25, 0.2, seed).unwrap();
        let b = erdos_renyi(25, 0.2, seed).unwrap();
        assert_eq!(a.graph, b.graph);
        assert!(a.graph.is_connected());
        assert!(a.attempts >= 1);
    }
}

#[test]
fn giant_component_for_sparse_graphs() {
    for seed in 0..20 {
        let g = erdos_renyi_giant(100, 0.02, seed).unwrap().graph;
        assert!(g.is_connected());
        assert!(g.node_count() >= 2 && g.node_count() <= 100);
    }
}

/// Every labelled 3-regular graph on 6 nodes, by brute force over edge subsets.
fn cubic_six() -> BTreeSet<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() != 9 {
            continue;
        }
        let chosen: Vec<(u32, u32)> =
            pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        let mut deg = [0; 6];
        for &(a, b) in &chosen {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        if deg.iter().all(|&d| d == 3) {
            out.insert(chosen);
        }
    }
    out
}

#[test]
fn regular_output_lies_in_support() {
    let support = cubic_six();
    assert_eq!(support.len(), 70);
    let mut seen = BTreeSet::new();
    for seed in 0..2000 {
        let g = random_regular(6, 3, seed).unwrap().graph;
        let edges: Vec<(u32, u32)> = g.edges().iter().map(|e| { let (a, b) = e.endpoints(); (a.0, b.0) }).collect();
        assert!(support.contains(&edges), "{edges:?}");
        seen.insert(edges);
    }
    assert!(seen.len() > 60, "only {} distinct graphs", seen.len());
}

#[test]
fn regular_degrees() {
    for seed in 0..30 {
        let g = random_regular(50, 6, seed).unwrap().graph;
        assert_eq!(g.node_count(), 50);
        assert!(g.nodes().all(|v| g.degree(v) == 6));
        assert!(g.is_connected());
    }
}

#[test]
fn regular_rejects_bad_parameters() {
    assert!(random_regular(5, 3, 0).is_err());
    assert!(random_regular(4, 4, 0).is_err());
    assert!(random_regular(4, 0, 0).is_err());
}

fn ring(n: u32) -> Graph {
    Graph::from_edges(n as usize, (0..n as usize).map(|v| (v, (v + 1) % n as usize))).unwrap()
}

#[test]
fn random_failures_are_uniform() {
    let g = ring(10);
    let mut counts: BTreeMap<Edge, usize> = BTreeMap::new();
    for seed in 0..10_000 {
        for e in random_failures(&g, 0.5, 2, seed).unwrap().failed {
            *counts.entry(e).or_default() += 1;
        }
    }
    assert_eq!(counts.len(), 10);
    for (e, c) in counts {
        assert!((900..=1100).contains(&c), "{e}: {c}");
    }
}

#[test]
fn clustered_star_mean() {
    let g = Graph::from_edges(6, (1..=5).map(|v| (0, v))).unwrap();
    let total: usize = (0..10_000)
        .map(|s| clustered_failures(&g, n(0), 0.4, 0.3, Decay::Multiplicative, s).unwrap().failed.len())
        .sum();
    let mean = total as f64 / 10_000.0;
    assert!((mean - 2.0).abs() <= 0.3, "mean {mean}");
}

#[test]
fn clustered_frequency_follows_decay() {
    let g = erdos_renyi(40, 0.1, 3).unwrap().graph;
    let d = n(0);
    let hops = edge_distances(&g, d);
    let trials = 4000;
    let mut hits = vec![0usize; g.edge_count()];
    for s in 0..trials {
        let sc = clustered_failures(&g, d, 0.6, 0.3, Decay::Multiplicative, derive_seed(5, &[s])).unwrap();
        for e in sc.failed {
            hits[g.edge_index(e).unwrap()] += 1;
        }
    }
    for (i, &h) in hops.iter().enumerate() {
        let p = 0.6 * 0.7f64.powi(h as i32);
        assert!((clustered_probability(0.6, 0.3, Decay::Multiplicative, h) - p).abs() < 1e-12);
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        let expect = trials as f64 * p;
        assert!((hits[i] as f64 - expect).abs() <= 3.0 * sigma + 1.0, "edge {i} h={h}");
    }
}

#[test]
fn clustered_is_monotone_in_rate() {
    let g = erdos_renyi(30, 0.15, 8).unwrap().graph;
    for seed in 0..100 {
        let mut prev = BTreeSet::new();
        for step in 0..=10 {
            let rate = step as f64 / 10.0;
            let cur = clustered_failures(&g, n(3), rate, 0.3, Decay::Subtractive, seed).unwrap().failed;
            assert!(prev.is_subset(&cur));
            prev = cur;
        }
    }
}
