//! Random graph families.
//!
//! Generators are pure functions of their parameters and seed. Samples that
//! come out disconnected are thrown away and redrawn from a seed derived from
//! the caller's seed and the attempt number, up to [`MAX_ATTEMPTS`] tries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{largest_component, Edge, Graph, NodeId};
use crate::rng::{derive_seed, seeded, SimRng};
use crate::{Error, Result};

pub const MAX_ATTEMPTS: u32 = 1000;

/// A generated graph and the number of samples drawn to obtain it.
#[derive(Clone, Debug)]
pub struct Generated {
    pub graph: Graph,
    pub attempts: u32,
}

fn gnp_edges(n: usize, p: f64, rng: &mut SimRng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

fn check_gnp(n: usize, p: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameters("G(n,p) needs n >= 2"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters("G(n,p) needs 0 <= p <= 1"));
    }
    Ok(())
}

/// Connected G(n, p): every pair of nodes is linked independently with
/// probability `p`; disconnected samples are redrawn.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Generated> {
    check_gnp(n, p)?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seeded(derive_seed(seed, &[u64::from(attempt)]));
        let edges = gnp_edges(n, p, &mut rng);
        if let Ok(graph) = Graph::from_edges(n, edges) {
            return Ok(Generated { graph, attempts: attempt + 1 });
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

/// Giant component of a single G(n, p) sample.
///
/// For sparse parameters (e.g. n = 100, p = 0.02) a connected sample is
/// astronomically unlikely, so this variant keeps the largest component
/// instead. Samples whose largest component is a single node are redrawn.
pub fn erdos_renyi_giant(n: usize, p: f64, seed: u64) -> Result<Generated> {
    check_gnp(n, p)?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seeded(derive_seed(seed, &[u64::from(attempt)]));
        let edges = gnp_edges(n, p, &mut rng);
        let (graph, _) = largest_component(n, &edges)?;
        if graph.node_count() >= 2 {
            return Ok(Generated { graph, attempts: attempt + 1 });
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

/// One round of the pairing model with local rejection: stubs are shuffled and
/// paired; pairs that would form a self-loop or a duplicate edge go back into
/// the pool and are re-paired in the next round. Gives up when no remaining
/// pair of stubs could ever be joined.
fn try_pairing(n: usize, delta: usize, rng: &mut SimRng) -> Option<BTreeSet<Edge>> {
    let mut edges = BTreeSet::new();
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat(v).take(delta)).collect();
    while !stubs.is_empty() {
        let mut leftover: BTreeMap<usize, usize> = BTreeMap::new();
        stubs.shuffle(rng);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            let fresh = u != v && edges.insert(Edge::new(NodeId::new(u), NodeId::new(v)));
            if !fresh {
                *leftover.entry(u).or_default() += 1;
                *leftover.entry(v).or_default() += 1;
            }
        }
        if !pairable(&edges, &leftover) {
            return None;
        }
        stubs = leftover
            .iter()
            .flat_map(|(&v, &count)| core::iter::repeat(v).take(count))
            .collect();
    }
    Some(edges)
}

fn pairable(edges: &BTreeSet<Edge>, leftover: &BTreeMap<usize, usize>) -> bool {
    if leftover.is_empty() {
        return true;
    }
    let nodes: Vec<usize> = leftover.keys().copied().collect();
    nodes.iter().enumerate().any(|(i, &u)| {
        nodes[i + 1..]
            .iter()
            .any(|&v| !edges.contains(&Edge::new(NodeId::new(u), NodeId::new(v))))
    })
}

/// Connected simple `delta`-regular graph on `n` nodes.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Generated> {
    if delta >= n {
        return Err(Error::InvalidParameters("regular graph needs delta < n"));
    }
    if (n * delta) % 2 != 0 {
        return Err(Error::InvalidParameters("regular graph needs n * delta even"));
    }
    if delta == 0 {
        return Err(Error::InvalidParameters("regular graph needs delta >= 1"));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = seeded(derive_seed(seed, &[u64::from(attempt)]));
        let Some(edges) = try_pairing(n, delta, &mut rng) else {
            continue;
        };
        let pairs = edges.iter().map(|e| {
            let (a, b) = e.endpoints();
            (a.index(), b.index())
        });
        if let Ok(graph) = Graph::from_edges(n, pairs) {
            return Ok(Generated { graph, attempts: attempt + 1 });
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_pair() {
        let g = erdos_renyi(2, 1.0, 99).unwrap().graph;
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[Edge::new(NodeId(0), NodeId(1))]);
    }

    #[test]
    fn er_is_deterministic() {
        let a = erdos_renyi(50, 0.1, 7).unwrap();
        let b = erdos_renyi(50, 0.1, 7).unwrap();
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.attempts, b.attempts);
    }

    #[test]
    fn er_cannot_connect_without_edges() {
        assert_eq!(erdos_renyi(3, 0.0, 1).unwrap_err(), Error::GenerationFailed { attempts: MAX_ATTEMPTS });
    }

    #[test]
    fn er_rejects_bad_parameters() {
        assert!(matches!(erdos_renyi(1, 0.5, 0), Err(Error::InvalidParameters(_))));
        assert!(matches!(erdos_renyi(5, 1.5, 0), Err(Error::InvalidParameters(_))));
    }

    #[test]
    fn giant_component_of_sparse_graph() {
        let g = erdos_renyi_giant(100, 0.02, 5).unwrap().graph;
        assert!(g.node_count() >= 2 && g.node_count() <= 100);
        assert!(g.is_connected());
    }

    #[test]
    fn four_cycle_is_the_only_connected_two_regular_graph() {
        for seed in 0..20 {
            let g = random_regular(4, 2, seed).unwrap().graph;
            assert_eq!(g.edge_count(), 4);
            assert!(g.nodes().all(|v| g.degree(v) == 2));
        }
    }

    #[test]
    fn regular_degree_eight() {
        let g = random_regular(25, 8, 3).unwrap().graph;
        assert_eq!(g.node_count(), 25);
        assert_eq!(g.edge_count(), 100);
        assert!(g.nodes().all(|v| g.degree(v) == 8));
    }

    #[test]
    fn regular_parameter_checks() {
        assert!(matches!(random_regular(5, 3, 0), Err(Error::InvalidParameters(_))));
        assert!(matches!(random_regular(4, 4, 0), Err(Error::InvalidParameters(_))));
    }
}
