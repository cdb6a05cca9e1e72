//! Undirected simple graphs with dense node ids.
//!
//! A [`Graph`] is immutable once built. Neighbor lists are sorted ascending,
//! and the canonical edge list is sorted by `(lo, hi)`. Every traversal in the
//! crate scans neighbors in that order, which makes all derived structures
//! deterministic for a given graph.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::flow::UnitFlow;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn new(index: usize) -> Self {
        NodeId(index as u32)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An undirected link, stored with its endpoints in ascending order so that
/// `(u, v)` and `(v, u)` compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    lo: NodeId,
    hi: NodeId,
}

impl Edge {
    /// Panics on a self-loop.
    pub fn new(u: NodeId, v: NodeId) -> Self {
        assert_ne!(u, v, "self-loop edge");
        if u < v {
            Edge { lo: u, hi: v }
        } else {
            Edge { lo: v, hi: u }
        }
    }

    pub fn endpoints(self) -> (NodeId, NodeId) {
        (self.lo, self.hi)
    }

    pub fn contains(self, v: NodeId) -> bool {
        self.lo == v || self.hi == v
    }

    /// The endpoint that is not `v`. `v` must be an endpoint.
    pub fn other(self, v: NodeId) -> NodeId {
        debug_assert!(self.contains(v));
        if self.lo == v {
            self.hi
        } else {
            self.lo
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edges: Vec<Edge>,
}

impl Graph {
    /// Builds a connected simple graph on nodes `0..n`.
    ///
    /// Duplicate edges (in either orientation) collapse into one. Self-loops
    /// and out-of-range endpoints are rejected, as is a disconnected result.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::NodeOutOfRange { node: w, nodes: n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            list.push(Edge::new(NodeId::new(u), NodeId::new(v)));
        }
        let g = Self::build(n, list);
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    fn build(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            let (a, b) = e.endpoints();
            adj[a.index()].push(b);
            adj[b.index()].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { adj, edges }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adj.len()).map(NodeId::new)
    }

    /// Canonical edges, sorted ascending.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn contains_node(&self, v: NodeId) -> bool {
        v.index() < self.adj.len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.contains_node(u) && self.adj[u.index()].binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Position of `e` in [`Graph::edges`].
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Hop distances from `from`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, from: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[from.index()] = Some(0);
        queue.push_back(from);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap_or(0);
            for &w in self.neighbors(u) {
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_distances(NodeId(0)).iter().all(Option::is_some)
    }
}

/// Component label per node, numbered in order of each component's smallest
/// node id.
fn component_labels(n: usize, adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        stack.push(start);
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if label[w] == usize::MAX {
                    label[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Reduces an arbitrary edge list over nodes `0..n` to its largest connected
/// component.
///
/// Self-loops are dropped and parallel edges collapsed. Returns the relabelled
/// graph together with, for each new node id, the original index. Ties between
/// equally large components go to the one holding the smallest original id.
pub fn largest_component(n: usize, edges: &[(usize, usize)]) -> Result<(Graph, Vec<usize>)> {
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        for w in [u, v] {
            if w >= n {
                return Err(Error::NodeOutOfRange { node: w, nodes: n });
            }
        }
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let (label, count) = component_labels(n, &adj);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    // first maximum wins, i.e. the component with the smallest member id
    let mut best = 0;
    for (c, &size) in sizes.iter().enumerate() {
        if size > sizes[best] {
            best = c;
        }
    }
    let original: Vec<usize> = (0..n).filter(|&v| label[v] == best).collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in original.iter().enumerate() {
        new_id[v] = i;
    }
    let kept = edges
        .iter()
        .filter(|&&(u, v)| u != v && label[u] == best)
        .map(|&(u, v)| Edge::new(NodeId::new(new_id[u]), NodeId::new(new_id[v])))
        .collect();
    Ok((Graph::build(original.len(), kept), original))
}

/// Global edge connectivity: the fewest links whose removal disconnects `g`.
///
/// Computed exactly as the minimum over `v != 0` of the unit-capacity max-flow
/// between node 0 and `v`. A single-node graph has connectivity 0.
pub fn edge_connectivity(g: &Graph) -> usize {
    let n = g.node_count();
    if n < 2 {
        return 0;
    }
    let root = NodeId(0);
    let mut best = g.degree(root);
    for v in 1..n {
        let mut flow = UnitFlow::new(g);
        let value = flow.max_flow(root, NodeId::new(v), Some(best));
        best = best.min(value);
        if best == 0 {
            break;
        }
    }
    best
}

/// s–d edge connectivity (local min cut).
pub fn local_edge_connectivity(g: &Graph, s: NodeId, d: NodeId) -> usize {
    if s == d {
        return 0;
    }
    UnitFlow::new(g).max_flow(s, d, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn cycle4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn edge_is_unordered() {
        assert_eq!(Edge::new(NodeId(3), NodeId(1)), Edge::new(NodeId(1), NodeId(3)));
        assert_eq!(Edge::new(NodeId(3), NodeId(1)).other(NodeId(3)), NodeId(1));
    }

    #[test]
    fn adjacency_sorted_and_symmetric() {
        let g = Graph::from_edges(4, [(3, 0), (0, 1), (2, 0), (1, 0)]).unwrap();
        assert_eq!(g.neighbors(NodeId(0)), &[NodeId(1), NodeId(2), NodeId(3)]);
        assert_eq!(g.edge_count(), 3);
        for u in g.nodes() {
            for &v in g.neighbors(u) {
                assert!(g.neighbors(v).contains(&u));
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Graph::from_edges(0, []), Err(Error::EmptyGraph));
        assert_eq!(Graph::from_edges(2, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(2, [(0, 2)]),
            Err(Error::NodeOutOfRange { node: 2, nodes: 2 })
        );
        assert_eq!(Graph::from_edges(3, [(0, 1)]), Err(Error::Disconnected));
    }

    #[test]
    fn keeps_largest_component() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7), (7, 7), (1, 0)];
        let (g, original) = largest_component(8, &edges).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(original, [0, 1, 2, 3, 4]);
    }

    #[test]
    fn connectivity_of_small_graphs() {
        assert_eq!(edge_connectivity(&path3()), 1);
        assert_eq!(edge_connectivity(&cycle4()), 2);
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(edge_connectivity(&k4), 3);
    }

    #[test]
    fn bfs_distances_on_cycle() {
        let d = cycle4().bfs_distances(NodeId(0));
        assert_eq!(d, [Some(0), Some(1), Some(2), Some(1)]);
    }
}
