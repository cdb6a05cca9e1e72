#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use tree_route_core::{Edge, Graph, NodeId};

pub fn n(v: u32) -> NodeId {
    NodeId(v)
}

pub fn e(a: u32, b: u32) -> Edge {
    Edge::new(NodeId(a), NodeId(b))
}

pub fn nodes(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&x| NodeId(x)).collect()
}

/// Motivating topology: two EDPs between s and d, with spare links around d.
///
/// ```text
///  s=0 -- a=2 -- p=4 -- d=1        a=2 -- v=9 -- d
///  s   -- b=3 -- c=5 -- q=6 -- d   c -- r=7 -- d    q -- u=8 -- d
/// ```
pub const DETOUR_S: u32 = 0;
pub const DETOUR_D: u32 = 1;

pub fn detour() -> Graph {
    Graph::from_edges(
        10,
        [
            (0, 2),
            (0, 3),
            (2, 4),
            (4, 1),
            (3, 5),
            (5, 6),
            (6, 1),
            (5, 7),
            (7, 1),
            (6, 8),
            (8, 1),
            (2, 9),
            (9, 1),
        ],
    )
    .unwrap()
}

/// Minimum number of links separating `s` from `d`, by enumerating every
/// vertex bipartition with `s` on one side and `d` on the other.
pub fn brute_force_min_cut(g: &Graph, s: NodeId, d: NodeId) -> usize {
    let others: Vec<NodeId> = g.nodes().filter(|&v| v != s && v != d).collect();
    assert!(others.len() <= 20, "brute force only for small graphs");
    let mut best = usize::MAX;
    for mask in 0u32..(1 << others.len()) {
        let mut side = vec![false; g.node_count()];
        side[s.index()] = true;
        for (i, v) in others.iter().enumerate() {
            if mask & (1 << i) != 0 {
                side[v.index()] = true;
            }
        }
        let cut = g
            .edges()
            .iter()
            .filter(|e| {
                let (a, b) = e.endpoints();
                side[a.index()] != side[b.index()]
            })
            .count();
        best = best.min(cut);
    }
    best
}

/// Global min cut over all nontrivial bipartitions (node 0 fixed on one side).
pub fn brute_force_global_min_cut(g: &Graph) -> usize {
    let n = g.node_count();
    assert!(n <= 16);
    let mut best = usize::MAX;
    for mask in 0u32..(1 << (n - 1)) {
        if mask == (1 << (n - 1)) - 1 {
            continue;
        }
        let in_side = |v: usize| v == 0 || mask & (1 << (v - 1)) != 0;
        let cut = g
            .edges()
            .iter()
            .filter(|e| {
                let (a, b) = e.endpoints();
                in_side(a.index()) != in_side(b.index())
            })
            .count();
        best = best.min(cut);
    }
    best
}

/// Does some path from `s` to `d` avoid every failed link? Plain DFS.
pub fn reachable_avoiding(g: &Graph, s: NodeId, d: NodeId, failed: &BTreeSet<Edge>) -> bool {
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([s]);
    seen[s.index()] = true;
    while let Some(u) = queue.pop_front() {
        if u == d {
            return true;
        }
        for &w in g.neighbors(u) {
            if !seen[w.index()] && !failed.contains(&Edge::new(u, w)) {
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    false
}
