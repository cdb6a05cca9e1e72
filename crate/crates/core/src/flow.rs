//! Unit-capacity max-flow on an undirected graph.
//!
//! Each undirected edge carries at most one unit of flow in one direction.
//! Augmenting paths are found by BFS scanning neighbors in ascending id order,
//! so the resulting flow, and its decomposition, depend only on the graph.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Edge, Graph, NodeId};

pub(crate) struct UnitFlow<'g> {
    g: &'g Graph,
    /// +1: flow from the lower to the higher endpoint, -1: the reverse.
    flow: Vec<i8>,
}

impl<'g> UnitFlow<'g> {
    pub(crate) fn new(g: &'g Graph) -> Self {
        UnitFlow { g, flow: vec![0; g.edge_count()] }
    }

    fn index(&self, u: NodeId, v: NodeId) -> usize {
        self.g.edge_index(Edge::new(u, v)).expect("edge of the graph")
    }

    /// Flow currently sent from `u` to `v` over edge `idx` (-1, 0 or 1).
    fn directed(&self, idx: usize, u: NodeId, v: NodeId) -> i8 {
        if u < v {
            self.flow[idx]
        } else {
            -self.flow[idx]
        }
    }

    fn push(&mut self, idx: usize, u: NodeId, v: NodeId) {
        if u < v {
            self.flow[idx] += 1;
        } else {
            self.flow[idx] -= 1;
        }
    }

    fn augment(&mut self, s: NodeId, d: NodeId) -> bool {
        let n = self.g.node_count();
        let mut pred: Vec<Option<(NodeId, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[s.index()] = true;
        queue.push_back(s);
        'search: while let Some(u) = queue.pop_front() {
            for &w in self.g.neighbors(u) {
                if seen[w.index()] {
                    continue;
                }
                let idx = self.index(u, w);
                if self.directed(idx, u, w) >= 1 {
                    continue;
                }
                seen[w.index()] = true;
                pred[w.index()] = Some((u, idx));
                if w == d {
                    break 'search;
                }
                queue.push_back(w);
            }
        }
        if !seen[d.index()] {
            return false;
        }
        let mut v = d;
        while let Some((u, idx)) = pred[v.index()] {
            self.push(idx, u, v);
            v = u;
        }
        true
    }

    /// Runs augmentation from scratch to completion, or until `cap` units.
    pub(crate) fn max_flow(&mut self, s: NodeId, d: NodeId, cap: Option<usize>) -> usize {
        self.flow.iter_mut().for_each(|f| *f = 0);
        let mut value = 0;
        while cap.map_or(true, |c| value < c) && self.augment(s, d) {
            value += 1;
        }
        value
    }

    /// Splits the current s→d flow into `value` simple, pairwise edge-disjoint
    /// paths. Walks from `s` along unused flow-carrying edges in ascending
    /// neighbor order and cuts out any cycle the walk closes.
    pub(crate) fn decompose(&self, s: NodeId, d: NodeId, value: usize) -> Vec<Vec<NodeId>> {
        let n = self.g.node_count();
        let mut used = vec![false; self.g.edge_count()];
        let mut position = vec![usize::MAX; n];
        let mut paths = Vec::with_capacity(value);
        for _ in 0..value {
            let mut path = vec![s];
            position[s.index()] = 0;
            let mut u = s;
            while u != d {
                let next = self.g.neighbors(u).iter().find_map(|&w| {
                    let idx = self.index(u, w);
                    (!used[idx] && self.directed(idx, u, w) == 1).then_some((w, idx))
                });
                let Some((w, idx)) = next else {
                    unreachable!("flow conservation violated at {u}");
                };
                used[idx] = true;
                let at = position[w.index()];
                if at != usize::MAX {
                    for dropped in path.drain(at + 1..) {
                        position[dropped.index()] = usize::MAX;
                    }
                } else {
                    position[w.index()] = path.len();
                    path.push(w);
                }
                u = w;
            }
            for v in &path {
                position[v.index()] = usize::MAX;
            }
            paths.push(path);
        }
        paths
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_drops_cycles() {
        // 0-1-2-3 with a triangle 1-4-5-1 hanging off node 1; only one path.
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (1, 4), (4, 5), (5, 1)]).unwrap();
        let mut f = UnitFlow::new(&g);
        let value = f.max_flow(NodeId(0), NodeId(3), None);
        assert_eq!(value, 1);
        let paths = f.decompose(NodeId(0), NodeId(3), value);
        assert_eq!(paths, [vec![NodeId(0), NodeId(1), NodeId(2), NodeId(3)]]);
    }

    #[test]
    fn cap_limits_augmentation() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut f = UnitFlow::new(&g);
        assert_eq!(f.max_flow(NodeId(0), NodeId(3), Some(2)), 2);
        assert_eq!(f.max_flow(NodeId(0), NodeId(3), None), 3);
    }
}
