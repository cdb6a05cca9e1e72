//! Routing structures for one source/destination pair.
//!
//! The pipeline in [`build_structures`]:
//!
//! 1. compute a maximum set of edge-disjoint s–d paths (EDPs);
//! 2. order them by length (ties broken by node sequence);
//! 3. extend the longest EDP into a single tree ([`Mode::OneTree`]) or every
//!    EDP into its own tree ([`Mode::MultipleTrees`]), longest first;
//! 4. truncate each tree so that every leaf neighbors `d`;
//! 5. rank the branches at every tree node;
//! 6. emit the routing units, shortest original EDP first.
//!
//! Trees never contain `d`. A tree keeps its originating EDP (without `d`) as
//! a root-to-leaf *backbone*; in One Tree mode the backbone is also the
//! priority path that routing follows before any other branch.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::flow::UnitFlow;
use crate::graph::{Edge, Graph, NodeId};
use crate::{Error, Result};

/// A simple s–d path as a node sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(transparent))]
pub struct Path {
    nodes: Vec<NodeId>,
}

impl Path {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Path { nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Number of links.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn target(&self) -> NodeId {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes.windows(2).map(|w| Edge::new(w[0], w[1]))
    }
}

/// Routing-attempt order: shorter first, then lexicographic by node sequence.
fn attempt_order(a: &Path, b: &Path) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.nodes.cmp(&b.nodes))
}

/// Maximum set of pairwise edge-disjoint s–d paths, in attempt order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdpSet {
    pub source: NodeId,
    pub destination: NodeId,
    pub paths: Vec<Path>,
}

impl EdpSet {
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.paths.iter().flat_map(Path::edges)
    }
}

fn check_pair(g: &Graph, s: NodeId, d: NodeId) -> Result<()> {
    for v in [s, d] {
        if !g.contains_node(v) {
            return Err(Error::NodeOutOfRange { node: v.index(), nodes: g.node_count() });
        }
    }
    if s == d {
        return Err(Error::SameEndpoints);
    }
    Ok(())
}

/// Edge-disjoint paths from a BFS-augmenting unit-capacity max-flow,
/// decomposed into simple paths. Their number equals the s–d min cut.
pub fn compute_edps(g: &Graph, s: NodeId, d: NodeId) -> Result<EdpSet> {
    check_pair(g, s, d)?;
    let mut flow = UnitFlow::new(g);
    let value = flow.max_flow(s, d, None);
    let mut paths: Vec<Path> = flow.decompose(s, d, value).into_iter().map(Path::new).collect();
    paths.sort_by(attempt_order);
    Ok(EdpSet { source: s, destination: d, paths })
}

/// A tree rooted at the source, grown around one EDP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    root: NodeId,
    /// Every parent precedes its children.
    nodes: Vec<NodeId>,
    /// Indexed by graph node id.
    parent: Vec<Option<NodeId>>,
    /// Child lists indexed by graph node id; ranked order once
    /// [`rank_branches`] has run.
    children: Vec<Vec<NodeId>>,
    backbone: Vec<NodeId>,
    prioritized: bool,
}

impl Tree {
    fn chain(n: usize, backbone: &[NodeId], prioritized: bool) -> Self {
        let root = backbone[0];
        let mut tree = Tree {
            root,
            nodes: alloc::vec![root],
            parent: alloc::vec![None; n],
            children: alloc::vec![Vec::new(); n],
            backbone: backbone.to_vec(),
            prioritized,
        };
        for w in backbone.windows(2) {
            tree.attach(w[0], w[1]);
        }
        tree
    }

    fn attach(&mut self, parent: NodeId, child: NodeId) {
        self.nodes.push(child);
        self.parent[child.index()] = Some(parent);
        self.children[parent.index()].push(child);
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Tree nodes, parents before children.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v == self.root || self.parent(v).is_some()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(v.index()).copied().flatten()
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        self.children.get(v.index()).map_or(&[], Vec::as_slice)
    }

    /// Tree edges, one per non-root node, in node order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes[1..].iter().map(|&v| Edge::new(v, self.parent[v.index()].expect("non-root")))
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied().filter(|v| self.children(*v).is_empty())
    }

    /// The originating EDP without the destination.
    pub fn backbone(&self) -> &[NodeId] {
        &self.backbone
    }

    /// The backbone, if routing must try it before every other branch.
    pub fn priority_path(&self) -> Option<&[NodeId]> {
        self.prioritized.then_some(self.backbone.as_slice())
    }

    /// A tree reduced to its root carries no route and is skipped by routing.
    pub fn is_bare(&self) -> bool {
        self.nodes.len() == 1
    }

    fn without_destination(path: &Path) -> &[NodeId] {
        &path.nodes[..path.nodes.len() - 1]
    }
}

/// Grows the longest EDP into a tree.
///
/// The frontier starts as the EDP's nodes (minus `d`) and is scanned in
/// insertion order; every neighbor that is not yet in the tree, not on any
/// other EDP and not `d` is attached to the node that discovered it. Among
/// equally long EDPs the last in attempt order is extended, so that the tree
/// is the final routing unit.
pub fn extend_one_tree(g: &Graph, edps: &EdpSet) -> Tree {
    let (chosen, longest) = edps
        .paths
        .iter()
        .enumerate()
        .max_by(|a, b| attempt_order(a.1, b.1))
        .expect("at least one EDP");
    let d = edps.destination;
    let s = edps.source;
    let mut blocked = alloc::vec![false; g.node_count()];
    for (i, p) in edps.paths.iter().enumerate() {
        if i != chosen {
            for &v in &p.nodes {
                blocked[v.index()] = true;
            }
        }
    }
    blocked[s.index()] = false;
    blocked[d.index()] = true;
    let mut tree = Tree::chain(g.node_count(), Tree::without_destination(longest), true);
    let mut it = 0;
    while it < tree.nodes.len() {
        let v = tree.nodes[it];
        for &w in g.neighbors(v) {
            if !blocked[w.index()] && !tree.contains(w) {
                tree.attach(v, w);
            }
        }
        it += 1;
    }
    tree
}

/// Grows every EDP into its own tree, longest EDP first.
///
/// Same frontier scan as [`extend_one_tree`], but exclusion is by edge: a
/// neighbor is attached when the connecting link is claimed by no tree and no
/// EDP, the neighbor is not `d`, and it is not already in this tree. Trees are
/// therefore pairwise edge-disjoint but may share nodes. Returned in
/// construction order (descending attempt order).
pub fn extend_multiple_trees(g: &Graph, edps: &EdpSet) -> Vec<Tree> {
    let d = edps.destination;
    let mut claimed = alloc::vec![false; g.edge_count()];
    for e in edps.edges() {
        claimed[g.edge_index(e).expect("EDP edge in graph")] = true;
    }
    let mut order: Vec<&Path> = edps.paths.iter().collect();
    order.sort_by(|a, b| attempt_order(b, a));
    let mut trees = Vec::with_capacity(order.len());
    for path in order {
        let mut tree = Tree::chain(g.node_count(), Tree::without_destination(path), false);
        let mut it = 0;
        while it < tree.nodes.len() {
            let v = tree.nodes[it];
            for &w in g.neighbors(v) {
                if w == d || tree.contains(w) {
                    continue;
                }
                let slot = &mut claimed[g.edge_index(Edge::new(v, w)).expect("graph edge")];
                if !*slot {
                    *slot = true;
                    tree.attach(v, w);
                }
            }
            it += 1;
        }
        trees.push(tree);
    }
    trees
}

/// Prunes every branch that leads to no neighbor of `d`.
///
/// Keeps exactly the nodes on a root path of some tree node adjacent to `d`.
/// The root is always kept, so a tree with no such node shrinks to a bare
/// root. One reverse pass over the node order, linear in the tree size.
pub fn truncate_tree(g: &Graph, t: &Tree, d: NodeId) -> Tree {
    let n = t.parent.len();
    let mut keep = alloc::vec![false; n];
    for &v in t.nodes.iter().rev() {
        keep[v.index()] = g.has_edge(v, d) || t.children(v).iter().any(|c| keep[c.index()]);
    }
    keep[t.root.index()] = true;
    let nodes: Vec<NodeId> = t.nodes.iter().copied().filter(|v| keep[v.index()]).collect();
    let mut parent = alloc::vec![None; n];
    let mut children = alloc::vec![Vec::new(); n];
    for &v in &nodes {
        if v != t.root {
            parent[v.index()] = t.parent(v);
        }
        children[v.index()] = t.children(v).iter().copied().filter(|c| keep[c.index()]).collect();
    }
    let backbone = t.backbone.iter().copied().take_while(|v| keep[v.index()]).collect();
    Tree { root: t.root, nodes, parent, children, backbone, prioritized: t.prioritized }
}

/// Hops from each tree node to the nearest node of its subtree that neighbors
/// `d` (`usize::MAX` if there is none).
pub fn distances_to_exit(g: &Graph, t: &Tree, d: NodeId) -> BTreeMap<NodeId, usize> {
    let dist = exit_distances(g, t, d);
    t.nodes.iter().map(|&v| (v, dist[v.index()])).collect()
}

/// As [`distances_to_exit`], indexed by node id.
fn exit_distances(g: &Graph, t: &Tree, d: NodeId) -> Vec<usize> {
    let mut dist = alloc::vec![usize::MAX; t.parent.len()];
    for &v in t.nodes.iter().rev() {
        dist[v.index()] = if g.has_edge(v, d) {
            0
        } else {
            t.children(v)
                .iter()
                .map(|c| dist[c.index()])
                .min()
                .map_or(usize::MAX, |m: usize| m.saturating_add(1))
        };
    }
    dist
}

/// Orders the children of every node by their distance to the nearest exit
/// toward `d` (ties by node id). On a priority path the next backbone node is
/// moved to the front regardless of distance.
pub fn rank_branches(g: &Graph, t: &Tree, d: NodeId) -> Tree {
    let dist = exit_distances(g, t, d);
    let mut ranked = t.clone();
    for list in ranked.children.iter_mut().filter(|l| l.len() > 1) {
        list.sort_by_key(|c| (dist[c.index()], *c));
    }
    if ranked.prioritized {
        let backbone = ranked.backbone.clone();
        for w in backbone.windows(2) {
            let list = &mut ranked.children[w[0].index()];
            if let Some(pos) = list.iter().position(|&c| c == w[1]) {
                list[..=pos].rotate_right(1);
            }
        }
    }
    ranked
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Mode {
    Edp,
    OneTree,
    MultipleTrees,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Edp, Mode::OneTree, Mode::MultipleTrees];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Edp => "edp",
            Mode::OneTree => "one-tree",
            Mode::MultipleTrees => "multiple-trees",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edp" | "edps" => Ok(Mode::Edp),
            "one-tree" | "onetree" => Ok(Mode::OneTree),
            "multiple-trees" | "multipletrees" => Ok(Mode::MultipleTrees),
            _ => Err(Error::InvalidParameters("scheme must be edp, one-tree or multiple-trees")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unit {
    Path(Path),
    Tree(Tree),
}

impl Unit {
    pub fn edge_count(&self) -> usize {
        match self {
            Unit::Path(p) => p.len(),
            Unit::Tree(t) => t.edge_count(),
        }
    }
}

/// Everything a source needs to route toward one destination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingStructures {
    pub source: NodeId,
    pub destination: NodeId,
    pub mode: Mode,
    pub edps: EdpSet,
    /// Routing-attempt order: ascending by the length of the originating EDP.
    pub units: Vec<Unit>,
}

impl RoutingStructures {
    pub fn tree_count(&self) -> usize {
        self.units.iter().filter(|u| matches!(u, Unit::Tree(_))).count()
    }

    /// Links used by all units (tree edges, or path edges for plain paths).
    pub fn structure_edges(&self) -> usize {
        self.units.iter().map(Unit::edge_count).sum()
    }
}

pub fn build_structures(g: &Graph, s: NodeId, d: NodeId, mode: Mode) -> Result<RoutingStructures> {
    let edps = compute_edps(g, s, d)?;
    let finish = |t: &Tree| rank_branches(g, &truncate_tree(g, t, d), d);
    let units = match mode {
        Mode::Edp => edps.paths.iter().cloned().map(Unit::Path).collect(),
        Mode::OneTree => {
            let tree = finish(&extend_one_tree(g, &edps));
            // attempt order puts the extended (maximal) EDP last
            let k = edps.paths.len();
            edps.paths[..k - 1]
                .iter()
                .cloned()
                .map(Unit::Path)
                .chain(core::iter::once(Unit::Tree(tree)))
                .collect()
        }
        Mode::MultipleTrees => {
            let mut trees: Vec<Unit> =
                extend_multiple_trees(g, &edps).iter().map(|t| Unit::Tree(finish(t))).collect();
            trees.reverse();
            trees
        }
    };
    Ok(RoutingStructures { source: s, destination: d, mode, edps, units })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn n(v: u32) -> NodeId {
        NodeId(v)
    }

    fn nodes(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&x| NodeId(x)).collect()
    }

    #[test]
    fn single_path() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let edps = compute_edps(&g, n(0), n(2)).unwrap();
        assert_eq!(edps.paths, [Path::new(nodes(&[0, 1, 2]))]);
        let t = extend_one_tree(&g, &edps);
        assert_eq!(t.nodes(), nodes(&[0, 1]));
        assert_eq!(t.edges().collect::<Vec<_>>(), [Edge::new(n(0), n(1))]);
        assert_eq!(t.priority_path(), Some(nodes(&[0, 1]).as_slice()));
    }

    #[test]
    fn four_cycle_has_two_paths() {
        // s=0, a=1, d=2, b=3
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let edps = compute_edps(&g, n(0), n(2)).unwrap();
        assert_eq!(edps.paths, [Path::new(nodes(&[0, 1, 2])), Path::new(nodes(&[0, 3, 2]))]);
    }

    #[test]
    fn same_endpoints_rejected() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(compute_edps(&g, n(1), n(1)), Err(Error::SameEndpoints));
    }

    #[test]
    fn truncation_drops_dead_branch() {
        // backbone s=0, a=1, b=2; d=3 adjacent to b only; dangling c=4 under b
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (2, 4)]).unwrap();
        let mut t = Tree::chain(g.node_count(), &nodes(&[0, 1, 2]), false);
        t.attach(n(2), n(4));
        let cut = truncate_tree(&g, &t, n(3));
        assert_eq!(cut.nodes(), nodes(&[0, 1, 2]));
        assert!(cut.children(n(2)).is_empty());
        assert_eq!(truncate_tree(&g, &cut, n(3)), cut);
    }

    #[test]
    fn truncation_without_exit_leaves_bare_root() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = Tree::chain(g.node_count(), &nodes(&[0, 1]), false);
        let cut = truncate_tree(&g, &t, n(3));
        assert!(cut.is_bare());
        assert_eq!(cut.root(), n(0));
    }

    #[test]
    fn ranking_prefers_nearer_exit() {
        // root 0 with child 1 (neighbors d=9 directly) and child 2 -> 3 -> 4 (4 neighbors d)
        let g = Graph::from_edges(
            10,
            [(0, 1), (0, 2), (2, 3), (3, 4), (1, 9), (4, 9), (5, 6), (6, 7), (7, 8), (8, 9), (5, 0)],
        )
        .unwrap();
        let mut t = Tree::chain(g.node_count(), &nodes(&[0, 2, 3, 4]), false);
        t.attach(n(0), n(1));
        let ranked = rank_branches(&g, &t, n(9));
        assert_eq!(ranked.children(n(0)), nodes(&[1, 2]));
    }

    #[test]
    fn priority_child_overrides_distance() {
        let g = Graph::from_edges(
            10,
            [(0, 1), (0, 2), (2, 3), (3, 4), (1, 9), (4, 9), (5, 6), (6, 7), (7, 8), (8, 9), (5, 0)],
        )
        .unwrap();
        let mut t = Tree::chain(g.node_count(), &nodes(&[0, 2, 3, 4]), true);
        t.attach(n(0), n(1));
        let ranked = rank_branches(&g, &t, n(9));
        assert_eq!(ranked.children(n(0)), nodes(&[2, 1]));
    }

    #[test]
    fn two_disjoint_paths_give_two_bare_backbones() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)]).unwrap();
        let edps = compute_edps(&g, n(0), n(5)).unwrap();
        let trees = extend_multiple_trees(&g, &edps);
        assert_eq!(trees.len(), 2);
        for (t, p) in trees.iter().zip(edps.paths.iter().rev()) {
            assert_eq!(t.nodes(), &p.nodes()[..p.nodes().len() - 1]);
        }
    }

    #[test]
    fn one_tree_is_last_unit() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let rs = build_structures(&g, n(0), n(2), Mode::OneTree).unwrap();
        assert_eq!(rs.units.len(), 2);
        assert!(matches!(rs.units[0], Unit::Path(_)));
        let Unit::Tree(t) = &rs.units[1] else { panic!("tree expected") };
        assert_eq!(t.backbone(), nodes(&[0, 3]));
        let edp = build_structures(&g, n(0), n(2), Mode::Edp).unwrap();
        assert_eq!(edp.units, vec![Unit::Path(Path::new(nodes(&[0, 1, 2]))), Unit::Path(Path::new(nodes(&[0, 3, 2])))]);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
    }
}
