//! Static forwarding rules and hop-by-hop packet forwarding.
//!
//! Each routing unit is compiled into per-node candidate sequences. A node's
//! sequence lists the links it may forward on, in order: the direct link to
//! `d` (if any), then its ranked children. On the priority path of a One Tree
//! the next backbone node comes first and the direct link to `d` right after
//! it. A plain path is a chain whose only candidate is the next path link.
//!
//! A rule is keyed by `(unit, node, incoming link)`. Arriving from the parent
//! (or injected at the source) starts the sequence from the top; arriving back
//! from a child resumes right after that child. When the remaining candidates
//! are all failed the packet bounces back over the incoming link, or, at the
//! source, moves on to the next unit. Failures never enter a rule; they only
//! filter candidates at lookup time, and only incident links are consulted.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::graph::{Edge, Graph, NodeId};
use crate::structures::{RoutingStructures, Unit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortContext {
    pub unit: usize,
    pub node: NodeId,
    /// `None` when the packet is (re)injected at the source.
    pub incoming: Option<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Fallback {
    Backtrack(Edge),
    NextUnit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Rule {
    candidates: Vec<Edge>,
    fallback: Fallback,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardingTable {
    source: NodeId,
    destination: NodeId,
    units: usize,
    rules: BTreeMap<PortContext, Rule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Forward(Edge),
    /// Send back over the incoming link.
    Backtrack(Edge),
    /// At the source: start over with the next unit.
    NextUnit,
    Fail,
    Delivered,
}

/// Per-node candidate sequence and link to the parent for one unit.
struct UnitLayout {
    root: NodeId,
    seq: BTreeMap<NodeId, Vec<Edge>>,
    up: BTreeMap<NodeId, Edge>,
}

fn layout(g: &Graph, unit: &Unit, d: NodeId) -> UnitLayout {
    let mut seq = BTreeMap::new();
    let mut up = BTreeMap::new();
    match unit {
        Unit::Path(p) => {
            let nodes = p.nodes();
            for (i, w) in nodes.windows(2).enumerate() {
                let e = Edge::new(w[0], w[1]);
                seq.insert(w[0], alloc::vec![e]);
                if i + 1 < nodes.len() - 1 {
                    up.insert(w[1], e);
                }
            }
            UnitLayout { root: nodes[0], seq, up }
        }
        Unit::Tree(t) => {
            let priority_next: BTreeMap<NodeId, NodeId> = t
                .priority_path()
                .map(|p| p.windows(2).map(|w| (w[0], w[1])).collect())
                .unwrap_or_default();
            for &v in t.nodes() {
                let mut list = Vec::with_capacity(t.children(v).len() + 1);
                let exit = g.has_edge(v, d).then(|| Edge::new(v, d));
                let children = t.children(v).iter().map(|&c| Edge::new(v, c));
                match (priority_next.get(&v), exit) {
                    (Some(_), Some(exit)) => {
                        let mut children = children;
                        list.extend(children.next());
                        list.push(exit);
                        list.extend(children);
                    }
                    (_, exit) => {
                        list.extend(exit);
                        list.extend(children);
                    }
                }
                seq.insert(v, list);
                if let Some(p) = t.parent(v) {
                    up.insert(v, Edge::new(v, p));
                }
            }
            UnitLayout { root: t.root(), seq, up }
        }
    }
}

/// Compiles routing structures into the static rule set of their flow.
pub fn compile_rules(g: &Graph, rs: &RoutingStructures) -> ForwardingTable {
    let mut rules = BTreeMap::new();
    for (unit, u) in rs.units.iter().enumerate() {
        let lay = layout(g, u, rs.destination);
        for (&node, seq) in &lay.seq {
            let fallback = match lay.up.get(&node) {
                Some(&e) => Fallback::Backtrack(e),
                None => Fallback::NextUnit,
            };
            let entry = if node == lay.root { None } else { lay.up.get(&node).copied() };
            rules.insert(
                PortContext { unit, node, incoming: entry },
                Rule { candidates: seq.clone(), fallback },
            );
            for (i, &e) in seq.iter().enumerate() {
                if e.contains(rs.destination) {
                    continue;
                }
                rules.insert(
                    PortContext { unit, node, incoming: Some(e) },
                    Rule { candidates: seq[i + 1..].to_vec(), fallback },
                );
            }
        }
        if !lay.seq.contains_key(&lay.root) {
            rules.insert(
                PortContext { unit, node: lay.root, incoming: None },
                Rule { candidates: Vec::new(), fallback: Fallback::NextUnit },
            );
        }
    }
    ForwardingTable { source: rs.source, destination: rs.destination, units: rs.units.len(), rules }
}

impl ForwardingTable {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn unit_count(&self) -> usize {
        self.units
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    /// Candidate links of the rule for `ctx`, in order, without failures
    /// applied.
    pub fn candidates(&self, ctx: &PortContext) -> Option<&[Edge]> {
        self.rules.get(ctx).map(|r| r.candidates.as_slice())
    }

    /// All rule contexts, for inspection.
    pub fn contexts(&self) -> impl Iterator<Item = &PortContext> {
        self.rules.keys()
    }
}

/// Decides the next step for a packet in context `ctx`.
///
/// Only the links in the rule's candidate list (all incident to `ctx.node`)
/// are tested against `failures`, so the answer cannot depend on any failure
/// elsewhere in the network.
pub fn lookup(t: &ForwardingTable, ctx: &PortContext, failures: &BTreeSet<Edge>) -> Action {
    if ctx.node == t.destination {
        return Action::Delivered;
    }
    let Some(rule) = t.rules.get(ctx) else {
        return Action::Fail;
    };
    if let Some(&e) = rule.candidates.iter().find(|e| !failures.contains(e)) {
        return Action::Forward(e);
    }
    match rule.fallback {
        Fallback::Backtrack(e) => Action::Backtrack(e),
        Fallback::NextUnit if ctx.unit + 1 < t.units => Action::NextUnit,
        Fallback::NextUnit => Action::Fail,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub unit: usize,
    pub from: NodeId,
    pub to: NodeId,
}

impl Hop {
    pub fn edge(&self) -> Edge {
        Edge::new(self.from, self.to)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailReason {
    /// Every unit was tried and the packet is back at the source.
    Exhausted,
    /// No rule covers the packet's context.
    Uncovered,
    /// The hop bound ran out; a rule set bug, never expected.
    Loop,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::Exhausted => "exhausted",
            FailReason::Uncovered => "uncovered",
            FailReason::Loop => "loop",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Delivered,
    Failed(FailReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PacketTrace {
    pub hops: Vec<Hop>,
    pub outcome: Outcome,
}

impl PacketTrace {
    pub fn delivered(&self) -> bool {
        self.outcome == Outcome::Delivered
    }

    /// Links traversed, bounce-backs included; `None` if not delivered.
    pub fn hop_count(&self) -> Option<usize> {
        self.delivered().then_some(self.hops.len())
    }

    /// One line per hop, `unit=<i> <u>-><v>`, then `DELIVERED hops=<h>` or
    /// `FAILED reason=<reason>`.
    pub fn dump_with<F, L>(&self, mut label: F) -> String
    where
        F: FnMut(NodeId) -> L,
        L: fmt::Display,
    {
        let mut out = String::new();
        for h in &self.hops {
            let _ = writeln!(out, "unit={} {}->{}", h.unit, label(h.from), label(h.to));
        }
        let _ = match self.outcome {
            Outcome::Delivered => writeln!(out, "DELIVERED hops={}", self.hops.len()),
            Outcome::Failed(r) => writeln!(out, "FAILED reason={}", r.as_str()),
        };
        out
    }

    pub fn dump(&self) -> String {
        self.dump_with(|v| v)
    }
}

/// A hop bound every well-formed rule set stays within.
pub fn default_ttl(g: &Graph) -> usize {
    4 * g.edge_count().max(1)
}

/// Forwards a packet from the flow's source until it is delivered, the rules
/// give up, or `ttl` hops have been taken.
pub fn simulate(g: &Graph, t: &ForwardingTable, failures: &BTreeSet<Edge>, ttl: usize) -> PacketTrace {
    let mut hops = Vec::new();
    let mut ctx = PortContext { unit: 0, node: t.source, incoming: None };
    let outcome = loop {
        let next = match lookup(t, &ctx, failures) {
            Action::Delivered => break Outcome::Delivered,
            Action::Fail => {
                let reason = if ctx.node == t.source && t.rules.contains_key(&ctx) {
                    FailReason::Exhausted
                } else {
                    FailReason::Uncovered
                };
                break Outcome::Failed(reason);
            }
            Action::NextUnit => {
                ctx = PortContext { unit: ctx.unit + 1, node: t.source, incoming: None };
                continue;
            }
            Action::Forward(e) | Action::Backtrack(e) => e,
        };
        if hops.len() >= ttl {
            break Outcome::Failed(FailReason::Loop);
        }
        debug_assert!(g.contains_edge(next) && !failures.contains(&next));
        let to = next.other(ctx.node);
        hops.push(Hop { unit: ctx.unit, from: ctx.node, to });
        ctx = PortContext { unit: ctx.unit, node: to, incoming: Some(next) };
    };
    PacketTrace { hops, outcome }
}
