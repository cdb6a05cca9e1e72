mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use tree_route_core::routing::default_ttl;
use tree_route_core::rng::{derive_seed, seeded};
use tree_route_core::{
    build_structures, compile_rules, erdos_renyi, lookup, random_regular, simulate, Edge, Graph,
    Mode, NodeId, Outcome, PortContext, Unit,
};

fn run(g: &Graph, s: u32, d: u32, mode: Mode, failed: &[Edge]) -> tree_route_core::PacketTrace {
    let rs = build_structures(g, n(s), n(d), mode).unwrap();
    let table = compile_rules(g, &rs);
    let failures: BTreeSet<Edge> = failed.iter().copied().collect();
    simulate(g, &table, &failures, default_ttl(g))
}

fn six_node() -> Graph {
    Graph::from_edges(6, [(0, 1), (1, 5), (0, 2), (2, 3), (3, 5), (1, 3), (2, 4), (4, 5), (3, 4)]).unwrap()
}

// Traces below were executed by hand from the structures:
//   EDPs 0-1-5, 0-2-3-5
//   Multiple Trees: {0-1} then {0-2, 2-3, 2-4, 3-1} with children(2) = [3, 4]
//   One Tree: path 0-1-5, then tree {0-2, 2-3, 2-4} with 3 prioritized under 2
#[test]
fn six_node_multiple_trees_trace() {
    let trace = run(&six_node(), 0, 5, Mode::MultipleTrees, &[e(1, 5), e(3, 5)]);
    assert_eq!(
        trace.dump(),
        "unit=0 0->1\nunit=0 1->0\nunit=1 0->2\nunit=1 2->3\nunit=1 3->1\nunit=1 1->3\n\
         unit=1 3->2\nunit=1 2->4\nunit=1 4->5\nDELIVERED hops=9\n"
    );
}

#[test]
fn six_node_one_tree_trace() {
    let trace = run(&six_node(), 0, 5, Mode::OneTree, &[e(1, 5), e(3, 5)]);
    assert_eq!(
        trace.dump(),
        "unit=0 0->1\nunit=0 1->0\nunit=1 0->2\nunit=1 2->3\nunit=1 3->2\nunit=1 2->4\n\
         unit=1 4->5\nDELIVERED hops=7\n"
    );
}

#[test]
fn six_node_edp_trace() {
    let trace = run(&six_node(), 0, 5, Mode::Edp, &[e(1, 5), e(3, 5)]);
    assert_eq!(
        trace.dump(),
        "unit=0 0->1\nunit=0 1->0\nunit=1 0->2\nunit=1 2->3\nunit=1 3->2\nunit=1 2->0\n\
         FAILED reason=exhausted\n"
    );
}

#[test]
fn detour_tree_reroutes_locally() {
    let g = detour();
    let cut = [e(4, 1)];
    let edp = run(&g, DETOUR_S, DETOUR_D, Mode::Edp, &cut);
    let one = run(&g, DETOUR_S, DETOUR_D, Mode::OneTree, &cut);
    let multi = run(&g, DETOUR_S, DETOUR_D, Mode::MultipleTrees, &cut);
    assert_eq!(edp.hop_count(), Some(8));
    assert_eq!(one.hop_count(), Some(8));
    assert_eq!(multi.hop_count(), Some(5));
}

#[test]
fn detour_tree_survives_both_edp_cuts() {
    let g = detour();
    let cut = [e(4, 1), e(6, 1)];
    let failed: BTreeSet<Edge> = cut.into_iter().collect();
    assert!(reachable_avoiding(&g, n(DETOUR_S), n(DETOUR_D), &failed));
    assert!(!run(&g, DETOUR_S, DETOUR_D, Mode::Edp, &cut).delivered());
    assert_eq!(run(&g, DETOUR_S, DETOUR_D, Mode::OneTree, &cut).hop_count(), Some(9));
    assert!(run(&g, DETOUR_S, DETOUR_D, Mode::MultipleTrees, &cut).delivered());
}

#[test]
fn priority_child_first_on_priority_path() {
    let g = detour();
    let rs = build_structures(&g, n(DETOUR_S), n(DETOUR_D), Mode::OneTree).unwrap();
    let table = compile_rules(&g, &rs);
    let unit = rs.units.len() - 1;
    let Unit::Tree(t) = &rs.units[unit] else { panic!() };
    let backbone = t.priority_path().unwrap();
    for w in backbone.windows(2) {
        let incoming = t.parent(w[0]).map(|p| Edge::new(p, w[0]));
        let ctx = PortContext { unit, node: w[0], incoming };
        assert_eq!(table.candidates(&ctx).unwrap()[0], Edge::new(w[0], w[1]));
    }
}

#[test]
fn lookup_ignores_remote_failures() {
    let g = erdos_renyi(30, 0.2, 4).unwrap().graph;
    let rs = build_structures(&g, n(0), n(17), Mode::MultipleTrees).unwrap();
    let table = compile_rules(&g, &rs);
    let mut rng = seeded(9);
    use rand::Rng;
    for ctx in table.contexts().copied().collect::<Vec<PortContext>>() {
        for _ in 0..20 {
            let base: BTreeSet<Edge> =
                g.edges().iter().copied().filter(|_| rng.gen::<f64>() < 0.2).collect();
            let mut toggled = base.clone();
            for &e in g.edges() {
                if !e.contains(ctx.node) && rng.gen::<f64>() < 0.5 && !toggled.remove(&e) {
                    toggled.insert(e);
                }
            }
            assert_eq!(lookup(&table, &ctx, &base), lookup(&table, &ctx, &toggled));
        }
    }
}

fn check_scenario(g: &Graph, s: NodeId, d: NodeId, failures: &BTreeSet<Edge>) {
    let ttl = default_ttl(g);
    let mut traces = Vec::new();
    for mode in Mode::ALL {
        let rs = build_structures(g, s, d, mode).unwrap();
        let table = compile_rules(g, &rs);
        let trace = simulate(g, &table, failures, ttl);
        assert!(
            matches!(trace.outcome, Outcome::Delivered | Outcome::Failed(tree_route_core::FailReason::Exhausted)),
            "{mode}: unexpected {:?}",
            trace.outcome
        );
        let mut at = s;
        for hop in &trace.hops {
            assert_eq!(hop.from, at);
            assert!(g.has_edge(hop.from, hop.to));
            assert!(!failures.contains(&hop.edge()));
            at = hop.to;
        }
        if trace.delivered() {
            assert_eq!(at, d);
        } else {
            assert_eq!(at, s);
        }
        traces.push(trace);
    }
    let [edp, one, multi] = &traces[..] else { unreachable!() };
    if edp.delivered() {
        assert!(one.delivered() && multi.delivered());
        assert_eq!(one.hop_count(), edp.hop_count());
    }
    if failures.is_empty() {
        let shortest = build_structures(g, s, d, Mode::Edp).unwrap().edps.paths[0].len();
        assert_eq!(edp.hop_count(), Some(shortest));
        assert_eq!(one.hop_count(), Some(shortest));
        assert!(multi.delivered());
    }
    if !reachable_avoiding(g, s, d, failures) {
        assert!(traces.iter().all(|t| !t.delivered()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn schemes_agree_with_invariants(
        size in 4usize..30,
        p in 0.1f64..0.6,
        seed in any::<u64>(),
        rate in 0.0f64..0.6,
    ) {
        let Ok(gen) = erdos_renyi(size, p, seed) else { return Ok(()) };
        let g = gen.graph;
        let s = NodeId::new((seed % size as u64) as usize);
        let d = NodeId::new(((seed / 7 + 1) % size as u64) as usize);
        prop_assume!(s != d);
        use rand::Rng;
        let mut rng = seeded(derive_seed(seed, &[1]));
        let failures: BTreeSet<Edge> =
            g.edges().iter().copied().filter(|_| rng.gen::<f64>() < rate).collect();
        check_scenario(&g, s, d, &failures);
        check_scenario(&g, s, d, &BTreeSet::new());
    }

    #[test]
    fn regular_graphs_agree_with_invariants(seed in any::<u64>(), rate in 0.0f64..0.8) {
        let g = random_regular(16, 4, seed).unwrap().graph;
        let s = NodeId::new((seed % 16) as usize);
        let d = NodeId::new(((seed >> 8) % 15 + 1 + s.index() as u64) as usize % 16);
        use rand::Rng;
        let mut rng = seeded(derive_seed(seed, &[2]));
        let failures: BTreeSet<Edge> =
            g.edges().iter().copied().filter(|_| rng.gen::<f64>() < rate).collect();
        check_scenario(&g, s, d, &failures);
    }
}
