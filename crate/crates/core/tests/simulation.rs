//! Simulator and node-program invariants, checked against the centralized oracles.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rdomsim_core::generators::{gen_cycle, gen_random_tree, subdivide};
use rdomsim_core::graph::{girth, neighborhood_size_oracle};
use rdomsim_core::oracles::{exact_min_rds, greedy_rds, is_independent, is_r_dominating, ExactConfig};
use rdomsim_core::programs::{
    count_neighborhood_program, cycle_is_program, rmds_program, selection_oracle, RmdsOutput, SelectionMap,
};
use rdomsim_core::sim::{run_simulation, word_bits, SimConfig, SimulationReport};
use rdomsim_core::voronoi::{check_structural_lemmas, split_selection, voronoi_decompose};
use rdomsim_core::{Graph, VertexId};

fn rmds(g: &Graph, r: usize) -> SimulationReport<RmdsOutput> {
    let prog = rmds_program(r);
    let config = SimConfig { round_budget: prog.rounds(), bit_budget: Some(2 * word_bits(g.n()) + 1), trace: false };
    run_simulation(g, &prog, |_| (), &config).unwrap()
}

/// Trees, long cycles and subdivided cycles: every instance has girth >= 4r+3.
fn arb_high_girth(r: usize) -> impl Strategy<Value = Graph> {
    let need = 4 * r + 3;
    prop_oneof![
        (1usize..70, any::<u64>()).prop_map(|(n, s)| gen_random_tree(n, s).unwrap()),
        (need..3 * need).prop_map(|n| gen_cycle(n).unwrap()),
        (2usize..5, 0usize..3, any::<u64>()).prop_map(move |(extra, k, s)| {
            // a tree plus one chord, subdivided until the chord's cycle is long enough
            let t = gen_random_tree(6 + extra, s).unwrap();
            let mut edges = t.edges();
            let far = t.vertices()[t.n() - 1];
            if !t.has_edge(VertexId(0), far) {
                edges.push((VertexId(0), far));
            }
            let g = Graph::with_vertices(t.vertices().iter().copied(), edges).unwrap();
            let c = girth(&g).finite().unwrap_or(need);
            subdivide(&g, need.div_ceil(c) - 1 + k)
        }),
    ]
}

fn arb_case() -> impl Strategy<Value = (Graph, usize)> {
    (1usize..4).prop_flat_map(|r| (arb_high_girth(r), Just(r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn count_matches_oracle((g, r) in arb_case()) {
        let config = SimConfig::with_rounds(r - 1);
        let rep = run_simulation(&g, &count_neighborhood_program(r), |_| (), &config).unwrap();
        for (&v, &c) in &rep.outputs {
            prop_assert_eq!(c, neighborhood_size_oracle(&g, v, r).unwrap() as u64);
        }
    }

    #[test]
    fn rmds_matches_selection_oracle((g, r) in arb_case()) {
        prop_assert!(girth(&g).at_least(4 * r + 3));
        let rep = rmds(&g, r);
        let sel = SelectionMap::from_report(&rep);
        prop_assert_eq!(&sel, &selection_oracle(&g, r));
        prop_assert!(sel.is_consistent());
        let d: Vec<VertexId> = sel.d.iter().copied().collect();
        prop_assert!(is_r_dominating(&g, &d, r).unwrap());
        if g.m() > 0 {
            prop_assert_eq!(rep.rounds_executed, 3 * r - 1);
        }
        prop_assert!(rep.max_message_bits <= 2 * word_bits(g.n()) + 1);
    }

    #[test]
    fn runs_are_deterministic_and_conserve_messages((g, r) in arb_case()) {
        let prog = rmds_program(r);
        let config = SimConfig { round_budget: prog.rounds(), bit_budget: None, trace: true };
        let a = run_simulation(&g, &prog, |_| (), &config).unwrap();
        let b = run_simulation(&g, &prog, |_| (), &config).unwrap();
        prop_assert_eq!(&a.outputs, &b.outputs);
        prop_assert_eq!(&a.trace, &b.trace);
        prop_assert_eq!(a.messages_per_round.iter().sum::<usize>(), a.deliveries);
        prop_assert_eq!(a.messages_per_round.len(), a.rounds_executed);
        let traced: usize = a.trace.iter().flat_map(|t| &t.vertices).map(|v| v.sent.len()).sum();
        prop_assert_eq!(traced, a.deliveries);
    }

    #[test]
    fn outputs_depend_only_on_the_local_ball((g, r) in arb_case()) {
        // rmds sends in 3r-1 rounds, so the output at v is fixed by the ball of radius 3r
        let full = rmds(&g, r);
        for &v in g.vertices().iter().step_by(5) {
            let d = rdomsim_core::graph::bfs_distances(&g, v).unwrap();
            let ball: Vec<VertexId> = d.dist.iter().filter(|(_, &x)| x <= 3 * r).map(|(&u, _)| u).collect();
            let local = rmds(&g.induced_subgraph(&ball), r);
            prop_assert_eq!(local.outputs[&v], full.outputs[&v]);
        }
    }

    #[test]
    fn voronoi_partitions_and_splits((g, r) in arb_case()) {
        let Some(m) = exact_min_rds(&g, r, ExactConfig::default()).optimal().map(<[_]>::to_vec) else {
            return Ok(());
        };
        for centers in [m, greedy_rds(&g, r)] {
            let dec = voronoi_decompose(&g, &centers, r).unwrap();
            prop_assert!(dec.radius() <= r);
            let mut seen = BTreeSet::new();
            for (c, cell) in &dec.cells {
                prop_assert!(cell.contains(c));
                for &v in cell {
                    prop_assert!(seen.insert(v));
                    prop_assert_eq!(dec.cover[&v], *c);
                }
            }
            prop_assert_eq!(seen.len(), g.n());
            let f_r = if girth(&g).finite().is_some() { 3 } else { 1 };
            prop_assert!(check_structural_lemmas(&g, &dec, f_r).all());
            let sel = SelectionMap::from_report(&rmds(&g, r));
            let split = split_selection(&dec, &sel).unwrap();
            let union: BTreeSet<_> = split.d_inner.union(&split.d_outer).copied().collect();
            prop_assert_eq!(union, sel.d);
        }
    }

    #[test]
    fn cycle_reduction_from_any_gap_bounded_set(n in 5usize..60, r in 1usize..4, offset in 0usize..10) {
        let g = gen_cycle(n).unwrap();
        let step = 2 * r + 1;
        let mut d: BTreeSet<VertexId> = (0..n).filter(|i| (i + offset) % step == 0).map(|i| VertexId(i as u32)).collect();
        // the last vertex closes any long gap across the wrap-around
        let members: Vec<VertexId> = d.iter().copied().collect();
        if !is_r_dominating(&g, &members, r).unwrap() {
            d.insert(VertexId(n as u32 - 1));
        }
        let prog = cycle_is_program(r);
        let config = SimConfig { round_budget: prog.max_rounds(), bit_budget: Some(2 * word_bits(n) + 1), trace: false };
        let rep = run_simulation(&g, &prog, |v| d.contains(&v), &config).unwrap();
        let i: Vec<VertexId> = rep.outputs.iter().filter(|(_, &b)| b).map(|(&v, _)| v).collect();
        prop_assert!(is_independent(&g, &i).unwrap());
        prop_assert!(i.iter().all(|v| !d.contains(v)));
        prop_assert!(2 * i.len() + d.len() >= n);
        prop_assert!(rep.rounds_executed <= 2 * r + 1);
    }
}
