//! Graph, generator and oracle invariants.

use proptest::prelude::*;
use rdomsim_core::generators::{gen_cycle, gen_random_tree, subdivide};
use rdomsim_core::graph::{bfs_distances, girth, neighborhood_size_oracle, parse_graph, write_graph};
use rdomsim_core::oracles::{exact_min_rds, greedy_rds, is_r_dominating, ExactConfig};
use rdomsim_core::{Girth, Graph, VertexId};

/// Graph on `0..n` with a random edge subset.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| (a, b))).collect();
        let k = pairs.len();
        proptest::collection::vec(any::<bool>(), k).prop_map(move |keep| {
            let edges = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
            Graph::with_vertices((0..n as u32).map(VertexId), edges).unwrap()
        })
    })
}

/// Smallest dominating set by trying every subset.
fn enumerate_min(g: &Graph, r: usize) -> usize {
    let n = g.n();
    let v = g.vertices();
    (0u32..1 << n)
        .filter(|mask| {
            let set: Vec<VertexId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect();
            is_r_dominating(g, &set, r).unwrap()
        })
        .map(u32::count_ones)
        .min()
        .unwrap() as usize
}

proptest! {
    #[test]
    fn oracle_matches_bfs_ball(g in arb_graph(12), r in 1usize..5) {
        for &v in g.vertices() {
            let d = bfs_distances(&g, v).unwrap();
            let ball = d.dist.values().filter(|&&x| (1..=r).contains(&x)).count();
            prop_assert_eq!(neighborhood_size_oracle(&g, v, r).unwrap(), ball);
        }
    }

    #[test]
    fn bfs_is_symmetric(g in arb_graph(12)) {
        let maps: Vec<_> = g.vertices().iter().map(|&v| bfs_distances(&g, v).unwrap()).collect();
        for a in &maps {
            for b in &maps {
                prop_assert_eq!(a.get(b.source), b.get(a.source));
            }
        }
    }

    #[test]
    fn text_format_roundtrips(g in arb_graph(14)) {
        let back = parse_graph(&write_graph(&g).unwrap()).unwrap();
        prop_assert_eq!(back.vertices(), g.vertices());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn girth_is_shortest_cycle(g in arb_graph(9)) {
        // an edge lies on a cycle of length d(u,v)+1 once it is removed
        let mut best: Option<usize> = None;
        for (a, b) in g.edges() {
            let rest: Vec<_> = g.edges().into_iter().filter(|&e| e != (a, b)).collect();
            let h = Graph::with_vertices(g.vertices().iter().copied(), rest).unwrap();
            if let Some(d) = bfs_distances(&h, a).unwrap().get(b) {
                best = Some(best.map_or(d + 1, |x| x.min(d + 1)));
            }
        }
        let want = best.map_or(Girth::Infinite, Girth::Finite);
        prop_assert_eq!(girth(&g), want);
    }

    #[test]
    fn exact_matches_enumeration(g in arb_graph(11), r in 1usize..3) {
        let exact = exact_min_rds(&g, r, ExactConfig::default());
        let m = exact.optimal().expect("small instance finishes");
        prop_assert!(is_r_dominating(&g, m, r).unwrap());
        prop_assert_eq!(m.len(), enumerate_min(&g, r));
    }

    #[test]
    fn greedy_dominates_and_is_no_smaller(g in arb_graph(14), r in 1usize..4) {
        let greedy = greedy_rds(&g, r);
        prop_assert!(is_r_dominating(&g, &greedy, r).unwrap());
        let m = exact_min_rds(&g, r, ExactConfig::default());
        prop_assert!(greedy.len() >= m.optimal().unwrap().len());
    }

    #[test]
    fn cycle_optimum_is_ceiling(n in 3usize..60, r in 1usize..5) {
        let m = exact_min_rds(&gen_cycle(n).unwrap(), r, ExactConfig::default());
        prop_assert_eq!(m.optimal().map(<[_]>::len), Some(n.div_ceil(2 * r + 1)));
    }

    #[test]
    fn subdivision_scales_girth(g in arb_graph(7), k in 0usize..4) {
        let h = subdivide(&g, k);
        prop_assert_eq!(h.n(), g.n() + k * g.m());
        prop_assert_eq!(h.m(), (k + 1) * g.m());
        let want = match girth(&g) {
            Girth::Finite(c) => Girth::Finite((k + 1) * c),
            Girth::Infinite => Girth::Infinite,
        };
        prop_assert_eq!(girth(&h), want);
    }

    #[test]
    fn trees_are_seeded_and_acyclic(n in 1usize..80, seed in any::<u64>()) {
        let t = gen_random_tree(n, seed).unwrap();
        prop_assert_eq!(t.edges(), gen_random_tree(n, seed).unwrap().edges());
        prop_assert_eq!(t.m(), n - 1);
        prop_assert_eq!(girth(&t), Girth::Infinite);
        prop_assert_eq!(bfs_distances(&t, VertexId(0)).unwrap().dist.len(), n);
    }
}

#[test]
fn exact_handles_two_hundred_vertex_trees() {
    for seed in 1..=3 {
        let t = gen_random_tree(200, seed).unwrap();
        for r in 1..=3 {
            let m = exact_min_rds(&t, r, ExactConfig::default());
            let m = m.optimal().expect("solver finishes");
            assert!(is_r_dominating(&t, m, r).unwrap());
            assert!(m.len() <= greedy_rds(&t, r).len());
        }
    }
}
