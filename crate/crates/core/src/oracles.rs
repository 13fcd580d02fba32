//! Sequential ground truth: domination and independence predicates, an
//! exact minimum distance-`r` dominating set solver, and a greedy baseline.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use crate::graph::{Graph, GraphError, VertexId};

/// A graph with every closed ball `N^r[v]` precomputed as a bitset over
/// vertex indices. Balls are symmetric: `u ∈ N^r[v]` iff `v ∈ N^r[u]`.
#[derive(Clone, Debug)]
pub struct DominationInstance<'g> {
    pub graph: &'g Graph,
    pub r: usize,
    balls: Vec<FixedBitSet>,
}

impl<'g> DominationInstance<'g> {
    pub fn new(graph: &'g Graph, r: usize) -> Self {
        let n = graph.n();
        let balls = (0..n)
            .map(|v| {
                let mut b = FixedBitSet::with_capacity(n);
                for u in graph.ball_indices(v, r) {
                    b.insert(u);
                }
                b
            })
            .collect();
        DominationInstance { graph, r, balls }
    }

    /// `N^r[v]` in ascending ID order.
    pub fn closed_ball(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let i = self.graph.require(v)?;
        Ok(self.balls[i].ones().map(|u| self.graph.id(u)).collect())
    }

    fn ids(&self, idx: &[usize]) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = idx.iter().map(|&i| self.graph.id(i)).collect();
        out.sort_unstable();
        out
    }
}

fn indices(g: &Graph, set: &[VertexId]) -> Result<Vec<usize>, GraphError> {
    set.iter().map(|&v| g.require(v)).collect()
}

/// True iff every vertex is within distance `r` of some member of `d`.
pub fn is_r_dominating(g: &Graph, d: &[VertexId], r: usize) -> Result<bool, GraphError> {
    let sources = indices(g, d)?;
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] >= r {
            continue;
        }
        for &w in g.adj(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    Ok(dist.iter().all(|&d| d != usize::MAX))
}

/// True iff no edge has both endpoints in `set`.
pub fn is_independent(g: &Graph, set: &[VertexId]) -> Result<bool, GraphError> {
    let mut mask = vec![false; g.n()];
    for i in indices(g, set)? {
        mask[i] = true;
    }
    Ok((0..g.n()).filter(|&v| mask[v]).all(|v| g.adj(v).iter().all(|&u| !mask[u])))
}

/// Repeatedly takes the vertex whose ball covers the most uncovered
/// vertices, preferring the smaller ID on ties. Result is sorted.
pub fn greedy_rds(g: &Graph, r: usize) -> Vec<VertexId> {
    let inst = DominationInstance::new(g, r);
    inst.ids(&greedy_indices(&inst.balls, g.n()))
}

fn greedy_indices(balls: &[FixedBitSet], n: usize) -> Vec<usize> {
    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.insert_range(..);
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (best, _) = (0..n)
            .map(|v| (v, balls[v].intersection_count(&uncovered)))
            .max_by_key(|&(v, gain)| (gain, std::cmp::Reverse(v)))
            .expect("uncovered vertices exist");
        uncovered.difference_with(&balls[best]);
        chosen.push(best);
    }
    chosen
}

/// Limits for [`exact_min_rds`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    pub max_vertices: usize,
    pub node_budget: u64,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { max_vertices: 200, node_budget: 10_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    TooLarge { n: usize, cap: usize },
    BudgetExhausted { nodes: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    /// A dominating set of minimum cardinality (which optimum is unspecified).
    Optimal(Vec<VertexId>),
    /// The search gave up; `best` is the smallest dominating set found.
    Unknown { reason: UnknownReason, best: Vec<VertexId> },
}

impl ExactOutcome {
    pub fn optimal(&self) -> Option<&[VertexId]> {
        match self {
            ExactOutcome::Optimal(set) => Some(set),
            ExactOutcome::Unknown { .. } => None,
        }
    }
}

/// Minimum distance-`r` dominating set by branch and bound over closed balls.
///
/// Each search node first applies reductions until none fire: an element
/// with a single remaining coverer forces it; a ball whose useful part is
/// contained in another's is dropped; an element whose coverers include all
/// coverers of another element is implied by it and dropped. It then prunes
/// against the incumbent with the larger of `ceil(|uncovered| / max gain)`
/// and a packing bound (elements with pairwise disjoint coverer sets), and
/// branches on the uncovered element with the fewest coverers, excluding
/// coverers already tried in sibling branches. The incumbent starts at the
/// greedy solution.
pub fn exact_min_rds(g: &Graph, r: usize, config: ExactConfig) -> ExactOutcome {
    let inst = DominationInstance::new(g, r);
    let greedy = greedy_indices(&inst.balls, g.n());
    if g.n() > config.max_vertices {
        return ExactOutcome::Unknown {
            reason: UnknownReason::TooLarge { n: g.n(), cap: config.max_vertices },
            best: inst.ids(&greedy),
        };
    }
    let mut search = Search { balls: &inst.balls, best: greedy, nodes: 0, budget: config.node_budget, aborted: false };
    let mut all = FixedBitSet::with_capacity(g.n());
    all.insert_range(..);
    search.run(all.clone(), all, Vec::new());
    let best = inst.ids(&search.best);
    if search.aborted {
        ExactOutcome::Unknown { reason: UnknownReason::BudgetExhausted { nodes: search.nodes }, best }
    } else {
        ExactOutcome::Optimal(best)
    }
}

struct Search<'a> {
    balls: &'a [FixedBitSet],
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn coverers(&self, e: usize, allowed: &FixedBitSet) -> FixedBitSet {
        let mut c = self.balls[e].clone();
        c.intersect_with(allowed);
        c
    }

    /// Applies reductions in place. Returns false if some element can no
    /// longer be covered.
    fn reduce(&self, uncovered: &mut FixedBitSet, allowed: &mut FixedBitSet, chosen: &mut Vec<usize>) -> bool {
        'fixpoint: loop {
            if uncovered.is_clear() {
                return true;
            }
            for e in uncovered.ones() {
                let cov = self.coverers(e, allowed);
                match cov.count_ones(..) {
                    0 => return false,
                    1 => {
                        let u = cov.ones().next().unwrap();
                        chosen.push(u);
                        uncovered.difference_with(&self.balls[u]);
                        allowed.set(u, false);
                        continue 'fixpoint;
                    }
                    _ => {}
                }
            }

            let mut changed = false;
            let cands: Vec<usize> = allowed.ones().collect();
            let gains: Vec<FixedBitSet> = cands
                .iter()
                .map(|&a| {
                    let mut g = self.balls[a].clone();
                    g.intersect_with(uncovered);
                    g
                })
                .collect();
            for (i, &a) in cands.iter().enumerate() {
                let dominated = gains[i].is_clear()
                    || cands.iter().enumerate().any(|(j, &b)| {
                        j != i
                            && allowed.contains(b)
                            && gains[i].is_subset(&gains[j])
                            && (gains[i] != gains[j] || b < a)
                    });
                if dominated {
                    allowed.set(a, false);
                    changed = true;
                }
            }

            let elems: Vec<usize> = uncovered.ones().collect();
            let covs: Vec<FixedBitSet> = elems.iter().map(|&e| self.coverers(e, allowed)).collect();
            for (i, &f) in elems.iter().enumerate() {
                let implied = elems.iter().enumerate().any(|(j, &e)| {
                    j != i && uncovered.contains(e) && covs[j].is_subset(&covs[i]) && (covs[j] != covs[i] || e < f)
                });
                if implied {
                    uncovered.set(f, false);
                    changed = true;
                }
            }

            if !changed {
                return true;
            }
        }
    }

    fn lower_bound(&self, uncovered: &FixedBitSet, allowed: &FixedBitSet) -> usize {
        let size = uncovered.count_ones(..);
        if size == 0 {
            return 0;
        }
        let max_gain = allowed.ones().map(|a| self.balls[a].intersection_count(uncovered)).max().unwrap_or(0).max(1);
        let ratio = size.div_ceil(max_gain);

        let mut elems: Vec<(usize, FixedBitSet)> = uncovered.ones().map(|e| (e, self.coverers(e, allowed))).collect();
        elems.sort_by_key(|(e, c)| (c.count_ones(..), *e));
        let mut used = FixedBitSet::with_capacity(allowed.len());
        let mut packing = 0;
        for (_, c) in &elems {
            if c.is_disjoint(&used) {
                used.union_with(c);
                packing += 1;
            }
        }
        ratio.max(packing)
    }

    fn run(&mut self, mut uncovered: FixedBitSet, mut allowed: FixedBitSet, mut chosen: Vec<usize>) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if !self.reduce(&mut uncovered, &mut allowed, &mut chosen) {
            return;
        }
        if chosen.len() >= self.best.len() {
            return;
        }
        if uncovered.is_clear() {
            self.best = chosen;
            return;
        }
        if chosen.len() + self.lower_bound(&uncovered, &allowed) >= self.best.len() {
            return;
        }
        let (_, pivot) = uncovered
            .ones()
            .map(|e| {
                let c = self.coverers(e, &allowed);
                (c.count_ones(..), e)
            })
            .min()
            .expect("uncovered is non-empty");
        let mut options: Vec<(usize, usize)> =
            self.coverers(pivot, &allowed).ones().map(|c| (self.balls[c].intersection_count(&uncovered), c)).collect();
        options.sort_by_key(|&(gain, c)| (std::cmp::Reverse(gain), c));
        for (_, c) in options {
            let mut next_uncovered = uncovered.clone();
            next_uncovered.difference_with(&self.balls[c]);
            allowed.set(c, false);
            let mut next_chosen = chosen.clone();
            next_chosen.push(c);
            self.run(next_uncovered, allowed.clone(), next_chosen);
            if self.aborted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cycle, gen_path, gen_random_tree};
    use crate::graph::build_graph;

    fn ids(v: &[u32]) -> Vec<VertexId> {
        v.iter().map(|&i| VertexId(i)).collect()
    }

    fn exact_size(g: &Graph, r: usize) -> usize {
        let out = exact_min_rds(g, r, ExactConfig::default());
        let set = out.optimal().expect("solver finished");
        assert!(is_r_dominating(g, set, r).unwrap());
        set.len()
    }

    #[test]
    fn domination_examples() {
        let c9 = gen_cycle(9).unwrap();
        assert!(is_r_dominating(&c9, &ids(&[0, 3, 6]), 1).unwrap());
        assert!(!is_r_dominating(&c9, &ids(&[0]), 1).unwrap());
        assert!(is_r_dominating(&gen_path(5).unwrap(), &ids(&[2]), 2).unwrap());
        assert!(is_r_dominating(&c9, &ids(&[42]), 1).is_err());
    }

    #[test]
    fn independence_examples() {
        let c9 = gen_cycle(9).unwrap();
        assert!(is_independent(&c9, &ids(&[1, 4, 7])).unwrap());
        assert!(!is_independent(&gen_cycle(4).unwrap(), &ids(&[0, 1])).unwrap());
        assert!(is_independent(&c9, &[]).unwrap());
        assert!(is_independent(&c9, &ids(&[99])).is_err());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_size(&gen_cycle(9).unwrap(), 1), 3);
        assert_eq!(exact_size(&gen_path(7).unwrap(), 1), 3);
        assert_eq!(exact_size(&gen_cycle(15).unwrap(), 2), 3);
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(greedy_rds(&gen_cycle(9).unwrap(), 1), ids(&[0, 3, 6]));
        let k1 = Graph::with_vertices([VertexId(4)], Vec::<(u32, u32)>::new()).unwrap();
        assert_eq!(greedy_rds(&k1, 1), ids(&[4]));
    }

    #[test]
    fn exact_on_larger_trees_finishes() {
        for seed in 1..=3 {
            let g = gen_random_tree(200, seed).unwrap();
            for r in 1..=3 {
                let out = exact_min_rds(&g, r, ExactConfig::default());
                let set = out.optimal().unwrap();
                assert!(set.len() <= greedy_rds(&g, r).len());
                assert!(is_r_dominating(&g, set, r).unwrap());
            }
        }
    }

    #[test]
    fn exact_reports_unknown() {
        let g = gen_cycle(30).unwrap();
        let cap = ExactConfig { max_vertices: 10, node_budget: 10 };
        assert!(matches!(
            exact_min_rds(&g, 1, cap),
            ExactOutcome::Unknown { reason: UnknownReason::TooLarge { n: 30, cap: 10 }, .. }
        ));
        let tiny = ExactConfig { max_vertices: 100, node_budget: 0 };
        match exact_min_rds(&g, 1, tiny) {
            ExactOutcome::Unknown { reason: UnknownReason::BudgetExhausted { .. }, best } => {
                assert!(is_r_dominating(&g, &best, 1).unwrap());
            }
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn disconnected_and_isolated() {
        let g = Graph::with_vertices([9u32], [(0u32, 1u32), (1, 2), (5, 6)]).unwrap();
        assert_eq!(exact_size(&g, 1), 3);
        let star = build_graph((1..=6u32).map(|i| (0, i))).unwrap();
        assert_eq!(exact_size(&star, 1), 1);
    }

    #[test]
    fn closed_balls() {
        let g = gen_cycle(7).unwrap();
        let inst = DominationInstance::new(&g, 2);
        assert_eq!(inst.closed_ball(VertexId(0)).unwrap(), ids(&[0, 1, 2, 5, 6]));
    }
}
