//! Deterministic graph families: cycles, paths, seeded random trees,
//! subdivisions, and the subdivided-biclique tightness family.
//!
//! Every generator is a pure function of its arguments. Vertex IDs are
//! contiguous from 0 so outputs can be written in the text format directly.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("cycle needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),
    #[error("{0} needs at least one vertex")]
    Empty(&'static str),
    #[error("tightness family needs r >= 1 and f >= 2, got r={r} f={f}")]
    TightnessParams { r: usize, f: usize },
    #[error("grid needs positive dimensions, got {0}x{1}")]
    Grid(usize, usize),
}

/// SplitMix64. The sequence is fixed so seeded instances are reproducible
/// everywhere: `state += 0x9E3779B97F4A7C15`, then
/// `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9`,
/// `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, output `z ^ (z >> 31)`.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Value in `0..bound` by plain modulo reduction.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

fn contiguous(n: usize, edges: Vec<(u32, u32)>) -> Graph {
    Graph::with_vertices(0..n as u32, edges).expect("generator produced a simple graph")
}

/// Cycle `0-1-...-(n-1)-0`.
pub fn gen_cycle(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::CycleTooShort(n));
    }
    let n32 = n as u32;
    Ok(contiguous(n, (0..n32).map(|i| (i, (i + 1) % n32)).collect()))
}

/// Path `0-1-...-(n-1)`.
pub fn gen_path(n: usize) -> Result<Graph, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::Empty("path"));
    }
    Ok(contiguous(n, (1..n as u32).map(|i| (i - 1, i)).collect()))
}

/// Random recursive tree: vertex `i >= 1` attaches to `SplitMix64(seed).below(i)`,
/// drawing one value per vertex in increasing order of `i`.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::Empty("tree"));
    }
    let mut rng = SplitMix64::new(seed);
    let edges = (1..n as u32).map(|i| (rng.below(i as u64) as u32, i)).collect();
    Ok(contiguous(n, edges))
}

/// Complete graph `K_n`.
pub fn gen_complete(n: usize) -> Result<Graph, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::Empty("complete graph"));
    }
    let n32 = n as u32;
    let edges = (0..n32).flat_map(|a| (a + 1..n32).map(move |b| (a, b))).collect();
    Ok(contiguous(n, edges))
}

/// `w x h` grid, vertex `(x, y)` has ID `y * w + x`.
pub fn gen_grid(w: usize, h: usize) -> Result<Graph, GeneratorError> {
    if w == 0 || h == 0 {
        return Err(GeneratorError::Grid(w, h));
    }
    let id = |x: usize, y: usize| (y * w + x) as u32;
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                edges.push((id(x, y), id(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((id(x, y), id(x, y + 1)));
            }
        }
    }
    Ok(contiguous(w * h, edges))
}

/// Replaces every edge by a path with `k` fresh internal vertices.
///
/// Original vertices keep their IDs. Fresh IDs start after the largest
/// original ID and are handed out edge by edge in sorted edge order,
/// walking each edge from its smaller endpoint.
pub fn subdivide(g: &Graph, k: usize) -> Graph {
    if k == 0 {
        return g.clone();
    }
    let mut next = g.vertices().last().map_or(0, |v| v.0 + 1);
    let mut edges = Vec::with_capacity(g.m() * (k + 1));
    for (a, b) in g.edges() {
        let mut prev = a.0;
        for _ in 0..k {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, b.0));
    }
    Graph::with_vertices(g.vertices().iter().map(|v| v.0), edges).expect("subdivision is simple")
}

/// Parameters of the tightness family: distance `r >= 1`, expansion `f >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TightnessParams {
    r: usize,
    f: usize,
}

impl TightnessParams {
    pub fn new(r: usize, f: usize) -> Result<Self, GeneratorError> {
        if r < 1 || f < 2 {
            return Err(GeneratorError::TightnessParams { r, f });
        }
        Ok(TightnessParams { r, f })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn f(&self) -> usize {
        self.f
    }

    /// Size of each of the two sides, `2f`.
    pub fn side(&self) -> usize {
        2 * self.f
    }

    /// Pendant set size per pair, `2r * f`.
    pub fn pendants(&self) -> usize {
        2 * self.r * self.f
    }

    pub fn vertex_count(&self) -> usize {
        let pairs = self.side() * self.side();
        2 * self.side() + pairs * 2 * self.r + pairs * self.pendants()
    }
}

/// A generated member of the tightness family with its named parts.
#[derive(Clone, Debug)]
pub struct TightnessGraph {
    pub params: TightnessParams,
    pub graph: Graph,
    pub x: Vec<VertexId>,
    pub y: Vec<VertexId>,
    /// The `2r` internal path vertices for each pair, ordered from the `x` end.
    pub paths: BTreeMap<(VertexId, VertexId), Vec<VertexId>>,
    /// The pendant vertices for each pair, all attached to `paths[(x, y)][0]`.
    pub pendants: BTreeMap<(VertexId, VertexId), Vec<VertexId>>,
}

impl TightnessGraph {
    /// `X ∪ Y`, ascending.
    pub fn sides(&self) -> Vec<VertexId> {
        self.x.iter().chain(&self.y).copied().collect()
    }
}

/// Subdivided biclique `K_{2f,2f}` with `2r` vertices on every path and `2rf`
/// pendant vertices hanging off the path vertex next to `x`.
///
/// IDs: `X` is `0..2f`, `Y` is `2f..4f`, then the path vertices for each pair
/// in `(x, y)` lexicographic order (from the `x` side), then the pendant sets
/// in the same pair order.
pub fn gen_tightness(p: TightnessParams) -> TightnessGraph {
    let side = p.side() as u32;
    let x: Vec<u32> = (0..side).collect();
    let y: Vec<u32> = (side..2 * side).collect();
    let mut next = 2 * side;
    let mut edges = Vec::new();
    let mut paths = BTreeMap::new();
    for &xi in &x {
        for &yi in &y {
            let path: Vec<u32> = (next..next + 2 * p.r as u32).collect();
            next += 2 * p.r as u32;
            edges.push((xi, path[0]));
            edges.extend(path.windows(2).map(|w| (w[0], w[1])));
            edges.push((*path.last().unwrap(), yi));
            paths.insert((xi, yi), path);
        }
    }
    let mut pendants = BTreeMap::new();
    for (&(xi, yi), path) in &paths {
        let set: Vec<u32> = (next..next + p.pendants() as u32).collect();
        next += p.pendants() as u32;
        edges.extend(set.iter().map(|&b| (path[0], b)));
        pendants.insert((xi, yi), set);
    }
    let graph = contiguous(next as usize, edges);
    let ids = |v: Vec<u32>| v.into_iter().map(VertexId).collect::<Vec<_>>();
    let key = |(a, b): (u32, u32)| (VertexId(a), VertexId(b));
    TightnessGraph {
        params: p,
        graph,
        x: ids(x),
        y: ids(y),
        paths: paths.into_iter().map(|(k, v)| (key(k), ids(v))).collect(),
        pendants: pendants.into_iter().map(|(k, v)| (key(k), ids(v))).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bfs_distances, girth, neighborhood_size_oracle, Girth};

    #[test]
    fn cycles_and_paths() {
        let c7 = gen_cycle(7).unwrap();
        assert_eq!((c7.n(), c7.m(), girth(&c7)), (7, 7, Girth::Finite(7)));
        assert_eq!(gen_cycle(3).unwrap().m(), 3);
        assert_eq!(gen_cycle(2), Err(GeneratorError::CycleTooShort(2)));
        let p1 = gen_path(1).unwrap();
        assert_eq!((p1.n(), p1.m()), (1, 0));
        assert_eq!(gen_path(4).unwrap().m(), 3);
        assert!(gen_path(0).is_err());
    }

    #[test]
    fn random_tree_is_deterministic() {
        let a = gen_random_tree(50, 1).unwrap();
        let b = gen_random_tree(50, 1).unwrap();
        assert_eq!(a.m(), 49);
        assert_eq!(girth(&a), Girth::Infinite);
        assert_eq!(a.edges(), b.edges());
        assert_ne!(a.edges(), gen_random_tree(50, 2).unwrap().edges());
        assert_eq!(gen_random_tree(1, 99).unwrap().m(), 0);
        assert!(gen_random_tree(0, 1).is_err());
    }

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of SplitMix64 seeded with 0.
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn subdivision() {
        let k4 = gen_complete(4).unwrap();
        let s = subdivide(&k4, 3);
        assert_eq!(s.n(), 22);
        assert_eq!(girth(&s), Girth::Finite(12));
        assert_eq!(subdivide(&k4, 0), k4);
        let c10 = subdivide(&gen_cycle(5).unwrap(), 1);
        assert_eq!((c10.n(), c10.m(), girth(&c10)), (10, 10, Girth::Finite(10)));
        assert!(c10.vertices().iter().all(|v| c10.degree(*v).unwrap() == 2));
    }

    #[test]
    fn grid_shape() {
        let g = gen_grid(3, 2).unwrap();
        assert_eq!((g.n(), g.m(), girth(&g)), (6, 7, Girth::Finite(4)));
    }

    #[test]
    fn tightness_r1_f2() {
        let t = gen_tightness(TightnessParams::new(1, 2).unwrap());
        assert_eq!(t.graph.n(), 104);
        assert_eq!(t.params.vertex_count(), 104);
        assert_eq!(girth(&t.graph), Girth::Finite(12));
        for &x in &t.x {
            let d = bfs_distances(&t.graph, x).unwrap();
            for &y in &t.y {
                assert_eq!(d.get(y), Some(3));
            }
            assert_eq!(neighborhood_size_oracle(&t.graph, x, 1).unwrap(), 4);
        }
        for (pair, set) in &t.pendants {
            assert_eq!(set.len(), 4);
            for &b in set {
                assert_eq!(t.graph.neighbors(b).unwrap(), vec![t.paths[pair][0]]);
            }
        }
        // ID layout: X, Y, then paths from the x side, then pendants.
        assert_eq!(t.x, (0..4).map(VertexId).collect::<Vec<_>>());
        assert_eq!(t.paths[&(VertexId(0), VertexId(4))], vec![VertexId(8), VertexId(9)]);
        assert_eq!(t.pendants[&(VertexId(0), VertexId(4))][0], VertexId(40));
    }

    #[test]
    fn tightness_r2_f2() {
        let t = gen_tightness(TightnessParams::new(2, 2).unwrap());
        assert_eq!(t.graph.n(), 200);
        assert!(girth(&t.graph).at_least(20));
    }

    #[test]
    fn tightness_bounds() {
        assert!(TightnessParams::new(0, 2).is_err());
        assert!(TightnessParams::new(1, 1).is_err());
    }
}
