//! Immutable simple undirected graphs and the exact sequential primitives
//! (BFS, truncated neighborhoods, girth, components) that the rest of the
//! crate treats as ground truth.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Identifier of a vertex. Unique within a graph, totally ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("graph text line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("text format needs vertex ids 0..n-1, found {0}")]
    NonContiguousIds(VertexId),
}

/// Simple undirected graph with adjacency stored by dense index.
///
/// Indices follow ascending vertex ID, so iterating neighbors by index is the
/// same as iterating them by ID. Adjacency lists are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph whose vertex set is exactly the set of edge endpoints.
    pub fn from_edges<I, V>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (V, V)>,
        V: Into<VertexId>,
    {
        Self::with_vertices(std::iter::empty::<VertexId>(), edges)
    }

    /// Builds a graph over `vertices` plus every edge endpoint. Isolated
    /// vertices are only expressible this way.
    pub fn with_vertices<I, V, E, W>(vertices: I, edges: E) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
        E: IntoIterator<Item = (W, W)>,
        W: Into<VertexId>,
    {
        let edges: Vec<(VertexId, VertexId)> = edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        let mut ids: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        for &(a, b) in &edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            ids.push(a);
            ids.push(b);
        }
        ids.sort_unstable();
        ids.dedup();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for &(a, b) in &edges {
            let (ia, ib) = (index[&a], index[&b]);
            adj[ia].push(ib);
            adj[ib].push(ia);
        }
        for (i, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (ids[i].min(ids[w[0]]), ids[i].max(ids[w[0]]));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { ids, index, adj, edge_count: edges.len() })
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex IDs in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub(crate) fn require(&self, v: VertexId) -> Result<usize, GraphError> {
        self.index_of(v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn id(&self, idx: usize) -> VertexId {
        self.ids[idx]
    }

    /// Neighbor indices of the vertex at `idx`, ascending.
    pub fn adj(&self, idx: usize) -> &[usize] {
        &self.adj[idx]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.adj[self.require(v)?].len())
    }

    /// Neighbors of `v` in ascending ID order.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let i = self.require(v)?;
        Ok(self.adj[i].iter().map(|&j| self.ids[j]).collect())
    }

    /// Every edge once as `(min, max)`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (i, list) in self.adj.iter().enumerate() {
            for &j in list {
                if i < j {
                    out.push((self.ids[i], self.ids[j]));
                }
            }
        }
        out
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adj[i].binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Subgraph induced by `keep`; unknown IDs are ignored.
    pub fn induced_subgraph(&self, keep: &[VertexId]) -> Graph {
        let mut mask = vec![false; self.n()];
        for &v in keep {
            if let Some(i) = self.index_of(v) {
                mask[i] = true;
            }
        }
        let vertices: Vec<VertexId> = (0..self.n()).filter(|&i| mask[i]).map(|i| self.ids[i]).collect();
        let edges: Vec<(VertexId, VertexId)> =
            self.edges().into_iter().filter(|&(a, b)| mask[self.index[&a]] && mask[self.index[&b]]).collect();
        Graph::with_vertices(vertices, edges).expect("induced subgraph of a simple graph is simple")
    }

    /// BFS from `src`, stopping after depth `limit` when given.
    pub(crate) fn bfs_from_index(&self, src: usize, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if limit.is_some_and(|l| du >= l) {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Indices of the closed ball `N^r[v]` for the vertex at `idx`.
    pub(crate) fn ball_indices(&self, idx: usize, r: usize) -> Vec<usize> {
        self.bfs_from_index(idx, Some(r)).iter().enumerate().filter_map(|(i, d)| d.map(|_| i)).collect()
    }
}

/// Builds a graph from an edge list; self-loops and duplicates are errors.
pub fn build_graph<V: Into<VertexId>>(edges: impl IntoIterator<Item = (V, V)>) -> Result<Graph, GraphError> {
    Graph::from_edges(edges)
}

/// Exact hop distances from a source. Unreachable vertices are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    pub source: VertexId,
    pub dist: BTreeMap<VertexId, usize>,
}

impl DistanceMap {
    pub fn get(&self, v: VertexId) -> Option<usize> {
        self.dist.get(&v).copied()
    }
}

pub fn bfs_distances(g: &Graph, source: VertexId) -> Result<DistanceMap, GraphError> {
    let src = g.require(source)?;
    let dist =
        g.bfs_from_index(src, None).into_iter().enumerate().filter_map(|(i, d)| d.map(|d| (g.id(i), d))).collect();
    Ok(DistanceMap { source, dist })
}

/// `|N^r(v)|`: number of vertices at distance `1..=r` from `v`, by truncated BFS.
pub fn neighborhood_size_oracle(g: &Graph, v: VertexId, r: usize) -> Result<usize, GraphError> {
    let i = g.require(v)?;
    Ok(g.ball_indices(i, r).len() - 1)
}

/// Girth of a graph; `Infinite` for forests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    /// True when every cycle has length at least `bound`.
    pub fn at_least(self, bound: usize) -> bool {
        match self {
            Girth::Finite(g) => g >= bound,
            Girth::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u64(*g as u64),
            Girth::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Girth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(usize),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(g) => Ok(Girth::Finite(g)),
            Repr::Str(s) if s == "inf" => Ok(Girth::Infinite),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("bad girth {s:?}"))),
        }
    }
}

/// Exact girth: BFS from every vertex, shortest cycle closed by a non-tree edge.
pub fn girth(g: &Graph) -> Girth {
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; g.n()];
    let mut parent = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for root in 0..g.n() {
        dist.fill(usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // No cycle through this root can beat the current best past this depth.
            if best.is_some_and(|b| 2 * dist[u] >= b) {
                break;
            }
            for &w in g.adj(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
    }
    best.map_or(Girth::Infinite, Girth::Finite)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<VertexId>> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in g.adj(u) {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp.into_iter().map(|i| g.id(i)).collect());
    }
    out
}

/// Parses the text interchange format: a header `n m`, then `m` lines `u v`.
/// The vertex set is `0..n`; blank lines and `#` comments are skipped.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let parse_pair = |line: usize, l: &str| -> Result<(u32, u32), GraphError> {
        let err = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
        let mut it = l.split_whitespace();
        let a = it.next().ok_or_else(|| err("expected two integers"))?;
        let b = it.next().ok_or_else(|| err("expected two integers"))?;
        if it.next().is_some() {
            return Err(err("trailing tokens"));
        }
        let a = a.parse().map_err(|_| err("not a non-negative integer"))?;
        let b = b.parse().map_err(|_| err("not a non-negative integer"))?;
        Ok((a, b))
    };
    let (hline, header) = lines.next().ok_or(GraphError::Parse { line: 1, msg: "missing header".into() })?;
    let (n, m) = parse_pair(hline, header)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (line, l) in lines {
        let (a, b) = parse_pair(line, l)?;
        if a >= n || b >= n {
            return Err(GraphError::Parse { line, msg: format!("endpoint out of range 0..{n}") });
        }
        edges.push((a, b));
    }
    if edges.len() != m as usize {
        return Err(GraphError::Parse {
            line: hline,
            msg: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    Graph::with_vertices(0..n, edges)
}

/// Writes the text interchange format. IDs must be exactly `0..n`.
pub fn write_graph(g: &Graph) -> Result<String, GraphError> {
    if let Some((_, &v)) = g.vertices().iter().enumerate().find(|&(i, v)| v.0 as usize != i) {
        return Err(GraphError::NonContiguousIds(v));
    }
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (a, b) in g.edges() {
        out.push_str(&format!("{a} {b}\n"));
    }
    Ok(out)
}
