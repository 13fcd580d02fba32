//! Voronoi decomposition around a dominating set and the structural checks
//! that bound how many vertices the greedy selection can pick.
//!
//! Cells are assigned by nearest center, ties broken by smaller center ID.
//! On graphs of girth at least `4r + 3` every cell induces a tree, two cells
//! share at most one edge, and the selected set splits into vertices chosen
//! from inside their own cell (which lie on the boundary trees) and vertices
//! chosen across a cell border.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{girth, Girth, Graph, GraphError, VertexId};
use crate::oracles::{exact_min_rds, is_r_dominating, ExactConfig, ExactOutcome};
use crate::programs::{RmdsOutput, SelectionMap};
use crate::sim::SimulationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VoronoiError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{vertex} is at distance {dist:?} from the nearest center, more than r={r}")]
    NotDominating { vertex: VertexId, dist: Option<usize>, r: usize },
    #[error("cell of {0} does not induce a tree")]
    CellNotTree(VertexId),
    #[error("no selection recorded for {0}")]
    MissingSelection(VertexId),
}

/// An edge whose endpoints lie in different cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntercellEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub cell_u: VertexId,
    pub cell_v: VertexId,
}

impl IntercellEdge {
    fn cell_pair(&self) -> (VertexId, VertexId) {
        (self.cell_u.min(self.cell_v), self.cell_u.max(self.cell_v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoronoiDecomposition {
    pub centers: Vec<VertexId>,
    /// `c(v)`: the center owning `v`.
    pub cover: BTreeMap<VertexId, VertexId>,
    /// `d(v, c(v))`.
    pub depth: BTreeMap<VertexId, usize>,
    pub cells: BTreeMap<VertexId, Vec<VertexId>>,
    pub intercell_edges: Vec<IntercellEdge>,
    /// Number of distinct cell pairs joined by an edge, `|E'|`.
    pub quotient_edge_count: usize,
}

impl VoronoiDecomposition {
    pub fn radius(&self) -> usize {
        self.depth.values().copied().max().unwrap_or(0)
    }
}

/// Assigns every vertex to its nearest center (ties: smaller center ID) by a
/// layered multi-source BFS. Does not require the centers to dominate; a
/// vertex no center can reach is reported as `NotDominating` with no distance.
pub fn voronoi_cells(g: &Graph, centers: &[VertexId]) -> Result<VoronoiDecomposition, VoronoiError> {
    let n = g.n();
    let mut label: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut frontier: Vec<usize> = Vec::new();
    for &m in centers {
        let i = g.require(m)?;
        if label[i].is_none() {
            label[i] = Some((0, i));
            frontier.push(i);
        }
    }
    frontier.sort_unstable();
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &frontier {
            let center = label[v].unwrap().1;
            for &w in g.adj(v) {
                if label[w].is_none() {
                    // index order is ID order, so min index = min center ID
                    next.entry(w).and_modify(|c| *c = (*c).min(center)).or_insert(center);
                }
            }
        }
        depth += 1;
        for (&w, &c) in &next {
            label[w] = Some((depth, c));
        }
        frontier = next.into_keys().collect();
    }

    let mut cover = BTreeMap::new();
    let mut dist = BTreeMap::new();
    let mut cells: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &m in centers {
        cells.entry(m).or_default();
    }
    for (v, slot) in label.iter().enumerate() {
        let (d, c) = slot.ok_or(VoronoiError::NotDominating { vertex: g.id(v), dist: None, r: 0 })?;
        cover.insert(g.id(v), g.id(c));
        dist.insert(g.id(v), d);
        cells.get_mut(&g.id(c)).unwrap().push(g.id(v));
    }
    let mut intercell_edges = Vec::new();
    for (a, b) in g.edges() {
        let (ca, cb) = (cover[&a], cover[&b]);
        if ca != cb {
            intercell_edges.push(IntercellEdge { u: a, v: b, cell_u: ca, cell_v: cb });
        }
    }
    let quotient_edge_count = intercell_edges.iter().map(IntercellEdge::cell_pair).collect::<BTreeSet<_>>().len();
    let mut centers: Vec<VertexId> = cells.keys().copied().collect();
    centers.sort_unstable();
    Ok(VoronoiDecomposition { centers, cover, depth: dist, cells, intercell_edges, quotient_edge_count })
}

/// Voronoi decomposition around a distance-`r` dominating set `m`.
pub fn voronoi_decompose(g: &Graph, m: &[VertexId], r: usize) -> Result<VoronoiDecomposition, VoronoiError> {
    let dec = voronoi_cells(g, m).map_err(|e| match e {
        VoronoiError::NotDominating { vertex, dist, .. } => VoronoiError::NotDominating { vertex, dist, r },
        other => other,
    })?;
    if let Some((&vertex, &d)) = dec.depth.iter().find(|(_, &d)| d > r) {
        return Err(VoronoiError::NotDominating { vertex, dist: Some(d), r });
    }
    Ok(dec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaFlags {
    /// Every cell induces a tree.
    pub cells_tree: bool,
    /// Every pair of cells is joined by at most one edge.
    pub single_edge: bool,
    /// `|E'| <= f_r * |M|`.
    pub quotient_bound: bool,
}

impl LemmaFlags {
    pub fn all(&self) -> bool {
        self.cells_tree && self.single_edge && self.quotient_bound
    }
}

fn induces_tree(g: &Graph, cell: &[VertexId]) -> bool {
    let members: BTreeSet<VertexId> = cell.iter().copied().collect();
    let sub = g.induced_subgraph(cell);
    let edges = sub.m();
    let Some(&start) = members.iter().next() else { return true };
    let reached = crate::graph::bfs_distances(&sub, start).map(|d| d.dist.len()).unwrap_or(0);
    reached == members.len() && edges + 1 == members.len()
}

pub fn check_structural_lemmas(g: &Graph, dec: &VoronoiDecomposition, f_r: usize) -> LemmaFlags {
    let cells_tree = dec.cells.values().all(|cell| induces_tree(g, cell));
    let mut per_pair: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for e in &dec.intercell_edges {
        *per_pair.entry(e.cell_pair()).or_default() += 1;
    }
    LemmaFlags {
        cells_tree,
        single_edge: per_pair.values().all(|&c| c <= 1),
        quotient_bound: dec.quotient_edge_count <= f_r * dec.centers.len(),
    }
}

/// Per cell, the union of in-cell paths from each boundary vertex to the center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryForest {
    pub trees: BTreeMap<VertexId, BTreeSet<VertexId>>,
    pub total: BTreeSet<VertexId>,
}

pub fn boundary_forest(g: &Graph, dec: &VoronoiDecomposition) -> Result<BoundaryForest, VoronoiError> {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&m, cell) in &dec.cells {
        if !induces_tree(g, cell) {
            return Err(VoronoiError::CellNotTree(m));
        }
        let mut queue = VecDeque::from([m]);
        let mut seen = BTreeSet::from([m]);
        while let Some(u) = queue.pop_front() {
            for w in g.neighbors(u)? {
                if dec.cover[&w] == m && seen.insert(w) {
                    parent.insert(w, u);
                    queue.push_back(w);
                }
            }
        }
    }
    let mut trees: BTreeMap<VertexId, BTreeSet<VertexId>> =
        dec.centers.iter().map(|&m| (m, BTreeSet::from([m]))).collect();
    for e in &dec.intercell_edges {
        for (start, m) in [(e.u, e.cell_u), (e.v, e.cell_v)] {
            let tree = trees.get_mut(&m).unwrap();
            let mut cur = start;
            while tree.insert(cur) {
                cur = parent[&cur];
            }
        }
    }
    let total = trees.values().flatten().copied().collect();
    Ok(BoundaryForest { trees, total })
}

/// Selected vertices split by whether some selector sits in the same cell
/// (`d_inner`) or in a different one (`d_outer`). The two may overlap.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SelectionSplit {
    pub d_inner: BTreeSet<VertexId>,
    pub d_outer: BTreeSet<VertexId>,
}

pub fn split_selection(dec: &VoronoiDecomposition, sel: &SelectionMap) -> Result<SelectionSplit, VoronoiError> {
    let mut split = SelectionSplit::default();
    for (&v, &cv) in &dec.cover {
        let d = *sel.sel.get(&v).ok_or(VoronoiError::MissingSelection(v))?;
        let cd = *dec.cover.get(&d).ok_or(VoronoiError::MissingSelection(d))?;
        if cv == cd {
            split.d_inner.insert(d);
        } else {
            split.d_outer.insert(d);
        }
    }
    Ok(split)
}

/// Where the comparison set `M` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptSource {
    Exact,
    Supplied,
    Unknown,
}

/// Bound checks against `M`; only meaningful when the premises hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    /// `|D| <= (1 + 4 r f_r) |M|`.
    pub ratio: bool,
    /// `|D_O| <= 2 r f_r |M|`.
    pub d_outer: bool,
    /// `|D_I| <= (1 + 2 r f_r) |M|`.
    pub d_inner: bool,
    /// `D_I ⊆ T`.
    pub di_in_t: bool,
    /// `|T| <= (1 + 2 r f_r) |M|`.
    pub boundary: bool,
}

impl BoundChecks {
    pub fn all(&self) -> bool {
        self.ratio && self.d_outer && self.d_inner && self.di_in_t && self.boundary
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub n: usize,
    pub r: usize,
    pub f_r: usize,
    pub girth: Girth,
    /// `girth >= 4r + 3`.
    pub girth_premise: bool,
    /// The simulated set is distance-`r` dominating.
    pub dominating: bool,
    /// The simulated set equals the set of selected vertices.
    pub selection_consistent: bool,
    pub opt_source: OptSource,
    /// `M` is distance-`r` dominating (always true for an exact optimum).
    pub opt_dominating: Option<bool>,
    pub opt: Option<usize>,
    pub alg: usize,
    pub ratio: Option<f64>,
    pub bound: usize,
    /// `1 / (2r + 1)`.
    pub delta_prime: f64,
    pub lemmas: Option<LemmaFlags>,
    pub quotient_edges: Option<usize>,
    pub boundary_size: Option<usize>,
    pub d_inner: Option<usize>,
    pub d_outer: Option<usize>,
    pub checks: Option<BoundChecks>,
}

impl ApproxReport {
    /// Girth at least `4r + 3` and `M` is a dominating set.
    pub fn premises_hold(&self) -> bool {
        self.girth_premise && self.opt_dominating.unwrap_or(false)
    }

    /// Every check that applies: validity always; lemma and bound checks
    /// whenever the premises hold and `M` is known.
    pub fn passes(&self) -> bool {
        if !(self.dominating && self.selection_consistent) {
            return false;
        }
        if !self.premises_hold() {
            return true;
        }
        self.lemmas.is_some_and(|l| l.all()) && self.checks.is_some_and(|c| c.all())
    }
}

/// Aggregates a simulated greedy run with the decomposition around `M`.
///
/// `M` is `supplied` when given, otherwise the exact optimum when the solver
/// finishes under `exact`; if neither is available the ratio fields stay
/// empty. A supplied `M` that does not dominate still gets lemma flags from
/// its nearest-center cells, but no bound checks.
pub fn approx_report(
    g: &Graph,
    r: usize,
    f_r: usize,
    sim: &SimulationReport<RmdsOutput>,
    supplied: Option<&[VertexId]>,
    exact: ExactConfig,
) -> Result<ApproxReport, VoronoiError> {
    let gth = girth(g);
    let selection = SelectionMap::from_report(sim);
    let d: Vec<VertexId> = selection.d.iter().copied().collect();
    let bound = 1 + 4 * r * f_r;
    let mut report = ApproxReport {
        n: g.n(),
        r,
        f_r,
        girth: gth,
        girth_premise: gth.at_least(4 * r + 3),
        dominating: is_r_dominating(g, &d, r)?,
        selection_consistent: selection.is_consistent(),
        opt_source: OptSource::Unknown,
        opt_dominating: None,
        opt: None,
        alg: d.len(),
        ratio: None,
        bound,
        delta_prime: 1.0 / (2 * r + 1) as f64,
        lemmas: None,
        quotient_edges: None,
        boundary_size: None,
        d_inner: None,
        d_outer: None,
        checks: None,
    };

    let (m, source) = match supplied {
        Some(m) => (m.to_vec(), OptSource::Supplied),
        None => match exact_min_rds(g, r, exact) {
            ExactOutcome::Optimal(m) => (m, OptSource::Exact),
            ExactOutcome::Unknown { .. } => return Ok(report),
        },
    };
    let mut m = m;
    m.sort_unstable();
    m.dedup();
    report.opt_source = source;
    report.opt = Some(m.len());
    if !m.is_empty() {
        report.ratio = Some(d.len() as f64 / m.len() as f64);
    }
    let m_dominating = is_r_dominating(g, &m, r)?;
    report.opt_dominating = Some(m_dominating);

    let dec = match voronoi_cells(g, &m) {
        Ok(dec) => dec,
        Err(VoronoiError::NotDominating { .. }) => return Ok(report),
        Err(e) => return Err(e),
    };
    let lemmas = check_structural_lemmas(g, &dec, f_r);
    report.lemmas = Some(lemmas);
    report.quotient_edges = Some(dec.quotient_edge_count);
    let split = split_selection(&dec, &selection)?;
    report.d_inner = Some(split.d_inner.len());
    report.d_outer = Some(split.d_outer.len());
    if !m_dominating {
        return Ok(report);
    }

    let forest = if lemmas.cells_tree { Some(boundary_forest(g, &dec)?) } else { None };
    report.boundary_size = forest.as_ref().map(|f| f.total.len());
    let k = m.len();
    let inner_cap = (1 + 2 * r * f_r) * k;
    report.checks = Some(BoundChecks {
        ratio: d.len() <= bound * k,
        d_outer: split.d_outer.len() <= 2 * r * f_r * k,
        d_inner: split.d_inner.len() <= inner_cap,
        di_in_t: forest.as_ref().is_some_and(|f| split.d_inner.is_subset(&f.total)),
        boundary: forest.as_ref().is_some_and(|f| f.total.len() <= inner_cap),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cycle, gen_path, gen_random_tree};
    use crate::programs::selection_oracle;

    fn ids(v: &[u32]) -> Vec<VertexId> {
        v.iter().map(|&i| VertexId(i)).collect()
    }

    fn set(v: &[u32]) -> BTreeSet<VertexId> {
        v.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn c9_three_cells() {
        let g = gen_cycle(9).unwrap();
        let dec = voronoi_decompose(&g, &ids(&[0, 3, 6]), 1).unwrap();
        assert_eq!(dec.cells[&VertexId(0)], ids(&[0, 1, 8]));
        assert_eq!(dec.cells[&VertexId(3)], ids(&[2, 3, 4]));
        assert_eq!(dec.cells[&VertexId(6)], ids(&[5, 6, 7]));
        assert_eq!(dec.quotient_edge_count, 3);
        let flags = check_structural_lemmas(&g, &dec, 1);
        assert_eq!(flags, LemmaFlags { cells_tree: true, single_edge: true, quotient_bound: true });
        let forest = boundary_forest(&g, &dec).unwrap();
        assert_eq!(forest.trees[&VertexId(0)], set(&[0, 1, 8]));
        assert_eq!(forest.total.len(), 9);
    }

    #[test]
    fn distance_tie_goes_to_smaller_center() {
        let g = gen_path(3).unwrap();
        let dec = voronoi_decompose(&g, &ids(&[0, 2]), 1).unwrap();
        assert_eq!(dec.cover[&VertexId(1)], VertexId(0));
    }

    #[test]
    fn single_center_tree() {
        let g = gen_random_tree(30, 4).unwrap();
        let dec = voronoi_decompose(&g, &ids(&[0]), 30).unwrap();
        assert_eq!(dec.cells.len(), 1);
        assert_eq!(dec.quotient_edge_count, 0);
        assert!(check_structural_lemmas(&g, &dec, 1).all());
        assert_eq!(boundary_forest(&g, &dec).unwrap().total, set(&[0]));
    }

    #[test]
    fn four_cycle_cell_is_not_a_tree() {
        let g = gen_cycle(4).unwrap();
        let dec = voronoi_cells(&g, &ids(&[0])).unwrap();
        assert!(!check_structural_lemmas(&g, &dec, 1).cells_tree);
        assert!(matches!(boundary_forest(&g, &dec), Err(VoronoiError::CellNotTree(_))));
        // {0} reaches vertex 2 only at distance 2
        assert!(matches!(voronoi_decompose(&g, &ids(&[0]), 1), Err(VoronoiError::NotDominating { dist: Some(2), .. })));
    }

    #[test]
    fn split_on_c7() {
        let g = gen_cycle(7).unwrap();
        let dec = voronoi_decompose(&g, &ids(&[0, 3, 5]), 1).unwrap();
        assert_eq!(dec.cells[&VertexId(0)], ids(&[0, 1, 6]));
        assert_eq!(dec.cells[&VertexId(3)], ids(&[2, 3, 4]));
        assert_eq!(dec.cells[&VertexId(5)], ids(&[5]));
        let split = split_selection(&dec, &selection_oracle(&g, 1)).unwrap();
        assert_eq!(split.d_inner, set(&[3, 4, 6]));
        assert_eq!(split.d_outer, set(&[2, 5, 6]));
    }

    #[test]
    fn identity_selection() {
        let g = gen_cycle(5).unwrap();
        let all: Vec<VertexId> = g.vertices().to_vec();
        let dec = voronoi_decompose(&g, &all, 1).unwrap();
        let sel = SelectionMap::from_selection(all.iter().map(|&v| (v, v)).collect());
        let split = split_selection(&dec, &sel).unwrap();
        assert!(split.d_outer.is_empty());
        assert_eq!(split.d_inner.len(), 5);
    }

    #[test]
    fn missing_selection_is_an_error() {
        let g = gen_cycle(5).unwrap();
        let dec = voronoi_decompose(&g, &ids(&[0, 2]), 1).unwrap();
        assert!(matches!(split_selection(&dec, &SelectionMap::default()), Err(VoronoiError::MissingSelection(_))));
    }
}
