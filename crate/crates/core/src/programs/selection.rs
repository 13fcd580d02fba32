use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{Graph, VertexId};
use crate::sim::SimulationReport;

use super::RmdsOutput;

/// Who selected whom, and the resulting set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SelectionMap {
    pub sel: BTreeMap<VertexId, VertexId>,
    pub d: BTreeSet<VertexId>,
}

impl SelectionMap {
    /// Builds the map from a selection; `d` is the range of `sel`.
    pub fn from_selection(sel: BTreeMap<VertexId, VertexId>) -> Self {
        let d = sel.values().copied().collect();
        SelectionMap { sel, d }
    }

    /// Reads a simulated run. `d` holds the vertices that reported
    /// membership, which need not equal the range of `sel` if the run was
    /// broken; compare with [`SelectionMap::is_consistent`].
    pub fn from_report(report: &SimulationReport<RmdsOutput>) -> Self {
        SelectionMap {
            sel: report.outputs.iter().map(|(&v, o)| (v, o.selected)).collect(),
            d: report.outputs.iter().filter(|(_, o)| o.member).map(|(&v, _)| v).collect(),
        }
    }

    /// `d` equals the set of selected vertices.
    pub fn is_consistent(&self) -> bool {
        self.sel.values().copied().collect::<BTreeSet<_>>() == self.d
    }
}

/// Centralized selection: every `v` picks the maximum of `(|N^r(u)|, u)` over
/// `u ∈ N^r[v]`, with exact neighborhood sizes.
pub fn selection_oracle(g: &Graph, r: usize) -> SelectionMap {
    let balls: Vec<Vec<usize>> = (0..g.n()).map(|v| g.ball_indices(v, r)).collect();
    let sel = (0..g.n())
        .map(|v| {
            let best = balls[v].iter().map(|&u| (balls[u].len() - 1, g.id(u))).max().expect("ball contains its center");
            (g.id(v), best.1)
        })
        .collect();
    SelectionMap::from_selection(sel)
}
