use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rdomsim_core::generators::{
    gen_complete, gen_cycle, gen_grid, gen_path, gen_random_tree, gen_tightness, subdivide, TightnessGraph,
    TightnessParams,
};
use rdomsim_core::oracles::ExactConfig;
use rdomsim_core::{Graph, VertexId};
use serde::{Deserialize, Serialize};

use crate::RunError;

/// Base graph for the subdivided family, written `k4`, `c5` or `grid3x4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Base {
    Complete(usize),
    Cycle(usize),
    Grid(usize, usize),
}

impl Base {
    fn build(self) -> Result<Graph, RunError> {
        Ok(match self {
            Base::Complete(n) => gen_complete(n)?,
            Base::Cycle(n) => gen_cycle(n)?,
            Base::Grid(w, h) => gen_grid(w, h)?,
        })
    }

    /// Bases whose subdivisions stay planar.
    pub fn is_planar(self) -> bool {
        match self {
            Base::Complete(n) => n <= 4,
            Base::Cycle(_) | Base::Grid(..) => true,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Complete(n) => write!(f, "k{n}"),
            Base::Cycle(n) => write!(f, "c{n}"),
            Base::Grid(w, h) => write!(f, "grid{w}x{h}"),
        }
    }
}

impl FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("unknown base graph {s:?}, expected kN, cN or gridWxH");
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix("grid") {
            let (w, h) = rest.split_once('x').ok_or_else(bad)?;
            Ok(Base::Grid(num(w)?, num(h)?))
        } else if let Some(rest) = s.strip_prefix('k') {
            Ok(Base::Complete(num(rest)?))
        } else if let Some(rest) = s.strip_prefix('c') {
            Ok(Base::Cycle(num(rest)?))
        } else {
            Err(bad())
        }
    }
}

impl TryFrom<String> for Base {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Base> for String {
    fn from(b: Base) -> String {
        b.to_string()
    }
}

/// Graph family and its parameters. The tightness family takes its distance
/// from the surrounding spec's `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Cycle { n: usize },
    Path { n: usize },
    Tree { n: usize, seed: u64 },
    Subdivided { base: Base, k: usize },
    Tightness { f: usize },
    File { path: PathBuf },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Cycle { .. } => "cycle",
            Family::Path { .. } => "path",
            Family::Tree { .. } => "tree",
            Family::Subdivided { .. } => "subdivided",
            Family::Tightness { .. } => "tightness",
            Family::File { .. } => "file",
        }
    }

    /// Short label used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            Family::Cycle { .. } | Family::Path { .. } => self.name().to_string(),
            Family::Tree { seed, .. } => format!("tree/seed={seed}"),
            Family::Subdivided { base, k } => format!("subdivided/{base}/k={k}"),
            Family::Tightness { f } => format!("tightness/f={f}"),
            Family::File { path } => format!("file/{}", path.display()),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Family::Tree { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Documented expansion value for the family, if there is one.
    pub fn expansion_bound(&self) -> Option<usize> {
        match self {
            Family::Cycle { .. } | Family::Path { .. } | Family::Tree { .. } => Some(1),
            Family::Subdivided { base, .. } if base.is_planar() => Some(3),
            Family::Tightness { f } => Some(*f),
            _ => None,
        }
    }

    pub fn build(&self, r: usize) -> Result<Instance, RunError> {
        let plain = |graph| Instance { graph, tightness: None };
        Ok(match self {
            Family::Cycle { n } => plain(gen_cycle(*n)?),
            Family::Path { n } => plain(gen_path(*n)?),
            Family::Tree { n, seed } => plain(gen_random_tree(*n, *seed)?),
            Family::Subdivided { base, k } => plain(subdivide(&base.build()?, *k)),
            Family::Tightness { f } => {
                let t = gen_tightness(TightnessParams::new(r, *f)?);
                Instance { graph: t.graph.clone(), tightness: Some(t) }
            }
            Family::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
                plain(rdomsim_core::graph::parse_graph(&text)?)
            }
        })
    }
}

pub struct Instance {
    pub graph: Graph,
    pub tightness: Option<TightnessGraph>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    #[default]
    Rmds,
    Count,
    CycleIs,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Rmds => "rmds",
            Algo::Count => "count",
            Algo::CycleIs => "cycle_is",
        }
    }
}

/// Where `cycle_is` gets its dominating set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DSource {
    /// Output of a simulated greedy run.
    #[default]
    Rmds,
    /// Every `(2r+1)`-th vertex of the cycle.
    Stride,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Defaults to the program's own round count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Defaults to `2*ceil(log2(n+1)) + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message_bits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_max_vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_nodes: Option<u64>,
}

impl Budgets {
    pub fn exact(&self) -> ExactConfig {
        let d = ExactConfig::default();
        ExactConfig {
            max_vertices: self.exact_max_vertices.unwrap_or(d.max_vertices),
            node_budget: self.exact_nodes.unwrap_or(d.node_budget),
        }
    }

    fn is_default(&self) -> bool {
        *self == Budgets::default()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    /// Full JSON report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Header plus one CSV row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Per-round simulator trace, one JSON object per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
}

impl Outputs {
    fn is_empty(&self) -> bool {
        *self == Outputs::default()
    }
}

/// One experiment: an instance, an algorithm and what to check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub algo: Algo,
    pub r: usize,
    /// Expansion value used in the bounds; defaults per family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_r: Option<usize>,
    #[serde(default)]
    pub d_source: DSource,
    #[serde(default, skip_serializing_if = "Budgets::is_default")]
    pub budgets: Budgets,
    /// Run even when girth < 4r+3 (negative controls).
    #[serde(default)]
    pub allow_low_girth: bool,
    /// Reference set to analyse against instead of the exact optimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<VertexId>>,
    /// Required value of the cells-are-trees flag.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_cells_tree: Option<bool>,
    #[serde(default, skip_serializing_if = "Outputs::is_empty")]
    pub outputs: Outputs,
}

impl ExperimentSpec {
    pub fn new(family: Family, algo: Algo, r: usize) -> Self {
        ExperimentSpec {
            family,
            algo,
            r,
            f_r: None,
            d_source: DSource::default(),
            budgets: Budgets::default(),
            allow_low_girth: false,
            m: None,
            expect_cells_tree: None,
            outputs: Outputs::default(),
        }
    }

    pub fn f_r(&self) -> Result<usize, RunError> {
        self.f_r
            .or_else(|| self.family.expansion_bound())
            .ok_or_else(|| RunError::InvalidSpec(format!("{} needs an explicit f_r", self.family.label())))
    }

    /// CSV label: the family label, tagged with the algorithm unless it is `rmds`.
    pub fn label(&self) -> String {
        match self.algo {
            Algo::Rmds => self.family.label(),
            Algo::Count => format!("{}[count]", self.family.label()),
            Algo::CycleIs => {
                let src = match self.d_source {
                    DSource::Rmds => "rmds",
                    DSource::Stride => "stride",
                };
                format!("{}[cycle_is:{src}]", self.family.label())
            }
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::InvalidSpec(m));
        if self.r == 0 {
            return bad("r must be at least 1".into());
        }
        if self.algo == Algo::CycleIs && !matches!(self.family, Family::Cycle { .. }) {
            return bad(format!("cycle_is needs the cycle family, got {}", self.family.name()));
        }
        self.f_r().map(|_| ())
    }
}

/// A suite file: a list of specs run in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub specs: Vec<ExperimentSpec>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_roundtrip() {
        for s in ["k4", "c7", "grid3x5"] {
            assert_eq!(s.parse::<Base>().unwrap().to_string(), s);
        }
        assert!("x4".parse::<Base>().is_err());
        assert!("gridx".parse::<Base>().is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec: ExperimentSpec = serde_json::from_str(r#"{"family":"subdivided","base":"k4","k":3,"r":2}"#).unwrap();
        assert_eq!(spec.family, Family::Subdivided { base: Base::Complete(4), k: 3 });
        assert_eq!(spec.algo, Algo::Rmds);
        assert_eq!(spec.f_r().unwrap(), 3);
        let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn validation() {
        let spec = ExperimentSpec::new(Family::Path { n: 5 }, Algo::CycleIs, 1);
        assert!(matches!(spec.validate(), Err(RunError::InvalidSpec(_))));
        let spec = ExperimentSpec::new(Family::Subdivided { base: Base::Complete(5), k: 2 }, Algo::Rmds, 1);
        assert!(spec.validate().is_err());
        assert!(ExperimentSpec::new(Family::Cycle { n: 5 }, Algo::Rmds, 0).validate().is_err());
    }
}
