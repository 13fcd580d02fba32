//! Experiment runner: builds instances, simulates, analyses, and reports.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rdomsim_core::generators::GeneratorError;
use rdomsim_core::graph::{girth, parse_graph, write_graph};
use rdomsim_core::oracles::{is_independent, is_r_dominating};
use rdomsim_core::sim::SimError;
use rdomsim_core::voronoi::VoronoiError;
use rdomsim_core::{Girth, GraphError, VertexId};
use serde::Serialize;
use thiserror::Error;

pub mod cli;
pub mod run;
pub mod spec;

pub use run::{execute, Outcome, RunRecord};
pub use spec::{Algo, Base, Budgets, Corpus, DSource, ExperimentSpec, Family, Outputs};

/// Exit status for a run whose checks failed.
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_PREMISE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_FAULT: i32 = 5;
pub const EXIT_INPUT: i32 = 6;
pub const EXIT_IO: i32 = 7;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("girth premise violated: girth {girth} < 4r+3 = {need}")]
    Premise { girth: Girth, need: usize },
    #[error("budget exceeded: {0}")]
    Budget(SimError),
    #[error(transparent)]
    Sim(SimError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

impl RunError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        RunError::Io { path: path.to_path_buf(), source }
    }

    /// Machine-readable failure reason.
    pub fn reason(&self) -> &'static str {
        match self {
            RunError::Premise { .. } => "premise",
            RunError::Budget(_) => "budget",
            RunError::Sim(_) => "fault",
            RunError::Generator(_) | RunError::Graph(_) | RunError::InvalidSpec(_) | RunError::Json { .. } => "input",
            RunError::Voronoi(_) => "analysis",
            RunError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Premise { .. } => EXIT_PREMISE,
            RunError::Budget(_) => EXIT_BUDGET,
            RunError::Sim(_) | RunError::Voronoi(_) => EXIT_FAULT,
            RunError::Generator(_) | RunError::Graph(_) | RunError::InvalidSpec(_) | RunError::Json { .. } => {
                EXIT_INPUT
            }
            RunError::Io { .. } => EXIT_IO,
        }
    }
}

pub const CSV_HEADER: [&str; 14] = [
    "family",
    "n",
    "r",
    "f_r",
    "girth",
    "opt",
    "alg",
    "ratio",
    "bound",
    "cells_tree",
    "single_edge",
    "quotient_bound",
    "di_in_T",
    "pass",
];

/// One line of the aggregate CSV. For `count` runs the size columns are
/// empty; for `cycle_is` runs `alg` holds `|I|`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub family: String,
    pub n: Option<usize>,
    pub r: usize,
    pub f_r: Option<usize>,
    pub girth: Option<String>,
    pub opt: Option<usize>,
    pub alg: Option<usize>,
    pub ratio: Option<String>,
    pub bound: Option<usize>,
    pub cells_tree: Option<bool>,
    pub single_edge: Option<bool>,
    pub quotient_bound: Option<bool>,
    #[serde(rename = "di_in_T")]
    pub di_in_t: Option<bool>,
    pub pass: bool,
}

impl Row {
    pub fn from_record(rec: &RunRecord) -> Row {
        let mut row = Row {
            family: rec.label.clone(),
            n: Some(rec.n),
            r: rec.r,
            f_r: Some(rec.f_r),
            girth: Some(rec.girth.to_string()),
            pass: rec.pass,
            ..Row::default()
        };
        match &rec.outcome {
            Outcome::Rmds { analysis: a, .. } => {
                row.opt = a.opt;
                row.alg = Some(a.alg);
                row.ratio = a.ratio.map(|x| format!("{x:.4}"));
                row.bound = Some(a.bound);
                if let Some(l) = a.lemmas {
                    row.cells_tree = Some(l.cells_tree);
                    row.single_edge = Some(l.single_edge);
                    row.quotient_bound = Some(l.quotient_bound);
                }
                row.di_in_t = a.checks.map(|c| c.di_in_t);
            }
            Outcome::CycleIs { i, .. } => row.alg = Some(i.len()),
            Outcome::Count { .. } => {}
        }
        row
    }

    /// Row for a spec that did not complete.
    pub fn from_error(spec: &ExperimentSpec) -> Row {
        Row { family: spec.label(), r: spec.r, f_r: spec.f_r().ok(), ..Row::default() }
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|e| RunError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| RunError::Json { path: path.into(), source })?;
    write_file(path, &(text + "\n"))
}

fn read_to_string(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|e| RunError::io(path, e))
}

/// Written in place of a report when a run could not complete.
#[derive(Serialize)]
struct FailureReport<'a> {
    label: String,
    spec: &'a ExperimentSpec,
    pass: bool,
    reason: &'static str,
    message: String,
}

/// Executes a spec and writes whatever its `outputs` ask for.
pub fn cmd_run(spec: &ExperimentSpec) -> Result<RunRecord, RunError> {
    let rec = match execute(spec) {
        Ok(rec) => rec,
        Err(e) => {
            if let Some(path) = &spec.outputs.json {
                let report = FailureReport {
                    label: spec.label(),
                    spec,
                    pass: false,
                    reason: e.reason(),
                    message: e.to_string(),
                };
                write_json(path, &report)?;
            }
            if let Some(path) = &spec.outputs.csv {
                write_file(path, &render_csv(&[Row::from_error(spec)]))?;
            }
            return Err(e);
        }
    };
    if let Some(path) = &spec.outputs.json {
        write_json(path, &rec)?;
    }
    if let Some(path) = &spec.outputs.csv {
        write_file(path, &render_csv(&[Row::from_record(&rec)]))?;
    }
    if let Some(path) = &spec.outputs.trace {
        let mut out = String::new();
        for round in &rec.trace {
            out.push_str(&serde_json::to_string(round).expect("trace serializes"));
            out.push('\n');
        }
        write_file(path, &out)?;
    }
    Ok(rec)
}

/// Outcome of a suite: one row per spec, in corpus order.
#[derive(Debug)]
pub struct SuiteResult {
    pub rows: Vec<Row>,
    /// `(spec index, reason)` for every spec that did not pass.
    pub failures: Vec<(usize, String)>,
    pub csv: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn load_corpus(path: &Path) -> Result<Corpus, RunError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| RunError::Json { path: path.into(), source })
}

/// Runs every spec on a small worker pool. Rows come back in corpus order,
/// so the CSV does not depend on scheduling.
pub fn run_corpus(corpus: &Corpus, threads: usize) -> SuiteResult {
    let specs = &corpus.specs;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunRecord, RunError>>>> = Mutex::new((0..specs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..threads.clamp(1, specs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(spec) = specs.get(i) else { break };
                let res = cmd_run(spec);
                slots.lock().expect("no worker panicked")[i] = Some(res);
            });
        }
    });
    let mut rows = Vec::with_capacity(specs.len());
    let mut failures = Vec::new();
    for (i, (spec, slot)) in specs.iter().zip(slots.into_inner().expect("no worker panicked")).enumerate() {
        match slot.expect("every spec ran") {
            Ok(rec) => {
                if !rec.pass {
                    failures.push((i, format!("{}: failed {}", rec.label, rec.failures.join(","))));
                }
                rows.push(Row::from_record(&rec));
            }
            Err(e) => {
                failures.push((i, format!("{}: {}: {e}", spec.label(), e.reason())));
                rows.push(Row::from_error(spec));
            }
        }
    }
    let csv = render_csv(&rows);
    SuiteResult { rows, failures, csv }
}

/// Loads a corpus file, runs it, and writes the aggregate CSV to `out` if given.
pub fn cmd_suite(config: &Path, out: Option<&Path>, threads: usize) -> Result<SuiteResult, RunError> {
    let result = run_corpus(&load_corpus(config)?, threads);
    if let Some(path) = out {
        write_file(path, &result.csv)?;
    }
    Ok(result)
}

/// Family metadata written next to a generated graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sidecar {
    pub family: String,
    pub r: Option<usize>,
    pub f: Option<usize>,
    pub n: usize,
    pub seed: Option<u64>,
    pub girth: Girth,
    pub expansion_bound: Option<usize>,
}

/// Writes the graph text to `out` and its metadata to `out` with a `.json`
/// extension. `r` only matters for the tightness family.
pub fn cmd_generate(family: &Family, r: usize, out: &Path) -> Result<Sidecar, RunError> {
    if r == 0 {
        return Err(RunError::InvalidSpec("r must be at least 1".into()));
    }
    let inst = family.build(r)?;
    let g = &inst.graph;
    write_file(out, &write_graph(g)?)?;
    let tightness = matches!(family, Family::Tightness { .. });
    let meta = Sidecar {
        family: family.name().into(),
        r: tightness.then_some(r),
        f: match family {
            Family::Tightness { f } => Some(*f),
            _ => None,
        },
        n: g.n(),
        seed: family.seed(),
        girth: girth(g),
        expansion_bound: family.expansion_bound(),
    };
    write_json(&out.with_extension("json"), &meta)?;
    Ok(meta)
}

/// Predicates `verify` can be asked to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Dominating,
    Independent,
    GirthPremise,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub m: usize,
    pub girth: Girth,
    pub r: Option<usize>,
    pub set_size: Option<usize>,
    pub dominating: Option<bool>,
    pub independent: Option<bool>,
    pub girth_premise: Option<bool>,
    /// Requested predicates that do not hold or could not be evaluated.
    pub failed: Vec<Predicate>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }
}

/// Reads a vertex set: whitespace-separated IDs, `#` starts a comment.
pub fn parse_set(text: &str) -> Result<Vec<VertexId>, RunError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let id = tok.parse::<u32>().map_err(|_| RunError::InvalidSpec(format!("bad vertex id {tok:?}")))?;
            out.push(VertexId(id));
        }
    }
    Ok(out)
}

/// Evaluates every predicate that the inputs allow. `require` lists the ones
/// that must hold; when empty, all evaluated predicates are required.
pub fn cmd_verify(
    graph: &Path,
    set: Option<&Path>,
    r: Option<usize>,
    require: &[Predicate],
) -> Result<VerifyReport, RunError> {
    let g = parse_graph(&read_to_string(graph)?)?;
    let set = set.map(|p| read_to_string(p).and_then(|t| parse_set(&t))).transpose()?;
    let gth = girth(&g);
    let dominating = match (&set, r) {
        (Some(s), Some(r)) => Some(is_r_dominating(&g, s, r)?),
        _ => None,
    };
    let independent = set.as_deref().map(|s| is_independent(&g, s)).transpose()?;
    let girth_premise = r.map(|r| gth.at_least(4 * r + 3));
    let value = |p: Predicate| match p {
        Predicate::Dominating => dominating,
        Predicate::Independent => independent,
        Predicate::GirthPremise => girth_premise,
    };
    let all = [Predicate::Dominating, Predicate::Independent, Predicate::GirthPremise];
    let failed = if require.is_empty() {
        all.into_iter().filter(|&p| value(p) == Some(false)).collect()
    } else {
        require.iter().copied().filter(|&p| value(p) != Some(true)).collect()
    };
    Ok(VerifyReport {
        n: g.n(),
        m: g.m(),
        girth: gth,
        r,
        set_size: set.as_ref().map(Vec::len),
        dominating,
        independent,
        girth_premise,
        failed,
    })
}
