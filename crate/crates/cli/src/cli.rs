use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rdomsim_core::VertexId;

use crate::spec::{Algo, Base, Budgets, DSource, ExperimentSpec, Family, Outputs};
use crate::{cmd_generate, cmd_run, cmd_suite, cmd_verify, parse_set, Predicate, RunError, EXIT_CHECK};

#[derive(Parser, Debug)]
#[command(
    name = "rdomsim",
    version,
    about = "Distance-r domination experiments on a synchronous message-passing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a graph in text format plus a JSON metadata sidecar
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Distance parameter (tightness family only)
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run one experiment and report
    Run(RunArgs),
    /// Run every experiment in a corpus file and aggregate a CSV
    Suite {
        config: PathBuf,
        /// CSV destination; stdout when omitted
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Check predicates on a graph file and an optional vertex set file
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        set: Option<PathBuf>,
        #[arg(long)]
        r: Option<usize>,
        /// Predicates that must hold; defaults to every one that can be evaluated
        #[arg(long, value_enum, value_delimiter = ',')]
        require: Vec<PredicateArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyKind {
    Cycle,
    Path,
    Tree,
    Subdivided,
    Tightness,
    File,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    /// Vertex count (cycle, path, tree)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Base graph for subdivision: kN, cN or gridWxH
    #[arg(long)]
    base: Option<Base>,
    /// Vertices inserted per edge
    #[arg(long)]
    k: Option<usize>,
    /// Expansion value; the construction parameter for the tightness family
    #[arg(long)]
    f: Option<usize>,
    /// Graph file for the file family
    #[arg(long)]
    graph: Option<PathBuf>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family, RunError> {
        let need = |name: &str| RunError::InvalidSpec(format!("--family {:?} needs --{name}", self.family));
        let n = || self.n.ok_or_else(|| need("n"));
        Ok(match self.family {
            FamilyKind::Cycle => Family::Cycle { n: n()? },
            FamilyKind::Path => Family::Path { n: n()? },
            FamilyKind::Tree => Family::Tree { n: n()?, seed: self.seed },
            FamilyKind::Subdivided => {
                Family::Subdivided { base: self.base.ok_or_else(|| need("base"))?, k: self.k.ok_or_else(|| need("k"))? }
            }
            FamilyKind::Tightness => Family::Tightness { f: self.f.ok_or_else(|| need("f"))? },
            FamilyKind::File => Family::File { path: self.graph.clone().ok_or_else(|| need("graph"))? },
        })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Rmds,
    Count,
    CycleIs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DSourceArg {
    Rmds,
    Stride,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PredicateArg {
    Dominating,
    Independent,
    GirthPremise,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Read the whole experiment from a JSON spec instead of flags
    #[arg(long, conflicts_with_all = ["family", "algo", "r"])]
    spec: Option<PathBuf>,
    #[command(flatten)]
    family: Option<FamilyArgs>,
    #[arg(long, value_enum, default_value = "rmds")]
    algo: AlgoArg,
    #[arg(long)]
    r: Option<usize>,
    /// Dominating set fed to cycle_is
    #[arg(long, value_enum, default_value = "rmds")]
    d_source: DSourceArg,
    /// Reference dominating set, comma separated
    #[arg(long, value_delimiter = ',')]
    m: Vec<u32>,
    /// Reference dominating set from a file
    #[arg(long, conflicts_with = "m")]
    m_file: Option<PathBuf>,
    #[arg(long)]
    allow_low_girth: bool,
    #[arg(long)]
    expect_cells_tree: Option<bool>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    message_bits: Option<usize>,
    #[arg(long)]
    exact_max_vertices: Option<usize>,
    #[arg(long)]
    exact_nodes: Option<u64>,
    /// JSON report destination; stdout when omitted
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-round trace as JSON lines
    #[arg(long)]
    trace: Option<PathBuf>,
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec, RunError> {
        if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
            let mut spec: ExperimentSpec =
                serde_json::from_str(&text).map_err(|source| RunError::Json { path: path.clone(), source })?;
            self.override_outputs(&mut spec.outputs);
            return Ok(spec);
        }
        let fa = self.family.as_ref().ok_or_else(|| RunError::InvalidSpec("--family or --spec is required".into()))?;
        let family = fa.family()?;
        let r = self.r.ok_or_else(|| RunError::InvalidSpec("--r is required".into()))?;
        let algo = match self.algo {
            AlgoArg::Rmds => Algo::Rmds,
            AlgoArg::Count => Algo::Count,
            AlgoArg::CycleIs => Algo::CycleIs,
        };
        let mut spec = ExperimentSpec::new(family, algo, r);
        spec.f_r = fa.f;
        spec.d_source = match self.d_source {
            DSourceArg::Rmds => DSource::Rmds,
            DSourceArg::Stride => DSource::Stride,
        };
        spec.budgets = Budgets {
            rounds: self.rounds,
            message_bits: self.message_bits,
            exact_max_vertices: self.exact_max_vertices,
            exact_nodes: self.exact_nodes,
        };
        spec.allow_low_girth = self.allow_low_girth;
        spec.expect_cells_tree = self.expect_cells_tree;
        spec.m = match &self.m_file {
            Some(p) => Some(parse_set(&std::fs::read_to_string(p).map_err(|e| RunError::io(p, e))?)?),
            None if !self.m.is_empty() => Some(self.m.iter().map(|&v| VertexId(v)).collect()),
            None => None,
        };
        self.override_outputs(&mut spec.outputs);
        Ok(spec)
    }

    fn override_outputs(&self, out: &mut Outputs) {
        for (flag, slot) in [(&self.json, &mut out.json), (&self.csv, &mut out.csv), (&self.trace, &mut out.trace)] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
    }
}

/// Writes to stdout, ignoring a reader that went away.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn report_error(e: &RunError) -> i32 {
    eprintln!("error[{}]: {e}", e.reason());
    e.exit_code()
}

fn run(args: RunArgs) -> i32 {
    let spec = match args.spec() {
        Ok(s) => s,
        Err(e) => return report_error(&e),
    };
    match cmd_run(&spec) {
        Ok(rec) => {
            if spec.outputs.json.is_none() {
                emit(&(serde_json::to_string_pretty(&rec).expect("report serializes") + "\n"));
            }
            if rec.pass {
                eprintln!("{}: pass", rec.label);
                0
            } else {
                eprintln!("{}: failed {}", rec.label, rec.failures.join(","));
                EXIT_CHECK
            }
        }
        Err(e) => report_error(&e),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Generate { family, r, out } => match family.family().and_then(|f| cmd_generate(&f, r, &out)) {
            Ok(meta) => {
                emit(&(serde_json::to_string(&meta).expect("sidecar serializes") + "\n"));
                0
            }
            Err(e) => report_error(&e),
        },
        Command::Run(args) => run(args),
        Command::Suite { config, out, threads } => match cmd_suite(&config, out.as_deref(), threads) {
            Ok(res) => {
                if out.is_none() {
                    emit(&res.csv);
                }
                for (i, msg) in &res.failures {
                    eprintln!("spec {i}: {msg}");
                }
                eprintln!("{} specs, {} failed", res.rows.len(), res.failures.len());
                if res.passed() {
                    0
                } else {
                    EXIT_CHECK
                }
            }
            Err(e) => report_error(&e),
        },
        Command::Verify { graph, set, r, require } => {
            let require: Vec<Predicate> = require
                .into_iter()
                .map(|p| match p {
                    PredicateArg::Dominating => Predicate::Dominating,
                    PredicateArg::Independent => Predicate::Independent,
                    PredicateArg::GirthPremise => Predicate::GirthPremise,
                })
                .collect();
            match cmd_verify(&graph, set.as_deref(), r, &require) {
                Ok(rep) => {
                    emit(&(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"));
                    if rep.passed() {
                        0
                    } else {
                        EXIT_CHECK
                    }
                }
                Err(e) => report_error(&e),
            }
        }
    }
}
