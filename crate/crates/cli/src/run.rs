use std::collections::BTreeSet;

use rdomsim_core::graph::{girth, neighborhood_size_oracle};
use rdomsim_core::oracles::{is_independent, is_r_dominating};
use rdomsim_core::programs::{count_neighborhood_program, cycle_is_program, rmds_program, RmdsOutput};
use rdomsim_core::sim::{run_simulation, word_bits, NodeProgram, RoundTrace, SimConfig, SimError, SimulationReport};
use rdomsim_core::voronoi::{approx_report, ApproxReport};
use rdomsim_core::{Girth, Graph, VertexId};
use serde::Serialize;

use crate::spec::{Algo, DSource, ExperimentSpec, Instance};
use crate::RunError;

/// Algorithm-specific results.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum Outcome {
    Rmds {
        d: Vec<VertexId>,
        analysis: ApproxReport,
    },
    Count {
        /// Vertices whose simulated count differs from the exact one.
        mismatches: Vec<VertexId>,
    },
    CycleIs {
        d: Vec<VertexId>,
        i: Vec<VertexId>,
        independent: bool,
        /// `2|I| >= n - |D|`.
        size_bound: bool,
    },
}

/// Everything one run produced. Serialized as the JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub spec: ExperimentSpec,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub f_r: usize,
    pub girth: Girth,
    pub girth_premise: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rounds: usize,
    pub max_message_bits: usize,
    pub message_bit_limit: usize,
    pub outcome: Outcome,
    /// Names of the checks that failed.
    pub failures: Vec<String>,
    pub pass: bool,
    #[serde(skip)]
    pub trace: Vec<RoundTrace>,
}

impl RunRecord {
    pub fn analysis(&self) -> Option<&ApproxReport> {
        match &self.outcome {
            Outcome::Rmds { analysis, .. } => Some(analysis),
            _ => None,
        }
    }
}

fn simulate<P: NodeProgram>(
    g: &Graph,
    prog: &P,
    input: impl Fn(VertexId) -> P::Input,
    rounds: usize,
    spec: &ExperimentSpec,
    limit: usize,
) -> Result<SimulationReport<P::Output>, RunError> {
    let config = SimConfig {
        round_budget: spec.budgets.rounds.unwrap_or(rounds),
        bit_budget: Some(spec.budgets.message_bits.unwrap_or(limit)),
        trace: spec.outputs.trace.is_some(),
    };
    run_simulation(g, prog, input, &config).map_err(|e| match e {
        SimError::BudgetExceeded { .. } | SimError::BitBudgetExceeded { .. } => RunError::Budget(e),
        _ => RunError::Sim(e),
    })
}

fn members(rep: &SimulationReport<RmdsOutput>) -> Vec<VertexId> {
    rep.outputs.iter().filter(|(_, o)| o.member).map(|(&v, _)| v).collect()
}

/// Runs one experiment end to end. Check failures end up in
/// [`RunRecord::failures`]; errors are reserved for runs that could not
/// complete.
pub fn execute(spec: &ExperimentSpec) -> Result<RunRecord, RunError> {
    spec.validate()?;
    let r = spec.r;
    let f_r = spec.f_r()?;
    let Instance { graph: g, tightness } = spec.family.build(r)?;
    let gth = girth(&g);
    let premise = gth.at_least(4 * r + 3);
    if !premise && !spec.allow_low_girth {
        return Err(RunError::Premise { girth: gth, need: 4 * r + 3 });
    }
    let limit = 2 * word_bits(g.n()) + 1;
    let mut failures = Vec::new();
    let mut fail = |name: &str| failures.push(name.to_string());
    let has_edges = g.m() > 0;

    let (outcome, rounds, bits, trace) = match spec.algo {
        Algo::Rmds => {
            let prog = rmds_program(r);
            let rep = simulate(&g, &prog, |_| (), prog.rounds(), spec, limit)?;
            if has_edges && rep.rounds_executed != prog.rounds() {
                fail("rounds");
            }
            let supplied = spec.m.clone();
            let mut analysis = approx_report(&g, r, f_r, &rep, supplied.as_deref(), spec.budgets.exact())?;
            if analysis.opt.is_none() {
                // the sides of the tightness construction dominate once r >= 2
                if let Some(t) = tightness.as_ref().filter(|t| is_r_dominating(&g, &t.sides(), r).unwrap_or(false)) {
                    analysis = approx_report(&g, r, f_r, &rep, Some(&t.sides()), spec.budgets.exact())?;
                }
            }
            if !analysis.dominating {
                fail("dominating");
            }
            if !analysis.selection_consistent {
                fail("selection_consistent");
            }
            if analysis.premises_hold() {
                if let Some(l) = analysis.lemmas {
                    for (ok, name) in [
                        (l.cells_tree, "cells_tree"),
                        (l.single_edge, "single_edge"),
                        (l.quotient_bound, "quotient_bound"),
                    ] {
                        if !ok {
                            fail(name);
                        }
                    }
                }
                if let Some(c) = analysis.checks {
                    for (ok, name) in [
                        (c.ratio, "ratio"),
                        (c.d_outer, "d_outer"),
                        (c.d_inner, "d_inner"),
                        (c.di_in_t, "di_in_T"),
                        (c.boundary, "boundary"),
                    ] {
                        if !ok {
                            fail(name);
                        }
                    }
                }
            }
            if let Some(want) = spec.expect_cells_tree {
                if analysis.lemmas.map(|l| l.cells_tree) != Some(want) {
                    fail("expect_cells_tree");
                }
            }
            let (rounds, bits) = (rep.rounds_executed, rep.max_message_bits);
            (Outcome::Rmds { d: members(&rep), analysis }, rounds, bits, rep.trace)
        }
        Algo::Count => {
            let prog = count_neighborhood_program(r);
            let rep = simulate(&g, &prog, |_| (), r - 1, spec, limit)?;
            if has_edges && rep.rounds_executed != r - 1 {
                fail("rounds");
            }
            let mut mismatches = Vec::new();
            for (&v, &c) in &rep.outputs {
                if neighborhood_size_oracle(&g, v, r)? as u64 != c {
                    mismatches.push(v);
                }
            }
            if !mismatches.is_empty() {
                fail("count_mismatch");
            }
            (Outcome::Count { mismatches }, rep.rounds_executed, rep.max_message_bits, rep.trace)
        }
        Algo::CycleIs => {
            let d: Vec<VertexId> = match spec.d_source {
                DSource::Rmds => {
                    let prog = rmds_program(r);
                    let rep = simulate(&g, &prog, |_| (), prog.rounds(), &untraced(spec), limit)?;
                    members(&rep)
                }
                DSource::Stride => {
                    g.vertices().iter().copied().filter(|v| (v.0 as usize).is_multiple_of(2 * r + 1)).collect()
                }
            };
            let in_d: BTreeSet<VertexId> = d.iter().copied().collect();
            let prog = cycle_is_program(r);
            let rep = simulate(&g, &prog, |v| in_d.contains(&v), prog.max_rounds(), spec, limit)?;
            if rep.rounds_executed > prog.max_rounds() {
                fail("rounds");
            }
            let i: Vec<VertexId> = rep.outputs.iter().filter(|(_, &b)| b).map(|(&v, _)| v).collect();
            let independent = is_independent(&g, &i)?;
            let size_bound = 2 * i.len() + d.len() >= g.n();
            if !independent {
                fail("independent");
            }
            if !size_bound {
                fail("size_bound");
            }
            let outcome = Outcome::CycleIs { d, i, independent, size_bound };
            (outcome, rep.rounds_executed, rep.max_message_bits, rep.trace)
        }
    };
    if bits > limit {
        failures.push("message_bits".into());
    }
    Ok(RunRecord {
        label: spec.label(),
        spec: spec.clone(),
        n: g.n(),
        m: g.m(),
        r,
        f_r,
        girth: gth,
        girth_premise: premise,
        seed: spec.family.seed(),
        rounds,
        max_message_bits: bits,
        message_bit_limit: limit,
        outcome,
        pass: failures.is_empty(),
        failures,
        trace,
    })
}

/// Settings for the auxiliary greedy run that feeds `cycle_is`.
fn untraced(spec: &ExperimentSpec) -> ExperimentSpec {
    let mut s = spec.clone();
    s.outputs.trace = None;
    s.budgets.rounds = None;
    s
}
