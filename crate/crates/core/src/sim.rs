//! Lockstep simulator for synchronous message passing with CONGEST bit
//! accounting.
//!
//! Each vertex runs its own copy of a [`NodeProgram`]. Ports of a vertex are
//! numbered by ascending neighbor ID; programs never see neighbor IDs except
//! through message contents. A message put on port `p` during round `t`
//! appears in the neighbor's inbox at round `t + 1`. Round 1 starts with an
//! empty inbox.
//!
//! `rounds_executed` counts communication rounds: the index of the last round
//! in which some message was sent. A program that only inspects its inbox and
//! halts is doing local computation at the end of the previous round. So a
//! program that sends in rounds `1..=k` and halts after reading the round-`k`
//! messages reports `k` rounds.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

/// Fixed-width bitset carried by back-propagation messages. Bit `i`
/// (0-based) is round `i + 1`; rendered least significant round first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitset {
    bits: Vec<bool>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset { bits: vec![false; len] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn set(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }
}

impl std::fmt::Display for Bitset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Payload of one message on one port in one round.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Message {
    Count(u64),
    Candidate { priority: u64, id: VertexId },
    BackBitset(Bitset),
    Flood { hops: u64, id: VertexId, flag: bool },
}

impl Message {
    /// Encoded size. Integer fields cost `word` bits each, where `word` is
    /// `ceil(log2(n + 1))`; a bitset costs its length; a flag costs 1.
    pub fn bit_length(&self, word: usize) -> usize {
        match self {
            Message::Count(_) => word,
            Message::Candidate { .. } => 2 * word,
            Message::BackBitset(b) => b.len(),
            Message::Flood { .. } => 2 * word + 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Message::Count(_) => "count",
            Message::Candidate { .. } => "candidate",
            Message::BackBitset(_) => "bitset",
            Message::Flood { .. } => "flood",
        }
    }
}

/// `ceil(log2(n + 1))`: bits needed for an integer in `0..=n`.
pub fn word_bits(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

/// What a program sees when it is instantiated on a vertex.
#[derive(Clone, Copy, Debug)]
pub struct NodeContext<'a, I> {
    pub id: VertexId,
    pub ports: usize,
    pub input: &'a I,
}

/// Result of one step: messages per port, and the output once halted.
#[derive(Clone, Debug, PartialEq)]
pub struct Step<O> {
    pub outbox: Vec<Option<Message>>,
    pub output: Option<O>,
}

impl<O> Step<O> {
    pub fn send(outbox: Vec<Option<Message>>) -> Self {
        Step { outbox, output: None }
    }

    pub fn halt(output: O) -> Self {
        Step { outbox: Vec::new(), output: Some(output) }
    }
}

/// Raised by a program that detects its own contract was violated.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct ProgramFault(pub String);

/// Per-vertex state machine. `step` must depend only on its arguments.
pub trait NodeProgram {
    /// Per-vertex parameter handed to `init`.
    type Input;
    type State;
    type Output: Clone;

    fn init(&self, ctx: NodeContext<'_, Self::Input>) -> Self::State;

    fn step(
        &self,
        state: &mut Self::State,
        round: usize,
        inbox: &[Option<Message>],
    ) -> Result<Step<Self::Output>, ProgramFault>;
}

#[derive(Clone, Debug, Default)]
pub struct SimConfig {
    pub round_budget: usize,
    pub bit_budget: Option<usize>,
    pub trace: bool,
}

impl SimConfig {
    pub fn with_rounds(round_budget: usize) -> Self {
        SimConfig { round_budget, ..Default::default() }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("round budget {budget} exhausted with {running} nodes still running")]
    BudgetExceeded { budget: usize, running: usize },
    #[error("{from} sent a {bits}-bit message in round {round}, budget is {budget}")]
    BitBudgetExceeded { from: VertexId, round: usize, bits: usize, budget: usize },
    #[error("program fault at {vertex} in round {round}: {fault}")]
    ProgramFault { vertex: VertexId, round: usize, fault: ProgramFault },
    #[error("{vertex} produced {got} outbox slots for {ports} ports")]
    PortMismatch { vertex: VertexId, got: usize, ports: usize },
}

/// One vertex's activity in a traced round.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct VertexTrace {
    pub vertex: VertexId,
    pub received: Vec<String>,
    pub sent: Vec<String>,
    pub bits: usize,
}

/// One line of the JSON-lines trace.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RoundTrace {
    pub round: usize,
    pub vertices: Vec<VertexTrace>,
    pub bits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport<O> {
    pub outputs: BTreeMap<VertexId, O>,
    pub rounds_executed: usize,
    pub max_message_bits: usize,
    /// Messages sent in round `i + 1`.
    pub messages_per_round: Vec<usize>,
    /// Messages placed in an inbox, halted recipients included.
    pub deliveries: usize,
    pub trace: Vec<RoundTrace>,
}

fn describe(port: usize, m: &Message) -> String {
    let body = match m {
        Message::Count(c) => format!("{c}"),
        Message::Candidate { priority, id } => format!("({priority},{id})"),
        Message::BackBitset(b) => format!("{b}"),
        Message::Flood { hops, id, flag } => format!("({hops},{id},{})", u8::from(*flag)),
    };
    format!("p{port}:{}={body}", m.kind())
}

/// Runs `program` on every vertex of `g` in lockstep.
///
/// `input` supplies each vertex's parameter. Fails if a node is still running
/// once `round_budget` communication rounds have elapsed, or if any message
/// exceeds `bit_budget`.
pub fn run_simulation<P, F>(
    g: &Graph,
    program: &P,
    input: F,
    config: &SimConfig,
) -> Result<SimulationReport<P::Output>, SimError>
where
    P: NodeProgram,
    F: Fn(VertexId) -> P::Input,
{
    let n = g.n();
    let word = word_bits(n);
    // reverse_port[v][p] = port index of v in the adjacency of its p-th neighbor
    let reverse_port: Vec<Vec<usize>> = (0..n)
        .map(|v| g.adj(v).iter().map(|&u| g.adj(u).binary_search(&v).expect("symmetric adjacency")).collect())
        .collect();
    let inputs: Vec<P::Input> = g.vertices().iter().map(|&v| input(v)).collect();
    let mut states: Vec<P::State> =
        (0..n).map(|v| program.init(NodeContext { id: g.id(v), ports: g.adj(v).len(), input: &inputs[v] })).collect();
    let mut outputs: Vec<Option<P::Output>> = vec![None; n];
    let mut inbox: Vec<Vec<Option<Message>>> = (0..n).map(|v| vec![None; g.adj(v).len()]).collect();
    let mut report = SimulationReport {
        outputs: BTreeMap::new(),
        rounds_executed: 0,
        max_message_bits: 0,
        messages_per_round: Vec::new(),
        deliveries: 0,
        trace: Vec::new(),
    };
    let mut running = n;
    let mut round = 0;
    while running > 0 {
        round += 1;
        // Round `budget + 1` may still read the last messages and halt.
        if round > config.round_budget + 1 {
            return Err(SimError::BudgetExceeded { budget: config.round_budget, running });
        }
        let mut next: Vec<Vec<Option<Message>>> = (0..n).map(|v| vec![None; g.adj(v).len()]).collect();
        let mut sent = 0;
        let mut round_bits = 0;
        let mut traces = Vec::new();
        for v in 0..n {
            if outputs[v].is_some() {
                continue;
            }
            let vid = g.id(v);
            let step = program.step(&mut states[v], round, &inbox[v]).map_err(|fault| SimError::ProgramFault {
                vertex: vid,
                round,
                fault,
            })?;
            let ports = g.adj(v).len();
            if !step.outbox.is_empty() && step.outbox.len() != ports {
                return Err(SimError::PortMismatch { vertex: vid, got: step.outbox.len(), ports });
            }
            let mut vtrace = config.trace.then(|| VertexTrace {
                vertex: vid,
                received: inbox[v].iter().enumerate().filter_map(|(p, m)| m.as_ref().map(|m| describe(p, m))).collect(),
                sent: Vec::new(),
                bits: 0,
            });
            for (p, msg) in step.outbox.into_iter().enumerate() {
                let Some(msg) = msg else { continue };
                let bits = msg.bit_length(word);
                if let Some(budget) = config.bit_budget {
                    if bits > budget {
                        return Err(SimError::BitBudgetExceeded { from: vid, round, bits, budget });
                    }
                }
                report.max_message_bits = report.max_message_bits.max(bits);
                round_bits += bits;
                sent += 1;
                if let Some(t) = vtrace.as_mut() {
                    t.sent.push(describe(p, &msg));
                    t.bits += bits;
                }
                let u = g.adj(v)[p];
                next[u][reverse_port[v][p]] = Some(msg);
            }
            if let Some(t) = vtrace {
                traces.push(t);
            }
            if let Some(out) = step.output {
                outputs[v] = Some(out);
                running -= 1;
            }
        }
        if sent > 0 {
            if round > config.round_budget {
                return Err(SimError::BudgetExceeded { budget: config.round_budget, running });
            }
            report.rounds_executed = round;
        }
        report.messages_per_round.push(sent);
        report.deliveries += next.iter().flatten().filter(|m| m.is_some()).count();
        if config.trace {
            report.trace.push(RoundTrace { round, vertices: traces, bits: round_bits });
        }
        inbox = next;
    }
    report.messages_per_round.truncate(report.rounds_executed);
    report.outputs = outputs.into_iter().enumerate().map(|(v, o)| (g.id(v), o.expect("all nodes halted"))).collect();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_cycle, gen_path};

    /// Never halts; echoes a count on every port.
    struct Chatter;

    impl NodeProgram for Chatter {
        type Input = ();
        type State = usize;
        type Output = ();

        fn init(&self, ctx: NodeContext<'_, ()>) -> usize {
            ctx.ports
        }

        fn step(&self, ports: &mut usize, _round: usize, _inbox: &[Option<Message>]) -> Result<Step<()>, ProgramFault> {
            Ok(Step::send(vec![Some(Message::Count(1)); *ports]))
        }
    }

    /// Sends its own ID once, then outputs the sorted IDs it heard.
    struct Gossip;

    impl NodeProgram for Gossip {
        type Input = ();
        type State = (VertexId, usize);
        type Output = Vec<VertexId>;

        fn init(&self, ctx: NodeContext<'_, ()>) -> Self::State {
            (ctx.id, ctx.ports)
        }

        fn step(
            &self,
            st: &mut Self::State,
            round: usize,
            inbox: &[Option<Message>],
        ) -> Result<Step<Vec<VertexId>>, ProgramFault> {
            if round == 1 {
                let m = Message::Candidate { priority: 0, id: st.0 };
                return Ok(Step::send(vec![Some(m); st.1]));
            }
            let mut heard: Vec<VertexId> = inbox
                .iter()
                .map(|m| match m {
                    Some(Message::Candidate { id, .. }) => Ok(*id),
                    other => Err(ProgramFault(format!("unexpected {other:?}"))),
                })
                .collect::<Result<_, _>>()?;
            heard.sort();
            Ok(Step::halt(heard))
        }
    }

    #[test]
    fn never_halting_program_exhausts_budget() {
        let g = gen_cycle(5).unwrap();
        let err = run_simulation(&g, &Chatter, |_| (), &SimConfig::with_rounds(5)).unwrap_err();
        assert_eq!(err, SimError::BudgetExceeded { budget: 5, running: 5 });
    }

    #[test]
    fn messages_reach_the_right_ports() {
        let g = gen_path(4).unwrap();
        let rep = run_simulation(&g, &Gossip, |_| (), &SimConfig::with_rounds(3)).unwrap();
        assert_eq!(rep.rounds_executed, 1);
        assert_eq!(rep.messages_per_round, vec![6]);
        assert_eq!(rep.deliveries, 6);
        assert_eq!(rep.outputs[&VertexId(1)], vec![VertexId(0), VertexId(2)]);
        assert_eq!(rep.outputs[&VertexId(3)], vec![VertexId(2)]);
        assert_eq!(rep.max_message_bits, 2 * word_bits(4));
    }

    #[test]
    fn bit_budget_is_enforced() {
        let g = gen_path(4).unwrap();
        let cfg = SimConfig { round_budget: 3, bit_budget: Some(1), trace: false };
        assert!(matches!(
            run_simulation(&g, &Gossip, |_| (), &cfg),
            Err(SimError::BitBudgetExceeded { bits: 6, budget: 1, round: 1, .. })
        ));
    }

    #[test]
    fn zero_round_budget_allows_local_only_programs() {
        let g = gen_path(3).unwrap();
        assert!(run_simulation(&g, &Gossip, |_| (), &SimConfig::with_rounds(0)).is_err());
    }

    #[test]
    fn trace_records_each_round() {
        let g = gen_path(2).unwrap();
        let cfg = SimConfig { round_budget: 2, bit_budget: None, trace: true };
        let rep = run_simulation(&g, &Gossip, |_| (), &cfg).unwrap();
        assert_eq!(rep.trace.len(), 2);
        assert_eq!(rep.trace[0].vertices[0].sent, vec!["p0:candidate=(0,0)".to_string()]);
        assert_eq!(rep.trace[1].vertices[0].received, vec!["p0:candidate=(0,1)".to_string()]);
        assert_eq!(rep.trace[0].bits, 8);
    }

    #[test]
    fn word_sizes() {
        assert_eq!(word_bits(0), 0);
        assert_eq!(word_bits(1), 1);
        assert_eq!(word_bits(7), 3);
        assert_eq!(word_bits(8), 4);
        assert_eq!(word_bits(11), 4);
    }
}
