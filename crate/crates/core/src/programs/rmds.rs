use std::collections::BTreeSet;

use serde::Serialize;

use crate::graph::VertexId;
use crate::sim::{Bitset, Message, NodeContext, NodeProgram, ProgramFault, Step};

use super::count::NeighborhoodCounter;
use super::unexpected;

/// `(|N^r(v)|, v)`, compared lexicographically.
pub type Tuple = (u64, VertexId);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Counting,
    Selecting,
    Backprop,
    Done,
}

#[derive(Clone, Debug)]
pub struct RmdsState {
    pub id: VertexId,
    pub phase: Phase,
    pub counter: NeighborhoodCounter,
    /// Current best tuple; after the selection phase, the selected vertex.
    pub best: Tuple,
    /// Tuple sent in selection round `i + 1`.
    pub sent_history: Vec<Tuple>,
    /// `recv_history[p][i]`: tuple received on port `p` in selection round `i + 1`.
    pub recv_history: Vec<Vec<Tuple>>,
    pub dominators: BTreeSet<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RmdsOutput {
    /// Whether this vertex ends up in the computed set.
    pub member: bool,
    /// The vertex this one selected.
    pub selected: VertexId,
    /// `|N^r(v)|` as computed in the counting phase.
    pub priority: u64,
}

/// Greedy distance-`r` domination in `3r - 1` communication rounds.
///
/// Rounds `1..r` count `|N^r(v)|`; rounds `r..2r` flood the best
/// `(count, id)` tuple for `r` hops; rounds `2r..3r` send back, per port, a
/// bitset naming which selection rounds carried a tuple that is now known to
/// be selected. A vertex is in the output iff its own ID comes back to it.
#[derive(Clone, Copy, Debug)]
pub struct Rmds {
    r: usize,
}

impl Rmds {
    /// Panics if `r == 0`.
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "distance must be positive");
        Rmds { r }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Communication rounds used on every graph: `3r - 1`.
    pub fn rounds(&self) -> usize {
        3 * self.r - 1
    }

    fn candidate(t: Tuple) -> Message {
        Message::Candidate { priority: t.0, id: t.1 }
    }

    fn start_selection(&self, st: &mut RmdsState) -> Step<RmdsOutput> {
        st.phase = Phase::Selecting;
        st.best = (st.counter.total(), st.id);
        st.sent_history.push(st.best);
        Step::send(vec![Some(Self::candidate(st.best)); st.recv_history.len()])
    }

    fn record_candidates(st: &mut RmdsState, inbox: &[Option<Message>]) -> Result<(), ProgramFault> {
        for (p, m) in inbox.iter().enumerate() {
            match m {
                Some(Message::Candidate { priority, id }) => {
                    let t = (*priority, *id);
                    st.recv_history[p].push(t);
                    st.best = st.best.max(t);
                }
                Some(other) => return Err(unexpected("candidate", other)),
                None => return Err(ProgramFault(format!("missing candidate on port {p}"))),
            }
        }
        Ok(())
    }

    fn bitsets(&self, st: &RmdsState) -> Vec<Option<Message>> {
        st.recv_history
            .iter()
            .map(|rounds| {
                let mut b = Bitset::new(self.r);
                for (i, t) in rounds.iter().enumerate() {
                    if st.dominators.contains(&t.1) {
                        b.set(i);
                    }
                }
                Some(Message::BackBitset(b))
            })
            .collect()
    }

    fn absorb_bitsets(&self, st: &mut RmdsState, inbox: &[Option<Message>]) -> Result<(), ProgramFault> {
        for (p, m) in inbox.iter().enumerate() {
            match m {
                Some(Message::BackBitset(b)) if b.len() == self.r => {
                    for i in b.ones() {
                        st.dominators.insert(st.sent_history[i].1);
                    }
                }
                Some(other) => return Err(unexpected("bitset", other)),
                None => return Err(ProgramFault(format!("missing bitset on port {p}"))),
            }
        }
        Ok(())
    }
}

pub fn rmds_program(r: usize) -> Rmds {
    Rmds::new(r)
}

impl NodeProgram for Rmds {
    type Input = ();
    type State = RmdsState;
    type Output = RmdsOutput;

    fn init(&self, ctx: NodeContext<'_, ()>) -> RmdsState {
        RmdsState {
            id: ctx.id,
            phase: Phase::Counting,
            counter: NeighborhoodCounter::new(ctx.ports),
            best: (0, ctx.id),
            sent_history: Vec::with_capacity(self.r),
            recv_history: vec![Vec::with_capacity(self.r); ctx.ports],
            dominators: BTreeSet::new(),
        }
    }

    fn step(
        &self,
        st: &mut RmdsState,
        round: usize,
        inbox: &[Option<Message>],
    ) -> Result<Step<RmdsOutput>, ProgramFault> {
        let r = self.r;
        match round {
            t if t < r => {
                if t > 1 {
                    st.counter.absorb(inbox)?;
                }
                Ok(Step::send(st.counter.outgoing()))
            }
            t if t == r => {
                if r > 1 {
                    st.counter.absorb(inbox)?;
                }
                Ok(self.start_selection(st))
            }
            t if t < 2 * r => {
                Self::record_candidates(st, inbox)?;
                st.sent_history.push(st.best);
                Ok(Step::send(vec![Some(Self::candidate(st.best)); inbox.len()]))
            }
            t if t == 2 * r => {
                Self::record_candidates(st, inbox)?;
                st.phase = Phase::Backprop;
                st.dominators.insert(st.best.1);
                Ok(Step::send(self.bitsets(st)))
            }
            t if t < 3 * r => {
                self.absorb_bitsets(st, inbox)?;
                Ok(Step::send(self.bitsets(st)))
            }
            t if t == 3 * r => {
                self.absorb_bitsets(st, inbox)?;
                st.phase = Phase::Done;
                Ok(Step::halt(RmdsOutput {
                    member: st.dominators.contains(&st.id),
                    selected: st.best.1,
                    priority: st.counter.total(),
                }))
            }
            t => Err(ProgramFault(format!("stepped after halting (round {t})"))),
        }
    }
}
