use crate::sim::{Message, NodeContext, NodeProgram, ProgramFault, Step};

use super::unexpected;

/// Per-port subtree counts for computing `|N^r(v)|` on locally tree-like graphs.
///
/// After `i` exchanges, the count stored for port `p` is the size of the
/// depth-`i` subtree hanging off that neighbor, excluding the branch back to
/// this vertex. Exact as long as no cycle of length below `2r + 2` is visible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodCounter {
    counts: Vec<u64>,
}

impl NeighborhoodCounter {
    pub fn new(ports: usize) -> Self {
        NeighborhoodCounter { counts: vec![1; ports] }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// To each port: one plus the counts of all other ports.
    pub fn outgoing(&self) -> Vec<Option<Message>> {
        let total = self.total();
        self.counts.iter().map(|c| Some(Message::Count(1 + total - c))).collect()
    }

    pub fn absorb(&mut self, inbox: &[Option<Message>]) -> Result<(), ProgramFault> {
        for (p, m) in inbox.iter().enumerate() {
            match m {
                Some(Message::Count(c)) => self.counts[p] = *c,
                Some(other) => return Err(unexpected("count", other)),
                None => return Err(ProgramFault(format!("missing count on port {p}"))),
            }
        }
        Ok(())
    }
}

/// Computes `|N^r(v)|` at every vertex in `r - 1` communication rounds.
#[derive(Clone, Copy, Debug)]
pub struct CountNeighborhood {
    r: usize,
}

impl CountNeighborhood {
    /// Panics if `r == 0`.
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "distance must be positive");
        CountNeighborhood { r }
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

pub fn count_neighborhood_program(r: usize) -> CountNeighborhood {
    CountNeighborhood::new(r)
}

impl NodeProgram for CountNeighborhood {
    type Input = ();
    type State = NeighborhoodCounter;
    type Output = u64;

    fn init(&self, ctx: NodeContext<'_, ()>) -> NeighborhoodCounter {
        NeighborhoodCounter::new(ctx.ports)
    }

    fn step(
        &self,
        counter: &mut NeighborhoodCounter,
        round: usize,
        inbox: &[Option<Message>],
    ) -> Result<Step<u64>, ProgramFault> {
        if round > 1 {
            counter.absorb(inbox)?;
        }
        if round < self.r {
            Ok(Step::send(counter.outgoing()))
        } else {
            Ok(Step::halt(counter.total()))
        }
    }
}
