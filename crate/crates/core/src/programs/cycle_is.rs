use crate::graph::VertexId;
use crate::sim::{Message, NodeContext, NodeProgram, ProgramFault, Step};

use super::unexpected;

/// What a non-dominating vertex learned about one side of its component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Side {
    hops: u64,
    origin: VertexId,
    flag: bool,
}

#[derive(Clone, Debug)]
pub struct CycleIsState {
    member: bool,
    id: VertexId,
    ports: usize,
    sides: [Option<Side>; 2],
}

/// Turns a distance-`r` dominating set of a cycle into an independent set.
///
/// Every vertex of the dominating set floods `(hops, id, flag)` both ways,
/// with `flag` set only on its port 0. Vertices outside the set forward what
/// they hear until they know both dominating endpoints of their component.
/// The representor is the endpoint with the lower ID; if both endpoints are
/// the same vertex, the side whose flood carries the flag. A vertex joins the
/// independent set iff its hop distance from the representor side is odd.
/// Takes at most `2r + 1` communication rounds when every component has at
/// most `2r` vertices, and faults otherwise.
#[derive(Clone, Copy, Debug)]
pub struct CycleIndependentSet {
    r: usize,
}

impl CycleIndependentSet {
    /// Panics if `r == 0`.
    pub fn new(r: usize) -> Self {
        assert!(r >= 1, "distance must be positive");
        CycleIndependentSet { r }
    }

    pub fn max_rounds(&self) -> usize {
        2 * self.r + 1
    }
}

pub fn cycle_is_program(r: usize) -> CycleIndependentSet {
    CycleIndependentSet::new(r)
}

impl NodeProgram for CycleIndependentSet {
    /// Membership in the dominating set.
    type Input = bool;
    type State = CycleIsState;
    /// Membership in the independent set.
    type Output = bool;

    fn init(&self, ctx: NodeContext<'_, bool>) -> CycleIsState {
        CycleIsState { member: *ctx.input, id: ctx.id, ports: ctx.ports, sides: [None, None] }
    }

    fn step(&self, st: &mut CycleIsState, round: usize, inbox: &[Option<Message>]) -> Result<Step<bool>, ProgramFault> {
        if st.ports != 2 {
            return Err(ProgramFault(format!("vertex has {} ports, expected a cycle", st.ports)));
        }
        if st.member {
            let flood = |flag| Some(Message::Flood { hops: 1, id: st.id, flag });
            return Ok(Step { outbox: vec![flood(true), flood(false)], output: Some(false) });
        }
        let mut outbox = vec![None, None];
        for (p, m) in inbox.iter().enumerate() {
            match m {
                Some(Message::Flood { hops, id, flag }) => {
                    if st.sides[p].is_none() {
                        st.sides[p] = Some(Side { hops: *hops, origin: *id, flag: *flag });
                        outbox[1 - p] = Some(Message::Flood { hops: hops + 1, id: *id, flag: *flag });
                    }
                }
                Some(other) => return Err(unexpected("flood", other)),
                None => {}
            }
        }
        let outbox = if outbox.iter().any(Option::is_some) { outbox } else { Vec::new() };
        match st.sides {
            [Some(a), Some(b)] => {
                let rep = if (a.origin, !a.flag) <= (b.origin, !b.flag) { a } else { b };
                Ok(Step { outbox, output: Some(rep.hops % 2 == 1) })
            }
            _ if round >= self.max_rounds() => Err(ProgramFault(format!(
                "no dominating vertex on both sides after {round} rounds; component longer than {}",
                2 * self.r
            ))),
            _ => Ok(Step::send(outbox)),
        }
    }
}
