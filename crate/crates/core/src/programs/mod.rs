//! Distributed algorithms expressed as [`NodeProgram`](crate::sim::NodeProgram)s,
//! and the centralized selection oracle that checks them.

mod count;
mod cycle_is;
mod rmds;
mod selection;

pub use count::{count_neighborhood_program, CountNeighborhood, NeighborhoodCounter};
pub use cycle_is::{cycle_is_program, CycleIndependentSet, CycleIsState};
pub use rmds::{rmds_program, Phase, Rmds, RmdsOutput, RmdsState};
pub use selection::{selection_oracle, SelectionMap};

use crate::sim::{Message, ProgramFault};

fn unexpected(expected: &str, got: &Message) -> ProgramFault {
    ProgramFault(format!("expected {expected} message, got {got:?}"))
}
