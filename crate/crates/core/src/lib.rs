//! Deterministic simulation and analysis of distance-`r` domination in the
//! CONGEST model on high-girth sparse graphs.
//!
//! - [`graph`]: immutable graphs and exact sequential primitives.
//! - [`generators`]: cycles, paths, seeded trees, subdivisions and the
//!   subdivided-biclique tightness family.
//! - [`sim`]: lockstep message-passing simulator with bit accounting.
//! - [`programs`]: neighborhood counting, greedy domination and the cycle
//!   independent-set reduction as node programs.
//! - [`oracles`]: domination/independence predicates, exact and greedy solvers.
//! - [`voronoi`]: Voronoi cells around a dominating set, structural checks and
//!   the approximation report.

pub mod generators;
pub mod graph;
pub mod oracles;
pub mod programs;
pub mod sim;
pub mod voronoi;

pub use graph::{Girth, Graph, GraphError, VertexId};
