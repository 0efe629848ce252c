//! Sparse fault-tolerant subgraphs for min-cost arborescences, plus
//! fault-tolerant preservers for min-cost matroid bases.

pub mod arborescence;
pub mod charging;
pub mod cli;
pub mod cost;
pub mod eft;
pub mod fault;
pub mod ftp;
pub mod gen;
pub mod graph;
pub mod matroid;
pub mod paths;
pub mod perturb;

pub use arborescence::{min_cost_arborescence, Arborescence, Infeasible};
pub use cost::Cost;
pub use graph::{Edge, EdgeId, Graph, GraphError, VertexId};
pub use paths::{shortest_path, Path, PathKey};
