//! Vertex-centric BSP graph processing and distributed k-core decomposition.
//!
//! The crate is `no_std` (it only needs `alloc`). It contains:
//!
//! * [`graph`]: undirected simple graphs in CSR form, built from raw edge lists.
//! * [`bsp`]: a Pregel-style superstep engine with vote-to-halt, message
//!   delivery at barriers, aggregators and hash partitioning. Parallelism is
//!   pluggable through [`bsp::Executor`]; this crate ships only a serial one.
//! * [`kcore`]: the k-core vertex program (degree initialisation followed by
//!   repeated upper-bound refinement from neighbour estimates).
//! * [`oracle`]: sequential bucket peeling, used as ground truth.
//! * [`metrics`]: per-superstep statistics and the run report.
//!
//! File formats, threads and the command line live in the `kcore-tools` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bsp;
pub mod graph;
pub mod kcore;
pub mod metrics;
pub mod oracle;

pub use bsp::{run, EngineConfig, EngineError, Executor, Serial, VertexProgram};
pub use graph::{normalize, EdgeList, Graph, VertexId};
pub use kcore::{compute_upper_bound, decompose, CoreResult, KCore};
pub use metrics::{collect, RunMeta, RunReport, SuperstepStats};
pub use oracle::{peel, summarize};
