//! Simulator for the synchronous LOCAL model of distributed computing.
//!
//! The crate is organized in four layers:
//!
//! * [`graph`]: immutable graphs, label assignments, clusters, network
//!   decompositions, generators and file formats.
//! * [`engine`]: the synchronous round engine that runs a [`engine::VertexProgram`]
//!   at every vertex while enforcing locality.
//! * [`algorithms`]: constant-round procedures built on the engine (random
//!   partition, bounded-degree coloring, dominating-set labeling, label merge,
//!   cluster-wise exact coloring) and the end-to-end pipeline.
//! * [`verify`]: independent verifiers, a brute-force chromatic-number oracle
//!   and a seeded trial harness for the probabilistic claims.
//!
//! ```
//! use localsim::algorithms::{pipeline, PipelineParams};
//! use localsim::graph::generate_gnp;
//! use localsim::verify::verify_coloring;
//!
//! let g = generate_gnp(60, 0.1, 1);
//! let run = pipeline(&g, &PipelineParams::default(), 7).unwrap();
//! assert!(verify_coloring(&g, &run.final_coloring()).unwrap().passed);
//! ```

pub mod algorithms;
pub mod engine;
pub mod graph;
pub mod verify;

pub(crate) mod numeric;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/approximate.md")]
    mod approximate {}
    #[doc = include_str!("../../../book/src/partition.md")]
    mod partition {}
    #[doc = include_str!("../../../book/src/color.md")]
    mod color {}
    #[doc = include_str!("../../../book/src/dominate.md")]
    mod dominate {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
