//! Robust sublinear expanders, the crux of a graph, and certified search for
//! large clique subdivisions.
//!
//! Every subdivision produced by this crate is returned as a
//! [`subdivision::SubdivisionCertificate`] that can be re-checked with
//! [`subdivision::verify_subdivision`] independently of how it was found.

pub mod crux;
pub mod error;
pub mod expansion;
pub mod experiments;
pub mod graph;
pub mod pipeline;
pub mod ratio;
mod search;
pub mod subdivision;
pub mod webs;

pub use error::{Error, ParseError, Result};
pub use graph::{Graph, GraphSpec, Path, Rational, Subgraph, VertexSet};
