pub mod error;
pub mod fast;
pub mod formula;
pub mod graph;
pub mod homology;
pub mod morse;
pub mod names;
pub mod cell;
pub mod corpus;
pub mod planar;
pub mod presentation;
pub mod snf;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Graph, Policy};
