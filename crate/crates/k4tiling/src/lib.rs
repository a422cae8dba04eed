//! Extremal constructions, exact clique tilings, lexicographic
//! rank-4-packings and quadratic bound verification for dense K4-tilings.

pub mod constructions;
pub mod error;
pub mod graph;
pub mod io;
pub mod opt;
pub mod packing;
pub mod tiling;

pub use error::{Error, Result};
pub use graph::{Graph, VertexSet};
