//! Deterministic network decomposition and maximal independent set
//! algorithms, simulated sequentially with LOCAL round accounting.

pub mod cluster;
pub mod error;
pub mod generate;
pub mod graph;
pub mod ledger;
pub mod mis;
pub mod nd;
pub mod params;
pub mod rounding;
pub mod ruling;
pub mod sampling;

pub use error::{Error, Result};
pub use graph::{Graph, Node};
