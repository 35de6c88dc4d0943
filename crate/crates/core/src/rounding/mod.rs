//! Pairwise utility/cost rounding.

mod coloring;
mod instance;
mod quadratic;

pub use coloring::{monochromatic_weight, weighted_defective_coloring};
pub use instance::{ColoredRounding, EdgeTerm, RoundingInstance, VertexTerm, Which};
pub use quadratic::{BinaryColored, BinaryObjective, Quadratic};
