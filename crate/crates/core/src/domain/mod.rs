//! The domain complex, fields on it, target sets and refinement.

pub mod complex;
pub mod field;
pub mod refine;
pub mod region;
pub mod targets;

pub use complex::{Complex1D, Edge, Location, Vertex, VertexId};
pub use field::{Knot, PlField, ScalarField};
pub use refine::{refine_at_levels, refine_for_targets, subdivide, EdgePiece, Refined, Subdivision};
pub use region::{Region, Segment};
pub use targets::TargetSet;
