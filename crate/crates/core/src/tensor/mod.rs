//! Dense representation of `(g, C, K)`, the bracket `[K,K]` and the sectional K-curvature.

mod cubic;
mod metric;
mod structure;

pub use cubic::{canonical_indices, packed_len, packed_offset, SymCubic};
pub use metric::{Metric, MAX_DIM};
pub use structure::{CurvatureLikeResiduals, Plane, Projection, StatStructure, DEFAULT_TOL};
