//! Numerical search over decompositions and purifications.

mod chart;
mod delta;
mod nelder_mead;

pub use chart::IsometryChart;
pub use delta::{
    canonical_embedding, candidate_shapes, certified_gap, minimize_delta, minimize_ep, pure_delta, OptConfig,
    OptResult, RestartTrace, ShapeMode,
};
pub use nelder_mead::{Minimum, NelderMead};
