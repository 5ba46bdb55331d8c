//! Exact finite balls of Cayley graphs.

mod ball;
mod delta;
pub mod io;

pub use ball::{regular_tree_ball_size, CayleyBall, Geodesics, VertexId, DEFAULT_VERTEX_CAP};
pub use delta::{estimate_delta, DeltaParams, DeltaScope, HyperbolicityEstimate};

use std::sync::Arc;

use crate::error::Result;
use crate::group::GroupOracle;

/// Builds the radius-`radius` ball with the default vertex cap.
pub fn build_ball(oracle: &Arc<GroupOracle>, radius: usize) -> Result<CayleyBall> {
    CayleyBall::build(Arc::clone(oracle), radius, DEFAULT_VERTEX_CAP)
}
