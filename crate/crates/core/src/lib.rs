pub mod analysis;
pub mod arith;
pub mod linalg;
pub mod loop_bounds;
pub mod program;
pub mod report;
pub mod ranking;
pub mod transform;
