//! Eigenvector-basis weights and weighted GMRES residual bounds.

mod bounds;
mod envelope;
mod weights;

pub use bounds::{
    block_bound, block_bound_history, bound_25, bound_26a, bound_history, bound_reports, weighted_poly_min,
    weighted_poly_min_history, BoundHistory, BoundReport,
};
pub use envelope::{disk_envelope, initial_decrease_constants, iter_lower_bound, DiskEnvelope};
pub use weights::{
    block_weight_split, compute_block_weights, compute_weights, BlockWeightRecord, WeightRecord,
};
