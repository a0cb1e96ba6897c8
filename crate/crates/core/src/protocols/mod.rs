//! Entanglement manipulation: Gaussian local operations on two copies, the
//! de-Gaussification and Gaussification steps that do distil, and passive
//! entangling networks.

mod gaussian;
mod nongaussian;
mod passive;

pub use gaussian::{gaussian_locc_step, no_go_monte_carlo, GaussianLoccProtocol, NoGoReport};
pub use nongaussian::{
    distill_grid, distill_pipeline, gaussianity_distance, gaussify_step, nongaussian_first_step,
    nongaussian_first_step_with, ConditionalState, DistillationTrace, FirstStepInput, FirstStepOptions,
    TraceRecord, FIRST_STEP_TAIL_LIMIT, V_GRID,
};
pub use passive::{passive_max_entanglement, passive_optimizer, PassiveOptimum};
