//! Monte Carlo simulation: scalar SDE schemes, a seeded path engine and
//! strong-convergence measurement.

pub mod convergence;
pub mod engine;
pub mod sde;

pub use convergence::{
    gbm_convergence, strong_convergence_order, ConvergenceReport, ConvergenceStudy,
};
pub use engine::{
    left_point_discount, mc_discounted_expectation, price_paths, simulate_map, simulate_paths,
    McResult, Noise, PathGrid, PathModel, PathNoise, PathSet, SdeModel, SimulationConfig,
    MAX_STORED_STATES,
};
pub use sde::{euler_step, gbm_exact_step, milstein_step, scheme_step, Scheme, SdeSpec};
