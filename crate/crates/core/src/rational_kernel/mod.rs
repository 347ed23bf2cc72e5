//! Rational pricing kernels driven by two unit-initialised exponential
//! martingales, with closed-form bond prices.

mod functions;
mod kernel;

pub use functions::{UnitFunction, Weight};
pub use kernel::{
    martingale_step, rpks_cpi, rpks_fit, rpks_il_bond, rpks_kernels, rpks_nominal_bond,
    rpks_real_bond, Kernels, MartingaleState, RpksModel, RpksParams,
};
