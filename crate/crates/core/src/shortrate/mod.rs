//! One-factor short-rate models and the Merton structural credit model.

pub mod affine;
mod cir;
mod hull_white;
mod merton;
mod vasicek;

pub use cir::{cir_step, CirModel, CirParams};
pub use hull_white::{
    hull_white_exact_step, shortrate_sde_spec, HullWhiteModel, HullWhiteParams, Transform,
};
pub use merton::{
    merton_calibrate, merton_default_metrics, merton_equity_value, merton_equity_vol,
    DefaultMetrics, EquityValue, MertonCalibration, MertonStructuralInputs,
};
pub use vasicek::{vasicek_transition_moments, VasicekParams};
