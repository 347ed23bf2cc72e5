//! Jarrow-Yildirim three-factor inflation model: nominal short rate, real
//! short rate and the price index treated as an exchange rate.

mod dynamics;
mod fit;
mod params;

pub use dynamics::{
    breakeven_variant_drifts, jy_drift_restrictions, jy_euler_step, jy_exact_step, path_discount,
    BreakevenCorrelations, BreakevenVols, DriftRestrictions, ForwardVol, JyModel, JyScheme,
};
pub use fit::{jy_theta_fit, jy_zcb_reconstitution};
pub use params::{
    correlated_increments, Correlation, JyParams, JyState, MarketPriceOfRisk, INDEX, NOMINAL, REAL,
};
