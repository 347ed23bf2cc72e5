//! Nominal and real discount curves, bond stripping and forward index values.

mod bootstrap;
mod curve;
mod pair;

pub use bootstrap::{
    bootstrap_piecewise_forwards, BootstrapOptions, BootstrapResult, CouponBondQuote,
};
pub use curve::{CurveKind, DiscountCurve};
pub use pair::CurvePair;
