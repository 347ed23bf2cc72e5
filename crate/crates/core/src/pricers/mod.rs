//! Closed-form inflation derivative pricers.

mod options;
mod swaps;
mod tips;
mod vols;

pub use crate::market::breakeven_rate;
pub use options::{
    index_option_price, index_option_price_with_v, inflation_option_price, inflation_option_value,
    IndexOptionSpec, InflationOptionSpec, InflationOptionValue, OptionType,
};
pub use swaps::{yyiis_float_mc, yyiis_price, zciis_price, SwapValue};
pub use tips::{tips_dirty_price, TipsPrice, TipsSpec};
pub use vols::FactorVols;
