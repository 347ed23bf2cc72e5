//! Calendar arithmetic, CPI storage and the elementary rate identities.

mod cpi;
mod date;
mod rates;

pub use cpi::{CpiSeries, DEFAULT_LAG_MONTHS};
pub use date::{year_fraction, CivilDate, MonthStamp};
pub use rates::{
    breakeven_rate, cpi_inflation, fisher_nominal_rate, fisher_real_rate, imputed_zero_yield,
    realized_inflation_rate, Convention, FisherMode, ImputedYield, RateQuote,
};
