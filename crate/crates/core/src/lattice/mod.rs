//! Recombining trees: CRR equity options, the Ho-Lee short-rate tree and the
//! trinomial probability bound.

mod binomial;
mod ho_lee;

pub use binomial::{binomial_option_value, black_scholes, BinomialSpec};
pub use ho_lee::{ho_lee_calibrate, HoLeeTree, HoLeeTreeSpec};

use crate::error::{Error, Result};

/// `min[(1 + R - d)/(l - d), (u - (1 + R))/(u - l)]` for a three-branch step
/// with gross returns `d < l < u`.
pub fn trinomial_probability_bound(u: f64, l: f64, d: f64, r: f64) -> Result<f64> {
    if !(d < l && l < u) {
        return Err(Error::input(format!(
            "trinomial returns must satisfy d < l < u, got {d}, {l}, {u}"
        )));
    }
    let growth = 1.0 + r;
    Ok(((growth - d) / (l - d)).min((u - growth) / (u - l)))
}
