use serde::{Deserialize, Serialize};

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::market::{CivilDate, CpiSeries};

/// Inflation-protected bond with unit real principal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipsSpec {
    /// Real coupon paid at each payment time, per unit principal.
    pub coupon: f64,
    /// Year fractions from the valuation date.
    pub payment_times: Vec<f64>,
    /// Reference index at issue.
    pub base_index: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TipsPrice {
    pub real_price: f64,
    pub nominal_price: f64,
    pub index_ratio: f64,
}

impl TipsSpec {
    fn validate(&self) -> Result<()> {
        if self.payment_times.is_empty() {
            return Err(Error::input("bond has no payments"));
        }
        if !(self.payment_times[0] > 0.0) || self.payment_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ordering(
                "payment times must be positive and strictly increasing",
            ));
        }
        if !(self.base_index > 0.0) {
            return Err(Error::domain("base index must be positive"));
        }
        Ok(())
    }

    /// `Σ (c + δ_last) P_r(0, T_i)`, principal added at the final payment.
    pub fn real_price(&self, pair: &CurvePair) -> Result<f64> {
        self.validate()?;
        let last = self.payment_times.len() - 1;
        let mut pv = 0.0;
        for (k, &t) in self.payment_times.iter().enumerate() {
            let cash = self.coupon + if k == last { 1.0 } else { 0.0 };
            pv += cash * pair.real().df(t)?;
        }
        Ok(pv)
    }

    /// Real price scaled by a known reference index.
    pub fn price_with_reference(
        &self,
        pair: &CurvePair,
        reference_index: f64,
    ) -> Result<TipsPrice> {
        let real_price = self.real_price(pair)?;
        let index_ratio = reference_index / self.base_index;
        Ok(TipsPrice {
            real_price,
            nominal_price: index_ratio * real_price,
            index_ratio,
        })
    }
}

/// Dirty price at date `d`, using the lagged, interpolated reference index.
pub fn tips_dirty_price(
    spec: &TipsSpec,
    pair: &CurvePair,
    series: &CpiSeries,
    d: CivilDate,
) -> Result<TipsPrice> {
    spec.validate()?;
    let reference = series.inflation_reference(d)?;
    spec.price_with_reference(pair, reference)
}
