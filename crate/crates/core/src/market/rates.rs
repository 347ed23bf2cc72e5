//! Elementary rate identities: realized inflation, Fisher, bill yields.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a decimal rate accrues over one year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Growth factor `1 + r τ`.
    SimpleAnnualized,
    /// Growth factor `(1 + r)^τ`.
    CompoundedAnnual,
    /// Growth factor `exp(r τ)`.
    Continuous,
}

/// A decimal rate tagged with its accrual convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateQuote {
    pub value: f64,
    pub convention: Convention,
}

impl RateQuote {
    pub fn new(value: f64, convention: Convention) -> Self {
        Self { value, convention }
    }

    pub fn compounded(value: f64) -> Self {
        Self::new(value, Convention::CompoundedAnnual)
    }

    /// Growth factor over one year.
    fn annual_growth(&self) -> f64 {
        match self.convention {
            Convention::SimpleAnnualized | Convention::CompoundedAnnual => 1.0 + self.value,
            Convention::Continuous => self.value.exp(),
        }
    }

    /// Annually compounded equivalent of the one-year growth.
    fn annual_rate(&self) -> f64 {
        match self.convention {
            Convention::SimpleAnnualized | Convention::CompoundedAnnual => self.value,
            Convention::Continuous => self.value.exp_m1(),
        }
    }

    /// Re-expresses the rate so that it produces the same one-year growth.
    pub fn convert(&self, to: Convention) -> Result<RateQuote> {
        let g = self.annual_growth();
        if !(g > 0.0) {
            return Err(Error::domain(format!(
                "rate {} has non-positive growth factor",
                self.value
            )));
        }
        let value = match to {
            Convention::SimpleAnnualized | Convention::CompoundedAnnual => g - 1.0,
            Convention::Continuous => g.ln(),
        };
        Ok(RateQuote::new(value, to))
    }
}

/// Total and annualized inflation between two index readings `tau` years apart.
pub fn realized_inflation_rate(index_start: f64, index_end: f64, tau: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) {
        return Err(Error::domain(format!(
            "accrual period must be positive, got {tau}"
        )));
    }
    if !(index_start > 0.0) || !(index_end > 0.0) {
        return Err(Error::domain("index levels must be positive"));
    }
    let total = index_end / index_start - 1.0;
    Ok((total, total / tau))
}

/// Percentage change between two CPI readings.
pub fn cpi_inflation(cpi_start: f64, cpi_end: f64) -> Result<f64> {
    if !(cpi_start > 0.0) {
        return Err(Error::domain(format!(
            "starting CPI must be positive, got {cpi_start}"
        )));
    }
    Ok((cpi_end - cpi_start) / cpi_start)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FisherMode {
    /// `(1 + n) / (1 + i) - 1`.
    Exact,
    /// `n - i`.
    Additive,
}

/// Real rate implied by a nominal rate and an inflation rate.
///
/// Both quotes are converted to annual compounding first; the result is an
/// annually compounded real rate.
pub fn fisher_real_rate(nominal: RateQuote, inflation: RateQuote, mode: FisherMode) -> Result<f64> {
    let n = nominal.annual_rate();
    let i = inflation.annual_rate();
    match mode {
        FisherMode::Exact => {
            if 1.0 + i == 0.0 {
                return Err(Error::domain(
                    "inflation of -100% makes the Fisher identity singular",
                ));
            }
            Ok((1.0 + n) / (1.0 + i) - 1.0)
        }
        FisherMode::Additive => Ok(n - i),
    }
}

/// Nominal rate recovered from a real rate and inflation: `(1 + r)(1 + i) - 1`.
pub fn fisher_nominal_rate(real: f64, inflation: f64) -> f64 {
    (1.0 + real) * (1.0 + inflation) - 1.0
}

/// Yield implied by buying a discount bill at `price` that repays `face`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImputedYield {
    /// `(face / price - 1) / tenor`.
    pub simple: f64,
    /// `(face / price)^(1 / tenor) - 1`.
    pub compounded: f64,
}

pub fn imputed_zero_yield(price: f64, face: f64, tenor_years: f64) -> Result<ImputedYield> {
    if !(price > 0.0) {
        return Err(Error::domain(format!(
            "price must be positive, got {price}"
        )));
    }
    if !(face > 0.0) || price > face {
        return Err(Error::domain(format!(
            "need 0 < price <= face, got {price} / {face}"
        )));
    }
    if !(tenor_years > 0.0) {
        return Err(Error::domain("tenor must be positive"));
    }
    let growth = face / price;
    Ok(ImputedYield {
        simple: (growth - 1.0) / tenor_years,
        compounded: growth.powf(1.0 / tenor_years) - 1.0,
    })
}

/// Breakeven inflation: nominal yield less the inflation-linked yield.
pub fn breakeven_rate(nominal_yield: f64, il_yield: f64) -> f64 {
    nominal_yield - il_yield
}
