use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::norm_cdf;
use crate::pricers::OptionType;

/// Cox-Ross-Rubinstein tree with `u = e^{σ√(T/N)}` and `d = 1/u`.
///
/// `r` is a continuously compounded rate; each step discounts by
/// `e^{-r T/N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialSpec {
    pub sigma: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub s0: f64,
}

impl BinomialSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(self.t > 0.0) || !(self.s0 > 0.0) || !self.r.is_finite() {
            return Err(Error::domain(
                "binomial tree needs positive sigma, T and s0 and a finite rate",
            ));
        }
        if self.n == 0 {
            return Err(Error::input("binomial tree needs at least one step"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.t / self.n as f64
    }

    /// `(u, d)` with `d` taken as the exact reciprocal exponent.
    pub fn up_down(&self) -> (f64, f64) {
        let step = self.sigma * self.dt().sqrt();
        (step.exp(), (-step).exp())
    }

    /// Risk-neutral up probability; outside `[0, 1]` the tree admits arbitrage.
    pub fn risk_neutral_probability(&self) -> Result<f64> {
        self.validate()?;
        let (u, d) = self.up_down();
        let q = ((self.r * self.dt()).exp() - d) / (u - d);
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Arbitrage(format!(
                "risk-neutral probability {q} outside [0, 1]"
            )));
        }
        Ok(q)
    }

    /// Stock price after `k` steps with `j` up moves.
    pub fn node_price(&self, k: usize, j: usize) -> f64 {
        let step = self.sigma * self.dt().sqrt();
        self.s0 * (step * (2.0 * j as f64 - k as f64)).exp()
    }
}

/// European value of a terminal payoff by backward induction.
pub fn binomial_option_value(spec: &BinomialSpec, payoff: impl Fn(f64) -> f64) -> Result<f64> {
    let q = spec.risk_neutral_probability()?;
    let disc = (-spec.r * spec.dt()).exp();
    let mut v: Vec<f64> = (0..=spec.n)
        .map(|j| payoff(spec.node_price(spec.n, j)))
        .collect();
    for k in (0..spec.n).rev() {
        for j in 0..=k {
            v[j] = disc * (q * v[j + 1] + (1.0 - q) * v[j]);
        }
    }
    let value = v[0];
    if !value.is_finite() {
        return Err(Error::numerical("binomial value is not finite"));
    }
    Ok(value)
}

/// Black-Scholes value of a European call or put on a non-dividend stock.
pub fn black_scholes(s0: f64, strike: f64, r: f64, sigma: f64, t: f64, kind: OptionType) -> f64 {
    let sd = sigma * t.sqrt();
    let d1 = ((s0 / strike).ln() + (r + 0.5 * sigma * sigma) * t) / sd;
    let d2 = d1 - sd;
    let df = (-r * t).exp();
    match kind {
        OptionType::Call => s0 * norm_cdf(d1) - strike * df * norm_cdf(d2),
        OptionType::Put => strike * df * norm_cdf(-d2) - s0 * norm_cdf(-d1),
    }
}
