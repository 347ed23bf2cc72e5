use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::decay_integral;

/// `dr = a (b - r) dt + σ dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VasicekParams {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
}

impl VasicekParams {
    pub fn new(a: f64, b: f64, sigma: f64) -> Result<Self> {
        if !(a > 0.0) || !(sigma > 0.0) || !b.is_finite() {
            return Err(Error::domain(format!(
                "Vasicek needs a > 0, sigma > 0 (got a={a}, sigma={sigma})"
            )));
        }
        Ok(Self { a, b, sigma })
    }

    /// Stationary variance `σ² / 2a`.
    pub fn long_run_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.a)
    }
}

/// Mean and variance of `r(t)` given `r(0) = r0`.
pub fn vasicek_transition_moments(p: &VasicekParams, r0: f64, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::domain(format!(
            "transition horizon must be positive, got {t}"
        )));
    }
    let decay = (-p.a * t).exp();
    let mean = decay * r0 - p.b * (-p.a * t).exp_m1();
    let variance = p.sigma * p.sigma * decay_integral(2.0 * p.a, t);
    Ok((mean, variance))
}
