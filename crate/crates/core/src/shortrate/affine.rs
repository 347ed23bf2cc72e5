//! Bond prices and curve fitting for Gaussian short rates
//! `dr = (θ(t) - a r) dt + σ dW` with piecewise-constant θ.
//!
//! With `B(t,T) = (1 - e^{-a(T-t)}) / a`,
//! `P(t,T) = exp(-B r - ∫_t^T θ(s) B(s,T) ds + ½σ² ∫_t^T B(s,T)² ds)`.

use crate::curves::DiscountCurve;
use crate::error::{Error, Result};
use crate::math::{decay_integral, integrate_smooth};
use crate::piecewise::PiecewiseConstant;

/// `B(t, t + tau)`.
pub fn bond_b(a: f64, tau: f64) -> f64 {
    decay_integral(a, tau)
}

/// `∫_0^y B(x) dx` in time-to-maturity `x`.
fn b_antiderivative(a: f64, y: f64) -> f64 {
    let u = a * y;
    if u.abs() < 1e-3 {
        y * y * (0.5 - u / 6.0 + u * u / 24.0 - u * u * u / 120.0 + u * u * u * u / 720.0)
    } else {
        (y - decay_integral(a, y)) / a
    }
}

/// `∫_{s0}^{s1} B(s, T) ds` for `s0 <= s1 <= T`.
fn b_integral(a: f64, s0: f64, s1: f64, maturity: f64) -> f64 {
    b_antiderivative(a, maturity - s0) - b_antiderivative(a, maturity - s1)
}

/// `∫_t^T B(s,T)² ds`.
pub fn b_squared_integral(a: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    integrate_smooth(|x| decay_integral(a, x).powi(2), 0.0, tau, 1.0)
}

/// `∫_t^T θ(s) B(s,T) ds`.
fn theta_b_integral(a: f64, theta: &PiecewiseConstant, t: f64, maturity: f64) -> f64 {
    theta
        .segments(t, maturity)
        .map(|(s, e, v)| v * b_integral(a, s, e, maturity))
        .sum()
}

fn check_horizon(theta: &PiecewiseConstant, maturity: f64) -> Result<()> {
    if maturity > theta.horizon() * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "theta is defined up to {}, requested {maturity}",
            theta.horizon()
        )));
    }
    Ok(())
}

/// `ln A(t,T)` so that `P(t,T) = A e^{-B r}`.
pub fn log_a(a: f64, sigma: f64, theta: &PiecewiseConstant, t: f64, maturity: f64) -> Result<f64> {
    if maturity < t {
        return Err(Error::ordering(format!(
            "bond maturity {maturity} precedes {t}"
        )));
    }
    check_horizon(theta, maturity)?;
    Ok(-theta_b_integral(a, theta, t, maturity)
        + 0.5 * sigma * sigma * b_squared_integral(a, maturity - t))
}

/// Zero-coupon bond price at `t` given short rate `r`.
pub fn zcb_price(
    a: f64,
    sigma: f64,
    theta: &PiecewiseConstant,
    t: f64,
    maturity: f64,
    r: f64,
) -> Result<f64> {
    Ok((log_a(a, sigma, theta, t, maturity)? - bond_b(a, maturity - t) * r).exp())
}

/// Fits θ on the curve's node grid so the model reprices every node exactly.
///
/// The initial short rate is the curve's first instantaneous forward. Each
/// node adds one unknown and one equation, so the system is triangular.
pub fn fit_theta(a: f64, sigma: f64, curve: &DiscountCurve) -> Result<(f64, PiecewiseConstant)> {
    fit_theta_on(a, sigma, curve, curve.node_times())
}

/// As [`fit_theta`] but on caller-chosen knots, which are then the times at
/// which the model reprices the curve exactly.
pub fn fit_theta_on(
    a: f64,
    sigma: f64,
    curve: &DiscountCurve,
    knots: &[f64],
) -> Result<(f64, PiecewiseConstant)> {
    if knots.is_empty() || !(knots[0] > 0.0) || knots.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ordering(
            "theta knots must be positive and strictly increasing",
        ));
    }
    let r0 = curve.instantaneous_forward(0.0);
    let mut values: Vec<f64> = Vec::with_capacity(knots.len());
    for (k, &tk) in knots.iter().enumerate() {
        let ln_p = -curve.integrated_forward(0.0, tk)?;
        let mut rhs = -ln_p - bond_b(a, tk) * r0 + 0.5 * sigma * sigma * b_squared_integral(a, tk);
        let mut start = 0.0;
        for (j, &tj) in knots[..k].iter().enumerate() {
            rhs -= values[j] * b_integral(a, start, tj, tk);
            start = tj;
        }
        let w = b_integral(a, start, tk, tk);
        let v = rhs / w;
        if !v.is_finite() {
            return Err(Error::numerical(format!(
                "theta fit broke down at knot {tk}"
            )));
        }
        values.push(v);
    }
    Ok((r0, PiecewiseConstant::new(knots.to_vec(), values)?))
}
