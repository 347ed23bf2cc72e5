//! Least-squares stripping of piecewise-constant forward curves from bond
//! prices.

use serde::{Deserialize, Serialize};

use super::curve::{CurveKind, DiscountCurve};
use crate::error::{Error, Result};
use crate::math::solve_dense;

/// A coupon bond price observation. Coupons are cash amounts per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouponBondQuote {
    pub kind: CurveKind,
    pub coupon: f64,
    pub payment_times: Vec<f64>,
    pub price: f64,
    pub face: f64,
}

impl CouponBondQuote {
    pub fn new(
        kind: CurveKind,
        coupon: f64,
        payment_times: Vec<f64>,
        price: f64,
        face: f64,
    ) -> Result<Self> {
        if payment_times.is_empty() {
            return Err(Error::input("bond quote needs at least one payment"));
        }
        if !(payment_times[0] > 0.0) || payment_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::ordering(
                "payment times must be positive and increasing",
            ));
        }
        if !(price > 0.0) || !(face > 0.0) {
            return Err(Error::domain("bond price and face must be positive"));
        }
        Ok(Self {
            kind,
            coupon,
            payment_times,
            price,
            face,
        })
    }

    /// Builds the schedule backwards from maturity at `frequency` payments a
    /// year; `annual_rate` is the coupon as a fraction of face. A frequency of
    /// zero gives a zero-coupon bond.
    pub fn from_schedule(
        kind: CurveKind,
        maturity: f64,
        annual_rate: f64,
        frequency: u32,
        price: f64,
        face: f64,
    ) -> Result<Self> {
        if !(maturity > 0.0) {
            return Err(Error::domain("maturity must be positive"));
        }
        if frequency == 0 {
            return Self::new(kind, 0.0, vec![maturity], price, face);
        }
        let period = 1.0 / frequency as f64;
        let mut times = Vec::new();
        let mut k = 0u32;
        loop {
            let t = maturity - k as f64 * period;
            if t <= 1e-9 {
                break;
            }
            times.push(t);
            k += 1;
        }
        times.reverse();
        Self::new(
            kind,
            annual_rate * face / frequency as f64,
            times,
            price,
            face,
        )
    }

    pub fn maturity(&self) -> f64 {
        *self.payment_times.last().unwrap()
    }

    /// `(time, amount)` pairs, principal included at maturity.
    pub fn cash_flows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.payment_times.len();
        self.payment_times.iter().enumerate().map(move |(i, &t)| {
            let principal = if i + 1 == n { self.face } else { 0.0 };
            (t, self.coupon + principal)
        })
    }

    /// `Σ C P(0,t_i) + F P(0,T)`.
    pub fn model_price(&self, curve: &DiscountCurve) -> Result<f64> {
        self.cash_flows().map(|(t, cf)| Ok(cf * curve.df(t)?)).sum()
    }
}

/// Settings for the damped Gauss-Newton fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    /// Stop once the residual norm falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub curve: DiscountCurve,
    /// Euclidean norm of model-minus-quoted prices.
    pub residual_norm: f64,
    /// Model-minus-quoted price per input quote.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// Set when any cash flow lies beyond the last node.
    pub extrapolated: bool,
}

/// Fits the forwards that minimise `Σ (model price - quoted price)²`.
///
/// `node_times` defaults to the sorted distinct quote maturities. Each node
/// interval must contain at least one quote maturity, otherwise the system is
/// under-determined and is rejected.
pub fn bootstrap_piecewise_forwards(
    quotes: &[CouponBondQuote],
    node_times: Option<&[f64]>,
    options: BootstrapOptions,
) -> Result<BootstrapResult> {
    let first = quotes
        .first()
        .ok_or_else(|| Error::input("bootstrap needs at least one quote"))?;
    let kind = first.kind;
    if quotes.iter().any(|q| q.kind != kind) {
        return Err(Error::input(
            "bootstrap quotes mix nominal and real instruments",
        ));
    }
    let nodes: Vec<f64> = match node_times {
        Some(n) => n.to_vec(),
        None => {
            let mut m: Vec<f64> = quotes.iter().map(|q| q.maturity()).collect();
            m.sort_by(f64::total_cmp);
            m.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
            m
        }
    };
    if nodes.is_empty() || !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ordering(
            "node times must be positive and strictly increasing",
        ));
    }
    let last = *nodes.last().unwrap();
    let longest = quotes.iter().map(|q| q.maturity()).fold(0.0, f64::max);
    if longest > last * (1.0 + 1e-12) {
        return Err(Error::input(format!(
            "node grid ends at {last} but quotes run to {longest}"
        )));
    }
    for (j, &hi) in nodes.iter().enumerate() {
        let lo = if j == 0 { 0.0 } else { nodes[j - 1] };
        if !quotes
            .iter()
            .any(|q| q.maturity() > lo && q.maturity() <= hi * (1.0 + 1e-12))
        {
            return Err(Error::input(format!(
                "node interval ({lo}, {hi}] holds no quote maturity; the fit is under-determined"
            )));
        }
    }

    let n = nodes.len();
    let avg_yield = quotes
        .iter()
        .map(|q| {
            let total: f64 = q.cash_flows().map(|(_, c)| c).sum();
            (total / q.price).ln() / q.maturity()
        })
        .sum::<f64>()
        / quotes.len() as f64;
    let mut forwards = vec![avg_yield; n];

    let evaluate = |fw: &[f64]| -> Result<(Vec<f64>, f64)> {
        let curve = DiscountCurve::new(kind, nodes.clone(), fw.to_vec())?;
        let r: Vec<f64> = quotes
            .iter()
            .map(|q| q.model_price(&curve).map(|p| p - q.price))
            .collect::<Result<_>>()?;
        let ss = r.iter().map(|x| x * x).sum::<f64>();
        Ok((r, ss))
    };
    // dP(0,t)/df_j = -P(0,t) * |(node_{j-1}, node_j] ∩ (0, t]|
    let jacobian = |fw: &[f64]| -> Result<Vec<f64>> {
        let curve = DiscountCurve::new(kind, nodes.clone(), fw.to_vec())?;
        let mut jac = vec![0.0; quotes.len() * n];
        for (qi, q) in quotes.iter().enumerate() {
            for (t, cf) in q.cash_flows() {
                let p = curve.df(t)?;
                for j in 0..n {
                    let lo = if j == 0 { 0.0 } else { nodes[j - 1] };
                    let hi = if j + 1 == n { f64::INFINITY } else { nodes[j] };
                    let overlap = (t.min(hi) - lo).max(0.0);
                    jac[qi * n + j] -= cf * p * overlap;
                }
            }
        }
        Ok(jac)
    };

    let (mut res, mut ss) = evaluate(&forwards)?;
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while ss.sqrt() > options.tolerance {
        if iterations >= options.max_iterations {
            return Err(Error::Calibration {
                message: format!(
                    "bootstrap did not converge in {} iterations",
                    options.max_iterations
                ),
                residual: ss.sqrt(),
            });
        }
        iterations += 1;
        let jac = jacobian(&forwards)?;
        let m = quotes.len();
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for a in 0..n {
            for b in 0..n {
                jtj[a * n + b] = (0..m).map(|q| jac[q * n + a] * jac[q * n + b]).sum();
            }
            jtr[a] = -(0..m).map(|q| jac[q * n + a] * res[q]).sum::<f64>();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = jtj.clone();
            for a in 0..n {
                damped[a * n + a] *= 1.0 + lambda;
            }
            let step = solve_dense(damped, jtr.clone())?;
            let trial: Vec<f64> = forwards.iter().zip(&step).map(|(f, s)| f + s).collect();
            let (trial_res, trial_ss) = evaluate(&trial)?;
            let step_norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
            if trial_ss < ss {
                forwards = trial;
                res = trial_res;
                ss = trial_ss;
                lambda = (lambda * 0.1).max(1e-12);
                improved = true;
                break;
            }
            if step_norm < 1e-15 {
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            // stationary point of an over-determined fit
            break;
        }
    }

    let curve = DiscountCurve::new(kind, nodes, forwards)?;
    let extrapolated = quotes.iter().any(|q| curve.extrapolates(q.maturity()));
    Ok(BootstrapResult {
        curve,
        residual_norm: ss.sqrt(),
        residuals: res,
        iterations,
        extrapolated,
    })
}
