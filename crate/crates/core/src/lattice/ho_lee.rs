//! Ho-Lee short-rate tree fitted by forward induction.
//!
//! Rates at step `k` are `α_k + (2j - k) σ √dt`, `j = 0..=k`, with up and down
//! moves equally likely. Arrow-Debreu prices `Q_{k,j}` are rolled forward and
//! each `α_k` is solved in closed form from
//! `P(0, (k+1) dt) = Σ_j Q_{k,j} e^{-r_{k,j} dt}`. The drift is
//! `θ_k = (α_{k+1} - α_k) / dt`, which for the first step gives
//! `θ_0 = [-ln P(0, 2dt) - 2 r_0 dt + ln cosh(σ dt^{3/2})] / dt²`.

use std::io::Write;

use serde::Serialize;

use crate::curves::DiscountCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct HoLeeTreeSpec {
    pub sigma: f64,
    pub dt: f64,
    /// Initial short rate. It is implied by `P(0, dt)`; if supplied it must
    /// agree with that value.
    pub r0: Option<f64>,
    pub target_curve: DiscountCurve,
    pub horizon_steps: usize,
}

/// A calibrated tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoLeeTree {
    pub sigma: f64,
    pub dt: f64,
    /// Rate level `α_k` per step.
    pub alphas: Vec<f64>,
    /// Drift `θ_k` between steps `k` and `k + 1`.
    pub thetas: Vec<f64>,
    /// `Q_{k,j}` for `k = 0..=horizon_steps`.
    pub arrow_debreu: Vec<Vec<f64>>,
}

impl HoLeeTree {
    pub fn rate(&self, k: usize, j: usize) -> f64 {
        self.alphas[k] + (2.0 * j as f64 - k as f64) * self.sigma * self.dt.sqrt()
    }

    /// `P(0, k dt)` implied by the tree.
    pub fn discount_factor(&self, k: usize) -> f64 {
        self.arrow_debreu[k].iter().sum()
    }

    pub fn steps(&self) -> usize {
        self.arrow_debreu.len() - 1
    }

    /// Writes `step,node,rate_or_price,arrow_debreu`. Terminal nodes carry no
    /// rate, so their third column is the zero-coupon price of that step.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "node", "rate_or_price", "arrow_debreu"])?;
        let last = self.steps();
        for (k, row) in self.arrow_debreu.iter().enumerate() {
            for (j, q) in row.iter().enumerate() {
                let value = if k < last {
                    self.rate(k, j)
                } else {
                    self.discount_factor(k)
                };
                w.write_record([
                    k.to_string(),
                    j.to_string(),
                    value.to_string(),
                    q.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn ho_lee_calibrate(spec: &HoLeeTreeSpec) -> Result<HoLeeTree> {
    if !(spec.dt > 0.0) || !(spec.sigma >= 0.0) {
        return Err(Error::domain("Ho-Lee tree needs dt > 0 and sigma >= 0"));
    }
    if spec.horizon_steps == 0 {
        return Err(Error::input("Ho-Lee tree needs at least one step"));
    }
    let targets: Vec<f64> = (1..=spec.horizon_steps)
        .map(|k| spec.target_curve.df(k as f64 * spec.dt))
        .collect::<Result<_>>()?;
    if let Some(bad) = targets.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
        return Err(Error::input(format!(
            "discount factor {bad} is not positive"
        )));
    }
    let implied_r0 = -targets[0].ln() / spec.dt;
    if let Some(r0) = spec.r0 {
        if (r0 - implied_r0).abs() > 1e-12 * (1.0 + implied_r0.abs()) {
            return Err(Error::input(format!(
                "r0 = {r0} disagrees with the curve's first-step rate {implied_r0}"
            )));
        }
    }

    let spread = spec.sigma * spec.dt.sqrt();
    let mut alphas = Vec::with_capacity(spec.horizon_steps);
    let mut ad: Vec<Vec<f64>> = vec![vec![1.0]];
    for (k, &target) in targets.iter().enumerate() {
        let q = &ad[k];
        // Σ_j Q_{k,j} e^{-(2j-k) σ √dt dt}, in logs for stability
        let shifted: f64 = q
            .iter()
            .enumerate()
            .map(|(j, qj)| qj * (-(2.0 * j as f64 - k as f64) * spread * spec.dt).exp())
            .sum();
        let alpha = (shifted.ln() - target.ln()) / spec.dt;
        alphas.push(alpha);
        let mut next = vec![0.0; k + 2];
        for (j, qj) in q.iter().enumerate() {
            let r = alpha + (2.0 * j as f64 - k as f64) * spread;
            let flow = 0.5 * qj * (-r * spec.dt).exp();
            next[j] += flow;
            next[j + 1] += flow;
        }
        ad.push(next);
    }
    let thetas = alphas.windows(2).map(|w| (w[1] - w[0]) / spec.dt).collect();
    Ok(HoLeeTree {
        sigma: spec.sigma,
        dt: spec.dt,
        alphas,
        thetas,
        arrow_debreu: ad,
    })
}
