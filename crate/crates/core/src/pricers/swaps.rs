use serde::Serialize;

use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::jy::{path_discount, JyModel};
use crate::mc::{price_paths, McResult, PathGrid, SimulationConfig};

/// Present values of both legs seen by the fixed-rate payer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapValue {
    pub pv_fixed: f64,
    pub pv_float: f64,
    pub fair_k: f64,
}

impl SwapValue {
    /// Value to the party receiving inflation and paying fixed.
    pub fn pv(&self) -> f64 {
        self.pv_float - self.pv_fixed
    }
}

/// Zero-coupon inflation swap maturing at `maturity`, exchanging
/// `(1 + K)^T - 1` against `I(T)/I(0) - 1` once.
pub fn zciis_price(
    pair: &CurvePair,
    maturity: f64,
    strike: f64,
    notional: f64,
) -> Result<SwapValue> {
    if !(maturity > 0.0) {
        return Err(Error::ordering(format!(
            "swap maturity {maturity} is not in the future"
        )));
    }
    let p_n = pair.nominal().df(maturity)?;
    let p_r = pair.real().df(maturity)?;
    Ok(SwapValue {
        pv_fixed: notional * ((1.0 + strike).powf(maturity) - 1.0) * p_n,
        pv_float: notional * (p_r - p_n),
        fair_k: (p_r / p_n).powf(1.0 / maturity) - 1.0,
    })
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::input("swap schedule is empty"));
    }
    if !(schedule[0] > 0.0) || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ordering(
            "schedule must be positive and strictly increasing",
        ));
    }
    Ok(())
}

/// Year-on-year inflation swap: at each `T_k` the fixed leg pays `K` and the
/// floating leg `I(T_k)/I(T_{k-1}) - 1`, valued with forward inflation rates
/// and no convexity adjustment.
pub fn yyiis_price(
    pair: &CurvePair,
    schedule: &[f64],
    strike: f64,
    notional: f64,
) -> Result<SwapValue> {
    check_schedule(schedule)?;
    let mut annuity = 0.0;
    let mut float = 0.0;
    let mut prev = 0.0;
    for &t in schedule {
        let p_n = pair.nominal().df(t)?;
        let fwd = pair.forward_inflation_rate(prev, t)?;
        annuity += p_n;
        float += p_n * fwd;
        prev = t;
    }
    Ok(SwapValue {
        pv_fixed: notional * strike * annuity,
        pv_float: notional * float,
        fair_k: float / annuity,
    })
}

/// Monte Carlo value of the year-on-year floating leg under a JY model.
/// Every schedule date must sit on the simulation grid.
pub fn yyiis_float_mc(
    model: &JyModel,
    schedule: &[f64],
    notional: f64,
    steps_per_year: usize,
    config: &SimulationConfig,
) -> Result<McResult> {
    check_schedule(schedule)?;
    let horizon = *schedule.last().unwrap();
    let n_steps = (horizon * steps_per_year as f64).round() as usize;
    let grid = PathGrid::new(0.0, horizon, n_steps.max(1))?;
    let dt = grid.dt();
    let mut idx = Vec::with_capacity(schedule.len());
    for &t in schedule {
        let k = (t / dt).round();
        if (k * dt - t).abs() > 1e-9 * t.max(1.0) {
            return Err(Error::input(format!(
                "schedule date {t} is not on the simulation grid"
            )));
        }
        idx.push(k as usize);
    }
    price_paths(
        model,
        &grid,
        config,
        |path| {
            let mut prev = 0;
            let mut v = 0.0;
            for &k in &idx {
                v += path_discount(&path[..=k]) * (path[k].i / path[prev].i - 1.0);
                prev = k;
            }
            notional * v
        },
        |_| 1.0,
    )
}
