use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{brent, norm_cdf};

/// Firm-value inputs: assets `V`, debt face `L` due in `dT` years.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MertonStructuralInputs {
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub r: f64,
    #[serde(rename = "sigma_V")]
    pub sigma_v: f64,
    #[serde(rename = "dT")]
    pub dt: f64,
    #[serde(rename = "mu_V", default)]
    pub mu_v: f64,
}

impl MertonStructuralInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0 && self.l > 0.0 && self.sigma_v > 0.0 && self.dt > 0.0) {
            return Err(Error::domain("Merton inputs need V, L, sigma_V, dT > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquityValue {
    pub equity: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Equity as a call on the firm's assets.
pub fn merton_equity_value(m: &MertonStructuralInputs) -> Result<EquityValue> {
    m.validate()?;
    let sd = m.sigma_v * m.dt.sqrt();
    let d1 = ((m.v / m.l).ln() + (m.r + 0.5 * m.sigma_v * m.sigma_v) * m.dt) / sd;
    let d2 = d1 - sd;
    let equity = m.v * norm_cdf(d1) - m.l * (-m.r * m.dt).exp() * norm_cdf(d2);
    Ok(EquityValue { equity, d1, d2 })
}

/// Equity volatility implied by asset volatility: `(V/E) N(d1) σ_V`.
pub fn merton_equity_vol(m: &MertonStructuralInputs) -> Result<f64> {
    let e = merton_equity_value(m)?;
    Ok(m.v / e.equity * norm_cdf(e.d1) * m.sigma_v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefaultMetrics {
    pub distance_to_default: f64,
    pub default_probability: f64,
}

pub fn merton_default_metrics(m: &MertonStructuralInputs) -> Result<DefaultMetrics> {
    m.validate()?;
    let dd = ((m.v / m.l).ln() + (m.mu_v - 0.5 * m.sigma_v * m.sigma_v) * m.dt)
        / (m.sigma_v * m.dt.sqrt());
    Ok(DefaultMetrics {
        distance_to_default: dd,
        default_probability: norm_cdf(-dd),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MertonCalibration {
    pub v: f64,
    pub sigma_v: f64,
    /// Relative misfit of equity value and equity volatility.
    pub equity_residual: f64,
    pub vol_residual: f64,
}

/// Largest asset volatility the calibration will consider.
pub const MAX_ASSET_VOL: f64 = 5.0;

/// Recovers `(V, σ_V)` from observed equity value and volatility.
///
/// For each trial `σ_V` the equity equation is solved for `V` on
/// `[E, E + L e^{-r dT}]` (slightly widened), which always brackets the root; the outer search
/// then matches the equity volatility on `(0, min(σ_E, MAX_ASSET_VOL)]`.
pub fn merton_calibrate(
    e_obs: f64,
    sigma_e: f64,
    l: f64,
    r: f64,
    dt: f64,
) -> Result<MertonCalibration> {
    if !(e_obs > 0.0 && sigma_e > 0.0 && l > 0.0 && dt > 0.0) {
        return Err(Error::domain("calibration needs E, sigma_E, L, dT > 0"));
    }
    let debt_pv = l * (-r * dt).exp();
    let solve_v = |sigma_v: f64| -> Result<f64> {
        let f = |v: f64| {
            let m = MertonStructuralInputs {
                v,
                l,
                r,
                sigma_v,
                dt,
                mu_v: r,
            };
            merton_equity_value(&m)
                .map(|e| e.equity - e_obs)
                .unwrap_or(f64::NAN)
        };
        // the upper end is a root itself in the zero-volatility limit
        let hi = (e_obs + debt_pv) * (1.0 + 1e-9);
        brent(f, e_obs, hi, 1e-14 * hi, 200)
    };
    let vol_gap = |sigma_v: f64| -> f64 {
        match solve_v(sigma_v) {
            Ok(v) => {
                let m = MertonStructuralInputs {
                    v,
                    l,
                    r,
                    sigma_v,
                    dt,
                    mu_v: r,
                };
                merton_equity_vol(&m)
                    .map(|s| s - sigma_e)
                    .unwrap_or(f64::NAN)
            }
            Err(_) => f64::NAN,
        }
    };
    let hi = sigma_e.min(MAX_ASSET_VOL);
    let lo = hi * 1e-9;
    let sigma_v = brent(vol_gap, lo, hi, 1e-15 * hi, 200).map_err(|e| match e {
        Error::Calibration { residual, .. } => Error::Calibration {
            message: format!(
                "no asset volatility in [{lo:e}, {hi}] reproduces equity vol {sigma_e} at equity {e_obs}"
            ),
            residual,
        },
        other => other,
    })?;
    let v = solve_v(sigma_v)?;
    let m = MertonStructuralInputs {
        v,
        l,
        r,
        sigma_v,
        dt,
        mu_v: r,
    };
    let equity_residual = (merton_equity_value(&m)?.equity - e_obs).abs() / e_obs;
    let vol_residual = (merton_equity_vol(&m)? - sigma_e).abs() / sigma_e;
    Ok(MertonCalibration {
        v,
        sigma_v,
        equity_residual,
        vol_residual,
    })
}
