//! JSON input records: curves, model parameters, simulation settings and
//! trades.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tables::load_curve_csv;
use crate::curves::{CurveKind, CurvePair, DiscountCurve};
use crate::error::{Error, Result};
use crate::jy::{JyParams, JyScheme};
use crate::market::CivilDate;
use crate::mc::Scheme;
use crate::piecewise::PiecewiseConstant;
use crate::shortrate::{HullWhiteParams, Transform};

/// A curve given inline, as a flat rate, or as a `node_time,forward` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveInput {
    Nodes {
        node_times: Vec<f64>,
        forwards: Vec<f64>,
    },
    Flat {
        flat: f64,
        horizon: f64,
    },
    File {
        file: String,
    },
}

impl CurveInput {
    pub fn build(&self, kind: CurveKind, base_dir: &Path) -> Result<DiscountCurve> {
        match self {
            CurveInput::Nodes {
                node_times,
                forwards,
            } => DiscountCurve::new(kind, node_times.clone(), forwards.clone()),
            CurveInput::Flat { flat, horizon } => DiscountCurve::flat(kind, *flat, *horizon),
            CurveInput::File { file } => load_curve_csv(&base_dir.join(file), kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketInput {
    pub nominal: CurveInput,
    pub real: CurveInput,
    pub spot_index: f64,
    /// `date,value` CPI file, needed for inflation-protected bonds.
    #[serde(default)]
    pub cpi: Option<String>,
    #[serde(default)]
    pub valuation_date: Option<CivilDate>,
}

impl MarketInput {
    pub fn curve_pair(&self, base_dir: &Path) -> Result<CurvePair> {
        CurvePair::new(
            self.nominal.build(CurveKind::Nominal, base_dir)?,
            self.real.build(CurveKind::Real, base_dir)?,
            self.spot_index,
        )
    }
}

/// JY parameters with the correlation given as three scalars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JyParamsInput {
    pub a_n: f64,
    pub a_r: f64,
    pub sigma_n: f64,
    pub sigma_r: f64,
    pub sigma_i: f64,
    pub rho_nr: f64,
    pub rho_ni: f64,
    pub rho_ri: f64,
}

impl JyParamsInput {
    pub fn build(&self) -> Result<JyParams> {
        JyParams::new(
            self.a_n,
            self.a_r,
            self.sigma_n,
            self.sigma_r,
            self.sigma_i,
            self.rho_nr,
            self.rho_ni,
            self.rho_ri,
        )
    }
}

/// Hull-White parameters with θ as parallel `theta_times`/`theta_values`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HullWhiteInput {
    pub a: f64,
    pub sigma: f64,
    pub theta_times: Vec<f64>,
    pub theta_values: Vec<f64>,
    #[serde(default)]
    pub transform: Transform,
}

impl HullWhiteInput {
    pub fn build(&self) -> Result<HullWhiteParams> {
        if self.theta_times.len() != self.theta_values.len() {
            return Err(Error::input(
                "theta_times and theta_values differ in length",
            ));
        }
        let theta = PiecewiseConstant::new(self.theta_times.clone(), self.theta_values.clone())?;
        HullWhiteParams::new(self.a, self.sigma, theta, self.transform)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationInput {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    pub n_paths: usize,
    pub n_steps: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub antithetic: bool,
}

fn default_scheme() -> Scheme {
    Scheme::Exact
}

impl SimulationInput {
    /// JY scheme for the requested SDE scheme. The rate factors have additive
    /// noise and the index is stepped in logs, so Milstein coincides with
    /// Euler.
    pub fn jy_scheme(&self) -> JyScheme {
        match self.scheme {
            Scheme::Exact => JyScheme::Exact,
            Scheme::Euler | Scheme::Milstein => JyScheme::Euler,
        }
    }
}

fn unit() -> f64 {
    1.0
}

/// One instrument in a trade file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trade {
    Zciis {
        trade_id: String,
        #[serde(rename = "T")]
        maturity: f64,
        #[serde(rename = "K")]
        strike: f64,
        notional: f64,
    },
    Yyiis {
        trade_id: String,
        schedule: Vec<f64>,
        #[serde(rename = "K")]
        strike: f64,
        notional: f64,
    },
    Tips {
        trade_id: String,
        coupon: f64,
        payment_times: Vec<f64>,
        base_index: f64,
        #[serde(default = "unit")]
        notional: f64,
    },
    IndexOption {
        trade_id: String,
        #[serde(rename = "K")]
        strike: f64,
        #[serde(rename = "T")]
        expiry: f64,
        call_put: crate::pricers::OptionType,
        #[serde(default = "unit")]
        notional: f64,
    },
    InflationOption {
        trade_id: String,
        #[serde(rename = "K")]
        strike: f64,
        #[serde(rename = "T1")]
        t1: f64,
        #[serde(rename = "T2")]
        t2: f64,
        call_put: crate::pricers::OptionType,
        #[serde(default = "unit")]
        notional: f64,
    },
}

impl Trade {
    pub fn id(&self) -> &str {
        match self {
            Trade::Zciis { trade_id, .. }
            | Trade::Yyiis { trade_id, .. }
            | Trade::Tips { trade_id, .. }
            | Trade::IndexOption { trade_id, .. }
            | Trade::InflationOption { trade_id, .. } => trade_id,
        }
    }
}
