use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A positive deterministic function with value 1 at `t = 0`.
///
/// Tables are interpolated log-linearly with the point `(0, 1)` implied, and
/// extrapolated with the last log-slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UnitFunction {
    /// `exp(-rate · t)`, written as a bare number.
    Exp(f64),
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

impl UnitFunction {
    pub fn exp(rate: f64) -> Self {
        UnitFunction::Exp(rate)
    }

    pub fn table(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let f = UnitFunction::Table { times, values };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            UnitFunction::Exp(rate) if rate.is_finite() => Ok(()),
            UnitFunction::Exp(_) => Err(Error::input("decay rate must be finite")),
            UnitFunction::Table { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::input(
                        "table needs matching non-empty times and values",
                    ));
                }
                if !(times[0] > 0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::ordering(
                        "table times must be positive and strictly increasing",
                    ));
                }
                if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::domain("table values must be positive"));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            UnitFunction::Exp(rate) => (-rate * t).exp(),
            UnitFunction::Table { times, values } => {
                let k = times.partition_point(|&x| x < t).min(times.len() - 1);
                let (t0, l0) = if k == 0 {
                    (0.0, 0.0)
                } else {
                    (times[k - 1], values[k - 1].ln())
                };
                let (t1, l1) = (times[k], values[k].ln());
                (l0 + (l1 - l0) * (t - t0) / (t1 - t0)).exp()
            }
        }
    }
}

/// A function with values strictly inside `(0, 1)`; tables interpolate
/// linearly and extend flat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Weight {
    Const(f64),
    Table { times: Vec<f64>, values: Vec<f64> },
}

impl Weight {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: &f64| *v > 0.0 && *v < 1.0;
        match self {
            Weight::Const(v) if ok(v) => Ok(()),
            Weight::Const(v) => Err(Error::domain(format!("weight {v} outside (0, 1)"))),
            Weight::Table { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::input(
                        "table needs matching non-empty times and values",
                    ));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::ordering("table times must be strictly increasing"));
                }
                if !values.iter().all(ok) {
                    return Err(Error::domain("weights must lie in (0, 1)"));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Weight::Const(v) => *v,
            Weight::Table { times, values } => {
                let k = times.partition_point(|&x| x < t);
                if k == 0 {
                    values[0]
                } else if k == times.len() {
                    values[k - 1]
                } else {
                    let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                    values[k - 1] + w * (values[k] - values[k - 1])
                }
            }
        }
    }
}
