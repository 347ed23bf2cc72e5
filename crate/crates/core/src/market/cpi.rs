use std::collections::BTreeMap;

use super::date::{CivilDate, MonthStamp};
use crate::error::{Error, Result};

/// Default indexation lag, in months, of the older of the two interpolated
/// observations.
pub const DEFAULT_LAG_MONTHS: u32 = 3;

/// Monthly price-index observations plus the bond's base reference value.
#[derive(Debug, Clone, PartialEq)]
pub struct CpiSeries {
    observations: BTreeMap<MonthStamp, f64>,
    base_index: f64,
}

impl CpiSeries {
    /// Observations must be in strictly increasing month order with positive
    /// values.
    pub fn new(observations: Vec<(MonthStamp, f64)>, base_index: f64) -> Result<Self> {
        if !(base_index > 0.0) || !base_index.is_finite() {
            return Err(Error::domain(format!(
                "base index must be positive, got {base_index}"
            )));
        }
        for (i, w) in observations.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::ordering(format!(
                    "CPI observation {} ({}) does not follow {}",
                    i + 2,
                    w[1].0,
                    w[0].0
                )));
            }
        }
        if let Some((m, v)) = observations
            .iter()
            .find(|(_, v)| !(*v > 0.0) || !v.is_finite())
        {
            return Err(Error::domain(format!(
                "CPI value for {m} must be positive, got {v}"
            )));
        }
        Ok(Self {
            observations: observations.into_iter().collect(),
            base_index,
        })
    }

    pub fn base_index(&self) -> f64 {
        self.base_index
    }

    pub fn with_base_index(mut self, base_index: f64) -> Result<Self> {
        if !(base_index > 0.0) {
            return Err(Error::domain("base index must be positive"));
        }
        self.base_index = base_index;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn get(&self, month: MonthStamp) -> Option<f64> {
        self.observations.get(&month).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthStamp, f64)> + '_ {
        self.observations.iter().map(|(m, v)| (*m, *v))
    }

    fn require(&self, month: MonthStamp) -> Result<f64> {
        self.get(month)
            .ok_or_else(|| Error::InsufficientData(format!("no CPI observation for {month}")))
    }

    /// Daily inflation reference with the default three-month lag.
    pub fn inflation_reference(&self, d: CivilDate) -> Result<f64> {
        self.inflation_reference_with_lag(d, DEFAULT_LAG_MONTHS)
    }

    /// Interpolates between the observations `lag` and `lag - 1` months
    /// before `d`'s month: `CPI[m-lag] + (day-1)/days_in_month * (CPI[m-lag+1] - CPI[m-lag])`.
    pub fn inflation_reference_with_lag(&self, d: CivilDate, lag: u32) -> Result<f64> {
        if lag == 0 {
            return Err(Error::input("indexation lag must be at least one month"));
        }
        let m = d.month_stamp();
        let older = self.require(m.offset(-(lag as i64)))?;
        let newer = self.require(m.offset(-(lag as i64) + 1))?;
        let w = (d.day() - 1) as f64 / d.days_in_month() as f64;
        Ok(older + w * (newer - older))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apr_may(apr: f64, may: f64) -> CpiSeries {
        CpiSeries::new(
            vec![
                (MonthStamp::new(2006, 4), apr),
                (MonthStamp::new(2006, 5), may),
            ],
            100.0,
        )
        .unwrap()
    }

    #[test]
    fn worked_example_july_25() {
        let s = apr_may(100.0, 101.0);
        let d: CivilDate = "2006-07-25".parse().unwrap();
        let v = s.inflation_reference(d).unwrap();
        assert!((v - (100.0 + 24.0 / 31.0)).abs() < 1e-13);
        assert!((v - 100.774_193_5).abs() < 1e-7);
    }

    #[test]
    fn first_of_month_and_flat_segment() {
        let s = apr_may(100.0, 101.0);
        assert_eq!(
            s.inflation_reference("2006-07-01".parse().unwrap())
                .unwrap(),
            100.0
        );
        let flat = apr_may(104.2, 104.2);
        for day in 1..=31 {
            let d = CivilDate::new(2006, 7, day).unwrap();
            assert_eq!(flat.inflation_reference(d).unwrap(), 104.2);
        }
    }

    #[test]
    fn missing_month_is_insufficient_data() {
        let s = apr_may(100.0, 101.0);
        let e = s
            .inflation_reference("2006-08-03".parse().unwrap())
            .unwrap_err();
        assert!(matches!(e, Error::InsufficientData(_)));
    }

    #[test]
    fn construction_invariants() {
        let m = MonthStamp::new(2020, 1);
        assert!(CpiSeries::new(vec![(m, 1.0), (m, 2.0)], 1.0).is_err());
        assert!(CpiSeries::new(vec![(m.offset(1), 1.0), (m, 2.0)], 1.0).is_err());
        assert!(CpiSeries::new(vec![(m, -1.0)], 1.0).is_err());
        assert!(CpiSeries::new(vec![(m, 1.0)], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_day(apr in 50.0f64..150.0, bump in 0.0f64..5.0) {
            let s = apr_may(apr, apr + bump);
            let mut prev = f64::NEG_INFINITY;
            for day in 1..=31 {
                let v = s.inflation_reference(CivilDate::new(2006, 7, day).unwrap()).unwrap();
                prop_assert!(v >= prev);
                prop_assert!(v >= apr && v <= apr + bump);
                prev = v;
            }
        }
    }
}
