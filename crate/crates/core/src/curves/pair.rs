use serde::{Deserialize, Serialize};

use super::curve::{CurveKind, DiscountCurve};
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseConstant;

/// Nominal and real curves sharing a valuation epoch, plus the spot index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePair {
    nominal: DiscountCurve,
    real: DiscountCurve,
    spot_index: f64,
}

impl CurvePair {
    pub fn new(nominal: DiscountCurve, real: DiscountCurve, spot_index: f64) -> Result<Self> {
        if nominal.kind() != CurveKind::Nominal || real.kind() != CurveKind::Real {
            return Err(Error::input("curve pair needs a nominal and a real curve"));
        }
        if !(spot_index > 0.0) || !spot_index.is_finite() {
            return Err(Error::domain(format!(
                "spot index must be positive, got {spot_index}"
            )));
        }
        Ok(Self {
            nominal,
            real,
            spot_index,
        })
    }

    /// Flat continuously compounded curves, handy for tests and examples.
    pub fn flat(nominal_rate: f64, real_rate: f64, spot_index: f64, horizon: f64) -> Result<Self> {
        Self::new(
            DiscountCurve::flat(CurveKind::Nominal, nominal_rate, horizon)?,
            DiscountCurve::flat(CurveKind::Real, real_rate, horizon)?,
            spot_index,
        )
    }

    pub fn nominal(&self) -> &DiscountCurve {
        &self.nominal
    }

    pub fn real(&self) -> &DiscountCurve {
        &self.real
    }

    pub fn spot_index(&self) -> f64 {
        self.spot_index
    }

    /// Arbitrage-enforced forward CPI for delivery at `maturity`:
    /// `I(0) P_r(0,T) / P_n(0,T)`.
    pub fn forward_index_value(&self, maturity: f64) -> Result<f64> {
        let log_ratio = self.nominal.integrated_forward(0.0, maturity)?
            - self.real.integrated_forward(0.0, maturity)?;
        Ok(self.spot_index * log_ratio.exp())
    }

    /// `I(0;T2) / I(0;T1) - 1`.
    pub fn forward_inflation_rate(&self, t1: f64, t2: f64) -> Result<f64> {
        if t1 >= t2 {
            return Err(Error::ordering(format!(
                "forward period [{t1}, {t2}] is empty"
            )));
        }
        Ok(self.forward_index_value(t2)? / self.forward_index_value(t1)? - 1.0)
    }

    /// Instantaneous breakeven forward `f_n - f_r` on the union node grid.
    pub fn breakeven_forward_curve(&self) -> PiecewiseConstant {
        self.nominal
            .forwards()
            .combine(self.real.forwards(), |n, r| n - r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve(kind: CurveKind, fs: &[f64]) -> DiscountCurve {
        let times = (1..=fs.len()).map(|i| i as f64).collect();
        DiscountCurve::new(kind, times, fs.to_vec()).unwrap()
    }

    #[test]
    fn forward_index_examples() {
        // P_r = 0.97, P_n = 0.95 at T = 1
        let pair = CurvePair::new(
            DiscountCurve::flat(CurveKind::Nominal, -(0.95f64).ln(), 1.0).unwrap(),
            DiscountCurve::flat(CurveKind::Real, -(0.97f64).ln(), 1.0).unwrap(),
            100.0,
        )
        .unwrap();
        assert!((pair.forward_index_value(1.0).unwrap() - 102.105_263_2).abs() < 1e-7);
        assert_eq!(pair.forward_index_value(0.0).unwrap(), 100.0);

        let same = CurvePair::flat(0.03, 0.03, 100.0, 5.0).unwrap();
        assert_eq!(same.forward_index_value(3.0).unwrap(), 100.0);

        let pair = CurvePair::flat(0.03, 0.01, 100.0, 5.0).unwrap();
        assert!((pair.forward_index_value(2.0).unwrap() - 104.081_077_4).abs() < 1e-7);
    }

    #[test]
    fn forward_inflation_examples() {
        let same = CurvePair::flat(0.03, 0.03, 100.0, 5.0).unwrap();
        assert_eq!(same.forward_inflation_rate(1.0, 2.0).unwrap(), 0.0);
        let pair = CurvePair::flat(0.03, 0.01, 100.0, 5.0).unwrap();
        let f = pair.forward_inflation_rate(1.0, 2.0).unwrap();
        assert!((f - 0.020_201_3).abs() < 1e-7);
        assert!(pair.forward_inflation_rate(2.0, 1.0).is_err());
    }

    #[test]
    fn breakeven_curve_examples() {
        let same = CurvePair::flat(0.03, 0.03, 100.0, 5.0).unwrap();
        assert!(same
            .breakeven_forward_curve()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let pair = CurvePair::flat(0.03, 0.01, 100.0, 5.0).unwrap();
        assert!(pair
            .breakeven_forward_curve()
            .values()
            .iter()
            .all(|&v| (v - 0.02).abs() < 1e-17));
    }

    #[test]
    fn breakeven_integral_matches_forward_index() {
        // mismatched grids force a union resample
        let nominal =
            DiscountCurve::new(CurveKind::Nominal, vec![1.0, 3.0], vec![0.02, 0.035]).unwrap();
        let real = DiscountCurve::new(CurveKind::Real, vec![2.0, 3.0], vec![0.005, 0.012]).unwrap();
        let pair = CurvePair::new(nominal, real, 250.0).unwrap();
        let fi = pair.breakeven_forward_curve();
        assert_eq!(fi.breaks(), &[1.0, 2.0, 3.0]);
        for &t in &[0.5, 1.0, 1.7, 2.0, 2.9, 3.0] {
            let lhs = fi.integral(0.0, t);
            let rhs = (pair.forward_index_value(t).unwrap() / 250.0).ln();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn forward_fisher_identity(
            fnom in prop::collection::vec(-0.01f64..0.08, 1..8),
            freal in prop::collection::vec(-0.03f64..0.05, 1..8),
            a in 0.0f64..7.0, b in 0.01f64..3.0,
        ) {
            let pair = CurvePair::new(curve(CurveKind::Nominal, &fnom), curve(CurveKind::Real, &freal), 100.0).unwrap();
            let (t1, t2) = (a, a + b);
            let fn_ = pair.nominal().simple_forward_rate(0.0, t1, t2).unwrap();
            let fr = pair.real().simple_forward_rate(0.0, t1, t2).unwrap();
            let fi = pair.forward_inflation_rate(t1, t2).unwrap();
            prop_assert!(((1.0 + fn_) - (1.0 + fr) * (1.0 + fi)).abs() < 1e-12);
        }
    }
}
