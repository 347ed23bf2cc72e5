use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewiseConstant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Nominal,
    Real,
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurveKind::Nominal => "nominal",
            CurveKind::Real => "real",
        })
    }
}

impl std::str::FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nominal" => Ok(CurveKind::Nominal),
            "real" => Ok(CurveKind::Real),
            other => Err(Error::input(format!(
                "unknown curve kind {other:?} (nominal|real)"
            ))),
        }
    }
}

/// Discount curve with piecewise-constant instantaneous forwards.
///
/// Times are in years from the curve's valuation epoch. `log P(0, T)` is
/// continuous and piecewise linear; beyond the last node the last forward is
/// held flat and [`DiscountCurve::extrapolates`] reports it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    kind: CurveKind,
    forwards: PiecewiseConstant,
}

impl DiscountCurve {
    pub fn new(kind: CurveKind, node_times: Vec<f64>, forwards: Vec<f64>) -> Result<Self> {
        Ok(Self {
            kind,
            forwards: PiecewiseConstant::new(node_times, forwards)?,
        })
    }

    pub fn flat(kind: CurveKind, rate: f64, horizon: f64) -> Result<Self> {
        Self::new(kind, vec![horizon], vec![rate])
    }

    pub fn from_forwards(kind: CurveKind, forwards: PiecewiseConstant) -> Self {
        Self { kind, forwards }
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn node_times(&self) -> &[f64] {
        self.forwards.breaks()
    }

    pub fn forward_values(&self) -> &[f64] {
        self.forwards.values()
    }

    pub fn forwards(&self) -> &PiecewiseConstant {
        &self.forwards
    }

    pub fn last_node(&self) -> f64 {
        self.forwards.horizon()
    }

    /// True when `t` lies past the last node (flat-forward extrapolation).
    pub fn extrapolates(&self, t: f64) -> bool {
        t > self.last_node() * (1.0 + 1e-12)
    }

    /// Instantaneous forward `f(0, t)`.
    pub fn instantaneous_forward(&self, t: f64) -> f64 {
        self.forwards.value_at(t)
    }

    /// `∫_t^T f(u) du`.
    pub fn integrated_forward(&self, t: f64, maturity: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::domain(format!(
                "curve time {t} precedes the valuation epoch"
            )));
        }
        if t > maturity {
            return Err(Error::ordering(format!(
                "discount factor asked from {t} to {maturity}"
            )));
        }
        Ok(self.forwards.integral(t, maturity))
    }

    /// Forward discount factor `P(t, T) = exp(-∫_t^T f(u) du)`.
    pub fn discount_factor(&self, t: f64, maturity: f64) -> Result<f64> {
        Ok((-self.integrated_forward(t, maturity)?).exp())
    }

    /// `P(0, T)`.
    pub fn df(&self, maturity: f64) -> Result<f64> {
        self.discount_factor(0.0, maturity)
    }

    /// Continuously compounded zero rate `-ln P(0,T) / T`.
    pub fn zero_rate(&self, maturity: f64) -> Result<f64> {
        if !(maturity > 0.0) {
            return Err(Error::domain("zero rate needs a positive maturity"));
        }
        Ok(self.integrated_forward(0.0, maturity)? / maturity)
    }

    /// Simply compounded forward over `[T1, T2]`: `P(t,T1)/P(t,T2) - 1`.
    pub fn simple_forward_rate(&self, t: f64, t1: f64, t2: f64) -> Result<f64> {
        if t1 >= t2 {
            return Err(Error::ordering(format!(
                "forward period [{t1}, {t2}] is empty"
            )));
        }
        let p1 = self.discount_factor(t, t1)?;
        let p2 = self.discount_factor(t, t2)?;
        Ok(p1 / p2 - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_segment() -> DiscountCurve {
        DiscountCurve::new(CurveKind::Nominal, vec![1.0, 2.0], vec![0.01, 0.03]).unwrap()
    }

    #[test]
    fn discount_factor_examples() {
        let flat = DiscountCurve::flat(CurveKind::Nominal, 0.02, 5.0).unwrap();
        assert!((flat.df(5.0).unwrap() - 0.904_837_418_035_959_6).abs() < 1e-15);
        assert_eq!(flat.discount_factor(3.0, 3.0).unwrap(), 1.0);
        assert!((two_segment().df(2.0).unwrap() - (-0.04f64).exp()).abs() < 1e-15);
        assert!((two_segment().df(2.0).unwrap() - 0.960_789_4).abs() < 1e-7);
        assert!(matches!(
            flat.discount_factor(2.0, 1.0),
            Err(Error::Ordering(_))
        ));
    }

    #[test]
    fn simple_forward_examples() {
        let flat = DiscountCurve::flat(CurveKind::Nominal, 0.02, 5.0).unwrap();
        let f = flat.simple_forward_rate(0.0, 1.0, 2.0).unwrap();
        assert!((f - 0.020_201_340_026_755_81).abs() < 1e-15);
        let zero = DiscountCurve::flat(CurveKind::Real, 0.0, 5.0).unwrap();
        assert_eq!(zero.simple_forward_rate(0.0, 1.0, 2.0).unwrap(), 0.0);
        assert!(flat.simple_forward_rate(0.0, 2.0, 2.0).is_err());
        // ratio definition from two discount factors
        let p1: f64 = 0.98;
        let p2: f64 = 0.95;
        let c = DiscountCurve::new(
            CurveKind::Nominal,
            vec![1.0, 2.0],
            vec![-p1.ln(), (p1 / p2).ln()],
        )
        .unwrap();
        let f = c.simple_forward_rate(0.0, 1.0, 2.0).unwrap();
        assert!((f - 0.031_578_9).abs() < 1e-7);
    }

    #[test]
    fn extrapolation_is_flagged() {
        let c = two_segment();
        assert!(!c.extrapolates(2.0));
        assert!(c.extrapolates(2.5));
        assert!((c.df(3.0).unwrap() - (-0.07f64).exp()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn multiplicative(fs in prop::collection::vec(-0.02f64..0.08, 1..6),
                          a in 0.0f64..6.0, b in 0.0f64..6.0, c in 0.0f64..6.0) {
            let times: Vec<f64> = (1..=fs.len()).map(|i| i as f64).collect();
            let curve = DiscountCurve::new(CurveKind::Nominal, times, fs).unwrap();
            let mut v = [a, b, c];
            v.sort_by(f64::total_cmp);
            let lhs = curve.discount_factor(v[0], v[1]).unwrap() * curve.discount_factor(v[1], v[2]).unwrap();
            let rhs = curve.discount_factor(v[0], v[2]).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-14);
        }
    }
}
