use serde::{Deserialize, Serialize};

use super::vols::FactorVols;
use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::math::norm_cdf;

/// Call or put. Deserializes from `"call"`/`"put"` or from `φ = +1/-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", try_from = "CallPutRepr")]
pub enum OptionType {
    Call,
    Put,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CallPutRepr {
    Phi(i64),
    Name(String),
}

impl TryFrom<CallPutRepr> for OptionType {
    type Error = String;

    fn try_from(r: CallPutRepr) -> std::result::Result<Self, String> {
        match r {
            CallPutRepr::Phi(1) => Ok(OptionType::Call),
            CallPutRepr::Phi(-1) => Ok(OptionType::Put),
            CallPutRepr::Name(s) if s.eq_ignore_ascii_case("call") => Ok(OptionType::Call),
            CallPutRepr::Name(s) if s.eq_ignore_ascii_case("put") => Ok(OptionType::Put),
            CallPutRepr::Phi(v) => Err(format!("call_put must be +1 or -1, got {v}")),
            CallPutRepr::Name(s) => Err(format!("call_put must be call or put, got {s:?}")),
        }
    }
}

impl OptionType {
    pub fn phi(self) -> f64 {
        match self {
            OptionType::Call => 1.0,
            OptionType::Put => -1.0,
        }
    }
}

/// Option on the index level at expiry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexOptionSpec {
    #[serde(rename = "K", alias = "strike")]
    pub strike: f64,
    #[serde(rename = "T", alias = "expiry")]
    pub expiry: f64,
    pub call_put: OptionType,
}

/// Option on the inflation rate `I(T2)/I(T1) - 1`, paid at `T2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InflationOptionSpec {
    #[serde(rename = "K", alias = "strike")]
    pub strike: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    pub call_put: OptionType,
}

/// `φ [F N(φ d1) - K N(φ d2)]` scaled by an annuity, with both CDF terms of
/// the put taken as complements of the call's so parity holds exactly.
fn black(forward: f64, strike: f64, total_vol: f64, kind: OptionType) -> f64 {
    if total_vol == 0.0 {
        return (kind.phi() * (forward - strike)).max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * total_vol * total_vol) / total_vol;
    let n1 = norm_cdf(d1);
    let n2 = norm_cdf(d1 - total_vol);
    match kind {
        OptionType::Call => forward * n1 - strike * n2,
        OptionType::Put => strike * (1.0 - n2) - forward * (1.0 - n1),
    }
}

/// Index option from discount factors and a total volatility `V`.
pub fn index_option_price_with_v(
    spec: &IndexOptionSpec,
    index: f64,
    p_real: f64,
    p_nominal: f64,
    v: f64,
) -> Result<f64> {
    if !(spec.strike > 0.0) || !(index > 0.0) {
        return Err(Error::domain("index and strike must be positive"));
    }
    if !(v >= 0.0) {
        return Err(Error::numerical(format!("total volatility {v} is invalid")));
    }
    Ok(p_nominal * black(index * p_real / p_nominal, spec.strike, v, spec.call_put))
}

/// Index option valued at `t` off the pair's curves; the pair's spot index is
/// read as `I(t)`.
pub fn index_option_price(
    spec: &IndexOptionSpec,
    pair: &CurvePair,
    vols: &FactorVols,
    t: f64,
) -> Result<f64> {
    if !(spec.expiry > t) {
        return Err(Error::ordering(format!(
            "expiry {} is not after {t}",
            spec.expiry
        )));
    }
    let p_r = pair.real().discount_factor(t, spec.expiry)?;
    let p_n = pair.nominal().discount_factor(t, spec.expiry)?;
    let v = vols.index_variance(t, spec.expiry)?.sqrt();
    index_option_price_with_v(spec, pair.spot_index(), p_r, p_n, v)
}

/// Breakdown of an inflation option price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InflationOptionValue {
    pub price: f64,
    pub k1: f64,
    pub k2: f64,
    pub omega: f64,
    pub v: f64,
}

pub fn inflation_option_value(
    spec: &InflationOptionSpec,
    pair: &CurvePair,
    vols: &FactorVols,
    t: f64,
) -> Result<InflationOptionValue> {
    if !(t <= spec.t1 && spec.t1 < spec.t2) {
        return Err(Error::ordering(format!(
            "need t <= T1 < T2, got {t}, {}, {}",
            spec.t1, spec.t2
        )));
    }
    if !(1.0 + spec.strike > 0.0) {
        return Err(Error::domain(format!(
            "strike {} must exceed -1",
            spec.strike
        )));
    }
    let (n, r) = (pair.nominal(), pair.real());
    let pn1 = n.discount_factor(t, spec.t1)?;
    let pn2 = n.discount_factor(t, spec.t2)?;
    let pr1 = r.discount_factor(t, spec.t1)?;
    let pr2 = r.discount_factor(t, spec.t2)?;
    let omega = vols.inflation_omega(t, spec.t1, spec.t2)?;
    let v = vols.inflation_variance(t, spec.t1, spec.t2)?.sqrt();
    let k1 = pr2 * pn1 / (pn2 * pr1) * omega.exp();
    let k2 = 1.0 + spec.strike;
    Ok(InflationOptionValue {
        price: pn2 * black(k1, k2, v, spec.call_put),
        k1,
        k2,
        omega,
        v,
    })
}

/// Option on the period inflation rate between `T1` and `T2`.
pub fn inflation_option_price(
    spec: &InflationOptionSpec,
    pair: &CurvePair,
    vols: &FactorVols,
    t: f64,
) -> Result<f64> {
    Ok(inflation_option_value(spec, pair, vols, t)?.price)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{CurveKind, DiscountCurve};
    use crate::jy::{path_discount, JyModel, JyParams, JyScheme};
    use crate::mc::{price_paths, PathGrid, SimulationConfig};
    use proptest::prelude::*;

    fn pair() -> CurvePair {
        CurvePair::new(
            DiscountCurve::new(
                CurveKind::Nominal,
                vec![1.0, 2.0, 4.0],
                vec![0.02, 0.028, 0.03],
            )
            .unwrap(),
            DiscountCurve::new(CurveKind::Real, vec![1.5, 4.0], vec![0.004, 0.009]).unwrap(),
            100.0,
        )
        .unwrap()
    }

    fn jy() -> JyParams {
        JyParams::new(0.08, 0.05, 0.012, 0.009, 0.025, 0.45, 0.2, 0.3).unwrap()
    }

    #[test]
    fn index_examples() {
        let call = IndexOptionSpec {
            strike: 100.0,
            expiry: 1.0,
            call_put: OptionType::Call,
        };
        let p = index_option_price_with_v(&call, 100.0, 0.95, 0.95, 0.2).unwrap();
        assert!((p - 7.567_289).abs() < 1e-6);
        let p = index_option_price_with_v(&call, 110.0, 0.97, 0.95, 0.0).unwrap();
        assert!((p - (110.0 * 0.97 - 95.0)).abs() < 1e-12);
        let put = IndexOptionSpec {
            call_put: OptionType::Put,
            ..call
        };
        assert_eq!(
            index_option_price_with_v(&put, 110.0, 0.97, 0.95, 0.0).unwrap(),
            0.0
        );
        assert!(index_option_price_with_v(&call, 100.0, 0.95, 0.95, f64::NAN).is_err());
    }

    #[test]
    fn factor_and_scalar_forms_agree() {
        let vols = FactorVols::from_jy(&jy());
        let spec = IndexOptionSpec {
            strike: 104.0,
            expiry: 3.0,
            call_put: OptionType::Call,
        };
        let a = index_option_price(&spec, &pair(), &vols, 0.0).unwrap();
        let v = vols.index_variance(0.0, 3.0).unwrap().sqrt();
        let b = index_option_price_with_v(
            &spec,
            100.0,
            pair().real().df(3.0).unwrap(),
            pair().nominal().df(3.0).unwrap(),
            v,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn index_option_matches_simulation() {
        let (p, s) = jy().fitted(&pair()).unwrap();
        let vols = FactorVols::from_jy(&p);
        let spec = IndexOptionSpec {
            strike: 103.0,
            expiry: 2.0,
            call_put: OptionType::Call,
        };
        let closed = index_option_price(&spec, &pair(), &vols, 0.0).unwrap();
        let model = JyModel::new(p, s, JyScheme::Exact).unwrap();
        let grid = PathGrid::new(0.0, 2.0, 50).unwrap();
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(50_000, 31),
            |x| (x[50].i - 103.0).max(0.0),
            path_discount,
        )
        .unwrap();
        assert!(res.z_score(closed).abs() < 3.0, "{res:?} vs {closed}");
    }

    #[test]
    fn inflation_option_matches_simulation() {
        let (p, s) = jy().fitted_on(&pair(), &[1.0, 3.0]).unwrap();
        let vols = FactorVols::from_jy(&p);
        for kind in [OptionType::Call, OptionType::Put] {
            let spec = InflationOptionSpec {
                strike: 0.015,
                t1: 1.0,
                t2: 3.0,
                call_put: kind,
            };
            let closed = inflation_option_price(&spec, &pair(), &vols, 0.0).unwrap();
            let model = JyModel::new(p.clone(), s, JyScheme::Exact).unwrap();
            let grid = PathGrid::new(0.0, 3.0, 60).unwrap();
            let phi = kind.phi();
            let res = price_paths(
                &model,
                &grid,
                &SimulationConfig::new(50_000, 77),
                |x| (phi * (x[60].i / x[20].i - 1.0 - 0.015)).max(0.0),
                path_discount,
            )
            .unwrap();
            assert!(
                res.z_score(closed).abs() < 3.0,
                "{kind:?}: {res:?} vs {closed}"
            );
        }
    }

    #[test]
    fn zero_vol_inflation_option_is_forward_payoff() {
        let z = crate::piecewise::PiecewiseConstant::constant(0.0, 1.0).unwrap();
        let vols = FactorVols {
            a_n: 0.1,
            a_r: 0.1,
            sigma_n: z.clone(),
            sigma_r: z.clone(),
            sigma_i: z,
            corr: crate::jy::Correlation::identity(),
        };
        let spec = InflationOptionSpec {
            strike: 0.01,
            t1: 1.0,
            t2: 3.0,
            call_put: OptionType::Call,
        };
        let v = inflation_option_value(&spec, &pair(), &vols, 0.0).unwrap();
        assert_eq!(v.omega, 0.0);
        let fwd = pair().forward_inflation_rate(1.0, 3.0).unwrap();
        let expected = pair().nominal().df(3.0).unwrap() * (fwd - 0.01).max(0.0);
        assert!((v.price - expected).abs() < 1e-10);
    }

    #[test]
    fn spec_from_json() {
        let s: IndexOptionSpec =
            serde_json::from_str(r#"{"K": 100, "T": 1.5, "call_put": -1}"#).unwrap();
        assert_eq!(
            s,
            IndexOptionSpec {
                strike: 100.0,
                expiry: 1.5,
                call_put: OptionType::Put
            }
        );
        let s: InflationOptionSpec =
            serde_json::from_str(r#"{"K": 0.02, "T1": 1, "T2": 2, "call_put": "call"}"#).unwrap();
        assert_eq!(s.call_put, OptionType::Call);
        assert!(
            serde_json::from_str::<IndexOptionSpec>(r#"{"K": 1, "T": 1, "call_put": 0}"#).is_err()
        );
    }

    proptest! {
        #[test]
        fn index_parity(i in 1.0f64..500.0, k in 1.0f64..500.0, pr in 0.3f64..1.2, pn in 0.3f64..1.2, v in 0.0f64..1.5) {
            let call = IndexOptionSpec { strike: k, expiry: 1.0, call_put: OptionType::Call };
            let put = IndexOptionSpec { call_put: OptionType::Put, ..call };
            let c = index_option_price_with_v(&call, i, pr, pn, v).unwrap();
            let p = index_option_price_with_v(&put, i, pr, pn, v).unwrap();
            prop_assert!((c - p - (i * pr - k * pn)).abs() <= 1e-12 * (1.0 + i * pr + k * pn));
        }

        #[test]
        fn index_call_monotone(k in 50.0f64..150.0, v in 0.01f64..0.8) {
            let call = |k: f64, v: f64| {
                let s = IndexOptionSpec { strike: k, expiry: 1.0, call_put: OptionType::Call };
                index_option_price_with_v(&s, 100.0, 0.97, 0.95, v).unwrap()
            };
            prop_assert!(call(k + 1e-5, v) <= call(k, v) + 1e-12);
            prop_assert!(call(k, v + 1e-5) >= call(k, v) - 1e-12);
        }

        #[test]
        fn inflation_parity(k in -0.05f64..0.08, t1 in 0.1f64..3.0, gap in 0.1f64..3.0, t in 0.0f64..0.1) {
            let vols = FactorVols::from_jy(&jy());
            let t1 = t1 + t;
            let call = InflationOptionSpec { strike: k, t1, t2: t1 + gap, call_put: OptionType::Call };
            let put = InflationOptionSpec { call_put: OptionType::Put, ..call };
            let c = inflation_option_value(&call, &pair(), &vols, t).unwrap();
            let p = inflation_option_price(&put, &pair(), &vols, t).unwrap();
            let pn2 = pair().nominal().discount_factor(t, t1 + gap).unwrap();
            prop_assert!((c.price - p - pn2 * (c.k1 - c.k2)).abs() < 1e-12);
        }
    }
}
