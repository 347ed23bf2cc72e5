use super::params::{JyParams, JyState};
use crate::curves::{CurveKind, CurvePair, DiscountCurve};
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseConstant;
use crate::shortrate::affine;

/// Fits θ for the factor matching the curve's kind.
///
/// The real rate is fitted under its own (real) risk-neutral measure, so the
/// real curve is matched by real-unit bond prices; the index correlation term
/// only enters when simulating under the nominal measure.
pub fn jy_theta_fit(p: &JyParams, curve: &DiscountCurve) -> Result<(f64, PiecewiseConstant)> {
    match curve.kind() {
        CurveKind::Nominal => affine::fit_theta(p.a_n, p.sigma_n, curve),
        CurveKind::Real => affine::fit_theta(p.a_r, p.sigma_r, curve),
    }
}

impl JyParams {
    /// Fits both θ functions and returns the matching initial state at `t = 0`.
    ///
    /// Both factors are fitted on the union of the two curves' nodes.
    pub fn fitted(&self, pair: &CurvePair) -> Result<(JyParams, JyState)> {
        self.fitted_on(pair, &[])
    }

    /// Like [`JyParams::fitted`] with extra knots, typically payment or
    /// expiry dates, where the model must reprice both curves exactly.
    pub fn fitted_on(&self, pair: &CurvePair, extra: &[f64]) -> Result<(JyParams, JyState)> {
        let mut knots: Vec<f64> = pair
            .nominal()
            .node_times()
            .iter()
            .chain(pair.real().node_times())
            .chain(extra)
            .copied()
            .filter(|&t| t > 0.0)
            .collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        let (r_n, theta_n) = affine::fit_theta_on(self.a_n, self.sigma_n, pair.nominal(), &knots)?;
        let (r_r, theta_r) = affine::fit_theta_on(self.a_r, self.sigma_r, pair.real(), &knots)?;
        let state = JyState {
            t: 0.0,
            r_n,
            r_r,
            i: pair.spot_index(),
        };
        Ok((self.clone().with_theta(theta_n, theta_r), state))
    }
}

/// Zero-coupon bond price `P(t, T)` implied by a simulated state.
///
/// Nominal bonds pay one currency unit; real bonds pay one index unit and are
/// quoted in real terms (multiply by `state.i` for currency).
pub fn jy_zcb_reconstitution(
    p: &JyParams,
    kind: CurveKind,
    state: &JyState,
    maturity: f64,
) -> Result<f64> {
    if maturity < state.t {
        return Err(Error::ordering(format!(
            "bond maturity {maturity} precedes state time {}",
            state.t
        )));
    }
    let (tn, tr) = p.thetas()?;
    match kind {
        CurveKind::Nominal => affine::zcb_price(p.a_n, p.sigma_n, tn, state.t, maturity, state.r_n),
        CurveKind::Real => affine::zcb_price(p.a_r, p.sigma_r, tr, state.t, maturity, state.r_r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jy::{path_discount, JyModel, JyScheme};
    use crate::mc::{price_paths, PathGrid, SimulationConfig};

    fn pair() -> CurvePair {
        CurvePair::new(
            DiscountCurve::new(
                CurveKind::Nominal,
                vec![1.0, 2.0, 3.0, 5.0],
                vec![0.02, 0.025, 0.03, 0.032],
            )
            .unwrap(),
            DiscountCurve::new(
                CurveKind::Real,
                vec![1.0, 2.0, 3.0, 5.0],
                vec![0.0, 0.004, 0.008, 0.01],
            )
            .unwrap(),
            250.0,
        )
        .unwrap()
    }

    fn params() -> JyParams {
        JyParams::new(0.1, 0.05, 0.012, 0.008, 0.02, 0.4, 0.3, 0.25).unwrap()
    }

    #[test]
    fn reconstitution_at_zero_matches_curves() {
        let (p, s) = params().fitted(&pair()).unwrap();
        for &t in &[1.0, 2.0, 3.0, 5.0] {
            let pn = jy_zcb_reconstitution(&p, CurveKind::Nominal, &s, t).unwrap();
            let pr = jy_zcb_reconstitution(&p, CurveKind::Real, &s, t).unwrap();
            assert!((pn - pair().nominal().df(t).unwrap()).abs() < 1e-10);
            assert!((pr - pair().real().df(t).unwrap()).abs() < 1e-10);
        }
        let later = JyState { t: 1.3, ..s };
        assert_eq!(
            jy_zcb_reconstitution(&p, CurveKind::Nominal, &later, 1.3).unwrap(),
            1.0
        );
        assert!(jy_zcb_reconstitution(&params(), CurveKind::Nominal, &s, 1.0).is_err());
    }

    #[test]
    fn flat_curve_zero_reversion() {
        let p = JyParams::new(0.0, 0.0, 0.01, 0.01, 0.01, 0.0, 0.0, 0.0).unwrap();
        let curve = DiscountCurve::flat(CurveKind::Nominal, 0.03, 4.0).unwrap();
        let (r0, theta) = jy_theta_fit(&p, &curve).unwrap();
        assert_eq!(r0, 0.03);
        // θ approximates σ² t, the Ho-Lee convexity drift
        assert!(theta.values()[0] > 0.0 && theta.values()[0] < 0.01f64.powi(2) * 4.0);
        let p2 = p.clone().with_theta(theta.clone(), theta.clone());
        let (r0b, theta_b) = jy_theta_fit(&p2, &curve).unwrap();
        assert_eq!((r0, &theta), (r0b, &theta_b));
    }

    #[test]
    fn real_bond_in_currency_is_priced_by_simulation() {
        // E[I(T) exp(-∫ r_n)] = I(0) P_r(0, T) under the nominal measure
        let (p, s) = params().fitted(&pair()).unwrap();
        let model = JyModel::new(p, s, JyScheme::Exact).unwrap();
        let grid = PathGrid::new(0.0, 3.0, 60).unwrap();
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(50_000, 4),
            |x| x[60].i,
            path_discount,
        )
        .unwrap();
        let target = 250.0 * pair().real().df(3.0).unwrap();
        assert!(res.z_score(target).abs() < 3.0, "{res:?} vs {target}");
    }
}
