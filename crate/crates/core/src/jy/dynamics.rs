use serde::{Deserialize, Serialize};

use super::params::{JyParams, JyState, MarketPriceOfRisk, INDEX, NOMINAL, REAL};
use crate::error::{Error, Result};
use crate::math::decay_integral;
use crate::mc::PathModel;
use crate::piecewise::PiecewiseConstant;

/// Forward-rate volatility `σ(t, s)` as a function of time to maturity.
#[derive(Debug, Clone, PartialEq)]
pub enum ForwardVol {
    /// `σ e^{-a (s - t)}`; `a = 0` gives a constant.
    HullWhite { sigma: f64, a: f64 },
    /// Step function of `s - t`.
    Piecewise(PiecewiseConstant),
}

impl ForwardVol {
    pub fn at(&self, t: f64, s: f64) -> f64 {
        match self {
            ForwardVol::HullWhite { sigma, a } => sigma * (-a * (s - t)).exp(),
            ForwardVol::Piecewise(pc) => pc.value_at(s - t),
        }
    }

    /// `∫_t^T σ(t, s) ds`.
    pub fn integral(&self, t: f64, maturity: f64) -> f64 {
        match self {
            ForwardVol::HullWhite { sigma, a } => sigma * decay_integral(*a, maturity - t),
            ForwardVol::Piecewise(pc) => pc.integral(0.0, maturity - t),
        }
    }
}

/// Drift conditions that make deflated bonds and the deflated index
/// martingales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftRestrictions {
    pub alpha_n: f64,
    pub alpha_r: f64,
    sigma_i: f64,
    lambda_i: f64,
}

impl DriftRestrictions {
    /// Index drift `r_n - r_r - σ_I λ_I`.
    pub fn mu_i(&self, r_n: f64, r_r: f64) -> f64 {
        r_n - r_r - self.sigma_i * self.lambda_i
    }
}

pub fn jy_drift_restrictions(
    p: &JyParams,
    lambdas: &MarketPriceOfRisk,
    t: f64,
    maturity: f64,
    vol_n: &ForwardVol,
    vol_r: &ForwardVol,
) -> Result<DriftRestrictions> {
    if t > maturity {
        return Err(Error::ordering(format!(
            "forward maturity {maturity} precedes {t}"
        )));
    }
    let alpha_n =
        vol_n.at(t, maturity) * (vol_n.integral(t, maturity) - lambdas.lambda_n.value_at(t));
    let alpha_r = vol_r.at(t, maturity)
        * (vol_r.integral(t, maturity) - p.sigma_i * p.rho_ri() - lambdas.lambda_r.value_at(t));
    Ok(DriftRestrictions {
        alpha_n,
        alpha_r,
        sigma_i: p.sigma_i,
        lambda_i: lambdas.lambda_i.value_at(t),
    })
}

fn check_step<'a>(
    p: &'a JyParams,
    s: &JyState,
    dt: f64,
) -> Result<(&'a PiecewiseConstant, &'a PiecewiseConstant)> {
    if !(dt > 0.0) {
        return Err(Error::domain("time step must be positive"));
    }
    let (tn, tr) = p.thetas()?;
    let end = s.t + dt;
    let horizon = tn.horizon().min(tr.horizon());
    if end > horizon * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "theta is defined up to {horizon}, step ends at {end}"
        )));
    }
    Ok((tn, tr))
}

/// One step with exact Gaussian rate marginals.
///
/// `z` are standard normals already carrying the model correlation. The
/// index uses the trapezoid rule for `∫(r_n - r_r)`, the only approximation.
pub fn jy_exact_step(p: &JyParams, s: &JyState, dt: f64, z: &[f64; 3]) -> Result<JyState> {
    let (tn, tr) = check_step(p, s, dt)?;
    let t1 = s.t + dt;
    let quanto = p.rho_ri() * p.sigma_r * p.sigma_i;
    let r_n = (-p.a_n * dt).exp() * s.r_n
        + tn.decayed_integral(s.t, t1, p.a_n)
        + p.sigma_n * decay_integral(2.0 * p.a_n, dt).sqrt() * z[NOMINAL];
    let r_r = (-p.a_r * dt).exp() * s.r_r + tr.decayed_integral(s.t, t1, p.a_r)
        - quanto * decay_integral(p.a_r, dt)
        + p.sigma_r * decay_integral(2.0 * p.a_r, dt).sqrt() * z[REAL];
    let carry = 0.5 * ((s.r_n - s.r_r) + (r_n - r_r)) * dt;
    let i =
        s.i * (carry - 0.5 * p.sigma_i * p.sigma_i * dt + p.sigma_i * dt.sqrt() * z[INDEX]).exp();
    Ok(JyState { t: t1, r_n, r_r, i })
}

/// First-order Euler step; the index is advanced log-Euler so it stays
/// positive. θ is taken on the step interval.
pub fn jy_euler_step(p: &JyParams, s: &JyState, dt: f64, z: &[f64; 3]) -> Result<JyState> {
    let (tn, tr) = check_step(p, s, dt)?;
    let mid = s.t + 0.5 * dt;
    let sq = dt.sqrt();
    let r_n = s.r_n + (tn.value_at(mid) - p.a_n * s.r_n) * dt + p.sigma_n * sq * z[NOMINAL];
    let r_r = s.r_r
        + (tr.value_at(mid) - p.a_r * s.r_r - p.rho_ri() * p.sigma_r * p.sigma_i) * dt
        + p.sigma_r * sq * z[REAL];
    let i = s.i
        * ((s.r_n - s.r_r - 0.5 * p.sigma_i * p.sigma_i) * dt + p.sigma_i * sq * z[INDEX]).exp();
    Ok(JyState {
        t: s.t + dt,
        r_n,
        r_r,
        i,
    })
}

/// Instantaneous volatilities feeding the breakeven drift formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakevenVols {
    pub sigma_tips: f64,
    pub sigma_pn: f64,
    pub sigma_i: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakevenCorrelations {
    /// Inflation-linked bond vs index.
    pub rho_i_index: f64,
    /// Nominal bond vs index.
    pub rho_n_index: f64,
    /// Nominal bond vs inflation-linked bond.
    pub rho_n_i: f64,
}

/// Drifts of the inflation-linked and nominal bond in the breakeven variant.
pub fn breakeven_variant_drifts(v: &BreakevenVols, c: &BreakevenCorrelations) -> (f64, f64) {
    let mu_tips = v.sigma_tips * v.sigma_tips - c.rho_i_index * v.sigma_i * v.sigma_tips
        + (c.rho_n_index * v.sigma_i - c.rho_n_i * v.sigma_tips) * v.sigma_pn;
    let mu_n = v.sigma_pn * v.sigma_pn - c.rho_i_index * v.sigma_i * v.sigma_pn
        + (c.rho_n_index * v.sigma_i - c.rho_n_i * v.sigma_pn) * v.sigma_tips;
    (mu_tips, mu_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JyScheme {
    #[default]
    Exact,
    Euler,
}

/// JY dynamics for the path engine. Draws are independent; the model applies
/// the correlation. Non-zero market prices of risk switch to the physical
/// measure.
#[derive(Debug, Clone)]
pub struct JyModel {
    params: JyParams,
    initial: JyState,
    scheme: JyScheme,
    lambda_i: Option<PiecewiseConstant>,
}

impl JyModel {
    pub fn new(params: JyParams, initial: JyState, scheme: JyScheme) -> Result<Self> {
        Self::with_risk_premia(params, initial, scheme, &MarketPriceOfRisk::zero())
    }

    pub fn with_risk_premia(
        mut params: JyParams,
        initial: JyState,
        scheme: JyScheme,
        lambdas: &MarketPriceOfRisk,
    ) -> Result<Self> {
        let (tn, tr) = params.thetas()?;
        if !(initial.i > 0.0) {
            return Err(Error::domain("index level must be positive"));
        }
        let mut lambda_i = None;
        if !lambdas.is_zero() {
            let (sn, sr) = (params.sigma_n, params.sigma_r);
            let horizon = tn.horizon().min(tr.horizon());
            if [&lambdas.lambda_n, &lambdas.lambda_r, &lambdas.lambda_i]
                .iter()
                .any(|l| l.horizon() < horizon)
            {
                return Err(Error::domain(
                    "market prices of risk must cover the theta horizon",
                ));
            }
            let tn2 = tn.combine(&lambdas.lambda_n, |th, l| th - sn * l);
            let tr2 = tr.combine(&lambdas.lambda_r, |th, l| th - sr * l);
            params = params.with_theta(tn2, tr2);
            lambda_i = Some(lambdas.lambda_i.clone());
        }
        Ok(Self {
            params,
            initial,
            scheme,
            lambda_i,
        })
    }

    pub fn params(&self) -> &JyParams {
        &self.params
    }
}

impl PathModel for JyModel {
    type State = JyState;

    fn factors(&self) -> usize {
        3
    }

    fn initial_state(&self) -> JyState {
        self.initial
    }

    fn step(&self, _t: f64, dt: f64, s: &JyState, z: &[f64]) -> Result<JyState> {
        let w = self.params.correlation().correlate(&[z[0], z[1], z[2]]);
        let mut next = match self.scheme {
            JyScheme::Exact => jy_exact_step(&self.params, s, dt, &w)?,
            JyScheme::Euler => jy_euler_step(&self.params, s, dt, &w)?,
        };
        if let Some(l) = &self.lambda_i {
            next.i *= (-self.params.sigma_i * l.integral(s.t, s.t + dt)).exp();
        }
        Ok(next)
    }
}

/// `exp(-∫ r_n)` along a path by the trapezoid rule, matching the index update.
pub fn path_discount(path: &[JyState]) -> f64 {
    let integral: f64 = path
        .windows(2)
        .map(|w| 0.5 * (w[0].r_n + w[1].r_n) * (w[1].t - w[0].t))
        .sum();
    (-integral).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{price_paths, PathGrid, SimulationConfig};
    use crate::shortrate::{vasicek_transition_moments, VasicekParams};

    fn flat_theta(v: f64) -> PiecewiseConstant {
        PiecewiseConstant::constant(v, 10.0).unwrap()
    }

    #[test]
    fn drift_restriction_examples() {
        let p = JyParams::new(0.1, 0.1, 0.01, 0.02, 0.0, 0.3, 0.2, 0.4).unwrap();
        let zero = MarketPriceOfRisk::zero();
        let s = 0.013;
        let flat = ForwardVol::HullWhite { sigma: s, a: 0.0 };
        let d = jy_drift_restrictions(
            &p,
            &zero,
            1.0,
            4.0,
            &flat,
            &ForwardVol::HullWhite { sigma: 0.0, a: 0.0 },
        )
        .unwrap();
        assert!((d.alpha_n - s * s * 3.0).abs() < 1e-18);
        assert_eq!(d.alpha_r, 0.0);
        assert_eq!(d.mu_i(0.04, 0.01), 0.04 - 0.01);
        let mut lam = MarketPriceOfRisk::zero();
        lam.lambda_r = flat_theta(0.7);
        let d = jy_drift_restrictions(
            &p,
            &lam,
            0.0,
            2.0,
            &flat,
            &ForwardVol::HullWhite { sigma: 0.0, a: 0.3 },
        )
        .unwrap();
        assert_eq!(d.alpha_r, 0.0);
        let pc = ForwardVol::Piecewise(
            PiecewiseConstant::new(vec![1.0, 5.0], vec![0.01, 0.02]).unwrap(),
        );
        assert!((pc.integral(2.0, 4.5) - (0.01 + 0.02 * 1.5)).abs() < 1e-17);
    }

    #[test]
    fn deterministic_skeleton() {
        let p = JyParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
            .unwrap()
            .with_theta(flat_theta(0.0), flat_theta(0.0));
        let s = JyState {
            t: 0.0,
            r_n: 0.04,
            r_r: 0.01,
            i: 100.0,
        };
        for step in [jy_exact_step, jy_euler_step] {
            let n = step(&p, &s, 0.5, &[0.3, -0.2, 1.1]).unwrap();
            assert_eq!((n.r_n, n.r_r, n.t), (0.04, 0.01, 0.5));
            assert!((n.i - 100.0 * (0.03f64 * 0.5).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_required() {
        let p = JyParams::new(0.1, 0.1, 0.01, 0.01, 0.01, 0.0, 0.0, 0.0).unwrap();
        let s = JyState {
            t: 0.0,
            r_n: 0.0,
            r_r: 0.0,
            i: 1.0,
        };
        assert!(matches!(
            jy_exact_step(&p, &s, 0.1, &[0.0; 3]),
            Err(Error::State(_))
        ));
        let p = p.with_theta(flat_theta(0.0), flat_theta(0.0));
        let late = JyState { t: 9.95, ..s };
        assert!(matches!(
            jy_exact_step(&p, &late, 0.1, &[0.0; 3]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn euler_index_without_vol_is_deterministic() {
        let p = JyParams::new(0.2, 0.1, 0.01, 0.01, 0.0, 0.5, 0.0, 0.0)
            .unwrap()
            .with_theta(flat_theta(0.01), flat_theta(0.002));
        let s = JyState {
            t: 0.0,
            r_n: 0.05,
            r_r: 0.02,
            i: 50.0,
        };
        let n = jy_euler_step(&p, &s, 0.1, &[1.5, -0.7, 3.0]).unwrap();
        assert_eq!(n.i, 50.0 * (0.03f64 * 0.1).exp());
    }

    #[test]
    fn exact_marginals_match_vasicek() {
        let (a, b, sigma) = (0.4, 0.05, 0.02);
        let p = JyParams::new(a, 0.2, sigma, 0.01, 0.01, 0.2, 0.1, -0.1)
            .unwrap()
            .with_theta(flat_theta(a * b), flat_theta(0.0));
        let s = JyState {
            t: 0.0,
            r_n: 0.01,
            r_r: 0.0,
            i: 1.0,
        };
        let model = JyModel::new(p, s, JyScheme::Exact).unwrap();
        let grid = PathGrid::new(0.0, 2.0, 1).unwrap();
        let cfg = SimulationConfig::new(100_000, 23);
        let (m, v) =
            vasicek_transition_moments(&VasicekParams::new(a, b, sigma).unwrap(), 0.01, 2.0)
                .unwrap();
        let mean = price_paths(&model, &grid, &cfg, |x| x[1].r_n, |_| 1.0).unwrap();
        assert!(mean.z_score(m).abs() < 4.0, "{mean:?} vs {m}");
        let var = price_paths(&model, &grid, &cfg, |x| (x[1].r_n - m).powi(2), |_| 1.0).unwrap();
        assert!(var.z_score(v).abs() < 4.0, "{var:?} vs {v}");
    }

    #[test]
    fn index_martingale_with_equal_rates() {
        // identical rate dynamics driven by one Brownian motion
        let p = JyParams::new(0.3, 0.3, 0.01, 0.01, 0.15, 1.0, 0.0, 0.0)
            .unwrap()
            .with_theta(flat_theta(0.009), flat_theta(0.009));
        let s = JyState {
            t: 0.0,
            r_n: 0.03,
            r_r: 0.03,
            i: 100.0,
        };
        let model = JyModel::new(p, s, JyScheme::Exact).unwrap();
        let grid = PathGrid::new(0.0, 1.0, 4).unwrap();
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(100_000, 8),
            |x| x[4].i,
            |_| 1.0,
        )
        .unwrap();
        assert!(res.z_score(100.0).abs() < 3.0, "{res:?}");
    }

    #[test]
    fn euler_weak_order_one() {
        let (a, b, sigma) = (1.5, 0.05, 0.01);
        let p = JyParams::new(a, 0.2, sigma, 0.01, 0.01, 0.0, 0.0, 0.0)
            .unwrap()
            .with_theta(flat_theta(a * b), flat_theta(0.0));
        let s = JyState {
            t: 0.0,
            r_n: 0.0,
            r_r: 0.0,
            i: 1.0,
        };
        // the mean is deterministic under Euler: iterate the skeleton
        let exact = vasicek_transition_moments(&VasicekParams::new(a, b, sigma).unwrap(), 0.0, 1.0)
            .unwrap()
            .0;
        let err = |n: usize| {
            let mut st = s;
            for _ in 0..n {
                st = jy_euler_step(&p, &st, 1.0 / n as f64, &[0.0; 3]).unwrap();
            }
            (st.r_n - exact).abs()
        };
        let ratio = err(8) / err(16);
        assert!((ratio - 2.0).abs() < 0.3, "{ratio}");
    }

    #[test]
    fn breakeven_drift_examples() {
        let zero = BreakevenVols {
            sigma_tips: 0.0,
            sigma_pn: 0.0,
            sigma_i: 0.0,
        };
        let c = BreakevenCorrelations {
            rho_i_index: 0.3,
            rho_n_index: -0.2,
            rho_n_i: 0.6,
        };
        assert_eq!(breakeven_variant_drifts(&zero, &c), (0.0, 0.0));
        let v = BreakevenVols {
            sigma_tips: 0.07,
            sigma_pn: 0.05,
            sigma_i: 0.0,
        };
        let c0 = BreakevenCorrelations { rho_n_i: 0.0, ..c };
        assert!((breakeven_variant_drifts(&v, &c0).0 - 0.0049).abs() < 1e-17);
        let v = BreakevenVols {
            sigma_tips: 0.05,
            sigma_pn: 0.05,
            sigma_i: 0.02,
        };
        let (a, b) = breakeven_variant_drifts(&v, &c);
        assert_eq!(a, b);
    }
}
