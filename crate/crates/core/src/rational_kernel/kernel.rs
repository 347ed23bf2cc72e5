use serde::{Deserialize, Serialize};

use super::functions::{UnitFunction, Weight};
use crate::curves::CurvePair;
use crate::error::{Error, Result};
use crate::mc::PathModel;

/// Rational pricing kernel system.
///
/// `h_R(t) = R(t) [1 + b_R(t) (A_R - 1)]`, `s(t) = S(t) A_S` and
/// `h_N = s h_R`, with `A_R`, `A_S` correlated unit exponential martingales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpksParams {
    #[serde(rename = "R")]
    pub r: UnitFunction,
    #[serde(rename = "bR")]
    pub b_r: Weight,
    #[serde(rename = "S")]
    pub s: UnitFunction,
    #[serde(rename = "sigma_R")]
    pub sigma_r: f64,
    #[serde(rename = "sigma_S")]
    pub sigma_s: f64,
    #[serde(rename = "rho_RS")]
    pub rho: f64,
}

impl RpksParams {
    pub fn new(
        r: UnitFunction,
        b_r: Weight,
        s: UnitFunction,
        sigma_r: f64,
        sigma_s: f64,
        rho: f64,
    ) -> Result<Self> {
        let p = Self {
            r,
            b_r,
            s,
            sigma_r,
            sigma_s,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.r.validate()?;
        self.s.validate()?;
        self.b_r.validate()?;
        if !(self.sigma_r >= 0.0 && self.sigma_s >= 0.0) {
            return Err(Error::domain(
                "martingale volatilities must be non-negative",
            ));
        }
        if !(self.rho.abs() <= 1.0) {
            return Err(Error::domain("correlation must lie in [-1, 1]"));
        }
        Ok(())
    }

    /// Weights such that `E_t[h_R(T)] = b0(T) + b1(T) A_R(t)` and
    /// `h_N(t) = b2(t) A_S + b3(t) A_R A_S`.
    pub fn weights(&self, t: f64) -> [f64; 4] {
        let (r, b, s) = (self.r.at(t), self.b_r.at(t), self.s.at(t));
        [r * (1.0 - b), r * b, s * r * (1.0 - b), s * r * b]
    }

    /// `E_t[A_R(T) A_S(T)] / (A_R(t) A_S(t))`.
    fn cross_growth(&self, t: f64, maturity: f64) -> f64 {
        (self.rho * self.sigma_r * self.sigma_s * (maturity - t)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleState {
    pub t: f64,
    #[serde(rename = "A_R")]
    pub a_r: f64,
    #[serde(rename = "A_S")]
    pub a_s: f64,
}

impl MartingaleState {
    pub fn initial() -> Self {
        Self {
            t: 0.0,
            a_r: 1.0,
            a_s: 1.0,
        }
    }
}

/// `A exp(σ √dt z - σ² dt / 2)`.
pub fn martingale_step(sigma: f64, a: f64, dt: f64, z: f64) -> f64 {
    a * (sigma * dt.sqrt() * z - 0.5 * sigma * sigma * dt).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Kernels {
    pub h_r: f64,
    pub s: f64,
    pub h_n: f64,
}

pub fn rpks_kernels(p: &RpksParams, m: &MartingaleState) -> Kernels {
    let h_r = p.r.at(m.t) * (1.0 + p.b_r.at(m.t) * (m.a_r - 1.0));
    let s = p.s.at(m.t) * m.a_s;
    Kernels {
        h_r,
        s,
        h_n: s * h_r,
    }
}

fn check(m: &MartingaleState, maturity: f64) -> Result<()> {
    if maturity < m.t {
        return Err(Error::ordering(format!(
            "bond maturity {maturity} precedes state time {}",
            m.t
        )));
    }
    Ok(())
}

/// Real zero-coupon bond, in index units.
pub fn rpks_real_bond(p: &RpksParams, m: &MartingaleState, maturity: f64) -> Result<f64> {
    check(m, maturity)?;
    let [b0, b1, ..] = p.weights(maturity);
    Ok((b0 + b1 * m.a_r) / rpks_kernels(p, m).h_r)
}

/// Nominal zero-coupon bond.
pub fn rpks_nominal_bond(p: &RpksParams, m: &MartingaleState, maturity: f64) -> Result<f64> {
    check(m, maturity)?;
    let [_, _, b2t, b3t] = p.weights(maturity);
    let [_, _, b2, b3] = p.weights(m.t);
    let num = b2t * m.a_s + b3t * m.a_r * m.a_s * p.cross_growth(m.t, maturity);
    Ok(num / (b2 * m.a_s + b3 * m.a_r * m.a_s))
}

/// Inflation-linked zero-coupon bond paying one index unit, in currency per
/// unit of current index.
pub fn rpks_il_bond(p: &RpksParams, m: &MartingaleState, maturity: f64) -> Result<f64> {
    check(m, maturity)?;
    let [b0, b1, ..] = p.weights(maturity);
    let [_, _, b2, b3] = p.weights(m.t);
    Ok((b0 + b1 * m.a_r) / (b2 * m.a_s + b3 * m.a_r * m.a_s))
}

/// Index level as the ratio of the real and nominal kernels.
pub fn rpks_cpi(p: &RpksParams, m: &MartingaleState) -> f64 {
    1.0 / (p.s.at(m.t) * m.a_s)
}

/// Chooses `R` and `S` so the model reproduces both curves at `t = 0` on the
/// union of their node grids, for given weight, volatilities and correlation.
pub fn rpks_fit(
    pair: &CurvePair,
    b_r: Weight,
    sigma_r: f64,
    sigma_s: f64,
    rho: f64,
) -> Result<RpksParams> {
    b_r.validate()?;
    let mut grid: Vec<f64> = pair
        .nominal()
        .node_times()
        .iter()
        .chain(pair.real().node_times())
        .copied()
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut rv = Vec::with_capacity(grid.len());
    let mut sv = Vec::with_capacity(grid.len());
    for &t in &grid {
        let r = pair.real().df(t)?;
        let b = b_r.at(t);
        let growth = (rho * sigma_r * sigma_s * t).exp();
        rv.push(r);
        sv.push(pair.nominal().df(t)? / (r * (1.0 + b * (growth - 1.0))));
    }
    RpksParams::new(
        UnitFunction::table(grid.clone(), rv)?,
        b_r,
        UnitFunction::table(grid, sv)?,
        sigma_r,
        sigma_s,
        rho,
    )
}

/// Correlated `(A_R, A_S)` paths, simulated exactly.
#[derive(Debug, Clone)]
pub struct RpksModel {
    pub params: RpksParams,
}

impl PathModel for RpksModel {
    type State = MartingaleState;

    fn factors(&self) -> usize {
        2
    }

    fn initial_state(&self) -> MartingaleState {
        MartingaleState::initial()
    }

    fn step(&self, t: f64, dt: f64, m: &MartingaleState, z: &[f64]) -> Result<MartingaleState> {
        let rho = self.params.rho;
        let zs = rho * z[0] + (1.0 - rho * rho).max(0.0).sqrt() * z[1];
        Ok(MartingaleState {
            t: t + dt,
            a_r: martingale_step(self.params.sigma_r, m.a_r, dt, z[0]),
            a_s: martingale_step(self.params.sigma_s, m.a_s, dt, zs),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{CurveKind, DiscountCurve};
    use crate::mc::{price_paths, PathGrid, SimulationConfig};
    use proptest::prelude::*;

    fn params(sr: f64, ss: f64, rho: f64) -> RpksParams {
        RpksParams::new(
            UnitFunction::exp(0.01),
            Weight::Const(0.5),
            UnitFunction::exp(0.02),
            sr,
            ss,
            rho,
        )
        .unwrap()
    }

    #[test]
    fn martingale_step_examples() {
        assert_eq!(martingale_step(0.0, 1.7, 0.3, 2.0), 1.7);
        assert!((martingale_step(0.2, 1.0, 1.0, 0.0) - 0.980_198_673_3).abs() < 1e-10);
    }

    #[test]
    fn kernel_examples() {
        let p = params(0.2, 0.1, 0.0);
        let k = rpks_kernels(
            &p,
            &MartingaleState {
                t: 1.0,
                a_r: 1.2,
                a_s: 1.0,
            },
        );
        assert!((k.h_r - 1.089_054_8).abs() < 1e-7);
        let k = rpks_kernels(
            &p,
            &MartingaleState {
                t: 2.0,
                a_r: 1.0,
                a_s: 1.0,
            },
        );
        assert!((k.h_r - (-0.02f64).exp()).abs() < 1e-16);
        assert!((k.s - (-0.04f64).exp()).abs() < 1e-16);
        assert_eq!(k.h_n, k.s * k.h_r);
        let flat = RpksParams::new(
            UnitFunction::exp(0.0),
            Weight::Const(0.5),
            UnitFunction::exp(0.0),
            0.1,
            0.1,
            0.0,
        )
        .unwrap();
        assert_eq!(rpks_cpi(&flat, &MartingaleState::initial()), 1.0);
        assert_eq!(
            rpks_cpi(
                &flat,
                &MartingaleState {
                    t: 1.0,
                    a_r: 1.0,
                    a_s: 2.0
                }
            ),
            0.5
        );
    }

    #[test]
    fn bond_reductions() {
        let p = params(0.0, 0.0, 0.0);
        let m = MartingaleState {
            t: 1.0,
            a_r: 1.0,
            a_s: 1.0,
        };
        let (rt, st) = (p.r.at(1.0), p.s.at(1.0));
        let (r_mat, s_mat) = (p.r.at(4.0), p.s.at(4.0));
        assert!((rpks_real_bond(&p, &m, 4.0).unwrap() - r_mat / rt).abs() < 1e-15);
        assert!(
            (rpks_nominal_bond(&p, &m, 4.0).unwrap() - r_mat * s_mat / (rt * st)).abs() < 1e-15
        );
        assert!((rpks_il_bond(&p, &m, 4.0).unwrap() - r_mat / (rt * st)).abs() < 1e-15);
        assert_eq!(rpks_real_bond(&p, &m, 1.0).unwrap(), 1.0);
        assert!(rpks_real_bond(&p, &m, 0.5).is_err());
    }

    #[test]
    fn fit_reprices_curves() {
        let pair = CurvePair::new(
            DiscountCurve::new(
                CurveKind::Nominal,
                vec![1.0, 3.0, 7.0],
                vec![0.02, 0.03, 0.035],
            )
            .unwrap(),
            DiscountCurve::new(CurveKind::Real, vec![2.0, 7.0], vec![0.005, 0.012]).unwrap(),
            100.0,
        )
        .unwrap();
        let p = rpks_fit(&pair, Weight::Const(0.4), 0.2, 0.15, -0.3).unwrap();
        let m = MartingaleState::initial();
        for &t in &[1.0, 2.0, 3.0, 7.0] {
            assert!(
                (rpks_real_bond(&p, &m, t).unwrap() - pair.real().df(t).unwrap()).abs() < 1e-14
            );
            assert!(
                (rpks_nominal_bond(&p, &m, t).unwrap() - pair.nominal().df(t).unwrap()).abs()
                    < 1e-14
            );
        }
    }

    #[test]
    fn nominal_bond_by_simulation() {
        let p = params(0.2, 0.2, 0.5);
        let model = RpksModel { params: p.clone() };
        let grid = PathGrid::new(0.0, 2.0, 1).unwrap();
        let h0 = rpks_kernels(&p, &MartingaleState::initial()).h_n;
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(100_000, 12),
            |x| rpks_kernels(&p, &x[1]).h_n / h0,
            |_| 1.0,
        )
        .unwrap();
        let closed = rpks_nominal_bond(&p, &MartingaleState::initial(), 2.0).unwrap();
        assert!(res.z_score(closed).abs() < 3.0, "{res:?} vs {closed}");
    }

    proptest! {
        #[test]
        fn il_bond_is_cpi_times_real_bond(ar in 0.05f64..5.0, as_ in 0.05f64..5.0, t in 0.0f64..5.0, dt in 0.0f64..10.0) {
            let p = params(0.3, 0.2, -0.4);
            let m = MartingaleState { t, a_r: ar, a_s: as_ };
            let il = rpks_il_bond(&p, &m, t + dt).unwrap();
            let k = rpks_kernels(&p, &m);
            let via_real = rpks_cpi(&p, &m) * rpks_real_bond(&p, &m, t + dt).unwrap();
            prop_assert!((il - via_real).abs() < 1e-12 * il.max(1.0));
            let [b0, b1, ..] = p.weights(t + dt);
            prop_assert!((il - (b0 + b1 * ar) / k.h_n).abs() < 1e-12 * il.max(1.0));
        }
    }
}
