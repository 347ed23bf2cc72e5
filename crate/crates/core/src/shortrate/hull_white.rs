use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::decay_integral;
use crate::mc::{PathModel, SdeSpec};
use crate::piecewise::PiecewiseConstant;

/// Which function of the short rate follows the Gaussian dynamics.
///
/// `identity` is Hull-White (Ho-Lee when `a = 0`), `sqrt` the squared-Gaussian
/// model and `log` Black-Karasinski.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Identity,
    Sqrt,
    Log,
}

impl Transform {
    /// `f(r)`.
    pub fn encode(self, r: f64) -> Result<f64> {
        match self {
            Transform::Identity => Ok(r),
            Transform::Sqrt if r > 0.0 => Ok(r.sqrt()),
            Transform::Log if r > 0.0 => Ok(r.ln()),
            _ => Err(Error::domain(format!(
                "short rate {r} outside the {self} transform domain"
            ))),
        }
    }

    /// `f⁻¹(x)`.
    pub fn decode(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Sqrt => x * x,
            Transform::Log => x.exp(),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Identity => "identity",
            Transform::Sqrt => "sqrt",
            Transform::Log => "log",
        })
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Transform::Identity),
            "sqrt" => Ok(Transform::Sqrt),
            "log" => Ok(Transform::Log),
            _ => Err(Error::input(format!("unknown transform {s:?}"))),
        }
    }
}

/// `d f(r) = (θ(t) - a f(r)) dt + σ dW`.
#[derive(Debug, Clone, PartialEq)]
pub struct HullWhiteParams {
    pub a: f64,
    pub sigma: f64,
    pub theta: PiecewiseConstant,
    pub transform: Transform,
}

impl HullWhiteParams {
    pub fn new(a: f64, sigma: f64, theta: PiecewiseConstant, transform: Transform) -> Result<Self> {
        if !(sigma > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!(
                "Hull-White needs finite a and sigma > 0 (got a={a}, sigma={sigma})"
            )));
        }
        Ok(Self {
            a,
            sigma,
            theta,
            transform,
        })
    }

    /// Mean and variance of `f(r(t1))` given `f(r(t0)) = x0`.
    pub fn transition_moments(&self, x0: f64, t0: f64, t1: f64) -> Result<(f64, f64)> {
        if !(t1 > t0) {
            return Err(Error::ordering(format!("step [{t0}, {t1}] is empty")));
        }
        if t1 > self.theta.horizon() * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "theta is defined up to {}, step ends at {t1}",
                self.theta.horizon()
            )));
        }
        let dt = t1 - t0;
        let mean = (-self.a * dt).exp() * x0 + self.theta.decayed_integral(t0, t1, self.a);
        let variance = self.sigma * self.sigma * decay_integral(2.0 * self.a, dt);
        Ok((mean, variance))
    }
}

/// Samples the exact Gaussian transition of `f(r)` over `[t0, t1]` and maps
/// back to the rate.
pub fn hull_white_exact_step(
    p: &HullWhiteParams,
    r0: f64,
    t0: f64,
    t1: f64,
    z: f64,
) -> Result<f64> {
    let x0 = p.transform.encode(r0)?;
    let (mean, var) = p.transition_moments(x0, t0, t1)?;
    Ok(p.transform.decode(mean + var.sqrt() * z))
}

/// Dynamics of `f(r)` for the generic simulation engine.
///
/// The state is the transformed coordinate; use [`Transform::encode`] for
/// the initial value and [`Transform::decode`] on the output. θ is held flat
/// past its last break. Under `sqrt` a non-positive state is a domain error.
pub fn shortrate_sde_spec(p: &HullWhiteParams) -> SdeSpec {
    let (a, sigma) = (p.a, p.sigma);
    let theta = p.theta.clone();
    let exact_theta = p.theta.clone();
    let spec = SdeSpec::new(move |t, x| theta.value_at(t) - a * x, move |_, _| sigma)
        .with_diffusion_x(|_, _| 0.0)
        .with_exact(move |t, x, dt, dw| {
            let mean = (-a * dt).exp() * x + exact_theta.decayed_integral(t, t + dt, a);
            let sd = sigma * decay_integral(2.0 * a, dt).sqrt();
            mean + sd * dw / dt.sqrt()
        });
    match p.transform {
        Transform::Sqrt => spec.with_domain(|x| x > 0.0, "sqrt-rate state > 0"),
        _ => spec,
    }
}

/// Short-rate paths using the exact transition; states are rates.
#[derive(Debug, Clone)]
pub struct HullWhiteModel {
    pub params: HullWhiteParams,
    pub r0: f64,
}

impl PathModel for HullWhiteModel {
    type State = f64;

    fn factors(&self) -> usize {
        1
    }

    fn initial_state(&self) -> f64 {
        self.r0
    }

    fn step(&self, t: f64, dt: f64, r: &f64, z: &[f64]) -> Result<f64> {
        hull_white_exact_step(&self.params, *r, t, t + dt, z[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{price_paths, PathGrid, Scheme, SdeModel, SimulationConfig};
    use crate::shortrate::{vasicek_transition_moments, VasicekParams};
    use proptest::prelude::*;

    fn constant(a: f64, sigma: f64, theta: f64, horizon: f64) -> HullWhiteParams {
        HullWhiteParams::new(
            a,
            sigma,
            PiecewiseConstant::constant(theta, horizon).unwrap(),
            Transform::Identity,
        )
        .unwrap()
    }

    #[test]
    fn ho_lee_limit() {
        let p = constant(0.0, 0.01, 0.004, 5.0);
        let (m, v) = p.transition_moments(0.02, 1.0, 3.0).unwrap();
        assert!((m - 0.028).abs() < 1e-16);
        assert!((v - 2e-4).abs() < 1e-18);
        let still = constant(0.0, 0.01, 0.0, 5.0);
        assert_eq!(
            hull_white_exact_step(&still, 0.02, 0.0, 1.0, 0.0).unwrap(),
            0.02
        );
    }

    #[test]
    fn theta_horizon_is_enforced() {
        let p = constant(0.1, 0.01, 0.0, 2.0);
        assert!(matches!(
            hull_white_exact_step(&p, 0.02, 1.5, 2.5, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn transforms() {
        let p = HullWhiteParams::new(
            0.0,
            0.1,
            PiecewiseConstant::constant(0.0, 1.0).unwrap(),
            Transform::Sqrt,
        )
        .unwrap();
        let spec = shortrate_sde_spec(&p);
        assert!(matches!(spec.drift(0.0, 0.0), Err(Error::Domain(_))));
        assert!(Transform::Sqrt.encode(0.0).is_err());
        assert!(Transform::Log.encode(-0.01).is_err());

        // zero vol, zero theta, no reversion: log-rate stays put
        let p = HullWhiteParams {
            a: 0.0,
            sigma: 0.0,
            theta: PiecewiseConstant::constant(0.0, 1.0).unwrap(),
            transform: Transform::Log,
        };
        let spec = shortrate_sde_spec(&p);
        let mut x = Transform::Log.encode(0.03).unwrap();
        for i in 0..100 {
            x = crate::mc::euler_step(&spec, i as f64 * 0.01, x, 0.01, 0.37).unwrap();
        }
        assert!((Transform::Log.decode(x) - 0.03).abs() < 1e-16);
    }

    #[test]
    fn euler_matches_exact_mean() {
        let p = HullWhiteParams::new(
            0.3,
            0.01,
            PiecewiseConstant::new(vec![0.5, 1.0], vec![0.006, 0.012]).unwrap(),
            Transform::Identity,
        )
        .unwrap();
        let (mean, _) = p.transition_moments(0.01, 0.0, 1.0).unwrap();
        let model = SdeModel::new(shortrate_sde_spec(&p), 0.01, Scheme::Euler).unwrap();
        let grid = PathGrid::new(0.0, 1.0, 10_000).unwrap();
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(10_000, 3),
            |x| x[10_000],
            |_| 1.0,
        )
        .unwrap();
        assert!(res.z_score(mean).abs() < 3.0, "{res:?} vs {mean}");
    }

    proptest! {
        #[test]
        fn constant_theta_is_vasicek(a in 0.01f64..2.0, b in -0.02f64..0.08, sigma in 0.001f64..0.05,
                                     r0 in -0.05f64..0.1, t in 0.01f64..20.0) {
            let hw = constant(a, sigma, a * b, 30.0);
            let v = VasicekParams::new(a, b, sigma).unwrap();
            let (m1, v1) = hw.transition_moments(r0, 0.0, t).unwrap();
            let (m2, v2) = vasicek_transition_moments(&v, r0, t).unwrap();
            prop_assert!((m1 - m2).abs() < 1e-14);
            prop_assert!((v1 - v2).abs() < 1e-14);
        }
    }
}
