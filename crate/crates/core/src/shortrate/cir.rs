use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::PathModel;

/// `dX = (θ1 - θ2 X) dt + θ3 √X dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirParams {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl CirParams {
    pub fn new(theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta2 > 0.0 && theta3 > 0.0) {
            return Err(Error::domain("CIR parameters must all be positive"));
        }
        Ok(Self {
            theta1,
            theta2,
            theta3,
        })
    }

    /// `2θ1 > θ3²`: the origin is unattainable.
    pub fn feller_satisfied(&self) -> bool {
        2.0 * self.theta1 > self.theta3 * self.theta3
    }

    pub fn long_run_mean(&self) -> f64 {
        self.theta1 / self.theta2
    }
}

/// Full-truncation Euler step; the result is floored at zero.
pub fn cir_step(p: &CirParams, x0: f64, dt: f64, z: f64) -> f64 {
    let xp = x0.max(0.0);
    let x1 = xp + (p.theta1 - p.theta2 * xp) * dt + p.theta3 * (xp * dt).sqrt() * z;
    if x1.is_nan() {
        0.0
    } else {
        x1.max(0.0)
    }
}

/// CIR as a one-factor [`PathModel`].
#[derive(Debug, Clone, Copy)]
pub struct CirModel {
    pub params: CirParams,
    pub x0: f64,
}

impl PathModel for CirModel {
    type State = f64;

    fn factors(&self) -> usize {
        1
    }

    fn initial_state(&self) -> f64 {
        self.x0
    }

    fn step(&self, _t: f64, dt: f64, x: &f64, z: &[f64]) -> Result<f64> {
        Ok(cir_step(&self.params, *x, dt, z[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{price_paths, PathGrid, SimulationConfig};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let p = CirParams::new(0.02, 0.5, 0.1).unwrap();
        assert!(p.feller_satisfied());
        assert!((cir_step(&p, 0.04, 0.1, 0.0) - 0.04).abs() < 1e-17);
        assert!((cir_step(&p, 0.0, 1.0, 0.0) - 0.02).abs() < 1e-17);
        assert!(!CirParams::new(0.01, 0.5, 0.3).unwrap().feller_satisfied());
    }

    #[test]
    fn ergodic_mean() {
        let model = CirModel {
            params: CirParams::new(0.02, 0.5, 0.1).unwrap(),
            x0: 0.01,
        };
        let grid = PathGrid::new(0.0, 20.0, 200).unwrap();
        let res = price_paths(
            &model,
            &grid,
            &SimulationConfig::new(100_000, 17),
            |p| p[200],
            |_| 1.0,
        )
        .unwrap();
        assert!(res.z_score(0.04).abs() < 3.0, "{res:?}");
    }

    proptest! {
        #[test]
        fn never_negative_or_nan(x in -1.0f64..1.0, dt in 1e-4f64..2.0, z in -50.0f64..50.0,
                                 t1 in 1e-4f64..1.0, t2 in 1e-4f64..5.0, t3 in 1e-4f64..3.0) {
            let p = CirParams::new(t1, t2, t3).unwrap();
            let y = cir_step(&p, x, dt, z);
            prop_assert!(y >= 0.0 && y.is_finite());
        }
    }
}
