use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::psd_factor;
use crate::piecewise::PiecewiseConstant;

/// Factor order used for every 3-vector in this module.
pub const NOMINAL: usize = 0;
pub const REAL: usize = 1;
pub const INDEX: usize = 2;

/// A validated 3×3 correlation matrix with its pivoted factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    matrix: [[f64; 3]; 3],
    factor: [[f64; 3]; 3],
}

impl Correlation {
    pub fn new(matrix: [[f64; 3]; 3]) -> Result<Self> {
        for (i, row) in matrix.iter().enumerate() {
            if (row[i] - 1.0).abs() > 1e-12 {
                return Err(Error::input("correlation matrix needs a unit diagonal"));
            }
            if row.iter().any(|r| !(r.abs() <= 1.0)) {
                return Err(Error::input("correlations must lie in [-1, 1]"));
            }
        }
        let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
        let m = psd_factor(&flat, 3)?;
        let mut factor = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                factor[i][j] = m[i * 3 + j];
            }
        }
        Ok(Self { matrix, factor })
    }

    /// Builds the matrix from the three pairwise correlations.
    pub fn from_pairs(rho_nr: f64, rho_ni: f64, rho_ri: f64) -> Result<Self> {
        Self::new([
            [1.0, rho_nr, rho_ni],
            [rho_nr, 1.0, rho_ri],
            [rho_ni, rho_ri, 1.0],
        ])
    }

    pub fn identity() -> Self {
        Self::from_pairs(0.0, 0.0, 0.0).unwrap()
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    /// Maps independent standard normals to normals with this correlation.
    pub fn correlate(&self, z: &[f64; 3]) -> [f64; 3] {
        let f = &self.factor;
        [
            f[0][0] * z[0] + f[0][1] * z[1] + f[0][2] * z[2],
            f[1][0] * z[0] + f[1][1] * z[1] + f[1][2] * z[2],
            f[2][0] * z[0] + f[2][1] * z[1] + f[2][2] * z[2],
        ]
    }

    /// `xᵀ ρ y`.
    pub fn quadratic(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += x[i] * self.matrix[i][j] * y[j];
            }
        }
        s
    }
}

/// Brownian increments over `dt` with covariance `corr · dt`.
pub fn correlated_increments(corr: &Correlation, dt: f64, draws: &[f64; 3]) -> Result<[f64; 3]> {
    if !(dt > 0.0) {
        return Err(Error::domain("time step must be positive"));
    }
    let z = corr.correlate(draws);
    let s = dt.sqrt();
    Ok([z[0] * s, z[1] * s, z[2] * s])
}

/// Three-factor nominal rate / real rate / index model.
///
/// Rates follow `dr = (θ(t) - a r) dt + σ dW`; under the nominal risk-neutral
/// measure the real rate carries an extra `-ρ_rI σ_r σ_I` drift and the index
/// is lognormal with drift `r_n - r_r`. The θ functions are unset until
/// fitted (see [`crate::jy::jy_theta_fit`]).
#[derive(Debug, Clone, PartialEq)]
pub struct JyParams {
    pub a_n: f64,
    pub a_r: f64,
    pub sigma_n: f64,
    pub sigma_r: f64,
    pub sigma_i: f64,
    corr: Correlation,
    pub theta_n: Option<PiecewiseConstant>,
    pub theta_r: Option<PiecewiseConstant>,
}

impl JyParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a_n: f64,
        a_r: f64,
        sigma_n: f64,
        sigma_r: f64,
        sigma_i: f64,
        rho_nr: f64,
        rho_ni: f64,
        rho_ri: f64,
    ) -> Result<Self> {
        if !(sigma_n >= 0.0 && sigma_r >= 0.0 && sigma_i >= 0.0) {
            return Err(Error::domain("JY volatilities must be non-negative"));
        }
        if !(a_n.is_finite() && a_r.is_finite()) {
            return Err(Error::domain("mean reversions must be finite"));
        }
        Ok(Self {
            a_n,
            a_r,
            sigma_n,
            sigma_r,
            sigma_i,
            corr: Correlation::from_pairs(rho_nr, rho_ni, rho_ri)?,
            theta_n: None,
            theta_r: None,
        })
    }

    pub fn with_theta(mut self, theta_n: PiecewiseConstant, theta_r: PiecewiseConstant) -> Self {
        self.theta_n = Some(theta_n);
        self.theta_r = Some(theta_r);
        self
    }

    pub fn correlation(&self) -> &Correlation {
        &self.corr
    }

    pub fn rho_nr(&self) -> f64 {
        self.corr.get(NOMINAL, REAL)
    }

    pub fn rho_ni(&self) -> f64 {
        self.corr.get(NOMINAL, INDEX)
    }

    pub fn rho_ri(&self) -> f64 {
        self.corr.get(REAL, INDEX)
    }

    pub(crate) fn thetas(&self) -> Result<(&PiecewiseConstant, &PiecewiseConstant)> {
        match (&self.theta_n, &self.theta_r) {
            (Some(n), Some(r)) => Ok((n, r)),
            _ => Err(Error::State(
                "JY theta functions have not been fitted".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JyState {
    pub t: f64,
    pub r_n: f64,
    pub r_r: f64,
    #[serde(rename = "I")]
    pub i: f64,
}

/// Market prices of risk; all zero means risk-neutral dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketPriceOfRisk {
    pub lambda_n: PiecewiseConstant,
    pub lambda_r: PiecewiseConstant,
    pub lambda_i: PiecewiseConstant,
}

impl MarketPriceOfRisk {
    pub fn zero() -> Self {
        let z = PiecewiseConstant::constant(0.0, 1.0).unwrap();
        Self {
            lambda_n: z.clone(),
            lambda_r: z.clone(),
            lambda_i: z,
        }
    }

    pub fn is_zero(&self) -> bool {
        [&self.lambda_n, &self.lambda_r, &self.lambda_i]
            .iter()
            .all(|l| l.values().iter().all(|&v| v == 0.0))
    }
}

impl Default for MarketPriceOfRisk {
    fn default() -> Self {
        Self::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_passes_draws_through() {
        let inc = correlated_increments(&Correlation::identity(), 0.25, &[0.3, -1.2, 2.0]).unwrap();
        assert_eq!(inc, [0.15, -0.6, 1.0]);
    }

    #[test]
    fn perfect_correlation_factors() {
        let c = Correlation::from_pairs(1.0, 0.0, 0.0).unwrap();
        let inc = correlated_increments(&c, 1.0, &[0.7, -0.4, 0.1]).unwrap();
        assert!((inc[0] - inc[1]).abs() < 1e-15);
        assert!(Correlation::from_pairs(0.9, 0.9, -0.9).is_err());
        assert!(JyParams::new(0.1, 0.1, 0.01, 0.01, 0.01, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn sample_covariance() {
        let c = Correlation::from_pairs(0.6, -0.3, 0.25).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let n = 1_000_000;
        let dt = 0.5;
        let mut acc = [[0.0f64; 3]; 3];
        for _ in 0..n {
            let z: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            let x = correlated_increments(&c, dt, &z).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += x[i] * x[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let corr = acc[i][j] / (n as f64 * dt);
                assert!((corr - c.get(i, j)).abs() < 0.01, "{i}{j}: {corr}");
            }
        }
    }
}
