use crate::error::{Error, Result};
use crate::jy::{Correlation, JyParams};
use crate::math::{decay_integral, integrate_smooth};
use crate::piecewise::PiecewiseConstant;

/// Bond and index volatility structure in the (nominal, real, index) factor
/// basis.
///
/// Forward-rate volatilities are `σ_k(u) e^{-a_k (s - u)}`, so zero-coupon
/// bond volatilities are `Σ_k(u, T) = -σ_k(u) B_k(u, T)`. The σ's are step
/// functions of calendar time.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorVols {
    pub a_n: f64,
    pub a_r: f64,
    pub sigma_n: PiecewiseConstant,
    pub sigma_r: PiecewiseConstant,
    pub sigma_i: PiecewiseConstant,
    pub corr: Correlation,
}

type Vec3 = [f64; 3];

fn sub(x: Vec3, y: Vec3) -> Vec3 {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}

impl FactorVols {
    /// Constant volatilities matching a JY parameter set.
    pub fn from_jy(p: &JyParams) -> Self {
        let c = |v: f64| PiecewiseConstant::constant(v, 1.0).unwrap();
        Self {
            a_n: p.a_n,
            a_r: p.a_r,
            sigma_n: c(p.sigma_n),
            sigma_r: c(p.sigma_r),
            sigma_i: c(p.sigma_i),
            corr: p.correlation().clone(),
        }
    }

    pub fn sigma_nominal_bond(&self, u: f64, maturity: f64) -> Vec3 {
        [
            -self.sigma_n.value_at(u) * decay_integral(self.a_n, maturity - u),
            0.0,
            0.0,
        ]
    }

    pub fn sigma_real_bond(&self, u: f64, maturity: f64) -> Vec3 {
        [
            0.0,
            -self.sigma_r.value_at(u) * decay_integral(self.a_r, maturity - u),
            0.0,
        ]
    }

    /// `Σ_I(u, T) = Σ_n - Σ_r - σ_I`, minus the forward index volatility.
    pub fn sigma_index(&self, u: f64, maturity: f64) -> Vec3 {
        let idx = [0.0, 0.0, self.sigma_i.value_at(u)];
        sub(
            sub(
                self.sigma_nominal_bond(u, maturity),
                self.sigma_real_bond(u, maturity),
            ),
            idx,
        )
    }

    /// Integrates `f` over `[a, b]` piece by piece, splitting at every σ break
    /// and at `extra`.
    fn integrate(&self, a: f64, b: f64, extra: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        let mut cuts: Vec<f64> = [&self.sigma_n, &self.sigma_r, &self.sigma_i]
            .iter()
            .flat_map(|s| s.interior_breaks(a, b).collect::<Vec<_>>())
            .chain(extra.iter().copied().filter(|&x| x > a && x < b))
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.windows(2)
            .map(|w| integrate_smooth(&f, w[0], w[1], 0.5))
            .sum()
    }

    /// `V(t, T)² = ∫_t^T Σ_I ρ Σ_I du`.
    pub fn index_variance(&self, t: f64, maturity: f64) -> Result<f64> {
        if maturity < t {
            return Err(Error::ordering(format!("expiry {maturity} precedes {t}")));
        }
        let v = self.integrate(t, maturity, &[], |u| {
            let s = self.sigma_index(u, maturity);
            self.corr.quadratic(&s, &s)
        });
        non_negative(v)
    }

    /// Convexity term `Ω(t, T1, T2)` of the period inflation option.
    pub fn inflation_omega(&self, t: f64, t1: f64, t2: f64) -> Result<f64> {
        let v1 = self.index_variance(t, t1)?;
        let cross = self.integrate(t, t1, &[], |u| {
            let s1 = self.sigma_index(u, t1);
            let dn = sub(
                self.sigma_nominal_bond(u, t2),
                self.sigma_nominal_bond(u, t1),
            );
            self.corr.quadratic(&s1, &sub(self.sigma_index(u, t2), dn))
        });
        Ok(v1 - cross)
    }

    /// `Ṽ(t, T1, T2)²` with `Σ̃ = Σ_I(u, T2) - 1{u < T1} Σ_I(u, T1)`.
    pub fn inflation_variance(&self, t: f64, t1: f64, t2: f64) -> Result<f64> {
        if !(t <= t1 && t1 < t2) {
            return Err(Error::ordering(format!(
                "need t <= T1 < T2, got {t}, {t1}, {t2}"
            )));
        }
        let v = self.integrate(t, t2, &[t1], |u| {
            let mut s = self.sigma_index(u, t2);
            if u < t1 {
                s = sub(s, self.sigma_index(u, t1));
            }
            self.corr.quadratic(&s, &s)
        });
        non_negative(v)
    }
}

fn non_negative(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v > -1e-14 {
        Ok(0.0)
    } else {
        Err(Error::numerical(format!(
            "computed variance {v} is negative"
        )))
    }
}
