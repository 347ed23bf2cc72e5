use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ExactTransition = Arc<dyn Fn(f64, f64, f64, f64) -> f64 + Send + Sync>;
type Domain = Arc<dyn Fn(f64) -> bool + Send + Sync>;

/// A scalar Itô SDE `dX = μ(t,X) dt + σ(t,X) dW`.
///
/// `diffusion_x` (∂σ/∂x) is only needed by the Milstein scheme. An optional
/// exact transition `(t, x, dt, dW) -> x'` enables [`Scheme::Exact`]; an
/// optional domain predicate turns evaluation outside the state space into a
/// domain error.
#[derive(Clone)]
pub struct SdeSpec {
    drift: Coefficient,
    diffusion: Coefficient,
    diffusion_x: Option<Coefficient>,
    exact: Option<ExactTransition>,
    domain: Option<(Domain, &'static str)>,
}

impl fmt::Debug for SdeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SdeSpec")
            .field("milstein", &self.diffusion_x.is_some())
            .field("exact", &self.exact.is_some())
            .field("domain", &self.domain.as_ref().map(|d| d.1))
            .finish()
    }
}

impl SdeSpec {
    pub fn new(
        drift: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        diffusion: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            diffusion_x: None,
            exact: None,
            domain: None,
        }
    }

    pub fn with_diffusion_x(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.diffusion_x = Some(Arc::new(f));
        self
    }

    pub fn with_exact(
        mut self,
        f: impl Fn(f64, f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.exact = Some(Arc::new(f));
        self
    }

    pub fn with_domain(
        mut self,
        f: impl Fn(f64) -> bool + Send + Sync + 'static,
        name: &'static str,
    ) -> Self {
        self.domain = Some((Arc::new(f), name));
        self
    }

    /// Geometric Brownian motion with its closed-form transition.
    pub fn gbm(mu: f64, sigma: f64) -> Self {
        Self::new(move |_, x| mu * x, move |_, x| sigma * x)
            .with_diffusion_x(move |_, _| sigma)
            .with_exact(move |_, x, dt, dw| gbm_exact_step(mu, sigma, x, dt, dw))
    }

    /// Arithmetic Brownian motion `dX = μ dt + σ dW`.
    pub fn brownian(mu: f64, sigma: f64) -> Self {
        Self::new(move |_, _| mu, move |_, _| sigma)
            .with_diffusion_x(|_, _| 0.0)
            .with_exact(move |_, x, dt, dw| x + mu * dt + sigma * dw)
    }

    pub fn has_diffusion_x(&self) -> bool {
        self.diffusion_x.is_some()
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn check(&self, x: f64) -> Result<()> {
        if let Some((pred, name)) = &self.domain {
            if !pred(x) {
                return Err(Error::domain(format!("state {x} outside {name}")));
            }
        }
        Ok(())
    }

    pub fn drift(&self, t: f64, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok((self.drift)(t, x))
    }

    pub fn diffusion(&self, t: f64, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok((self.diffusion)(t, x))
    }

    pub fn diffusion_x(&self, t: f64, x: f64) -> Result<f64> {
        let f = self
            .diffusion_x
            .as_ref()
            .ok_or_else(|| Error::input("Milstein needs the state derivative of the diffusion"))?;
        self.check(x)?;
        Ok(f(t, x))
    }

    pub fn exact_step(&self, t: f64, x: f64, dt: f64, dw: f64) -> Result<f64> {
        let f = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::input("this SDE has no exact transition"))?;
        self.check(x)?;
        Ok(f(t, x, dt, dw))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Euler,
    Milstein,
    Exact,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Euler => "euler",
            Scheme::Milstein => "milstein",
            Scheme::Exact => "exact",
        })
    }
}

/// `x + μ dt + σ dW`.
pub fn euler_step(spec: &SdeSpec, t: f64, x: f64, dt: f64, dw: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::domain("time step must be positive"));
    }
    Ok(x + spec.drift(t, x)? * dt + spec.diffusion(t, x)? * dw)
}

/// Euler plus `½ σ σ_x (dW² - dt)`.
pub fn milstein_step(spec: &SdeSpec, t: f64, x: f64, dt: f64, dw: f64) -> Result<f64> {
    let sx = spec.diffusion_x(t, x)?;
    let euler = euler_step(spec, t, x, dt, dw)?;
    Ok(euler + 0.5 * spec.diffusion(t, x)? * sx * (dw * dw - dt))
}

/// Closed-form GBM update `x exp((μ - σ²/2) dt + σ dW)`.
pub fn gbm_exact_step(mu: f64, sigma: f64, x: f64, dt: f64, dw: f64) -> f64 {
    x * ((mu - 0.5 * sigma * sigma) * dt + sigma * dw).exp()
}

/// One step of the chosen scheme.
pub fn scheme_step(
    spec: &SdeSpec,
    scheme: Scheme,
    t: f64,
    x: f64,
    dt: f64,
    dw: f64,
) -> Result<f64> {
    match scheme {
        Scheme::Euler => euler_step(spec, t, x, dt, dw),
        Scheme::Milstein => milstein_step(spec, t, x, dt, dw),
        Scheme::Exact => {
            if !(dt > 0.0) {
                return Err(Error::domain("time step must be positive"));
            }
            spec.exact_step(t, x, dt, dw)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_examples() {
        let still = SdeSpec::new(|_, _| 0.0, |_, _| 0.0);
        assert_eq!(euler_step(&still, 0.0, 3.0, 0.1, 0.7).unwrap(), 3.0);
        let ode = SdeSpec::new(|_, _| 1.0, |_, _| 0.0);
        assert!((euler_step(&ode, 0.0, 2.0, 0.1, 0.3).unwrap() - 2.1).abs() < 1e-15);
        let gbm = SdeSpec::gbm(0.0, 0.2);
        assert!((euler_step(&gbm, 0.0, 1.0, 0.01, 0.05).unwrap() - 1.01).abs() < 1e-15);
    }

    #[test]
    fn milstein_examples() {
        let additive = SdeSpec::brownian(0.3, 0.4);
        for dw in [-0.2, 0.0, 0.05] {
            assert_eq!(
                milstein_step(&additive, 0.0, 1.0, 0.01, dw).unwrap(),
                euler_step(&additive, 0.0, 1.0, 0.01, dw).unwrap()
            );
        }
        let gbm = SdeSpec::gbm(0.0, 0.2);
        // dW² = dt: the correction vanishes
        let m = milstein_step(&gbm, 0.0, 1.0, 0.01, 0.1).unwrap();
        assert!((m - 1.02).abs() < 1e-15);
        // dW = 0: correction is -½ σ σ_x dt
        let m = milstein_step(&gbm, 0.0, 1.0, 0.01, 0.0).unwrap();
        assert!((m - (1.0 - 0.5 * 0.2 * 0.2 * 0.01)).abs() < 1e-15);
        let no_dx = SdeSpec::new(|_, x| x, |_, x| x);
        assert!(milstein_step(&no_dx, 0.0, 1.0, 0.01, 0.1).is_err());
    }

    #[test]
    fn gbm_exact_examples() {
        assert_eq!(gbm_exact_step(0.0, 0.0, 2.5, 1.0, 0.3), 2.5);
        assert!((gbm_exact_step(0.05, 0.0, 1.0, 1.0, 0.0) - 0.05f64.exp()).abs() < 1e-15);
        assert!(gbm_exact_step(0.0, 3.0, 1.0, 1.0, -10.0) > 0.0);
    }

    #[test]
    fn domain_errors_propagate() {
        let spec = SdeSpec::new(|_, x: f64| x.ln(), |_, _| 0.1).with_domain(|x| x > 0.0, "x > 0");
        assert!(matches!(
            euler_step(&spec, 0.0, -1.0, 0.1, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(euler_step(&spec, 0.0, 1.0, 0.1, 0.0).is_ok());
    }
}
