//! Empirical strong-order measurement against a known exact solution.

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{PathNoise, SimulationConfig};
use super::sde::{scheme_step, Scheme, SdeSpec};
use crate::error::{Error, Result};
use crate::math::pairwise_sum;

type ExactSolution = dyn Fn(f64, f64, f64) -> f64 + Sync;

/// A strong-convergence experiment.
///
/// `exact(t, x0, w_t)` is the true solution at time `t` given the Brownian
/// value `w_t`. `ladder` lists step counts; each must divide the largest, and
/// coarse increments are sums of the finest ones.
pub struct ConvergenceStudy<'a> {
    pub spec: &'a SdeSpec,
    pub exact: &'a ExactSolution,
    pub x0: f64,
    pub t0: f64,
    pub t_end: f64,
    pub ladder: Vec<usize>,
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub dts: Vec<f64>,
    /// `E|X̂_T - X_T|` per ladder level.
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln error` against `ln dt`.
    pub slope: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn strong_convergence_order(
    study: &ConvergenceStudy<'_>,
    scheme: Scheme,
) -> Result<ConvergenceReport> {
    if study.ladder.len() < 4 {
        return Err(Error::input(
            "a convergence ladder needs at least four levels",
        ));
    }
    if !(study.t_end > study.t0) {
        return Err(Error::ordering("convergence horizon must be positive"));
    }
    if study.n_paths == 0 {
        return Err(Error::input("need at least one path"));
    }
    let finest = *study.ladder.iter().max().unwrap();
    if study.ladder.iter().any(|&n| n == 0 || finest % n != 0) {
        return Err(Error::input("ladder levels must divide the finest level"));
    }
    let mut levels = study.ladder.clone();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() != study.ladder.len() {
        return Err(Error::input("ladder levels must be distinct"));
    }
    let horizon = study.t_end - study.t0;
    let fine_dt = horizon / finest as f64;
    let config = SimulationConfig::new(study.n_paths, study.seed);

    let per_path: Vec<Vec<f64>> = (0..study.n_paths)
        .into_par_iter()
        .map(|p| -> Result<Vec<f64>> {
            let mut noise = PathNoise::new(study.seed, p, &config);
            let dw: Vec<f64> = (0..finest).map(|_| fine_dt.sqrt() * noise.next()).collect();
            let w_total = pairwise_sum(&dw);
            let truth = (study.exact)(study.t_end, study.x0, w_total);
            levels
                .iter()
                .map(|&n| {
                    let ratio = finest / n;
                    let dt = horizon / n as f64;
                    let mut x = study.x0;
                    for i in 0..n {
                        let inc: f64 = dw[i * ratio..(i + 1) * ratio].iter().sum();
                        x = scheme_step(study.spec, scheme, study.t0 + i as f64 * dt, x, dt, inc)?;
                    }
                    Ok((x - truth).abs())
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut dts = Vec::new();
    let mut errors = Vec::new();
    for (k, &n) in levels.iter().enumerate() {
        let col: Vec<f64> = per_path.iter().map(|row| row[k]).collect();
        dts.push(horizon / n as f64);
        errors.push(pairwise_sum(&col) / study.n_paths as f64);
    }
    if errors.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::numerical(
            "zero or non-finite error at some level; slope undefined",
        ));
    }
    let lx: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    Ok(ConvergenceReport {
        scheme,
        dts,
        errors,
        slope: fit_slope(&lx, &ly),
    })
}

/// GBM study with its closed-form solution.
pub fn gbm_convergence(
    mu: f64,
    sigma: f64,
    x0: f64,
    t_end: f64,
    ladder: Vec<usize>,
    n_paths: usize,
    seed: u64,
    scheme: Scheme,
) -> Result<ConvergenceReport> {
    let spec = SdeSpec::gbm(mu, sigma);
    let exact =
        move |t: f64, x: f64, w: f64| x * ((mu - 0.5 * sigma * sigma) * t + sigma * w).exp();
    let study = ConvergenceStudy {
        spec: &spec,
        exact: &exact,
        x0,
        t0: 0.0,
        t_end,
        ladder,
        n_paths,
        seed,
    };
    strong_convergence_order(&study, scheme)
}
