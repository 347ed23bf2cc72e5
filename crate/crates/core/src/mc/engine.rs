//! Seeded, path-parallel simulation.
//!
//! Path `p` draws its normals from ChaCha stream `p` (or `p / 2` when
//! antithetic pairs are on) keyed by the run seed, so every path is a pure
//! function of `(seed, p)`. Results are collected in path order and reduced
//! with a fixed pairwise summation, which makes the output independent of the
//! number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sde::{scheme_step, Scheme, SdeSpec};
use crate::error::{Error, Result};
use crate::math::pairwise_sum;

/// Upper bound on stored path states for [`simulate_paths`].
pub const MAX_STORED_STATES: usize = 50_000_000;

/// Uniform time grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGrid {
    pub t0: f64,
    pub t_end: f64,
    pub n_steps: usize,
}

impl PathGrid {
    pub fn new(t0: f64, t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end > t0) {
            return Err(Error::ordering(format!(
                "grid end {t_end} must follow start {t0}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::input("grid needs at least one step"));
        }
        Ok(Self { t0, t_end, n_steps })
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t0) / self.n_steps as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        if i == self.n_steps {
            self.t_end
        } else {
            self.t0 + i as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.time(i)).collect()
    }
}

/// Where the Gaussian shocks come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    #[default]
    Gaussian,
    /// All shocks zero: yields the deterministic skeleton path.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_paths: usize,
    pub seed: u64,
    #[serde(default)]
    pub antithetic: bool,
    #[serde(default)]
    pub noise: Noise,
}

impl SimulationConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            antithetic: false,
            noise: Noise::Gaussian,
        }
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn noise(mut self, noise: Noise) -> Self {
        self.noise = noise;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::input("need at least one path"));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(Error::input("antithetic sampling needs an even path count"));
        }
        Ok(())
    }
}

/// Normal draws for one path.
pub struct PathNoise {
    rng: ChaCha20Rng,
    sign: f64,
    zero: bool,
}

impl PathNoise {
    pub fn new(seed: u64, path: usize, config: &SimulationConfig) -> Self {
        let (stream, sign) = if config.antithetic {
            (path / 2, if path % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            (path, 1.0)
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream as u64);
        Self {
            rng,
            sign,
            zero: config.noise == Noise::Zero,
        }
    }

    pub fn next(&mut self) -> f64 {
        if self.zero {
            return 0.0;
        }
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sign * z
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.next();
        }
    }
}

/// A model that advances a state across one grid step given independent
/// standard normal draws.
pub trait PathModel: Sync {
    type State: Clone + Send + Sync;

    /// Independent normals consumed per step.
    fn factors(&self) -> usize;

    fn initial_state(&self) -> Self::State;

    fn step(&self, t: f64, dt: f64, state: &Self::State, normals: &[f64]) -> Result<Self::State>;
}

/// A scalar SDE driven by one of the generic schemes.
#[derive(Debug, Clone)]
pub struct SdeModel {
    pub spec: SdeSpec,
    pub x0: f64,
    pub scheme: Scheme,
}

impl SdeModel {
    pub fn new(spec: SdeSpec, x0: f64, scheme: Scheme) -> Result<Self> {
        match scheme {
            Scheme::Milstein if !spec.has_diffusion_x() => Err(Error::input(
                "Milstein needs the state derivative of the diffusion",
            )),
            Scheme::Exact if !spec.has_exact() => {
                Err(Error::input("this SDE has no exact transition"))
            }
            _ => Ok(Self { spec, x0, scheme }),
        }
    }
}

impl PathModel for SdeModel {
    type State = f64;

    fn factors(&self) -> usize {
        1
    }

    fn initial_state(&self) -> f64 {
        self.x0
    }

    fn step(&self, t: f64, dt: f64, x: &f64, z: &[f64]) -> Result<f64> {
        scheme_step(&self.spec, self.scheme, t, *x, dt, dt.sqrt() * z[0])
    }
}

fn run_path<M: PathModel>(
    model: &M,
    grid: &PathGrid,
    config: &SimulationConfig,
    path: usize,
) -> Result<Vec<M::State>> {
    let mut noise = PathNoise::new(config.seed, path, config);
    let dt = grid.dt();
    let mut z = vec![0.0; model.factors()];
    let mut states = Vec::with_capacity(grid.n_steps + 1);
    states.push(model.initial_state());
    for i in 0..grid.n_steps {
        noise.fill(&mut z);
        let next = model.step(grid.time(i), dt, &states[i], &z)?;
        states.push(next);
    }
    Ok(states)
}

/// Simulates each path and maps it through `f` without retaining it.
pub fn simulate_map<M, T, F>(
    model: &M,
    grid: &PathGrid,
    config: &SimulationConfig,
    f: F,
) -> Result<Vec<T>>
where
    M: PathModel,
    T: Send,
    F: Fn(&[M::State]) -> T + Sync,
{
    config.validate()?;
    (0..config.n_paths)
        .into_par_iter()
        .map(|p| run_path(model, grid, config, p).map(|path| f(&path)))
        .collect()
}

/// A stored set of full paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet<S> {
    pub grid: PathGrid,
    pub seed: u64,
    pub antithetic: bool,
    pub paths: Vec<Vec<S>>,
}

impl<S> PathSet<S> {
    pub fn terminal(&self) -> impl Iterator<Item = &S> {
        self.paths.iter().map(|p| p.last().unwrap())
    }
}

/// Simulates and keeps every path.
pub fn simulate_paths<M: PathModel>(
    model: &M,
    grid: &PathGrid,
    config: &SimulationConfig,
) -> Result<PathSet<M::State>> {
    let stored = config.n_paths.saturating_mul(grid.n_steps + 1);
    if stored > MAX_STORED_STATES {
        return Err(Error::Capacity(format!(
            "{stored} path states requested, limit is {MAX_STORED_STATES}; use simulate_map"
        )));
    }
    let paths = simulate_map(model, grid, config, |p| p.to_vec())?;
    Ok(PathSet {
        grid: *grid,
        seed: config.seed,
        antithetic: config.antithetic,
        paths,
    })
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl McResult {
    /// Mean and standard error of i.i.d. samples. With `antithetic`, adjacent
    /// pairs are averaged first and the error is computed over pair means.
    pub fn from_samples(samples: &[f64], seed: u64, antithetic: bool) -> Result<Self> {
        let units: Vec<f64> = if antithetic {
            if samples.len() % 2 != 0 {
                return Err(Error::input("antithetic samples come in pairs"));
            }
            samples
                .chunks_exact(2)
                .map(|c| 0.5 * (c[0] + c[1]))
                .collect()
        } else {
            samples.to_vec()
        };
        let n = units.len();
        if n < 2 {
            return Err(Error::InsufficientData(
                "a standard error needs at least two paths".into(),
            ));
        }
        let mean = pairwise_sum(&units) / n as f64;
        let sq: Vec<f64> = units.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&sq) / (n - 1) as f64;
        Ok(Self {
            estimate: mean,
            std_error: (var / n as f64).sqrt(),
            n_paths: samples.len(),
            seed,
        })
    }

    /// Number of standard errors separating the estimate from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.estimate == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.estimate - target) / self.std_error
        }
    }
}

/// Mean of `discount(path) * payoff(path)` over stored paths.
pub fn mc_discounted_expectation<S>(
    paths: &PathSet<S>,
    payoff: impl Fn(&[S]) -> f64,
    discount: impl Fn(&[S]) -> f64,
) -> Result<McResult> {
    let samples: Vec<f64> = paths
        .paths
        .iter()
        .map(|p| discount(p) * payoff(p))
        .collect();
    McResult::from_samples(&samples, paths.seed, paths.antithetic)
}

/// Streaming variant of [`mc_discounted_expectation`] that never stores paths.
pub fn price_paths<M, P, D>(
    model: &M,
    grid: &PathGrid,
    config: &SimulationConfig,
    payoff: P,
    discount: D,
) -> Result<McResult>
where
    M: PathModel,
    P: Fn(&[M::State]) -> f64 + Sync,
    D: Fn(&[M::State]) -> f64 + Sync,
{
    let samples = simulate_map(model, grid, config, |p| discount(p) * payoff(p))?;
    McResult::from_samples(&samples, config.seed, config.antithetic)
}

/// `exp(-Σ r(t_i) Δt)` along a path of short rates (left-point rule).
pub fn left_point_discount(rates: &[f64], dt: f64) -> f64 {
    let n = rates.len().saturating_sub(1);
    (-dt * pairwise_sum(&rates[..n])).exp()
}
