//! Subcommand pipelines. Each run reads one JSON config, writes CSV tables
//! and a `summary.json` into the output directory, and tags every failure
//! with the stage it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::inputs::{JyParamsInput, MarketInput, SimulationInput, Trade};
use super::tables::{load_cpi_csv, load_quotes_csv, write_curve_csv, write_paths_csv, write_table};
use crate::curves::{
    bootstrap_piecewise_forwards, BootstrapOptions, CouponBondQuote, CurveKind, CurvePair,
};
use crate::error::{Error, Result};
use crate::jy::{jy_zcb_reconstitution, JyModel, JyParams, JyScheme, JyState};
use crate::market::{CivilDate, CpiSeries};
use crate::mc::{
    gbm_convergence, simulate_map, McResult, PathGrid, Scheme, SimulationConfig, MAX_STORED_STATES,
};
use crate::pricers::{
    index_option_price, inflation_option_price, tips_dirty_price, yyiis_float_mc, yyiis_price,
    zciis_price, FactorVols, IndexOptionSpec, InflationOptionSpec, TipsSpec,
};
use crate::rational_kernel::{
    rpks_fit, rpks_nominal_bond, rpks_real_bond, MartingaleState, Weight,
};
use crate::shortrate::{affine, merton_calibrate, merton_default_metrics, MertonStructuralInputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationTarget {
    Merton,
    JyTheta,
    Rpks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bootstrap,
    Price,
    Simulate,
    Calibrate(CalibrationTarget),
    Converge,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Bootstrap => "bootstrap",
            Command::Price => "price",
            Command::Simulate => "simulate",
            Command::Calibrate(CalibrationTarget::Merton) => "calibrate merton",
            Command::Calibrate(CalibrationTarget::JyTheta) => "calibrate jy-theta",
            Command::Calibrate(CalibrationTarget::Rpks) => "calibrate rpks",
            Command::Converge => "converge",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config_path: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides any seed in the config file.
    pub seed: Option<u64>,
}

/// A library error annotated with the pipeline stage that raised it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: String,
    pub source: Error,
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        self.source.exit_code()
    }
}

trait Staged<T> {
    fn stage(self, name: &str) -> std::result::Result<T, PipelineError>;
}

impl<T> Staged<T> for Result<T> {
    fn stage(self, name: &str) -> std::result::Result<T, PipelineError> {
        self.map_err(|source| PipelineError {
            stage: name.to_string(),
            source,
        })
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the config file bytes.
    pub config_hash: String,
    pub seed: u64,
    /// SHA-256 of every data file the config refers to, by relative path.
    pub input_hashes: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub results: Value,
}

pub const SUMMARY_FILE: &str = "summary.json";

/// Hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Run<'a> {
    base_dir: &'a Path,
    files: Vec<(String, Vec<u8>)>,
    inputs: BTreeMap<String, String>,
}

impl Run<'_> {
    fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.base_dir.join(rel);
        let bytes = fs::read(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        self.inputs.insert(rel.to_string(), sha256_hex(&bytes));
        Ok(p)
    }

    fn market(&mut self, m: &MarketInput) -> Result<CurvePair> {
        for c in [&m.nominal, &m.real] {
            if let super::inputs::CurveInput::File { file } = c {
                self.path(file)?;
            }
        }
        m.curve_pair(self.base_dir)
    }

    fn emit(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.files.push((name.to_string(), buf));
        Ok(())
    }
}

fn parse_json<T: DeserializeOwned>(bytes: &[u8], source: &str) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        source_name: source.to_string(),
        line: e.line(),
        message: e.to_string(),
    })
}

/// Runs one subcommand end to end.
pub fn run_pipeline(cfg: &RunConfig) -> std::result::Result<Report, PipelineError> {
    let source = cfg.config_path.display().to_string();
    let bytes = fs::read(&cfg.config_path)
        .map_err(|e| Error::Io(format!("{source}: {e}")))
        .stage("config")?;
    let base_dir = cfg.config_path.parent().unwrap_or(Path::new("."));
    let mut run = Run {
        base_dir,
        files: Vec::new(),
        inputs: BTreeMap::new(),
    };

    let (seed, results) = match cfg.command {
        Command::Bootstrap => bootstrap(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Price => price(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Simulate => simulate(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Calibrate(CalibrationTarget::Merton) => calibrate_merton(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Calibrate(CalibrationTarget::JyTheta) => calibrate_jy(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Calibrate(CalibrationTarget::Rpks) => calibrate_rpks(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
        Command::Converge => converge(
            &mut run,
            parse_json(&bytes, &source).stage("config")?,
            cfg.seed,
        )?,
    };

    let report = Report {
        command: cfg.command.to_string(),
        config_hash: sha256_hex(&bytes),
        seed,
        input_hashes: run.inputs,
        outputs: run.files.iter().map(|(n, _)| n.clone()).collect(),
        results,
    };
    let write_all = || -> Result<()> {
        fs::create_dir_all(&cfg.out_dir)
            .map_err(|e| Error::Io(format!("{}: {e}", cfg.out_dir.display())))?;
        for (name, data) in &run.files {
            fs::write(cfg.out_dir.join(name), data)?;
        }
        let mut summary =
            serde_json::to_vec_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
        summary.push(b'\n');
        fs::write(cfg.out_dir.join(SUMMARY_FILE), summary)?;
        Ok(())
    };
    write_all().stage("output")?;
    Ok(report)
}

type StageResult = std::result::Result<(u64, Value), PipelineError>;

// ---------------------------------------------------------------- bootstrap

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeTimes {
    #[serde(default)]
    nominal: Option<Vec<f64>>,
    #[serde(default)]
    real: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BootstrapConfig {
    quotes: String,
    #[serde(default)]
    node_times: NodeTimes,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    max_iterations: Option<usize>,
    /// With `valuation_date`, checks CPI coverage and reports the reference
    /// index.
    #[serde(default)]
    cpi: Option<String>,
    #[serde(default)]
    valuation_date: Option<CivilDate>,
}

/// CPI series, bond quotes split by curve, and the valuation date.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketDataBundle {
    pub cpi: CpiSeries,
    pub nominal_quotes: Vec<CouponBondQuote>,
    pub real_quotes: Vec<CouponBondQuote>,
    pub valuation_date: CivilDate,
}

impl MarketDataBundle {
    /// Lagged, interpolated reference index at the valuation date.
    pub fn reference_index(&self) -> Result<f64> {
        self.cpi.inflation_reference(self.valuation_date)
    }
}

/// Loads a CPI file and a quote file, and checks that the CPI history covers
/// the valuation date's reference months.
pub fn load_market_csv(
    cpi: &Path,
    quotes: &Path,
    valuation_date: CivilDate,
) -> Result<MarketDataBundle> {
    let cpi = load_cpi_csv(cpi, None)?;
    let (nominal_quotes, real_quotes) = load_quotes_csv(quotes)?
        .into_iter()
        .partition(|q| q.kind == CurveKind::Nominal);
    let bundle = MarketDataBundle {
        cpi,
        nominal_quotes,
        real_quotes,
        valuation_date,
    };
    bundle.reference_index()?;
    Ok(bundle)
}

fn bootstrap(run: &mut Run<'_>, c: BootstrapConfig, seed: Option<u64>) -> StageResult {
    let quotes_path = run.path(&c.quotes).stage("load-market")?;
    let (nominal, real, reference) = match (&c.cpi, c.valuation_date) {
        (Some(cpi), Some(d)) => {
            let cpi_path = run.path(cpi).stage("load-market")?;
            let b = load_market_csv(&cpi_path, &quotes_path, d).stage("load-market")?;
            let r = b.reference_index().stage("load-market")?;
            (b.nominal_quotes, b.real_quotes, Some(r))
        }
        (None, None) => {
            let (n, r) = load_quotes_csv(&quotes_path)
                .stage("load-market")?
                .into_iter()
                .partition(|q| q.kind == CurveKind::Nominal);
            (n, r, None)
        }
        _ => return Err(Error::input("cpi and valuation_date go together")).stage("config"),
    };
    let mut options = BootstrapOptions::default();
    if let Some(t) = c.tolerance {
        options.tolerance = t;
    }
    if let Some(m) = c.max_iterations {
        options.max_iterations = m;
    }
    let mut results = serde_json::Map::new();
    let mut residual_rows = Vec::new();
    for (kind, quotes, nodes) in [
        (
            CurveKind::Nominal,
            &nominal,
            c.node_times.nominal.as_deref(),
        ),
        (CurveKind::Real, &real, c.node_times.real.as_deref()),
    ] {
        if quotes.is_empty() {
            continue;
        }
        let fit = bootstrap_piecewise_forwards(quotes, nodes, options)
            .stage(&format!("bootstrap {kind}"))?;
        for (q, r) in quotes.iter().zip(&fit.residuals) {
            residual_rows.push([kind.to_string(), q.maturity().to_string(), r.to_string()]);
        }
        run.emit(&format!("{kind}_curve.csv"), |b| {
            write_curve_csv(b, &fit.curve)
        })
        .stage("output")?;
        results.insert(
            kind.to_string(),
            json!({
                "node_times": fit.curve.node_times(),
                "forwards": fit.curve.forward_values(),
                "residual_norm": fit.residual_norm,
                "iterations": fit.iterations,
                "extrapolated": fit.extrapolated,
            }),
        );
    }
    run.emit("residuals.csv", |b| {
        write_table(b, &["kind", "maturity", "residual"], residual_rows)
    })
    .stage("output")?;
    if let Some(r) = reference {
        results.insert("reference_index".into(), json!(r));
    }
    Ok((seed.unwrap_or(0), Value::Object(results)))
}

// -------------------------------------------------------------------- price

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum TradesInput {
    File(String),
    Inline(Vec<Trade>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct YyMcInput {
    n_paths: usize,
    #[serde(default = "default_steps_per_year")]
    steps_per_year: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    antithetic: bool,
}

fn default_steps_per_year() -> usize {
    24
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriceConfig {
    market: MarketInput,
    /// Volatilities for options, and the model for Monte Carlo swap legs.
    #[serde(default)]
    vols: Option<JyParamsInput>,
    trades: TradesInput,
    /// When set, year-on-year swaps are valued by simulation.
    #[serde(default)]
    monte_carlo: Option<YyMcInput>,
}

fn price(run: &mut Run<'_>, c: PriceConfig, seed: Option<u64>) -> StageResult {
    let pair = run.market(&c.market).stage("load-market")?;
    let trades: Vec<Trade> = match &c.trades {
        TradesInput::Inline(t) => t.clone(),
        TradesInput::File(f) => {
            let p = run.path(f).stage("load-trades")?;
            let bytes = fs::read(&p).map_err(Error::from).stage("load-trades")?;
            parse_json(&bytes, &p.display().to_string()).stage("load-trades")?
        }
    };
    let seed = seed.or(c.monte_carlo.and_then(|m| m.seed)).unwrap_or(0);
    let jy = c.vols.map(|v| v.build()).transpose().stage("config")?;
    let mut cpi: Option<CpiSeries> = None;
    let mut rows = Vec::with_capacity(trades.len());
    let mut total = 0.0;

    for trade in &trades {
        let stage = format!("pricing {}", trade.id());
        let (pv, stderr) =
            price_trade(run, &c, &pair, jy.as_ref(), &mut cpi, trade, seed).stage(&stage)?;
        // keeps zero-notional trades from printing as -0
        let pv = pv + 0.0;
        total += pv;
        rows.push([
            trade.id().to_string(),
            pv.to_string(),
            stderr.map(|s| s.to_string()).unwrap_or_default(),
        ]);
    }
    run.emit("prices.csv", |b| {
        write_table(b, &["trade_id", "pv", "stderr"], rows)
    })
    .stage("output")?;
    Ok((seed, json!({ "n_trades": trades.len(), "total_pv": total })))
}

fn price_trade(
    run: &mut Run<'_>,
    c: &PriceConfig,
    pair: &CurvePair,
    jy: Option<&JyParams>,
    cpi: &mut Option<CpiSeries>,
    trade: &Trade,
    seed: u64,
) -> Result<(f64, Option<f64>)> {
    let need_vols = || jy.ok_or_else(|| Error::input("option trades need `vols`"));
    match trade {
        Trade::Zciis {
            maturity,
            strike,
            notional,
            ..
        } => Ok((zciis_price(pair, *maturity, *strike, *notional)?.pv(), None)),
        Trade::Yyiis {
            schedule,
            strike,
            notional,
            ..
        } => {
            let analytic = yyiis_price(pair, schedule, *strike, *notional)?;
            match (c.monte_carlo, jy) {
                (Some(mc), Some(p)) => {
                    let (fitted, state) = p.fitted_on(pair, schedule)?;
                    let model = JyModel::new(fitted, state, JyScheme::Exact)?;
                    let config = SimulationConfig::new(mc.n_paths, seed).antithetic(mc.antithetic);
                    let float =
                        yyiis_float_mc(&model, schedule, *notional, mc.steps_per_year, &config)?;
                    Ok((float.estimate - analytic.pv_fixed, Some(float.std_error)))
                }
                (Some(_), None) => Err(Error::input("monte_carlo swap valuation needs `vols`")),
                _ => Ok((analytic.pv(), None)),
            }
        }
        Trade::Tips {
            coupon,
            payment_times,
            base_index,
            notional,
            ..
        } => {
            let (Some(file), Some(date)) = (&c.market.cpi, c.market.valuation_date) else {
                return Err(Error::input(
                    "inflation-protected bonds need market.cpi and market.valuation_date",
                ));
            };
            if cpi.is_none() {
                *cpi = Some(load_cpi_csv(&run.path(file)?, None)?);
            }
            let spec = TipsSpec {
                coupon: *coupon,
                payment_times: payment_times.clone(),
                base_index: *base_index,
            };
            let p = tips_dirty_price(&spec, pair, cpi.as_ref().unwrap(), date)?;
            Ok((notional * p.nominal_price, None))
        }
        Trade::IndexOption {
            strike,
            expiry,
            call_put,
            notional,
            ..
        } => {
            let spec = IndexOptionSpec {
                strike: *strike,
                expiry: *expiry,
                call_put: *call_put,
            };
            let vols = FactorVols::from_jy(need_vols()?);
            Ok((
                notional * index_option_price(&spec, pair, &vols, 0.0)?,
                None,
            ))
        }
        Trade::InflationOption {
            strike,
            t1,
            t2,
            call_put,
            notional,
            ..
        } => {
            let spec = InflationOptionSpec {
                strike: *strike,
                t1: *t1,
                t2: *t2,
                call_put: *call_put,
            };
            let vols = FactorVols::from_jy(need_vols()?);
            Ok((
                notional * inflation_option_price(&spec, pair, &vols, 0.0)?,
                None,
            ))
        }
    }
}

// ----------------------------------------------------------------- simulate

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    market: MarketInput,
    jy: JyParamsInput,
    simulation: SimulationInput,
    horizon: f64,
    /// Maturity of the nominal zero-coupon bond tracked along each path.
    bond_maturity: f64,
    #[serde(default)]
    tips: Option<TipsSpec>,
    /// Number of index paths written to `paths.csv`.
    #[serde(default)]
    dump_paths: usize,
}

/// Per-time deterministic bond factors: `(ln A, B)`.
fn bond_factors(
    a: f64,
    sigma: f64,
    theta: &crate::piecewise::PiecewiseConstant,
    t: f64,
    maturity: f64,
) -> Result<(f64, f64)> {
    Ok((
        affine::log_a(a, sigma, theta, t, maturity)?,
        affine::bond_b(a, maturity - t),
    ))
}

fn simulate(run: &mut Run<'_>, c: SimulateConfig, seed: Option<u64>) -> StageResult {
    let pair = run.market(&c.market).stage("load-market")?;
    let seed = seed.or(c.simulation.seed).unwrap_or(0);
    if c.bond_maturity < c.horizon {
        return Err(Error::ordering(
            "bond_maturity must not precede the simulation horizon",
        ))
        .stage("config");
    }
    let mut knots = vec![c.bond_maturity];
    if let Some(t) = &c.tips {
        knots.extend(&t.payment_times);
    }
    let (params, state) =
        c.jy.build()
            .and_then(|p| p.fitted_on(&pair, &knots))
            .stage("calibration")?;
    let grid = PathGrid::new(0.0, c.horizon, c.simulation.n_steps).stage("config")?;
    let stored = c.simulation.n_paths.saturating_mul(grid.n_steps + 1);
    if stored > MAX_STORED_STATES {
        return Err(Error::Capacity(format!(
            "{stored} path states requested, limit is {MAX_STORED_STATES}"
        )))
        .stage("config");
    }
    let config =
        SimulationConfig::new(c.simulation.n_paths, seed).antithetic(c.simulation.antithetic);
    let model =
        JyModel::new(params.clone(), state, c.simulation.jy_scheme()).stage("simulation")?;

    // deterministic factors per grid time
    let times = grid.times();
    let (theta_n, theta_r) = (
        params.theta_n.as_ref().unwrap(),
        params.theta_r.as_ref().unwrap(),
    );
    let nominal: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| bond_factors(params.a_n, params.sigma_n, theta_n, t, c.bond_maturity))
        .collect::<Result<_>>()
        .stage("simulation")?;
    let tips_flows: Vec<Vec<(f64, f64, f64)>> = match &c.tips {
        None => Vec::new(),
        Some(spec) => {
            let last = spec.payment_times.len().saturating_sub(1);
            times
                .iter()
                .map(|&t| {
                    spec.payment_times
                        .iter()
                        .enumerate()
                        .filter(|(_, &ti)| ti > t)
                        .map(|(k, &ti)| {
                            let cash = spec.coupon + if k == last { 1.0 } else { 0.0 };
                            let (la, b) = bond_factors(params.a_r, params.sigma_r, theta_r, t, ti)?;
                            Ok((cash, la, b))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()
                .stage("simulation")?
        }
    };
    let base = c.tips.as_ref().map_or(1.0, |t| t.base_index);

    let per_path: Vec<Vec<[f64; 3]>> =
        simulate_map(&model, &grid, &config, |path: &[JyState]| {
            path.iter()
                .enumerate()
                .map(|(k, s)| {
                    let (la, b) = nominal[k];
                    let zcb = (la - b * s.r_n).exp();
                    let tips = tips_flows.get(k).map_or(f64::NAN, |flows| {
                        s.i / base
                            * flows
                                .iter()
                                .map(|(cash, la, b)| cash * (la - b * s.r_r).exp())
                                .sum::<f64>()
                    });
                    [zcb, tips, s.i]
                })
                .collect()
        })
        .stage("simulation")?;

    let mut rows = Vec::with_capacity(times.len());
    let mut column = vec![0.0; per_path.len()];
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        for j in 0..3 {
            if j == 1 && c.tips.is_none() {
                row.extend([String::new(), String::new()]);
                continue;
            }
            for (dst, path) in column.iter_mut().zip(&per_path) {
                *dst = path[k][j];
            }
            let m = McResult::from_samples(&column, seed, config.antithetic).stage("simulation")?;
            row.extend([m.estimate.to_string(), m.std_error.to_string()]);
        }
        rows.push(row);
    }
    run.emit("price_curves.csv", |b| {
        write_table(
            b,
            &[
                "t",
                "zcb",
                "zcb_stderr",
                "tips",
                "tips_stderr",
                "index",
                "index_stderr",
            ],
            rows,
        )
    })
    .stage("output")?;
    if c.dump_paths > 0 {
        let dump: Vec<Vec<f64>> = per_path
            .iter()
            .take(c.dump_paths)
            .map(|p| p.iter().map(|v| v[2]).collect())
            .collect();
        run.emit("paths.csv", |b| write_paths_csv(b, &times, &dump))
            .stage("output")?;
    }
    let curve_zcb = pair.nominal().df(c.bond_maturity).stage("simulation")?;
    let curve_tips = match &c.tips {
        Some(t) => {
            Some(t.real_price(&pair).stage("simulation")? * pair.spot_index() / t.base_index)
        }
        None => None,
    };
    Ok((
        seed,
        json!({
            "n_paths": c.simulation.n_paths,
            "n_steps": c.simulation.n_steps,
            "scheme": c.simulation.scheme,
            "antithetic": c.simulation.antithetic,
            "curve_zcb": curve_zcb,
            "curve_tips": curve_tips,
        }),
    ))
}

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct MertonConfig {
    #[serde(rename = "E")]
    equity: f64,
    #[serde(rename = "sigma_E")]
    sigma_e: f64,
    #[serde(rename = "L")]
    l: f64,
    r: f64,
    #[serde(rename = "dT")]
    dt: f64,
    /// Asset drift for the default probability; defaults to `r`.
    #[serde(rename = "mu_V", default)]
    mu_v: Option<f64>,
}

fn calibrate_merton(run: &mut Run<'_>, c: MertonConfig, seed: Option<u64>) -> StageResult {
    let fit = merton_calibrate(c.equity, c.sigma_e, c.l, c.r, c.dt).stage("calibration")?;
    let inputs = MertonStructuralInputs {
        v: fit.v,
        l: c.l,
        r: c.r,
        sigma_v: fit.sigma_v,
        dt: c.dt,
        mu_v: c.mu_v.unwrap_or(c.r),
    };
    let metrics = merton_default_metrics(&inputs).stage("calibration")?;
    let row = [
        fit.v,
        fit.sigma_v,
        fit.equity_residual,
        fit.vol_residual,
        metrics.distance_to_default,
        metrics.default_probability,
    ];
    run.emit("merton.csv", |b| {
        write_table(
            b,
            &[
                "V",
                "sigma_V",
                "equity_residual",
                "vol_residual",
                "distance_to_default",
                "default_probability",
            ],
            [row],
        )
    })
    .stage("output")?;
    Ok((
        seed.unwrap_or(0),
        json!({ "calibration": fit, "default": metrics }),
    ))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct JyThetaConfig {
    market: MarketInput,
    jy: JyParamsInput,
    #[serde(default)]
    knots: Vec<f64>,
}

fn calibrate_jy(run: &mut Run<'_>, c: JyThetaConfig, seed: Option<u64>) -> StageResult {
    let pair = run.market(&c.market).stage("load-market")?;
    let (p, s) =
        c.jy.build()
            .and_then(|p| p.fitted_on(&pair, &c.knots))
            .stage("calibration")?;
    let (tn, tr) = (p.theta_n.as_ref().unwrap(), p.theta_r.as_ref().unwrap());
    let mut rows = Vec::new();
    let mut start = 0.0;
    let mut max_err: f64 = 0.0;
    for (k, &t) in tn.breaks().iter().enumerate() {
        let pn = jy_zcb_reconstitution(&p, CurveKind::Nominal, &s, t).stage("calibration")?;
        let pr = jy_zcb_reconstitution(&p, CurveKind::Real, &s, t).stage("calibration")?;
        let en = pn - pair.nominal().df(t).stage("calibration")?;
        let er = pr - pair.real().df(t).stage("calibration")?;
        max_err = max_err.max(en.abs()).max(er.abs());
        rows.push([start, t, tn.values()[k], tr.values()[k], en, er]);
        start = t;
    }
    run.emit("theta.csv", |b| {
        write_table(
            b,
            &[
                "t_start",
                "t_end",
                "theta_n",
                "theta_r",
                "nominal_error",
                "real_error",
            ],
            rows,
        )
    })
    .stage("output")?;
    Ok((
        seed.unwrap_or(0),
        json!({ "r_n0": s.r_n, "r_r0": s.r_r, "max_repricing_error": max_err }),
    ))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RpksConfig {
    market: MarketInput,
    #[serde(rename = "bR")]
    b_r: Weight,
    #[serde(rename = "sigma_R")]
    sigma_r: f64,
    #[serde(rename = "sigma_S")]
    sigma_s: f64,
    #[serde(rename = "rho_RS")]
    rho: f64,
}

fn calibrate_rpks(run: &mut Run<'_>, c: RpksConfig, seed: Option<u64>) -> StageResult {
    let pair = run.market(&c.market).stage("load-market")?;
    let p = rpks_fit(&pair, c.b_r, c.sigma_r, c.sigma_s, c.rho).stage("calibration")?;
    let m0 = MartingaleState::initial();
    let mut grid: Vec<f64> = pair
        .nominal()
        .node_times()
        .iter()
        .chain(pair.real().node_times())
        .copied()
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut rows = Vec::new();
    let mut max_err: f64 = 0.0;
    for &t in &grid {
        let en = rpks_nominal_bond(&p, &m0, t).stage("calibration")?
            - pair.nominal().df(t).stage("calibration")?;
        let er = rpks_real_bond(&p, &m0, t).stage("calibration")?
            - pair.real().df(t).stage("calibration")?;
        max_err = max_err.max(en.abs()).max(er.abs());
        let w = p.weights(t);
        rows.push([t, p.r.at(t), p.s.at(t), w[0], w[1], w[2], w[3], en, er]);
    }
    run.emit("rpks_fit.csv", |b| {
        write_table(
            b,
            &[
                "t",
                "R",
                "S",
                "b0",
                "b1",
                "b2",
                "b3",
                "nominal_error",
                "real_error",
            ],
            rows,
        )
    })
    .stage("output")?;
    run.emit("rpks_params.json", |b| {
        serde_json::to_writer_pretty(&mut *b, &p).map_err(|e| Error::Io(e.to_string()))?;
        b.push(b'\n');
        Ok(())
    })
    .stage("output")?;
    Ok((seed.unwrap_or(0), json!({ "max_repricing_error": max_err })))
}

// ----------------------------------------------------------------- converge

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConvergeConfig {
    mu: f64,
    sigma: f64,
    x0: f64,
    #[serde(rename = "T")]
    t: f64,
    ladder: Vec<usize>,
    n_paths: usize,
    seed: Option<u64>,
}

impl Default for ConvergeConfig {
    fn default() -> Self {
        Self {
            mu: 0.05,
            sigma: 0.2,
            x0: 1.0,
            t: 1.0,
            ladder: vec![16, 32, 64, 128],
            n_paths: 10_000,
            seed: None,
        }
    }
}

fn converge(run: &mut Run<'_>, c: ConvergeConfig, seed: Option<u64>) -> StageResult {
    let seed = seed.or(c.seed).unwrap_or(0);
    let mut rows = Vec::new();
    let mut slopes = serde_json::Map::new();
    for scheme in [Scheme::Euler, Scheme::Milstein] {
        let r = gbm_convergence(
            c.mu,
            c.sigma,
            c.x0,
            c.t,
            c.ladder.clone(),
            c.n_paths,
            seed,
            scheme,
        )
        .stage("convergence")?;
        for (dt, e) in r.dts.iter().zip(&r.errors) {
            rows.push([scheme.to_string(), dt.to_string(), e.to_string()]);
        }
        slopes.insert(format!("{scheme}_slope"), json!(r.slope));
    }
    run.emit("convergence.csv", |b| {
        write_table(b, &["scheme", "dt", "error"], rows)
    })
    .stage("output")?;
    Ok((seed, Value::Object(slopes)))
}
