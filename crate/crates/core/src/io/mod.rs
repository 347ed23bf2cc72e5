//! File formats and the subcommand pipelines behind the `inflakit` binary.

mod inputs;
mod pipeline;
mod tables;

pub use inputs::{CurveInput, HullWhiteInput, JyParamsInput, MarketInput, SimulationInput, Trade};
pub use pipeline::{
    load_market_csv, run_pipeline, sha256_hex, CalibrationTarget, Command, MarketDataBundle,
    PipelineError, Report, RunConfig, SUMMARY_FILE,
};
pub use tables::{
    load_cpi_csv, load_curve_csv, load_quotes_csv, parse_cpi_csv, parse_curve_csv,
    parse_quotes_csv, write_curve_csv, write_paths_csv, write_table,
};
