use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inflakit::io::{run_pipeline, CalibrationTarget, Command, RunConfig, SUMMARY_FILE};

/// Exit status for command-line usage errors.
const USAGE_EXIT: u8 = 64;

#[derive(Parser)]
#[command(
    name = "inflakit",
    version,
    about = "Inflation-linked pricing, calibration and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; relative data paths resolve against its directory.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Random seed, overriding any seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit nominal and real forward curves to bond quotes.
    Bootstrap(Common),
    /// Value a trade file.
    Price(Common),
    /// Simulate Jarrow-Yildirim paths and report bond price curves.
    Simulate(Common),
    /// Calibrate a model.
    Calibrate {
        #[arg(value_enum)]
        model: Model,
        #[command(flatten)]
        common: Common,
    },
    /// Measure strong convergence orders of Euler and Milstein on GBM.
    Converge(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Merton,
    JyTheta,
    Rpks,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    let (command, common) = match cli.command {
        Cmd::Bootstrap(c) => (Command::Bootstrap, c),
        Cmd::Price(c) => (Command::Price, c),
        Cmd::Simulate(c) => (Command::Simulate, c),
        Cmd::Converge(c) => (Command::Converge, c),
        Cmd::Calibrate { model, common } => {
            let target = match model {
                Model::Merton => CalibrationTarget::Merton,
                Model::JyTheta => CalibrationTarget::JyTheta,
                Model::Rpks => CalibrationTarget::Rpks,
            };
            (Command::Calibrate(target), common)
        }
    };
    let run = RunConfig {
        command,
        config_path: common.config,
        out_dir: common.out,
        seed: common.seed,
    };
    match run_pipeline(&run) {
        Ok(report) => {
            for name in report
                .outputs
                .iter()
                .map(String::as_str)
                .chain([SUMMARY_FILE])
            {
                println!("{}", run.out_dir.join(name).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("inflakit {}: {e}", run.command);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
