use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dyson_cli::{parse_config_with, run_experiment, Channel, RunError, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChannelArg {
    Particles,
    Matrix,
    Density,
    Primitive,
    Compare,
    Report,
}

impl From<ChannelArg> for Channel {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Particles => Channel::Particles,
            ChannelArg::Matrix => Channel::Matrix,
            ChannelArg::Density => Channel::Density,
            ChannelArg::Primitive => Channel::Primitive,
            ChannelArg::Compare => Channel::Compare,
            ChannelArg::Report => Channel::Report,
        }
    }
}

/// Simulate unitary Dyson Brownian motion and check its PDE limit.
#[derive(Debug, Parser)]
#[command(name = "dyson", version)]
struct Cli {
    channel: ChannelArg,
    /// Experiment file in `key = value` format.
    #[arg(long)]
    config: PathBuf,
    /// Exit with status 2 when a checked bound or convergence assertion fails.
    #[arg(long)]
    strict: bool,
    /// Overrides the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also emit a gnuplot script for the CSV outputs.
    #[arg(long)]
    gnuplot: bool,
}

fn run(cli: &Cli) -> Result<i32, RunError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|source| RunError::Io {
        context: format!("reading {}", cli.config.display()),
        source,
    })?;
    let mut config = parse_config_with(&text, Some(cli.channel.into()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    let options = RunOptions { strict: cli.strict, gnuplot: cli.gnuplot };
    let outcome = run_experiment(&config, &options)?;
    if outcome.violation {
        eprintln!("dyson: check failed; see {}", outcome.out_dir.join("summary.json").display());
    }
    Ok(outcome.exit_code(cli.strict))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("dyson: {e}");
            ExitCode::from(1)
        }
    }
}
