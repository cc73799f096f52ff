use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sigosc::config::{self, CommandKind};
use sigosc::runner::{self, Format};

/// Relaxation-oscillator workbench: switch I-V tables, waveform
/// simulation, frequency-vs-resistance characterization, and rate-coded
/// spiking networks, driven by a single experiment config file.
#[derive(Parser)]
#[command(name = "sigosc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Tabulate the switch branch currents and bias window.
    Iv(RunArgs),
    /// Sample the oscillator waveform (analytic or numeric engine).
    Simulate(RunArgs),
    /// Frequency and phase durations across a resistance grid.
    Sweep(RunArgs),
    /// Relative frequency sensitivity (1/F dF/dR) across a grid.
    Rcf(RunArgs),
    /// Sweep, then fit the sigmoid-like response model.
    Fit(RunArgs),
    /// Spike times under a linear resistance ramp.
    Ramp(RunArgs),
    /// Co-simulate a rate-coded oscillator network.
    Network(RunArgs),
    /// Low/high-resistance frequency-jump ratio.
    Jump(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Output path (stdout when omitted; network CSV requires it).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write a line-chart SVG of the main result.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Cmd::Iv(a) => (CommandKind::Iv, a),
        Cmd::Simulate(a) => (CommandKind::Simulate, a),
        Cmd::Sweep(a) => (CommandKind::Sweep, a),
        Cmd::Rcf(a) => (CommandKind::Rcf, a),
        Cmd::Fit(a) => (CommandKind::Fit, a),
        Cmd::Ramp(a) => (CommandKind::Ramp, a),
        Cmd::Network(a) => (CommandKind::Network, a),
        Cmd::Jump(a) => (CommandKind::Jump, a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(kind: CommandKind, args: &RunArgs) -> sigosc::Result<()> {
    let text = std::fs::read_to_string(&args.config)?;
    let spec = config::experiment(kind, &text, args.config.parent())?;
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    runner::run(&spec, args.out.as_deref(), format, args.svg.as_deref())
}
