use std::path::PathBuf;
use std::process::ExitCode;

use bilinop_harness::{execute, Command, ExperimentConfig, Format, HarnessError, Overrides};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bilinop", version, about = "Numerical experiments on bilinear Fourier multipliers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transform round trips and frame reconstruction.
    LpCheck(Common),
    /// Bilinear identity and norm growth of the counterexample symbol.
    Counterexample(Common),
    /// Sobolev ratio sweep over input scales.
    NormProbe(Common),
    /// Paraproduct and multiplication-defect estimates.
    Paraproduct(Common),
    /// Timing of the evaluation strategies.
    Bench(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "scale-l")]
    scale_l: Option<f64>,
    #[arg(long = "jmax")]
    j_max: Option<u32>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

fn run(cmd: Command, c: Common) -> Result<(), HarnessError> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(&Overrides {
        n: c.n,
        scale_l: c.scale_l,
        j_max: c.j_max,
        s: c.s,
        p: c.p,
        q: c.q,
        t: c.t,
        trials: c.trials,
        seed: c.seed,
    });
    cfg.validate()?;
    let format = match c.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let text = execute(cmd, &cfg, format)?;
    match &c.out {
        Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::WriteReport {
            path: path.clone(),
            source,
        })?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match cli.command {
        Cmd::LpCheck(c) => (Command::LpCheck, c),
        Cmd::Counterexample(c) => (Command::Counterexample, c),
        Cmd::NormProbe(c) => (Command::NormProbe, c),
        Cmd::Paraproduct(c) => (Command::Paraproduct, c),
        Cmd::Bench(c) => (Command::Bench, c),
    };
    match run(cmd, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
