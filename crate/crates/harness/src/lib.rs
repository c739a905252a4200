//! Experiment runners behind the `bilinop` command-line tool.
//!
//! Every runner takes a resolved [`ExperimentConfig`], records wall time in a
//! [`Timing`] kept separate from its results, and returns a report that
//! renders to JSON or long-format CSV.

pub mod bench;
pub mod config;
pub mod counterexample;
pub mod error;
pub mod lp_check;
pub mod norm_probe;
pub mod paraproduct;
pub mod report;
pub mod trials;

pub use config::{ExperimentConfig, Overrides};
pub use error::{HarnessError, Result};
pub use report::{Format, Report, Tabular, Timing};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    LpCheck,
    Counterexample,
    NormProbe,
    Paraproduct,
    Bench,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LpCheck => "lp-check",
            Command::Counterexample => "counterexample",
            Command::NormProbe => "norm-probe",
            Command::Paraproduct => "paraproduct",
            Command::Bench => "bench",
        }
    }
}

fn render<T: serde::Serialize + Tabular>(
    cmd: Command,
    cfg: &ExperimentConfig,
    results: &T,
    timing: &Timing,
    format: Format,
) -> Result<String> {
    Report::new(cmd.name(), cfg, results, timing).render(format)
}

/// Runs `cmd` and renders its report.
pub fn execute(cmd: Command, cfg: &ExperimentConfig, format: Format) -> Result<String> {
    let mut timing = Timing::default();
    match cmd {
        Command::LpCheck => render(cmd, cfg, &lp_check::run(cfg, &mut timing)?, &timing, format),
        Command::Counterexample => {
            render(cmd, cfg, &counterexample::run(cfg, &mut timing)?, &timing, format)
        }
        Command::NormProbe => render(cmd, cfg, &norm_probe::run(cfg, &mut timing)?, &timing, format),
        Command::Paraproduct => {
            render(cmd, cfg, &paraproduct::run(cfg, &mut timing)?, &timing, format)
        }
        Command::Bench => render(cmd, cfg, &bench::run(cfg, &mut timing)?, &timing, format),
    }
}
