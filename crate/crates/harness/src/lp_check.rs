//! Grid and filter-bank sanity report: partition of unity, transform round
//! trips, Parseval and reconstruction from the band projections.

use bilinop_core::{
    analyze, lebesgue_norm, synthesize, LPFrame, PartitionReport,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::report::{Tabular, Timing};
use crate::trials::{band_limited, trial_rng, Band};

#[derive(Debug, Clone, Serialize)]
pub struct LpCheckRow {
    pub trial: usize,
    pub round_trip_error: f64,
    pub parseval_error: f64,
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LpCheckReport {
    pub n: usize,
    pub scale_l: f64,
    pub k_min: i64,
    pub partition: PartitionReport,
    pub max_round_trip_error: f64,
    pub max_parseval_error: f64,
    pub max_reconstruction_error: f64,
    pub rows: Vec<LpCheckRow>,
}

impl Tabular for LpCheckReport {
    type Row = LpCheckRow;
    fn rows(&self) -> Vec<LpCheckRow> {
        self.rows.clone()
    }
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

pub fn run(cfg: &ExperimentConfig, timing: &mut Timing) -> Result<LpCheckReport> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let profile = cfg.profile()?;
    let frame = timing.time("frame", || LPFrame::new(grid, profile))?;
    let partition = timing.time("partition", || frame.partition_report());
    let top = 2f64.powi(frame.k_max() as i32).min(grid.nyquist() * 0.99);

    let start = std::time::Instant::now();
    let mut rows = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial as u64);
        let f = band_limited(grid, Band::below(top), &mut rng)?;
        let c = analyze(&f);
        let back = synthesize(&c);
        let peak = f.max_abs();
        let l2 = lebesgue_norm(&f, 2.0)?.powi(2);
        let coeff: f64 = c.entries().iter().map(|(_, v)| v.norm_sqr()).sum::<f64>() * grid.period();
        let mut sum = frame.project_low(&f)?;
        for k in 0..=frame.k_max() {
            sum = sum.add(&frame.project_level(&f, k)?)?;
        }
        rows.push(LpCheckRow {
            trial,
            round_trip_error: relative(back.max_abs_diff(&f)?, peak),
            parseval_error: relative((l2 - coeff).abs(), l2),
            reconstruction_error: relative(sum.max_abs_diff(&f)?, peak),
        });
    }
    timing.record("trials", start.elapsed().as_secs_f64());

    let max = |g: fn(&LpCheckRow) -> f64| rows.iter().map(g).fold(0.0, f64::max);
    Ok(LpCheckReport {
        n: grid.n(),
        scale_l: grid.scale(),
        k_min: frame.k_min(),
        partition,
        max_round_trip_error: max(|r| r.round_trip_error),
        max_parseval_error: max(|r| r.parseval_error),
        max_reconstruction_error: max(|r| r.reconstruction_error),
        rows,
    })
}

