//! Wall time and cross-strategy accuracy of the bilinear evaluation paths.

use std::time::Instant;

use bilinop_core::operators::convolution_plan;
use bilinop_core::{
    apply_bilinear, EvalOptions, EvalStrategy, GridSpec, SampledFunction, Symbol, C64,
};
use serde::Serialize;

use crate::config::{BenchConfig, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::report::{Tabular, Timing};
use crate::trials::{band_limited, sparse_band_limited, trial_rng, Band};

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    /// `dense_input` or `sparse_input`.
    pub case: &'static str,
    pub n: usize,
    pub strategy: &'static str,
    pub seconds: f64,
    /// Max deviation from DenseAccumulate relative to its peak.
    pub deviation: f64,
    pub radius: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Dense time at `2N` over dense time at `N`, for consecutive sizes.
    pub dense_cost_ratios: Vec<f64>,
    /// Dense time over convolution time, per size.
    pub convolution_speedups: Vec<f64>,
    pub sparse_speedup: Option<f64>,
    pub max_deviation: f64,
}

impl Tabular for BenchReport {
    type Row = BenchRow;
    fn rows(&self) -> Vec<BenchRow> {
        self.rows.clone()
    }
}

pub fn gaussian_kernel(width: f64, cutoff: f64) -> impl Fn(f64) -> C64 + Send + Sync + Copy + 'static {
    move |u: f64| {
        if u.abs() > cutoff {
            C64::new(0.0, 0.0)
        } else {
            C64::new((-u * u / (2.0 * width * width)).exp(), 0.0)
        }
    }
}

/// Best of `repeats` runs.
fn timed(
    repeats: usize,
    mut f: impl FnMut() -> bilinop_core::Result<SampledFunction>,
) -> Result<(SampledFunction, f64)> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let r = f()?;
        best = best.min(start.elapsed().as_secs_f64());
        out = Some(r);
    }
    Ok((out.expect("at least one repeat"), best))
}

fn deviation(a: &SampledFunction, reference: &SampledFunction) -> Result<f64> {
    let peak = reference.max_abs();
    let d = a.max_abs_diff(reference)?;
    Ok(if peak > 0.0 { d / peak } else { d })
}

pub fn bench_grid(bc: &BenchConfig, n: usize) -> Result<GridSpec> {
    Ok(GridSpec::new(n, n as f64 / (2.0 * bc.nyquist))?)
}

pub fn run(cfg: &ExperimentConfig, timing: &mut Timing) -> Result<BenchReport> {
    cfg.validate()?;
    let bc = &cfg.bench;
    if 2.0 * bc.band >= bc.nyquist {
        return Err(HarnessError::Config(format!(
            "band {} leaves no room for products under Nyquist {}",
            bc.band, bc.nyquist
        )));
    }
    let m = gaussian_kernel(bc.kernel_width, bc.kernel_cutoff);
    let sigma = Symbol::diagonal_kernel(m);
    let mut rows = Vec::new();
    let mut dense_times = Vec::new();
    let mut convolution_speedups = Vec::new();
    let start = Instant::now();
    for (i, &n) in bc.sizes.iter().enumerate() {
        let grid = bench_grid(bc, n)?;
        let mut rng = trial_rng(cfg.seed, i as u64);
        let band = Band::below(bc.band);
        let f = band_limited(grid, band, &mut rng)?;
        let g = band_limited(grid, band, &mut rng)?;
        let (dense, td) = timed(bc.repeats, || {
            apply_bilinear(&sigma, &f, &g, Some(EvalStrategy::DenseAccumulate))
        })?;
        let (sparse, ts) = timed(bc.repeats, || {
            apply_bilinear(&sigma, &f, &g, Some(EvalStrategy::SparseAccumulate))
        })?;
        let (conv, tc) = timed(bc.repeats, || {
            apply_bilinear(&sigma, &f, &g, Some(EvalStrategy::DiagonalConvolution))
        })?;
        let radius = convolution_plan(m, &grid, &EvalOptions::default())?.radius;
        dense_times.push(td);
        convolution_speedups.push(td / tc);
        for (strategy, out, secs, r) in [
            ("DenseAccumulate", &dense, td, None),
            ("SparseAccumulate", &sparse, ts, None),
            ("DiagonalConvolution", &conv, tc, Some(radius)),
        ] {
            rows.push(BenchRow {
                case: "dense_input",
                n,
                strategy,
                seconds: secs,
                deviation: deviation(out, &dense)?,
                radius: r,
            });
        }
    }
    let sparse_speedup = if bc.sparse_nnz > 0 {
        let grid = bench_grid(bc, bc.sparse_n)?;
        let mut rng = trial_rng(cfg.seed, u64::MAX);
        let band = Band::below(bc.band);
        let f = sparse_band_limited(grid, band, bc.sparse_nnz, &mut rng)?;
        let g = sparse_band_limited(grid, band, bc.sparse_nnz, &mut rng)?;
        let (dense, td) = timed(1, || {
            apply_bilinear(&sigma, &f, &g, Some(EvalStrategy::DenseAccumulate))
        })?;
        let (sparse, ts) = timed(bc.repeats, || {
            apply_bilinear(&sigma, &f, &g, Some(EvalStrategy::SparseAccumulate))
        })?;
        for (strategy, out, secs) in [("DenseAccumulate", &dense, td), ("SparseAccumulate", &sparse, ts)] {
            rows.push(BenchRow {
                case: "sparse_input",
                n: bc.sparse_n,
                strategy,
                seconds: secs,
                deviation: deviation(out, &dense)?,
                radius: None,
            });
        }
        Some(td / ts)
    } else {
        None
    };
    timing.record("bench", start.elapsed().as_secs_f64());
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(BenchReport {
        dense_cost_ratios: dense_times.windows(2).map(|w| w[1] / w[0]).collect(),
        convolution_speedups,
        sparse_speedup,
        max_deviation,
        rows,
    })
}
