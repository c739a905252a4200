//! Empirical `W^{s,p} × W^{s,q} → W^{s,t}` norm ratios across grid sizes and
//! frequency scales.

use bilinop_core::symbols::{
    counterexample_symbol, reduced_symbol, BandCutoff, ReducedCoefficient,
};
use bilinop_core::{
    apply_bilinear, sobolev_norm, GridSpec, LPFrame, SobolevParams, Symbol, C64,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, ProbeSymbol};
use crate::counterexample::{growth, GrowthResult};
use crate::error::Result;
use crate::report::{Tabular, Timing};
use crate::trials::{band_limited, loglog_slope, trial_rng, unit_sobolev, Band};

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub s: f64,
    pub n: usize,
    pub scale: f64,
    pub partner_scale: f64,
    pub trial: usize,
    pub norm_f: f64,
    pub norm_g: f64,
    pub norm_t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeCell {
    pub n: usize,
    pub scale: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub s: f64,
    pub cells: Vec<ProbeCell>,
    pub max_ratio: f64,
    pub min_cell_ratio: f64,
    /// Max over cells of the per-cell maximum ratio, divided by the min.
    pub spread: f64,
    pub bounded: bool,
    /// Slope of `log max_ratio` against `log λ`, one entry per grid size.
    pub slopes: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRatioReport {
    pub symbol: ProbeSymbol,
    pub summaries: Vec<ProbeSummary>,
    /// Only for the counterexample symbol: the Lebesgue-regime growth study.
    pub lebesgue_growth: Option<GrowthResult>,
    pub rows: Vec<ProbeRow>,
}

impl Tabular for NormRatioReport {
    type Row = ProbeRow;
    fn rows(&self) -> Vec<ProbeRow> {
        self.rows.clone()
    }
}

/// The probed symbol on `frame`'s grid.
pub fn probe_symbol(cfg: &ExperimentConfig, frame: &LPFrame) -> Result<Symbol> {
    Ok(match cfg.probe.symbol {
        ProbeSymbol::One => Symbol::one(),
        ProbeSymbol::Reduced => {
            let amp = cfg.probe.amplitude;
            let coeffs = (0..cfg.probe.levels)
                .map(|_| {
                    ReducedCoefficient::new(std::f64::consts::PI, move |y| {
                        C64::new(1.0 + amp * (2.0 * y).cos(), 0.0)
                    })
                })
                .collect();
            reduced_symbol(coeffs, frame)?
        }
        ProbeSymbol::Counterexample => counterexample_symbol(
            cfg.counterexample.j_min,
            cfg.counterexample.j_max,
            &BandCutoff::counterexample_default(),
            frame.grid(),
        )?,
    })
}

/// Partner scale for `trial`: the two lowest shells, then the same shell.
/// High-low pairs are the ones that saturate the Sobolev bound on the torus.
pub fn partner(scale: f64, trial: usize) -> f64 {
    [2.0, 4.0, scale][trial % 3].min(scale)
}

pub fn run(cfg: &ExperimentConfig, timing: &mut Timing) -> Result<NormRatioReport> {
    cfg.validate()?;
    let pc = &cfg.probe;
    let s_values = if pc.s_values.is_empty() {
        vec![cfg.s]
    } else {
        pc.s_values.clone()
    };
    let profile = cfg.profile()?;
    let mut rows = Vec::new();
    let start = std::time::Instant::now();
    for &n in &pc.sizes {
        let grid = GridSpec::new(n, pc.scale_l)?;
        let frame = LPFrame::new(grid, profile)?;
        let sigma = probe_symbol(cfg, &frame)?;
        for &s in &s_values {
            let in_p = SobolevParams::new(s, cfg.p, &frame)?;
            let in_q = SobolevParams::new(s, cfg.q, &frame)?;
            let out = SobolevParams::new(s, cfg.t, &frame)?;
            for (si, &scale) in pc.scales.iter().enumerate() {
                for trial in 0..cfg.trials {
                    let stream = ((si as u64) << 32) | trial as u64;
                    let mut rng = trial_rng(cfg.seed, stream);
                    let mu = partner(scale, trial);
                    let f = unit_sobolev(band_limited(grid, Band::shell(scale), &mut rng)?, &frame, s, cfg.p)?;
                    let g = unit_sobolev(band_limited(grid, Band::shell(mu), &mut rng)?, &frame, s, cfg.q)?;
                    let t = apply_bilinear(&sigma, &f, &g, None)?;
                    let norm_f = sobolev_norm(&f, &in_p)?;
                    let norm_g = sobolev_norm(&g, &in_q)?;
                    let norm_t = sobolev_norm(&t, &out)?;
                    rows.push(ProbeRow {
                        s,
                        n,
                        scale,
                        partner_scale: mu,
                        trial,
                        norm_f,
                        norm_g,
                        norm_t,
                        ratio: norm_t / (norm_f * norm_g),
                    });
                }
            }
        }
    }
    timing.record("trials", start.elapsed().as_secs_f64());

    let summaries = s_values
        .iter()
        .map(|&s| summarize(&rows, s, &pc.sizes, &pc.scales, pc.bounded_spread))
        .collect();
    let lebesgue_growth = if pc.symbol == ProbeSymbol::Counterexample {
        let gc = &cfg.counterexample.growth;
        let g = GridSpec::new(gc.n, gc.scale_l)?;
        Some(timing.time("lebesgue_growth", || {
            growth(g, cfg.counterexample.j_min, &gc.m_values, (cfg.p, cfg.q, cfg.t), gc.window)
        })?)
    } else {
        None
    };
    Ok(NormRatioReport {
        symbol: pc.symbol,
        summaries,
        lebesgue_growth,
        rows,
    })
}

fn summarize(rows: &[ProbeRow], s: f64, sizes: &[usize], scales: &[f64], spread_limit: f64) -> ProbeSummary {
    let mut cells = Vec::new();
    for &n in sizes {
        for &scale in scales {
            let r: Vec<f64> = rows
                .iter()
                .filter(|r| r.s == s && r.n == n && r.scale == scale)
                .map(|r| r.ratio)
                .collect();
            if r.is_empty() {
                continue;
            }
            cells.push(ProbeCell {
                n,
                scale,
                max_ratio: r.iter().copied().fold(0.0, f64::max),
                mean_ratio: r.iter().sum::<f64>() / r.len() as f64,
            });
        }
    }
    let max_ratio = cells.iter().map(|c| c.max_ratio).fold(0.0, f64::max);
    let min_cell_ratio = cells.iter().map(|c| c.max_ratio).fold(f64::INFINITY, f64::min);
    let spread = max_ratio / min_cell_ratio;
    let slopes = sizes
        .iter()
        .map(|&n| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.n == n)
                .map(|c| (c.scale, c.max_ratio))
                .collect();
            (n, loglog_slope(&pts))
        })
        .collect();
    ProbeSummary {
        s,
        cells,
        max_ratio,
        min_cell_ratio,
        spread,
        bounded: spread <= spread_limit,
        slopes,
    }
}

#[cfg(test)]
mod tests {
    use super::partner;

    #[test]
    fn partners_include_low_shells() {
        assert_eq!(partner(64.0, 0), 2.0);
        assert_eq!(partner(64.0, 1), 4.0);
        assert_eq!(partner(64.0, 2), 64.0);
        assert_eq!(partner(3.0, 1), 3.0);
    }
}
