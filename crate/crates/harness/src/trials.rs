//! Random band-limited trial functions.

use bilinop_core::{
    lebesgue_norm, sobolev_norm, synthesize, GridSpec, LPFrame, SampledFunction, SobolevParams,
    SpectralCoefficients, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{HarnessError, Result};

/// Independent stream per trial, so trial order and parallelism never matter.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Frequencies with `lo ≤ |ξ| ≤ hi`, or `lo ≤ ξ ≤ hi` when `analytic`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub analytic: bool,
}

impl Band {
    pub fn shell(scale: f64) -> Self {
        Self {
            lo: scale / 2.0,
            hi: scale,
            analytic: false,
        }
    }

    pub fn analytic_shell(scale: f64) -> Self {
        Self {
            analytic: true,
            ..Self::shell(scale)
        }
    }

    pub fn below(hi: f64) -> Self {
        Self {
            lo: 0.0,
            hi,
            analytic: false,
        }
    }

    pub fn indices(&self, grid: &GridSpec) -> Vec<i64> {
        grid.indices()
            .filter(|&m| {
                let xi = grid.frequency(m);
                let r = if self.analytic { xi } else { xi.abs() };
                r >= self.lo && r <= self.hi
            })
            .collect()
    }
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex-Gaussian coefficients on every lattice point of `band`.
pub fn band_limited(grid: GridSpec, band: Band, rng: &mut ChaCha8Rng) -> Result<SampledFunction> {
    grid.check_below_nyquist(band.hi)?;
    let idx = band.indices(&grid);
    if idx.is_empty() {
        return Err(HarnessError::Config(format!(
            "band [{}, {}] holds no lattice frequency",
            band.lo, band.hi
        )));
    }
    let entries: Vec<(i64, C64)> = idx.into_iter().map(|m| (m, complex_gaussian(rng))).collect();
    Ok(synthesize(&SpectralCoefficients::sparse(grid, entries)?))
}

/// Complex-Gaussian coefficients on `count` lattice points drawn uniformly from `band`.
pub fn sparse_band_limited(
    grid: GridSpec,
    band: Band,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SampledFunction> {
    grid.check_below_nyquist(band.hi)?;
    let idx = band.indices(&grid);
    if idx.len() < count {
        return Err(HarnessError::Config(format!(
            "band [{}, {}] holds fewer than {count} lattice frequencies",
            band.lo, band.hi
        )));
    }
    let mut chosen = std::collections::BTreeSet::new();
    while chosen.len() < count {
        chosen.insert(idx[rng.random_range(0..idx.len())]);
    }
    let entries: Vec<(i64, C64)> = chosen
        .into_iter()
        .map(|m| (m, complex_gaussian(rng)))
        .collect();
    Ok(synthesize(&SpectralCoefficients::sparse(grid, entries)?))
}

/// Rescales `f` to unit `W^{s,p}` norm.
pub fn unit_sobolev(f: SampledFunction, frame: &LPFrame, s: f64, p: f64) -> Result<SampledFunction> {
    let norm = sobolev_norm(&f, &SobolevParams::new(s, p, frame)?)?;
    if norm == 0.0 {
        return Err(HarnessError::Config("trial function vanished".into()));
    }
    Ok(f.scale(C64::new(1.0 / norm, 0.0)))
}

/// Rescales `f` to unit `L^p` norm.
pub fn unit_lebesgue(f: SampledFunction, p: f64) -> Result<SampledFunction> {
    let norm = lebesgue_norm(&f, p)?;
    if norm == 0.0 {
        return Err(HarnessError::Config("trial function vanished".into()));
    }
    Ok(f.scale(C64::new(1.0 / norm, 0.0)))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let grid = GridSpec::new(256, 2.0).unwrap();
        let a = band_limited(grid, Band::shell(16.0), &mut trial_rng(5, 0)).unwrap();
        let b = band_limited(grid, Band::shell(16.0), &mut trial_rng(5, 0)).unwrap();
        let c = band_limited(grid, Band::shell(16.0), &mut trial_rng(5, 1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn band_membership() {
        let grid = GridSpec::new(256, 2.0).unwrap();
        let idx = Band::analytic_shell(4.0).indices(&grid);
        assert_eq!(idx, vec![4, 5, 6, 7, 8]);
        assert_eq!(Band::shell(4.0).indices(&grid).len(), 10);
        assert!(band_limited(grid, Band::shell(100.0), &mut trial_rng(0, 0)).is_err());
        let f = sparse_band_limited(grid, Band::below(20.0), 7, &mut trial_rng(1, 2)).unwrap();
        assert_eq!(bilinop_core::analyze(&f).nnz(), 7);
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 * (k as f64).powf(1.5))).collect();
        assert!((loglog_slope(&pts) - 1.5).abs() < 1e-12);
    }
}
