#![allow(dead_code)]

use bilinop_core::{synthesize, GridSpec, SampledFunction, SpectralCoefficients, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random coefficients on every lattice index in `lo..=hi`.
pub fn random_band(grid: GridSpec, lo: i64, hi: i64, rng: &mut ChaCha8Rng) -> SampledFunction {
    let entries: Vec<(i64, C64)> = (lo..=hi).map(|m| (m, random_c64(rng))).collect();
    synthesize(&SpectralCoefficients::sparse(grid, entries).unwrap())
}

/// Random coefficients on `count` distinct indices drawn from `lo..=hi`.
pub fn random_sparse(
    grid: GridSpec,
    lo: i64,
    hi: i64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> SampledFunction {
    let entries: Vec<(i64, C64)> = (0..count)
        .map(|_| (rng.random_range(lo..=hi), random_c64(rng)))
        .collect();
    synthesize(&SpectralCoefficients::sparse(grid, entries).unwrap())
}

/// Independent O(n²) evaluation of `Σ_m c_m e^{i x m / L}` at every grid point.
pub fn direct_synthesis(c: &[(i64, C64)], grid: GridSpec) -> Vec<C64> {
    (0..grid.n())
        .map(|n| {
            let x = grid.point(n);
            c.iter()
                .map(|(m, v)| v * C64::from_polar(1.0, x * grid.frequency(*m)))
                .sum()
        })
        .collect()
}

/// Independent O(N²) coefficient extraction.
pub fn direct_analysis(f: &SampledFunction) -> Vec<(i64, C64)> {
    let grid = *f.grid();
    grid.indices()
        .map(|m| {
            let s: C64 = f
                .values()
                .iter()
                .enumerate()
                .map(|(n, v)| v * C64::from_polar(1.0, -grid.point(n) * grid.frequency(m)))
                .sum();
            (m, s / grid.n() as f64)
        })
        .collect()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
