//! Periodic sampled functions and their Fourier coefficients.
//!
//! A grid of `N` samples covers the period `2πL`. Lattice frequencies are
//! `m / L` for `-N/2 <= m < N/2`, and coefficients follow the convention
//!
//! ```text
//! f(x) = Σ_m c_m e^{i x m / L}
//! ```
//!
//! so the symbol `σ ≡ 1` reproduces the pointwise product exactly.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::C64;

/// Coefficients below this fraction of the largest one are treated as zero
/// when computing spectral supports.
pub const SUPPORT_REL_TOL: f64 = 1e-13;

/// Coefficients below this fraction of the largest one are skipped by the
/// sparse accumulation paths.
pub const SPARSE_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    n: usize,
    #[serde(rename = "scale_l")]
    scale: f64,
}

impl GridSpec {
    pub fn new(n: usize, scale: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "N = {n} must be a power of two >= 8"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidGrid(format!("L = {scale} must be positive")));
        }
        Ok(Self { n, scale })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The scale `L`; the period is `2πL`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn period(&self) -> f64 {
        2.0 * PI * self.scale
    }

    /// Grid spacing `h = 2πL / N`.
    pub fn spacing(&self) -> f64 {
        self.period() / self.n as f64
    }

    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.scale)
    }

    pub fn half(&self) -> i64 {
        (self.n / 2) as i64
    }

    pub fn frequency(&self, index: i64) -> f64 {
        index as f64 / self.scale
    }

    pub fn point(&self, sample: usize) -> f64 {
        sample as f64 * self.spacing()
    }

    pub fn contains_index(&self, index: i64) -> bool {
        index >= -self.half() && index < self.half()
    }

    /// FFT slot of a lattice index (index mod N).
    pub fn slot(&self, index: i64) -> usize {
        index.rem_euclid(self.n as i64) as usize
    }

    pub fn index_of_slot(&self, slot: usize) -> i64 {
        let k = slot as i64;
        if k < self.half() {
            k
        } else {
            k - self.n as i64
        }
    }

    /// Lattice index of `frequency`, if it lies on the lattice.
    pub fn lattice_index(&self, frequency: f64) -> Option<i64> {
        let raw = frequency * self.scale;
        let m = raw.round();
        ((raw - m).abs() <= 1e-9 * (1.0 + raw.abs())).then_some(m as i64)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let half = self.half();
        -half..half
    }

    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.n * factor, self.scale)
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.n == other.n && self.scale == other.scale {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left_n: self.n,
                left_l: self.scale,
                right_n: other.n,
                right_l: other.scale,
            })
        }
    }

    /// Fails unless `frequency` is strictly below the Nyquist frequency.
    pub fn check_below_nyquist(&self, frequency: f64) -> Result<()> {
        if frequency.abs() < self.nyquist() {
            Ok(())
        } else {
            Err(Error::NyquistViolation {
                frequency,
                nyquist: self.nyquist(),
            })
        }
    }
}

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

pub(crate) fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner()
        .lock()
        .expect("fft planner poisoned")
        .plan_fft_forward(n)
}

pub(crate) fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    planner()
        .lock()
        .expect("fft planner poisoned")
        .plan_fft_inverse(n)
}

/// Complex samples `f(x_n)` at `x_n = n h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: GridSpec,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grid: GridSpec, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} samples supplied for N = {}",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n()).map(|n| f(grid.point(n))).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn constant(grid: GridSpec, c: C64) -> Self {
        Self {
            grid,
            values: vec![c; grid.n()],
        }
    }

    /// The lattice harmonic `e^{i x m / L}`.
    pub fn harmonic(grid: GridSpec, index: i64) -> Self {
        let freq = grid.frequency(index);
        Self::from_fn(grid, |x| C64::from_polar(1.0, freq * x))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: C64, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| op(*a, *b))
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// Grid product without any aliasing check. The grid values are exact;
    /// only the continuum interpretation can alias.
    pub(crate) fn mul_raw(&self, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Re-samples on a grid with `new_n >= N` points by zero-padding the
    /// spectrum.
    pub fn refine(&self, new_n: usize) -> Result<Self> {
        if new_n < self.grid.n() {
            return Err(Error::InvalidGrid(format!(
                "cannot refine N = {} down to {new_n}",
                self.grid.n()
            )));
        }
        let fine = GridSpec::new(new_n, self.grid.scale())?;
        let coeffs = analyze(self);
        let entries = coeffs.entries().into_iter();
        Ok(synthesize(&SpectralCoefficients::sparse(fine, entries)?))
    }
}

/// Closed range of lattice indices carrying non-negligible coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectralSupport {
    pub min: i64,
    pub max: i64,
}

impl SpectralSupport {
    pub fn radius(&self) -> i64 {
        self.min.abs().max(self.max.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Indexed by FFT slot.
    Dense(Vec<C64>),
    Sparse(BTreeMap<i64, C64>),
}

/// Fourier coefficients `c_m` on the lattice of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    grid: GridSpec,
    storage: Storage,
}

impl SpectralCoefficients {
    /// Dense coefficients in FFT slot order.
    pub fn from_slots(grid: GridSpec, slots: Vec<C64>) -> Result<Self> {
        if slots.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "{} coefficients supplied for N = {}",
                slots.len(),
                grid.n()
            )));
        }
        Ok(Self {
            grid,
            storage: Storage::Dense(slots),
        })
    }

    pub fn sparse(grid: GridSpec, entries: impl IntoIterator<Item = (i64, C64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, c) in entries {
            if !grid.contains_index(m) {
                return Err(Error::IndexOutOfRange {
                    index: m,
                    half: grid.half(),
                });
            }
            *map.entry(m).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(Self {
            grid,
            storage: Storage::Sparse(map),
        })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            storage: Storage::Sparse(BTreeMap::new()),
        }
    }

    /// Coefficients `filter(m / L)` for every lattice index, skipping exact zeros.
    pub fn from_multiplier(grid: GridSpec, filter: impl Fn(f64) -> C64) -> Self {
        let map = grid
            .indices()
            .filter_map(|m| {
                let c = filter(grid.frequency(m));
                (c != C64::new(0.0, 0.0)).then_some((m, c))
            })
            .collect();
        Self {
            grid,
            storage: Storage::Sparse(map),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, index: i64) -> C64 {
        if !self.grid.contains_index(index) {
            return C64::new(0.0, 0.0);
        }
        match &self.storage {
            Storage::Dense(v) => v[self.grid.slot(index)],
            Storage::Sparse(map) => map.get(&index).copied().unwrap_or_default(),
        }
    }

    pub fn set(&mut self, index: i64, value: C64) -> Result<()> {
        if !self.grid.contains_index(index) {
            return Err(Error::IndexOutOfRange {
                index,
                half: self.grid.half(),
            });
        }
        let slot = self.grid.slot(index);
        match &mut self.storage {
            Storage::Dense(v) => v[slot] = value,
            Storage::Sparse(map) => {
                map.insert(index, value);
            }
        }
        Ok(())
    }

    /// All stored entries in increasing lattice-index order.
    pub fn entries(&self) -> Vec<(i64, C64)> {
        match &self.storage {
            Storage::Dense(v) => self
                .grid
                .indices()
                .map(|m| (m, v[self.grid.slot(m)]))
                .collect(),
            Storage::Sparse(map) => map.iter().map(|(m, c)| (*m, *c)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries()
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Entries whose magnitude exceeds `rel_tol` times the largest one.
    pub fn nonzero(&self, rel_tol: f64) -> Vec<(i64, C64)> {
        let entries = self.entries();
        let peak = entries.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Vec::new();
        }
        let cut = peak * rel_tol;
        entries.into_iter().filter(|(_, c)| c.norm() > cut).collect()
    }

    /// Sparse copy keeping only entries above `rel_tol` times the largest one.
    pub fn pruned(&self, rel_tol: f64) -> Self {
        Self {
            grid: self.grid,
            storage: Storage::Sparse(self.nonzero(rel_tol).into_iter().collect()),
        }
    }

    pub fn nnz(&self) -> usize {
        self.nonzero(SPARSE_REL_TOL).len()
    }

    pub fn support(&self, rel_tol: f64) -> Option<SpectralSupport> {
        let nz = self.nonzero(rel_tol);
        let min = nz.first()?.0;
        let max = nz.last()?.0;
        Some(SpectralSupport { min, max })
    }

    pub fn to_slots(&self) -> Vec<C64> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(map) => {
                let mut v = vec![C64::new(0.0, 0.0); self.grid.n()];
                for (m, c) in map {
                    v[self.grid.slot(*m)] = *c;
                }
                v
            }
        }
    }

    /// Multiplies every coefficient by `multiplier(m / L)`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(f64) -> C64) -> Self {
        let grid = self.grid;
        let storage = match &self.storage {
            Storage::Dense(v) => Storage::Dense(
                v.iter()
                    .enumerate()
                    .map(|(slot, c)| c * multiplier(grid.frequency(grid.index_of_slot(slot))))
                    .collect(),
            ),
            Storage::Sparse(map) => Storage::Sparse(
                map.iter()
                    .map(|(m, c)| (*m, c * multiplier(grid.frequency(*m))))
                    .collect(),
            ),
        };
        Self { grid, storage }
    }

    /// Trigonometric interpolation `Σ c_m e^{i x m / L}` at an arbitrary `x`.
    pub fn evaluate(&self, x: f64) -> C64 {
        self.entries()
            .iter()
            .map(|(m, c)| c * C64::from_polar(1.0, x * self.grid.frequency(*m)))
            .sum()
    }
}

/// Fourier analysis: `f(x_n) = Σ_m c_m e^{i x_n m / L}`.
pub fn analyze(f: &SampledFunction) -> SpectralCoefficients {
    let n = f.grid.n();
    let mut buf = f.values.clone();
    forward_plan(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    for v in &mut buf {
        *v *= inv;
    }
    SpectralCoefficients {
        grid: f.grid,
        storage: Storage::Dense(buf),
    }
}

/// Fourier synthesis, the inverse of [`analyze`].
pub fn synthesize(c: &SpectralCoefficients) -> SampledFunction {
    let mut buf = c.to_slots();
    inverse_plan(c.grid.n()).process(&mut buf);
    SampledFunction {
        grid: c.grid,
        values: buf,
    }
}

/// Discrete `L^p` norm `(h Σ |f(x_n)|^p)^{1/p}`, or `max |f(x_n)|` for `p = ∞`.
pub fn lebesgue_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(lp_of_moduli(f.values.iter().map(|v| v.norm()), p, f.grid.spacing()))
}

/// `L^p` norm of a sequence of non-negative samples with quadrature weight `h`.
pub(crate) fn lp_of_moduli(moduli: impl Iterator<Item = f64>, p: f64, h: f64) -> f64 {
    if p.is_infinite() {
        return moduli.fold(0.0, f64::max);
    }
    if p == 2.0 {
        return (h * moduli.map(|a| a * a).sum::<f64>()).sqrt();
    }
    (h * moduli.map(|a| a.powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// How products whose spectra overflow the lattice are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AliasPolicy {
    #[default]
    Raise,
    /// Compute on a grid with twice the samples and return the result there.
    Upsample,
}

/// Checks that the sum of the two supports stays inside the lattice.
pub(crate) fn sum_support(
    grid: &GridSpec,
    a: Option<SpectralSupport>,
    b: Option<SpectralSupport>,
) -> std::result::Result<Option<SpectralSupport>, SpectralSupport> {
    let (Some(a), Some(b)) = (a, b) else {
        return Ok(None);
    };
    let out = SpectralSupport {
        min: a.min + b.min,
        max: a.max + b.max,
    };
    if out.min >= -grid.half() && out.max < grid.half() {
        Ok(Some(out))
    } else {
        Err(out)
    }
}

/// Pointwise product `f g`.
pub fn pointwise_product(
    f: &SampledFunction,
    g: &SampledFunction,
    policy: AliasPolicy,
) -> Result<SampledFunction> {
    f.grid.ensure_same(&g.grid)?;
    let sf = analyze(f).support(SUPPORT_REL_TOL);
    let sg = analyze(g).support(SUPPORT_REL_TOL);
    match sum_support(&f.grid, sf, sg) {
        Ok(_) => Ok(f.mul_raw(g)),
        Err(out) => match policy {
            AliasPolicy::Raise => Err(Error::AliasingRisk {
                min: out.min,
                max: out.max,
                half: f.grid.half(),
            }),
            AliasPolicy::Upsample => {
                let n = 2 * f.grid.n();
                Ok(f.refine(n)?.mul_raw(&g.refine(n)?))
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(64, 2.0).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(48, 1.0).is_err());
        assert!(GridSpec::new(4, 1.0).is_err());
        assert!(GridSpec::new(64, 0.0).is_err());
        assert!(GridSpec::new(64, f64::NAN).is_err());
    }

    #[test]
    fn slots_round_trip() {
        let g = grid();
        for m in g.indices() {
            assert_eq!(g.index_of_slot(g.slot(m)), m);
        }
        assert_eq!(g.lattice_index(1.5), Some(3));
        assert_eq!(g.lattice_index(0.3), None);
    }

    #[test]
    fn constant_is_dc_only() {
        let g = grid();
        let c = analyze(&SampledFunction::constant(g, C64::new(1.0, 0.0)));
        for (m, v) in c.entries() {
            let expected = if m == 0 { 1.0 } else { 0.0 };
            assert!((v - C64::new(expected, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn harmonic_is_single_coefficient() {
        let g = grid();
        let c = analyze(&SampledFunction::harmonic(g, -7));
        assert!((c.get(-7) - C64::new(1.0, 0.0)).norm() < 1e-14);
        assert_eq!(c.nonzero(1e-12).len(), 1);
    }

    #[test]
    fn empty_spectrum_synthesizes_zero() {
        let f = synthesize(&SpectralCoefficients::zeros(grid()));
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn out_of_range_index_is_rejected() {
        let g = grid();
        let err = SpectralCoefficients::sparse(g, [(32, C64::new(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { index: 32, .. }));
        assert!(SpectralCoefficients::sparse(g, [(-32, C64::new(1.0, 0.0))]).is_ok());
    }

    #[test]
    fn norms_of_constants() {
        let g = GridSpec::new(256, 12.0).unwrap();
        let one = SampledFunction::constant(g, C64::new(1.0, 0.0));
        let l2 = lebesgue_norm(&one, 2.0).unwrap();
        assert!((l2 - g.period().sqrt()).abs() < 1e-12);
        let c = SampledFunction::constant(g, C64::new(-3.0, 4.0));
        assert_eq!(lebesgue_norm(&c, f64::INFINITY).unwrap(), 5.0);
        assert!(matches!(
            lebesgue_norm(&one, 1.0),
            Err(Error::InvalidExponent(_))
        ));
        assert!(lebesgue_norm(&one, 0.5).is_err());
    }

    #[test]
    fn product_of_harmonics() {
        let g = grid();
        let a = SampledFunction::harmonic(g, 5);
        let b = SampledFunction::harmonic(g, -12);
        let p = pointwise_product(&a, &b, AliasPolicy::Raise).unwrap();
        let expected = SampledFunction::harmonic(g, -7);
        assert!(p.max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn aliasing_is_raised_or_upsampled() {
        let g = grid();
        let a = SampledFunction::harmonic(g, 20);
        let b = SampledFunction::harmonic(g, 15);
        assert!(matches!(
            pointwise_product(&a, &b, AliasPolicy::Raise),
            Err(Error::AliasingRisk { max: 35, .. })
        ));
        let up = pointwise_product(&a, &b, AliasPolicy::Upsample).unwrap();
        assert_eq!(up.grid().n(), 128);
        let expected = SampledFunction::harmonic(*up.grid(), 35);
        assert!(up.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SampledFunction::zeros(grid());
        let b = SampledFunction::zeros(GridSpec::new(64, 3.0).unwrap());
        assert!(matches!(a.add(&b), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn trigonometric_interpolation_matches_closed_form() {
        let g = grid();
        let f = SampledFunction::harmonic(g, 3).add(&SampledFunction::harmonic(g, -2)).unwrap();
        let c = analyze(&f);
        let x = 0.123;
        let expected = C64::from_polar(1.0, 1.5 * x) + C64::from_polar(1.0, -x);
        assert!((c.evaluate(x) - expected).norm() < 1e-13);
    }
}
