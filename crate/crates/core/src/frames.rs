//! Littlewood-Paley filter bank and the half-line cutoff Θ̂.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{analyze, synthesize, GridSpec, SampledFunction, SpectralCoefficients};
use crate::C64;

/// Monotone transition `ρ: [0, 1] → [0, 1]` with `ρ(t) + ρ(1 - t) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BumpProfile {
    /// Polynomial smoothstep of order `r`, `C^r` at both ends.
    Smoothstep { order: u32 },
    /// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`, smooth of every order.
    Exponential,
}

impl Default for BumpProfile {
    /// Order 3: `ρ(t) = t⁴(35 − 84t + 70t² − 20t³)`.
    fn default() -> Self {
        BumpProfile::Smoothstep { order: 3 }
    }
}

impl BumpProfile {
    pub fn smoothstep(order: u32) -> Result<Self> {
        if order > 24 {
            return Err(Error::InvalidParameter(format!(
                "smoothstep order {order} exceeds 24"
            )));
        }
        Ok(BumpProfile::Smoothstep { order })
    }

    /// Smoothness order of the transition; `None` for infinitely smooth.
    pub fn order(&self) -> Option<u32> {
        match self {
            BumpProfile::Smoothstep { order } => Some(*order),
            BumpProfile::Exponential => None,
        }
    }

    /// `ρ(t)`, clamped to 0 below 0 and to 1 above 1.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else if t > 0.5 {
            // Evaluate the upper half by reflection so complementarity is exact.
            1.0 - self.raw(1.0 - t)
        } else {
            self.raw(t)
        }
    }

    fn raw(&self, t: f64) -> f64 {
        match *self {
            BumpProfile::Smoothstep { order } => {
                let r = order as i32;
                let s = 1.0 - t;
                let mut sum = 0.0;
                let mut binom = 1.0;
                let mut pow = 1.0;
                for k in 0..=r {
                    if k > 0 {
                        binom *= (r + k) as f64 / k as f64;
                        pow *= s;
                    }
                    sum += binom * pow;
                }
                t.powi(r + 1) * sum
            }
            BumpProfile::Exponential => {
                let a = (-1.0 / t).exp();
                let b = (-1.0 / (1.0 - t)).exp();
                a / (a + b)
            }
        }
    }
}

/// Summary of the partition-of-unity check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionReport {
    pub max_partition_error: f64,
    pub k_max: i64,
    pub support_violations: usize,
}

/// The dyadic frame `{Φ̂, Ψ̂(2^{-k} ·)}` on a grid's lattice.
#[derive(Debug, Clone)]
pub struct LPFrame {
    grid: GridSpec,
    profile: BumpProfile,
    phi_table: Vec<f64>,
    k_max: i64,
    k_min: i64,
}

impl LPFrame {
    pub fn new(grid: GridSpec, profile: BumpProfile) -> Result<Self> {
        let nyq = grid.nyquist();
        let mut log = nyq.log2().floor() as i64;
        // Guard against log2 rounding at exact powers of two.
        if 2f64.powi(log as i32 + 1) <= nyq {
            log += 1;
        } else if 2f64.powi(log as i32) > nyq {
            log -= 1;
        }
        let k_max = log - 1;
        if k_max < 2 {
            return Err(Error::GridTooSmall { k_max });
        }
        let k_min = grid.scale().log2().ceil().max(0.0) as i64;
        let phi_table = grid
            .indices()
            .map(|m| phi_hat_with(&profile, grid.frequency(m)))
            .collect();
        Ok(Self {
            grid,
            profile,
            phi_table,
            k_max,
            k_min,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    /// Largest level whose filter is resolved below the Nyquist frequency.
    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    /// Number of homogeneous levels below zero reaching the lowest lattice frequency.
    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    /// `Φ̂` sampled at lattice indices `-N/2 .. N/2`.
    pub fn phi_table(&self) -> &[f64] {
        &self.phi_table
    }

    /// `Φ̂(ξ) = ρ(2 − 2|ξ|)`: 1 on `|ξ| ≤ 1/2`, 0 on `|ξ| ≥ 1`.
    pub fn phi_hat(&self, xi: f64) -> f64 {
        phi_hat_with(&self.profile, xi)
    }

    /// `Ψ̂(ξ) = Φ̂(ξ/2) − Φ̂(ξ)`, supported in `1/2 ≤ |ξ| ≤ 2`.
    pub fn psi_hat(&self, xi: f64) -> f64 {
        psi_hat_with(&self.profile, xi)
    }

    /// `Ψ̂(2^{-k} ξ)` for any integer level, including negative ones.
    pub fn level_hat(&self, k: i64, xi: f64) -> f64 {
        self.psi_hat(xi * 2f64.powi(-k as i32))
    }

    /// `Φ̂(2^{-k} ξ)`.
    pub fn low_hat(&self, k: i64, xi: f64) -> f64 {
        self.phi_hat(xi * 2f64.powi(-k as i32))
    }

    pub fn partition_report(&self) -> PartitionReport {
        let limit = 2f64.powi(self.k_max as i32);
        let mut max_err: f64 = 0.0;
        let mut violations = 0;
        for (slot, m) in self.grid.indices().enumerate() {
            let xi = self.grid.frequency(m);
            let phi = self.phi_table[slot];
            if phi != 0.0 && xi.abs() > 1.0 {
                violations += 1;
            }
            let mut sum = phi;
            for k in 0..=self.k_max {
                let v = self.level_hat(k, xi);
                let a = xi.abs() * 2f64.powi(-k as i32);
                if v != 0.0 && !(0.5..=2.0).contains(&a) {
                    violations += 1;
                }
                sum += v;
            }
            if xi.abs() <= limit {
                max_err = max_err.max((sum - 1.0).abs());
            }
        }
        PartitionReport {
            max_partition_error: max_err,
            k_max: self.k_max,
            support_violations: violations,
        }
    }

    fn ensure_grid(&self, f: &SampledFunction) -> Result<()> {
        self.grid.ensure_same(f.grid())
    }

    /// `Ψ_{2^{-k}} ∗ f`.
    pub fn project_level(&self, f: &SampledFunction, k: i64) -> Result<SampledFunction> {
        self.ensure_grid(f)?;
        Ok(band_project(f, |xi| self.level_hat(k, xi)))
    }

    /// `Φ ∗ f`.
    pub fn project_low(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.ensure_grid(f)?;
        Ok(band_project(f, |xi| self.phi_hat(xi)))
    }

    /// The level-`k` filter (or `Φ̂` for `None`) as spectral data, for dumping.
    pub fn filter_coefficients(&self, level: Option<i64>) -> SpectralCoefficients {
        SpectralCoefficients::from_multiplier(self.grid, |xi| {
            C64::new(
                match level {
                    Some(k) => self.level_hat(k, xi),
                    None => self.phi_hat(xi),
                },
                0.0,
            )
        })
    }
}

fn phi_hat_with(profile: &BumpProfile, xi: f64) -> f64 {
    profile.eval(2.0 - 2.0 * xi.abs())
}

fn psi_hat_with(profile: &BumpProfile, xi: f64) -> f64 {
    phi_hat_with(profile, 0.5 * xi) - phi_hat_with(profile, xi)
}

/// Spectral multiplication: the output has coefficients `filter(m/L) c_m`.
pub fn band_project(f: &SampledFunction, filter: impl Fn(f64) -> f64) -> SampledFunction {
    synthesize(&analyze(f).apply_multiplier(|xi| C64::new(filter(xi), 0.0)))
}

/// `Θ̂(ω)`: 0 for `ω ≤ 1`, 1 for `ω ≥ 2`, `ρ(ω − 1)` in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ThetaProfile {
    profile: BumpProfile,
}

impl ThetaProfile {
    pub fn new(profile: BumpProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> BumpProfile {
        self.profile
    }

    pub fn eval(&self, omega: f64) -> f64 {
        self.profile.eval(omega - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_profile_matches_closed_form() {
        let rho = BumpProfile::default();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let closed = t.powi(4) * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t.powi(3));
            assert!((rho.eval(t) - closed).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn profiles_are_complementary_and_monotone() {
        for profile in [
            BumpProfile::default(),
            BumpProfile::smoothstep(0).unwrap(),
            BumpProfile::smoothstep(7).unwrap(),
            BumpProfile::Exponential,
        ] {
            assert_eq!(profile.eval(0.5), 0.5);
            let mut prev = 0.0;
            for i in 0..=1024 {
                let t = i as f64 / 1024.0;
                let v = profile.eval(t);
                assert!(v >= prev);
                assert_eq!(v + profile.eval(1.0 - t), 1.0);
                prev = v;
            }
        }
        assert!(BumpProfile::smoothstep(40).is_err());
    }

    #[test]
    fn frame_levels_and_small_grids() {
        let f = LPFrame::new(GridSpec::new(4096, 12.0).unwrap(), BumpProfile::default()).unwrap();
        // Nyquist = 170.67, floor(log2) = 7.
        assert_eq!(f.k_max(), 6);
        assert_eq!(f.k_min(), 4);
        let g = LPFrame::new(GridSpec::new(2048, 1.0).unwrap(), BumpProfile::default()).unwrap();
        assert_eq!(g.k_max(), 9);
        assert!(matches!(
            LPFrame::new(GridSpec::new(64, 8.0).unwrap(), BumpProfile::default()),
            Err(Error::GridTooSmall { k_max: 1 })
        ));
    }

    #[test]
    fn partition_at_zero_and_report() {
        let f = LPFrame::new(GridSpec::new(4096, 12.0).unwrap(), BumpProfile::default()).unwrap();
        assert_eq!(f.phi_hat(0.0), 1.0);
        for k in 0..=f.k_max() {
            assert_eq!(f.level_hat(k, 0.0), 0.0);
        }
        let r = f.partition_report();
        assert!(r.max_partition_error <= 1e-12);
        assert_eq!(r.support_violations, 0);
    }

    #[test]
    fn at_most_two_levels_overlap() {
        let f = LPFrame::new(GridSpec::new(1024, 3.0).unwrap(), BumpProfile::default()).unwrap();
        for m in 1..512 {
            let xi = f.grid().frequency(m);
            let active = (0..=f.k_max()).filter(|&k| f.level_hat(k, xi) != 0.0).count();
            assert!(active <= 2, "xi = {xi}");
        }
    }

    #[test]
    fn theta_values() {
        let th = ThetaProfile::default();
        assert_eq!(th.eval(0.5), 0.0);
        assert_eq!(th.eval(1.0), 0.0);
        assert_eq!(th.eval(3.0), 1.0);
        assert_eq!(th.eval(1.5), 0.5);
        let v = th.eval(1.3);
        assert!(v > 0.0 && v < 1.0);
        assert_eq!(v + th.eval(1.7), 1.0);
    }

    #[test]
    fn flat_region_projection_is_identity() {
        let grid = GridSpec::new(512, 4.0).unwrap();
        let frame = LPFrame::new(grid, BumpProfile::default()).unwrap();
        // ξ = 8 = 2^3 lies where Ψ̂(2^{-3} ξ) = Ψ̂(1) = 1.
        let f = SampledFunction::harmonic(grid, 32);
        let p = frame.project_level(&f, 3).unwrap();
        assert!(p.max_abs_diff(&f).unwrap() < 1e-13);
        let q = frame.project_level(&f, 5).unwrap();
        assert!(q.max_abs() < 1e-13);
    }
}
