//! Finite-difference scan of the class estimates
//! `|∂_x^α ∂_ξ^β ∂_η^γ σ| ≤ C_{αβγ} w(ξ, η)^{m + δα − ρ(β+γ)}`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{Symbol, SymbolClassParams};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Highest derivative order the stencils support reliably.
pub const MAX_CLASS_ORDER: u32 = 4;

/// Fourth-order central stencils as (offset, weight) lists.
fn stencil(order: u32) -> &'static [(i32, f64)] {
    const D0: [(i32, f64); 1] = [(0, 1.0)];
    const D1: [(i32, f64); 4] = [
        (-2, 1.0 / 12.0),
        (-1, -2.0 / 3.0),
        (1, 2.0 / 3.0),
        (2, -1.0 / 12.0),
    ];
    const D2: [(i32, f64); 5] = [
        (-2, -1.0 / 12.0),
        (-1, 4.0 / 3.0),
        (0, -5.0 / 2.0),
        (1, 4.0 / 3.0),
        (2, -1.0 / 12.0),
    ];
    const D3: [(i32, f64); 6] = [
        (-3, 1.0 / 8.0),
        (-2, -1.0),
        (-1, 13.0 / 8.0),
        (1, -13.0 / 8.0),
        (2, 1.0),
        (3, -1.0 / 8.0),
    ];
    const D4: [(i32, f64); 7] = [
        (-3, -1.0 / 6.0),
        (-2, 2.0),
        (-1, -13.0 / 2.0),
        (0, 28.0 / 3.0),
        (1, -13.0 / 2.0),
        (2, 2.0),
        (3, -1.0 / 6.0),
    ];
    match order {
        0 => &D0,
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => &D4,
    }
}

/// Where the estimates are probed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePlan {
    pub seed: u64,
    /// Frequencies reach `2^max_shell`.
    pub max_shell: u32,
    pub per_shell: usize,
    /// Extra points near the singular line, used when the class has a θ.
    pub diagonal_per_shell: usize,
    pub x_values: Vec<f64>,
    pub freq_step: f64,
    pub x_step: f64,
}

impl SamplePlan {
    /// Steps of one lattice spacing in frequency and one grid step in `x`.
    pub fn for_grid(grid: &GridSpec, max_shell: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c1a5);
        let x_values = (0..4).map(|_| rng.random::<f64>() * grid.period()).collect();
        Self {
            seed,
            max_shell,
            per_shell: 24,
            diagonal_per_shell: 24,
            x_values,
            freq_step: 1.0 / grid.scale(),
            x_step: grid.spacing(),
        }
    }

    fn shell_radius(rng: &mut ChaCha8Rng, k: u32) -> f64 {
        if k == 0 {
            rng.random::<f64>()
        } else {
            2f64.powf(k as f64 - 1.0 + rng.random::<f64>())
        }
    }

    /// Frequency pairs: log-uniform dyadic shells plus, for a θ class,
    /// points at dyadic distances from the line `η = tanθ ξ`.
    pub fn frequency_points(&self, params: &SymbolClassParams) -> Vec<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut pts = Vec::new();
        for k in 0..=self.max_shell {
            for _ in 0..self.per_shell {
                let r = Self::shell_radius(&mut rng, k);
                let a = rng.random::<f64>() * std::f64::consts::TAU;
                pts.push((r * a.cos(), r * a.sin()));
            }
        }
        let slope = match params.theta {
            Some(t) if t != std::f64::consts::FRAC_PI_2 => Some(t.tan()),
            _ => None,
        };
        if let Some(slope) = slope {
            for k in 0..=self.max_shell {
                // Exact dyadic offsets first, then random ones.
                let d = 2f64.powi(k as i32);
                let xi = Self::shell_radius(&mut rng, k) * if rng.random::<bool>() { 1.0 } else { -1.0 };
                pts.push((xi, slope * xi + d));
                pts.push((xi, slope * xi - d));
                for _ in 0..self.diagonal_per_shell {
                    let k_xi = rng.random_range(0..=self.max_shell);
                    let xi = Self::shell_radius(&mut rng, k_xi)
                        * if rng.random::<bool>() { 1.0 } else { -1.0 };
                    let k_d = rng.random_range(0..=k);
                    let d = Self::shell_radius(&mut rng, k_d)
                        * if rng.random::<bool>() { 1.0 } else { -1.0 };
                    pts.push((xi, slope * xi + d));
                }
            }
        }
        pts
    }
}

/// Fitted constants keyed `"α.β.γ"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub params: SymbolClassParams,
    pub max_order: u32,
    pub samples: usize,
    pub constants: BTreeMap<String, f64>,
    /// `(x, ξ, η)` attaining each fitted constant.
    pub worst_points: BTreeMap<String, (f64, f64, f64)>,
    pub claimed_constant: Option<f64>,
    /// `max Ĉ / claimed` over all rows, when a claimed constant is given.
    pub violation_ratio: Option<f64>,
}

impl ClassReport {
    pub fn constant(&self, alpha: u32, beta: u32, gamma: u32) -> Option<f64> {
        self.constants.get(&format!("{alpha}.{beta}.{gamma}")).copied()
    }

    pub fn max_constant(&self) -> f64 {
        self.constants.values().copied().fold(0.0, f64::max)
    }
}

fn multi_indices(max_order: u32) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for total in 0..=max_order {
        for a in 0..=total {
            for b in 0..=total - a {
                out.push((a, b, total - a - b));
            }
        }
    }
    out
}

/// Fits the smallest constants for which the class estimates hold on the plan.
pub fn check_class_estimate(
    sigma: &Symbol,
    params: &SymbolClassParams,
    max_order: u32,
    plan: &SamplePlan,
    claimed: Option<f64>,
) -> Result<ClassReport> {
    if max_order > MAX_CLASS_ORDER {
        return Err(Error::InvalidParameter(format!(
            "derivative order {max_order} exceeds {MAX_CLASS_ORDER}"
        )));
    }
    let freqs = plan.frequency_points(params);
    let points: Vec<(f64, f64, f64)> = plan
        .x_values
        .iter()
        .flat_map(|&x| freqs.iter().map(move |&(xi, eta)| (x, xi, eta)))
        .collect();
    let hx = plan.x_step;
    let hf = plan.freq_step;

    let rows: Vec<(String, f64, (f64, f64, f64))> = multi_indices(max_order)
        .into_par_iter()
        .map(|(a, b, g)| {
            let (sa, sb, sg) = (stencil(a), stencil(b), stencil(g));
            let scale = hx.powi(a as i32) * hf.powi((b + g) as i32);
            let expo = params.exponent(a, b, g);
            let mut best = (0.0, points.first().copied().unwrap_or_default());
            for &(x, xi, eta) in &points {
                let mut acc = crate::C64::new(0.0, 0.0);
                for &(i, wi) in sa {
                    for &(k, wk) in sb {
                        for &(l, wl) in sg {
                            acc += wi * wk * wl
                                * sigma.eval(
                                    x + i as f64 * hx,
                                    xi + k as f64 * hf,
                                    eta + l as f64 * hf,
                                );
                        }
                    }
                }
                let c = acc.norm() / scale / params.weight(xi, eta).powf(expo);
                if c > best.0 {
                    best = (c, (x, xi, eta));
                }
            }
            (format!("{a}.{b}.{g}"), best.0, best.1)
        })
        .collect();

    let mut constants = BTreeMap::new();
    let mut worst_points = BTreeMap::new();
    for (key, c, at) in rows {
        constants.insert(key.clone(), c);
        worst_points.insert(key, at);
    }
    let violation_ratio = claimed.map(|c| constants.values().copied().fold(0.0, f64::max) / c);
    Ok(ClassReport {
        params: *params,
        max_order,
        samples: points.len(),
        constants,
        worst_points,
        claimed_constant: claimed,
        violation_ratio,
    })
}

/// Behaviour of a fitted constant across a family indexed by level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTrend {
    pub values: Vec<f64>,
    /// Consecutive ratios `v[i+1] / v[i]`.
    pub ratios: Vec<f64>,
    /// `v[last] / v[0]`.
    pub total_growth: f64,
    pub max_over_min: f64,
    /// `max / min ≤ 2`.
    pub stable: bool,
    /// Every step grows by at least 1.5.
    pub unbounded: bool,
}

pub fn growth_trend(values: &[f64]) -> GrowthTrend {
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let min = values.iter().copied().fold(f64::MAX, f64::min);
    let max_over_min = if values.is_empty() { 1.0 } else { max / min };
    let total_growth = match (values.first(), values.last()) {
        (Some(a), Some(b)) => b / a,
        _ => 1.0,
    };
    GrowthTrend {
        values: values.to_vec(),
        unbounded: !ratios.is_empty() && ratios.iter().all(|&r| r >= 1.5),
        stable: max_over_min <= 2.0,
        ratios,
        total_growth,
        max_over_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn stencils_differentiate_polynomials() {
        let h = 0.1;
        let x0 = 0.3;
        let f = |x: f64| x.powi(4) - 2.0 * x.powi(3) + x;
        let exact = [
            f(x0),
            4.0 * x0.powi(3) - 6.0 * x0 * x0 + 1.0,
            12.0 * x0 * x0 - 12.0 * x0,
            24.0 * x0 - 12.0,
            24.0,
        ];
        for (order, e) in exact.iter().enumerate() {
            let d: f64 = stencil(order as u32)
                .iter()
                .map(|&(i, w)| w * f(x0 + i as f64 * h))
                .sum::<f64>()
                / h.powi(order as i32);
            assert!((d - e).abs() < 1e-9, "order {order}: {d} vs {e}");
        }
    }

    #[test]
    fn constant_symbol_has_unit_constant() {
        let grid = GridSpec::new(1024, 4.0).unwrap();
        let plan = SamplePlan::for_grid(&grid, 6, 1);
        let params = SymbolClassParams::new(0.0, 1.0, 0.0, None).unwrap();
        let r = check_class_estimate(&Symbol::one(), &params, 2, &plan, Some(1.0)).unwrap();
        assert_eq!(r.constant(0, 0, 0), Some(1.0));
        for (k, v) in &r.constants {
            if k != "0.0.0" {
                assert!(*v < 1e-10, "{k}: {v}");
            }
        }
        assert_eq!(r.violation_ratio, Some(1.0));
        assert!(check_class_estimate(&Symbol::one(), &params, 5, &plan, None).is_err());
    }

    #[test]
    fn scaling_by_power_of_two_is_exact() {
        let grid = GridSpec::new(1024, 4.0).unwrap();
        let plan = SamplePlan::for_grid(&grid, 5, 3);
        let params = SymbolClassParams::new(0.0, 1.0, 0.0, None).unwrap();
        let s = Symbol::multiplier(|a, b| C64::new((-(a * a + b * b) / 50.0).exp(), a.sin()));
        let r1 = check_class_estimate(&s, &params, 2, &plan, None).unwrap();
        let r2 = check_class_estimate(&s.scaled(C64::new(4.0, 0.0)), &params, 2, &plan, None).unwrap();
        for (k, v) in &r1.constants {
            assert_eq!(r2.constants[k], 4.0 * v);
        }
    }

    #[test]
    fn trends() {
        let t = growth_trend(&[1.0, 2.0, 4.1, 8.0]);
        assert!(t.unbounded && !t.stable);
        let s = growth_trend(&[1.0, 1.1, 0.95, 1.05]);
        assert!(s.stable && !s.unbounded);
    }
}
