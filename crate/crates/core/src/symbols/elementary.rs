//! Localisation of a symbol into dyadic cells and Fourier-series
//! extraction of the coefficients `γ_{a,b}(x)` on each cell.
//!
//! Cell `(j, l)` carries the weight
//!
//! ```text
//! W_{j,l}(ξ, η) = Ψ̂(2^{-j}(ξ − η)) χ(l + 2^{-j}(ξ + η)),   χ(v) = ρ(1 − |v|)
//! ```
//!
//! and `Σ_l χ(l + v) = 1`, so the weights sum to `1 − Φ̂(2^{-jMin}(ξ−η))`
//! wherever the `(j, l)` ranges reach. The weighted piece is sampled on a
//! square box of side `3·2^j` centred at `(−l 2^{j−1}, −l 2^{j−1})`, which
//! contains the support of `W_{j,l}`, and expanded in a 2-D Fourier series.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::Symbol;
use crate::error::{Error, Result};
use crate::frames::{BumpProfile, LPFrame};
use crate::grid::{forward_plan, inverse_plan};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionConfig {
    /// Inclusive range of dyadic levels `j ≥ 0`.
    pub levels: (u32, u32),
    /// Inclusive range of translation indices `l`.
    pub translations: (i64, i64),
    /// Node spacing in `ξ` and `η`; `3·2^j / step` must be an integer.
    pub step: f64,
    /// Samples cover `[−B, B]²` at spacing `step`.
    pub box_radius: f64,
    pub x_samples: Vec<f64>,
    /// Decay order `M` checked for `|γ_{a,b}| ≤ C (1 + |a| + |b|)^{−M}`.
    pub decay_order: u32,
    /// Fail with `CoverageGap` instead of reporting uncovered samples.
    pub require_coverage: bool,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            levels: (0, 3),
            translations: (-6, 6),
            step: 0.5,
            box_radius: 8.0,
            x_samples: vec![0.0],
            decay_order: 4,
            require_coverage: false,
        }
    }
}

/// Fit of `|γ_{a,b}| ≤ C (1 + |a| + |b|)^{−M}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub order: u32,
    /// Fitted on `|a| + |b| ≤ P/4`.
    pub constant: f64,
    /// The bound also holds on the remaining coefficients.
    pub verified: bool,
    /// `max_{|a|+|b| = R} |γ_{a,b}|` over all x samples, indexed by `R`.
    pub radial_max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryCell {
    pub j: u32,
    pub l: i64,
    /// Lower corner of the box in both `ξ` and `η`.
    pub start: f64,
    /// Nodes per side.
    pub side: usize,
    /// `γ_{a,b}` per x sample, stored at FFT slots `(a mod P, b mod P)` row-major.
    pub gamma: Vec<Vec<C64>>,
    /// `m_{j,l}(x) = γ_{0,0}(x)` at the x samples.
    pub m_table: Vec<C64>,
    pub decay: DecayFit,
}

impl ElementaryCell {
    fn period(&self, step: f64) -> f64 {
        self.side as f64 * step
    }

    pub fn gamma_at(&self, x_index: usize, a: i64, b: i64) -> C64 {
        let p = self.side as i64;
        let (ra, rb) = (a.rem_euclid(p) as usize, b.rem_euclid(p) as usize);
        self.gamma[x_index][ra * self.side + rb]
    }

    /// `sqrt(Σ |γ_{a,b}|²)` maximised over x samples.
    pub fn energy(&self) -> f64 {
        self.gamma
            .iter()
            .map(|g| g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Largest `|γ_{a,b}|` with `(a, b) ≠ (0, 0)`, over x samples.
    pub fn max_off_center(&self) -> f64 {
        self.gamma
            .iter()
            .flat_map(|g| g.iter().skip(1))
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients with `|γ| > threshold` at one x sample, keyed `"a,b"`.
    pub fn gamma_table(&self, x_index: usize, threshold: f64) -> BTreeMap<String, [f64; 2]> {
        let p = self.side as i64;
        let mut out = BTreeMap::new();
        for a in -p / 2..p / 2 {
            for b in -p / 2..p / 2 {
                let g = self.gamma_at(x_index, a, b);
                if g.norm() > threshold {
                    out.insert(format!("{a},{b}"), [g.re, g.im]);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryDecomposition {
    pub config: DecompositionConfig,
    pub profile: BumpProfile,
    pub cells: Vec<ElementaryCell>,
    /// `max |σ − Σ pieces|` over all samples.
    pub residual: f64,
    /// Same, restricted to covered samples.
    pub covered_residual: f64,
    pub uncovered: Vec<(f64, f64)>,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub j: u32,
    pub l: i64,
    pub side: usize,
    pub energy: f64,
    pub m_table: Vec<[f64; 2]>,
    pub decay: DecayFit,
    pub gamma: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    pub config: DecompositionConfig,
    pub residual: f64,
    pub covered_residual: f64,
    pub uncovered_count: usize,
    pub sample_count: usize,
    pub cells: Vec<CellSummary>,
}

impl ElementaryDecomposition {
    pub fn cell(&self, j: u32, l: i64) -> Option<&ElementaryCell> {
        self.cells.iter().find(|c| c.j == j && c.l == l)
    }

    /// Serializable view; gamma tables list entries above `threshold` at the first x sample.
    pub fn summary(&self, threshold: f64) -> DecompositionSummary {
        DecompositionSummary {
            config: self.config.clone(),
            residual: self.residual,
            covered_residual: self.covered_residual,
            uncovered_count: self.uncovered.len(),
            sample_count: self.sample_count,
            cells: self
                .cells
                .iter()
                .map(|c| CellSummary {
                    j: c.j,
                    l: c.l,
                    side: c.side,
                    energy: c.energy(),
                    m_table: c.m_table.iter().map(|v| [v.re, v.im]).collect(),
                    decay: c.decay.clone(),
                    gamma: c.gamma_table(0, threshold),
                })
                .collect(),
        }
    }

    fn nearest_x(&self, x: f64) -> usize {
        self.config
            .x_samples
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// `Σ_{j,l} Σ_{a,b} γ_{a,b}(x) e^{i(a ξ' + b η')}` on the cells whose weight is
    /// positive at `(ξ, η)`; `x` is snapped to the nearest stored sample.
    pub fn reconstruct(&self, x: f64, xi: f64, eta: f64) -> C64 {
        let xi_idx = self.nearest_x(x);
        let step = self.config.step;
        let mut total = C64::new(0.0, 0.0);
        for cell in &self.cells {
            if cell_weight(&self.profile, cell.j, cell.l, xi, eta) <= 0.0 {
                continue;
            }
            let per = cell.period(step);
            let u = -PI + 2.0 * PI * (xi - cell.start) / per;
            let v = -PI + 2.0 * PI * (eta - cell.start) / per;
            let p = cell.side as i64;
            for a in -p / 2..p / 2 {
                let ea = C64::from_polar(1.0, a as f64 * u);
                for b in -p / 2..p / 2 {
                    total += cell.gamma_at(xi_idx, a, b) * ea * C64::from_polar(1.0, b as f64 * v);
                }
            }
        }
        total
    }
}

fn psi_hat(profile: &BumpProfile, xi: f64) -> f64 {
    profile.eval(2.0 - xi.abs()) - profile.eval(2.0 - 2.0 * xi.abs())
}

/// `W_{j,l}(ξ, η)`.
pub fn cell_weight(profile: &BumpProfile, j: u32, l: i64, xi: f64, eta: f64) -> f64 {
    let s = 2f64.powi(-(j as i32));
    let chi = profile.eval(1.0 - (l as f64 + s * (xi + eta)).abs());
    if chi == 0.0 {
        return 0.0;
    }
    psi_hat(profile, s * (xi - eta)) * chi
}

fn fft2(buf: &mut [C64], p: usize, inverse: bool) {
    let plan = if inverse { inverse_plan(p) } else { forward_plan(p) };
    plan.process(buf);
    let mut col = vec![C64::new(0.0, 0.0); p];
    for c in 0..p {
        for r in 0..p {
            col[r] = buf[r * p + c];
        }
        plan.process(&mut col);
        for r in 0..p {
            buf[r * p + c] = col[r];
        }
    }
}

fn fit_decay(gamma: &[Vec<C64>], p: usize, order: u32) -> DecayFit {
    let half = (p / 2) as i64;
    let mut radial = vec![0.0f64; p + 1];
    for g in gamma {
        for ra in 0..p {
            let a = if (ra as i64) < half { ra as i64 } else { ra as i64 - p as i64 };
            for rb in 0..p {
                let b = if (rb as i64) < half { rb as i64 } else { rb as i64 - p as i64 };
                let r = (a.abs() + b.abs()) as usize;
                radial[r] = radial[r].max(g[ra * p + rb].norm());
            }
        }
    }
    let cut = p / 4;
    let weight = |r: usize| (1.0 + r as f64).powi(order as i32);
    let constant = (0..=cut).map(|r| radial[r] * weight(r)).fold(0.0, f64::max);
    let floor = 1e-13 * radial.iter().copied().fold(0.0, f64::max);
    let verified = (cut + 1..=p).all(|r| radial[r] <= constant / weight(r) + floor);
    DecayFit {
        order,
        constant,
        verified,
        radial_max: radial,
    }
}

/// Splits `σ` into weighted cells and extracts their Fourier-series coefficients.
pub fn decompose_elementary(
    sigma: &Symbol,
    frame: &LPFrame,
    cfg: &DecompositionConfig,
) -> Result<ElementaryDecomposition> {
    let (j0, j1) = cfg.levels;
    let (l0, l1) = cfg.translations;
    if j1 < j0 || l1 < l0 || cfg.x_samples.is_empty() {
        return Err(Error::InvalidParameter(
            "empty level, translation or x-sample range".into(),
        ));
    }
    if !(cfg.step > 0.0 && cfg.box_radius > 0.0) {
        return Err(Error::InvalidParameter("step and box radius must be positive".into()));
    }
    let per_side = 2.0 * cfg.box_radius / cfg.step;
    if (per_side - per_side.round()).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "box radius {} is not a multiple of half the step {}",
            cfg.box_radius, cfg.step
        )));
    }
    let profile = frame.profile();
    let mut cell_ids = Vec::new();
    for j in j0..=j1 {
        let side = 3.0 * 2f64.powi(j as i32) / cfg.step;
        if (side - side.round()).abs() > 1e-9 || side < 2.0 {
            return Err(Error::InvalidParameter(format!(
                "step {} does not divide the level-{j} box side",
                cfg.step
            )));
        }
        for l in l0..=l1 {
            cell_ids.push((j, l, side.round() as usize));
        }
    }

    let mut cells: Vec<ElementaryCell> = cell_ids
        .into_par_iter()
        .map(|(j, l, p)| {
            let scale = 2f64.powi(j as i32);
            let start = -(l as f64) * scale / 2.0 - 1.5 * scale;
            let gamma: Vec<Vec<C64>> = cfg
                .x_samples
                .iter()
                .map(|&x| {
                    let mut buf = Vec::with_capacity(p * p);
                    for r in 0..p {
                        let xi = start + r as f64 * cfg.step;
                        for c in 0..p {
                            let eta = start + c as f64 * cfg.step;
                            let w = cell_weight(&profile, j, l, xi, eta);
                            buf.push(if w == 0.0 {
                                C64::new(0.0, 0.0)
                            } else {
                                sigma.eval(x, xi, eta) * w
                            });
                        }
                    }
                    fft2(&mut buf, p, false);
                    let norm = 1.0 / (p * p) as f64;
                    for r in 0..p {
                        for c in 0..p {
                            // Nodes sit at −π + 2πk/P, which contributes (−1)^{a+b}.
                            let sign = if (r + c) % 2 == 0 { norm } else { -norm };
                            buf[r * p + c] *= sign;
                        }
                    }
                    buf
                })
                .collect();
            let m_table = gamma.iter().map(|g| g[0]).collect();
            let decay = fit_decay(&gamma, p, cfg.decay_order);
            ElementaryCell {
                j,
                l,
                start,
                side: p,
                gamma,
                m_table,
                decay,
            }
        })
        .collect();
    cells.retain(|c| c.gamma.iter().any(|g| g.iter().any(|v| *v != C64::new(0.0, 0.0))));

    // Node values of every cell, recovered from γ by the inverse transform.
    let node_values: Vec<Vec<Vec<C64>>> = cells
        .par_iter()
        .map(|cell| {
            let p = cell.side;
            cell.gamma
                .iter()
                .map(|g| {
                    let mut buf: Vec<C64> = g
                        .iter()
                        .enumerate()
                        .map(|(k, v)| if (k / p + k % p) % 2 == 0 { *v } else { -*v })
                        .collect();
                    fft2(&mut buf, p, true);
                    buf
                })
                .collect()
        })
        .collect();

    let count = per_side.round() as usize + 1;
    let samples: Vec<f64> = (0..count)
        .map(|i| -cfg.box_radius + i as f64 * cfg.step)
        .collect();
    let mut uncovered = Vec::new();
    for &xi in &samples {
        for &eta in &samples {
            let total: f64 = (j0..=j1)
                .flat_map(|j| (l0..=l1).map(move |l| (j, l)))
                .map(|(j, l)| cell_weight(&profile, j, l, xi, eta))
                .sum();
            if total < 1.0 - 1e-12 {
                uncovered.push((xi, eta));
            }
        }
    }
    if cfg.require_coverage && !uncovered.is_empty() {
        return Err(Error::CoverageGap { uncovered });
    }

    let mut residual: f64 = 0.0;
    let mut covered_residual: f64 = 0.0;
    for (xk, &x) in cfg.x_samples.iter().enumerate() {
        for &xi in &samples {
            for &eta in &samples {
                let mut total = C64::new(0.0, 0.0);
                for (cell, nodes) in cells.iter().zip(&node_values) {
                    if cell_weight(&profile, cell.j, cell.l, xi, eta) <= 0.0 {
                        continue;
                    }
                    let r = ((xi - cell.start) / cfg.step).round() as usize;
                    let c = ((eta - cell.start) / cfg.step).round() as usize;
                    total += nodes[xk][r * cell.side + c];
                }
                let err = (sigma.eval(x, xi, eta) - total).norm();
                residual = residual.max(err);
                let covered = uncovered.binary_search_by(|p| {
                    p.0.total_cmp(&xi).then(p.1.total_cmp(&eta))
                });
                if covered.is_err() {
                    covered_residual = covered_residual.max(err);
                }
            }
        }
    }

    Ok(ElementaryDecomposition {
        config: cfg.clone(),
        profile,
        cells,
        residual,
        covered_residual,
        uncovered,
        sample_count: samples.len() * samples.len(),
    })
}
