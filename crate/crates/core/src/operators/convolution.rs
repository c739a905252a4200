//! Diagonal kernels `σ(ξ, η) = m(ξ − η)` in convolution form
//!
//! ```text
//! T(f, g)(x_n) = Σ_k w_k f(x_{n−k}) g(x_{n+k}),   w = IDFT(m on the lattice) / N
//! ```
//!
//! truncated to `|k| ≤ R`.

use super::EvalOptions;
use crate::error::{Error, Result};
use crate::grid::{
    analyze, inverse_plan, sum_support, GridSpec, SampledFunction, SpectralCoefficients,
    SUPPORT_REL_TOL,
};
use crate::C64;

/// Spatial weights of a diagonal kernel and their truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionWeights {
    /// `w_k` in FFT slot order.
    pub weights: Vec<C64>,
    pub radius: usize,
    /// Weight mass beyond `radius`, relative to the total L¹ mass.
    pub relative_tail: f64,
}

/// `w_k = (1/N) Σ_u m(u/L) e^{2πi k u / N}`.
pub fn convolution_weights(m: &(dyn Fn(f64) -> C64 + Sync), grid: &GridSpec) -> Vec<C64> {
    let n = grid.n();
    let mut buf: Vec<C64> = (0..n)
        .map(|slot| m(grid.frequency(grid.index_of_slot(slot))))
        .collect();
    inverse_plan(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    for v in &mut buf {
        *v *= inv;
    }
    buf
}

/// Relative tail mass beyond each radius `0..=N/2`.
fn relative_tails(weights: &[C64]) -> Vec<f64> {
    let n = weights.len();
    let half = n / 2;
    let mut mass = vec![0.0; half + 1];
    for (slot, w) in weights.iter().enumerate() {
        let k = if slot < half { slot } else { n - slot };
        mass[k] += w.norm();
    }
    let total: f64 = mass.iter().sum();
    let mut tails = vec![0.0; half + 1];
    let mut acc = 0.0;
    for r in (0..half).rev() {
        acc += mass[r + 1];
        tails[r] = acc;
    }
    if total > 0.0 {
        for t in &mut tails {
            *t /= total;
        }
    }
    tails
}

/// Smallest radius whose excluded relative tail is below `tolerance`, with that tail.
pub fn truncation_radius(weights: &[C64], tolerance: f64) -> (usize, f64) {
    let tails = relative_tails(weights);
    let r = tails.iter().position(|&t| t < tolerance).unwrap_or(tails.len() - 1);
    (r, tails[r])
}

fn plan_weights(
    m: &(dyn Fn(f64) -> C64 + Sync),
    grid: &GridSpec,
    opts: &EvalOptions,
) -> Result<ConvolutionWeights> {
    let weights = convolution_weights(m, grid);
    let tails = relative_tails(&weights);
    let (radius, relative_tail) = match opts.radius {
        Some(r) => {
            let r = r.min(tails.len() - 1);
            if tails[r] > opts.tail_tolerance {
                return Err(Error::TruncationTooAggressive {
                    radius: r,
                    tail: tails[r],
                    tolerance: opts.tail_tolerance,
                });
            }
            (r, tails[r])
        }
        None => truncation_radius(&weights, opts.tail_tolerance),
    };
    Ok(ConvolutionWeights {
        weights,
        radius,
        relative_tail,
    })
}

/// Differences `ξ − η` outside the lattice are represented by their wrap mod N;
/// that is only valid where `m` agrees with its wrapped values.
fn check_wrap(
    m: &(dyn Fn(f64) -> C64 + Sync),
    grid: &GridSpec,
    cf: &SpectralCoefficients,
    cg: &SpectralCoefficients,
) -> Result<()> {
    let (Some(sf), Some(sg)) = (cf.support(SUPPORT_REL_TOL), cg.support(SUPPORT_REL_TOL)) else {
        return Ok(());
    };
    let lo = sf.min - sg.max;
    let hi = sf.max - sg.min;
    let half = grid.half();
    if lo >= -half && hi < half {
        return Ok(());
    }
    let peak = grid
        .indices()
        .map(|u| m(grid.frequency(u)).norm())
        .fold(0.0, f64::max);
    for u in lo..=hi {
        if grid.contains_index(u) {
            continue;
        }
        let wrapped = grid.index_of_slot(grid.slot(u));
        let d = (m(grid.frequency(u)) - m(grid.frequency(wrapped))).norm();
        if d > 1e-14 * peak {
            return Err(Error::AliasingRisk {
                min: lo,
                max: hi,
                half,
            });
        }
    }
    Ok(())
}

pub(crate) fn diagonal_convolution_on(
    m: &(dyn Fn(f64) -> C64 + Sync),
    f: &SampledFunction,
    g: &SampledFunction,
    cf: &SpectralCoefficients,
    cg: &SpectralCoefficients,
    opts: &EvalOptions,
) -> Result<SampledFunction> {
    let grid = *f.grid();
    check_wrap(m, &grid, cf, cg)?;
    let plan = plan_weights(m, &grid, opts)?;
    let n = grid.n() as i64;
    let r = plan.radius as i64;
    let fv = f.values();
    let gv = g.values();
    let values = (0..n)
        .map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for k in -r..=r {
                let w = plan.weights[k.rem_euclid(n) as usize];
                acc += w * fv[(i - k).rem_euclid(n) as usize] * gv[(i + k).rem_euclid(n) as usize];
            }
            acc
        })
        .collect();
    SampledFunction::new(grid, values)
}

/// `T(f, g)` for `σ(ξ, η) = m(ξ − η)` by truncated spatial quadrature.
///
/// The output frequencies must fit on the grid; use the bilinear entry point
/// for the upsampling policy.
pub fn apply_diagonal_convolution(
    m: impl Fn(f64) -> C64 + Sync,
    f: &SampledFunction,
    g: &SampledFunction,
    opts: &EvalOptions,
) -> Result<SampledFunction> {
    let grid = *f.grid();
    grid.ensure_same(g.grid())?;
    let cf = analyze(f);
    let cg = analyze(g);
    if let Err(out) = sum_support(&grid, cf.support(SUPPORT_REL_TOL), cg.support(SUPPORT_REL_TOL)) {
        return Err(Error::AliasingRisk {
            min: out.min,
            max: out.max,
            half: grid.half(),
        });
    }
    diagonal_convolution_on(&m, f, g, &cf, &cg, opts)
}

/// Radius and weights the convolution path would use for `m` on `grid`.
pub fn convolution_plan(
    m: impl Fn(f64) -> C64 + Sync,
    grid: &GridSpec,
    opts: &EvalOptions,
) -> Result<ConvolutionWeights> {
    plan_weights(&m, grid, opts)
}
