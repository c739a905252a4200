//! Classical and improved paraproducts and the multiplication defect.

use super::bilinear::apply_bilinear_with;
use super::EvalOptions;
use crate::error::Result;
use crate::frames::{LPFrame, ThetaProfile};
use crate::grid::{
    analyze, pointwise_product, synthesize, AliasPolicy, SampledFunction, SPARSE_REL_TOL,
};
use crate::symbols::{defect_symbol, improved_paraproduct_symbol};
use crate::C64;

/// `Π_b(f) = Σ_{k=−kMin}^{kMax} S_{k−2} f · Δ_k b`, where `S_j` has symbol
/// `Φ̂(2^{−j}·)` and `Δ_k` has symbol `Ψ̂(2^{−k}·)`. Each term pairs `b`
/// frequencies `|ξ| ≥ 2^{k−1}` with `f` frequencies `|η| ≤ 2^{k−2}`.
pub fn classical_paraproduct(
    b: &SampledFunction,
    f: &SampledFunction,
    frame: &LPFrame,
) -> Result<SampledFunction> {
    let grid = *frame.grid();
    grid.ensure_same(b.grid())?;
    grid.ensure_same(f.grid())?;
    let cb = analyze(b).pruned(SPARSE_REL_TOL);
    let cf = analyze(f).pruned(SPARSE_REL_TOL);
    let mut out = SampledFunction::zeros(grid);
    for k in -frame.k_min()..=frame.k_max() {
        let db = cb.apply_multiplier(|xi| C64::new(frame.level_hat(k, xi), 0.0));
        if db.max_abs() == 0.0 {
            continue;
        }
        let sf = cf.apply_multiplier(|xi| C64::new(frame.low_hat(k - 2, xi), 0.0));
        if sf.max_abs() == 0.0 {
            continue;
        }
        let term = pointwise_product(&synthesize(&sf), &synthesize(&db), AliasPolicy::Raise)?;
        out.axpy(C64::new(1.0, 0.0), &term)?;
    }
    Ok(out)
}

/// Relative ℓ² mass of the non-constant coefficients of `b` that the
/// truncated level range `−kMin..=kMax` does not reach.
pub fn paraproduct_truncation_mass(b: &SampledFunction, frame: &LPFrame) -> Result<f64> {
    frame.grid().ensure_same(b.grid())?;
    let mut lost = 0.0;
    let mut total = 0.0;
    for (m, c) in analyze(b).pruned(SPARSE_REL_TOL).entries() {
        if m == 0 {
            continue;
        }
        let xi = frame.grid().frequency(m);
        let covered: f64 = (-frame.k_min()..=frame.k_max())
            .map(|k| frame.level_hat(k, xi))
            .sum();
        total += c.norm_sqr();
        lost += c.norm_sqr() * (1.0 - covered).powi(2);
    }
    Ok(if total > 0.0 { (lost / total).sqrt() } else { 0.0 })
}

/// `Π̃_b(f)`: the multiplier `Θ̂(ξ−η)Θ̂(ξ+η) + Θ̂(η−ξ)Θ̂(−ξ−η)` applied to `(b, f)`.
pub fn improved_paraproduct(
    b: &SampledFunction,
    f: &SampledFunction,
    theta: &ThetaProfile,
) -> Result<SampledFunction> {
    improved_paraproduct_with(b, f, theta, &EvalOptions::default())
}

pub fn improved_paraproduct_with(
    b: &SampledFunction,
    f: &SampledFunction,
    theta: &ThetaProfile,
    opts: &EvalOptions,
) -> Result<SampledFunction> {
    apply_bilinear_with(&improved_paraproduct_symbol(*theta), b, f, opts)
}

/// `D(f, g) = f g − Π̃_f(g) − Π̃_g(f)`.
pub fn multiplication_defect(
    f: &SampledFunction,
    g: &SampledFunction,
    theta: &ThetaProfile,
) -> Result<SampledFunction> {
    let fg = pointwise_product(f, g, AliasPolicy::Raise)?;
    let a = improved_paraproduct(f, g, theta)?;
    let b = improved_paraproduct(g, f, theta)?;
    fg.sub(&a)?.sub(&b)
}

/// `D(f, g)` through the explicit multiplier `1 − σ_Π̃(ξ, η) − σ_Π̃(η, ξ)`.
pub fn multiplication_defect_explicit(
    f: &SampledFunction,
    g: &SampledFunction,
    theta: &ThetaProfile,
    opts: &EvalOptions,
) -> Result<SampledFunction> {
    apply_bilinear_with(&defect_symbol(*theta), f, g, opts)
}
