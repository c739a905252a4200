//! Bilinear operators, Sobolev norms and paraproducts.

mod bilinear;
mod convolution;
mod paraproduct;
mod sobolev;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::LPFrame;
use crate::grid::{AliasPolicy, SampledFunction};
use crate::C64;

pub use bilinear::{apply_bilinear, apply_bilinear_with, resolve_strategy};
pub use convolution::{
    apply_diagonal_convolution, convolution_plan, convolution_weights, truncation_radius,
    ConvolutionWeights,
};
pub use paraproduct::{
    classical_paraproduct, improved_paraproduct, improved_paraproduct_with, multiplication_defect,
    multiplication_defect_explicit, paraproduct_truncation_mass,
};
pub use sobolev::sobolev_norm;

/// Hölder triple `1/p + 1/q = 1/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl ExponentTriple {
    pub fn new(p: f64, q: f64, t: f64) -> Result<Self> {
        for v in [p, q, t] {
            if !(v > 1.0 && v.is_finite()) {
                return Err(Error::InvalidExponents(format!("{v} is not in (1, inf)")));
            }
        }
        if (1.0 / p + 1.0 / q - 1.0 / t).abs() > 1e-12 {
            return Err(Error::InvalidExponents(format!(
                "1/{p} + 1/{q} != 1/{t}"
            )));
        }
        Ok(Self { p, q, t })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SobolevParams<'a> {
    pub s: f64,
    pub p: f64,
    pub frame: &'a LPFrame,
}

impl<'a> SobolevParams<'a> {
    pub fn new(s: f64, p: f64, frame: &'a LPFrame) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("smoothness s = {s} must be >= 0")));
        }
        if p.is_nan() || p <= 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self { s, p, frame })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalStrategy {
    DenseAccumulate,
    SparseAccumulate,
    DiagonalConvolution,
    PerPointQuadrature,
}

impl EvalStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            EvalStrategy::DenseAccumulate => "DenseAccumulate",
            EvalStrategy::SparseAccumulate => "SparseAccumulate",
            EvalStrategy::DiagonalConvolution => "DiagonalConvolution",
            EvalStrategy::PerPointQuadrature => "PerPointQuadrature",
        }
    }
}

/// Knobs for [`apply_bilinear_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// `None` picks a strategy from the symbol form and the input sparsity.
    pub strategy: Option<EvalStrategy>,
    pub alias: AliasPolicy,
    /// Fixed quadrature radius for the diagonal convolution path.
    pub radius: Option<usize>,
    /// Admissible tail of the convolution weights, relative to their L¹ mass.
    pub tail_tolerance: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            strategy: None,
            alias: AliasPolicy::Raise,
            radius: None,
            tail_tolerance: 1e-10,
        }
    }
}

impl EvalOptions {
    pub fn with_strategy(strategy: EvalStrategy) -> Self {
        Self {
            strategy: Some(strategy),
            ..Self::default()
        }
    }
}

/// `⟨u, v⟩ = h Σ u(x_n) v(x_n)`, without conjugation.
pub fn pairing(u: &SampledFunction, v: &SampledFunction) -> Result<C64> {
    u.grid().ensure_same(v.grid())?;
    let sum: C64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    Ok(sum * u.grid().spacing())
}
