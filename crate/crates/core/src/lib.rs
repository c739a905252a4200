//! Spectral evaluation of bilinear pseudodifferential operators on periodic
//! one-dimensional grids.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: sampled functions, Fourier analysis/synthesis, Lebesgue norms.
//! - [`frames`]: the Littlewood-Paley filter bank and the half-line profile Θ̂.
//! - [`symbols`]: symbol representations, named constructors, the class
//!   estimate checker and the elementary decomposition.
//! - [`operators`]: bilinear evaluation, Sobolev norms, paraproducts and the
//!   multiplication defect.
//! - [`io`]: the columnar text format for sampled and spectral data.

pub mod error;
pub mod frames;
pub mod grid;
pub mod io;
pub mod operators;
pub mod symbols;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use frames::{band_project, BumpProfile, LPFrame, PartitionReport, ThetaProfile};
pub use grid::{
    analyze, lebesgue_norm, pointwise_product, synthesize, AliasPolicy, GridSpec,
    SampledFunction, SpectralCoefficients, SpectralSupport,
};
pub use operators::{
    apply_bilinear, apply_bilinear_with, apply_diagonal_convolution, classical_paraproduct,
    improved_paraproduct, multiplication_defect, pairing, sobolev_norm, EvalOptions,
    EvalStrategy, ExponentTriple, SobolevParams,
};
pub use symbols::{Orientation, Symbol, SymbolClassParams, SymbolForm};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
