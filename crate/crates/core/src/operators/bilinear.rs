//! `T_σ(f, g)(x) = Σ_{ξ,η} σ(x, ξ, η) c^f_ξ c^g_η e^{ix(ξ+η)}`.

use rayon::prelude::*;

use super::convolution::diagonal_convolution_on;
use super::{EvalOptions, EvalStrategy};
use crate::error::{Error, Result};
use crate::grid::{
    analyze, sum_support, synthesize, AliasPolicy, GridSpec, SampledFunction,
    SpectralCoefficients, SPARSE_REL_TOL, SUPPORT_REL_TOL,
};
use crate::symbols::{Orientation, Symbol, SymbolForm};
use crate::C64;

/// Frequency kernel of one accumulation pass.
#[derive(Clone, Copy)]
enum Kernel<'a> {
    Pair(&'a (dyn Fn(f64, f64) -> C64 + Sync)),
    Diff(&'a (dyn Fn(f64) -> C64 + Sync), Orientation),
}

impl Kernel<'_> {
    fn eval(&self, xi: f64, eta: f64) -> C64 {
        match self {
            Kernel::Pair(f) => f(xi, eta),
            Kernel::Diff(k, o) => k(o.apply(xi, eta)),
        }
    }
}

/// Picks the evaluation path for `sigma`.
pub fn resolve_strategy(
    sigma: &Symbol,
    nnz_f: usize,
    nnz_g: usize,
    n: usize,
    requested: Option<EvalStrategy>,
) -> Result<EvalStrategy> {
    let form = sigma.form();
    let separable = match form {
        SymbolForm::Multiplier(_) | SymbolForm::DiagonalKernel(_) => true,
        SymbolForm::ModulationInvariant { terms, .. } => terms.is_some(),
        _ => false,
    };
    let mismatch = |s: EvalStrategy| Error::StrategyMismatch {
        strategy: s.name(),
        form: form.name(),
    };
    match requested {
        None if separable => Ok(if (nnz_f as u128) * (nnz_g as u128) < 64 * n as u128 {
            EvalStrategy::SparseAccumulate
        } else {
            EvalStrategy::DenseAccumulate
        }),
        None => Ok(EvalStrategy::PerPointQuadrature),
        Some(s @ (EvalStrategy::DenseAccumulate | EvalStrategy::SparseAccumulate)) => {
            if separable {
                Ok(s)
            } else {
                Err(mismatch(s))
            }
        }
        Some(EvalStrategy::DiagonalConvolution) => match form {
            SymbolForm::DiagonalKernel(_) => Ok(EvalStrategy::DiagonalConvolution),
            _ => Err(mismatch(EvalStrategy::DiagonalConvolution)),
        },
        Some(EvalStrategy::PerPointQuadrature) => Ok(EvalStrategy::PerPointQuadrature),
    }
}

/// Evaluates `T_σ(f, g)` with the given strategy, or an automatic choice for `None`.
pub fn apply_bilinear(
    sigma: &Symbol,
    f: &SampledFunction,
    g: &SampledFunction,
    strategy: Option<EvalStrategy>,
) -> Result<SampledFunction> {
    apply_bilinear_with(
        sigma,
        f,
        g,
        &EvalOptions {
            strategy,
            ..EvalOptions::default()
        },
    )
}

fn regrid(c: &SpectralCoefficients, grid: GridSpec) -> Result<SpectralCoefficients> {
    if c.grid() == &grid {
        Ok(c.clone())
    } else {
        SpectralCoefficients::sparse(grid, c.nonzero(0.0))
    }
}

pub fn apply_bilinear_with(
    sigma: &Symbol,
    f: &SampledFunction,
    g: &SampledFunction,
    opts: &EvalOptions,
) -> Result<SampledFunction> {
    let grid = *f.grid();
    grid.ensure_same(g.grid())?;
    let cf = analyze(f);
    let cg = analyze(g);
    let nnz_f = cf.nnz();
    let nnz_g = cg.nnz();
    let strategy = resolve_strategy(sigma, nnz_f, nnz_g, grid.n(), opts.strategy)?;

    let work = match sum_support(&grid, cf.support(SUPPORT_REL_TOL), cg.support(SUPPORT_REL_TOL)) {
        Ok(_) => grid,
        Err(out) => match opts.alias {
            AliasPolicy::Raise => {
                return Err(Error::AliasingRisk {
                    min: out.min,
                    max: out.max,
                    half: grid.half(),
                })
            }
            AliasPolicy::Upsample => grid.refined(2)?,
        },
    };
    if nnz_f == 0 || nnz_g == 0 {
        return Ok(SampledFunction::zeros(work));
    }
    let cf = regrid(&cf, work)?;
    let cg = regrid(&cg, work)?;

    match strategy {
        EvalStrategy::DenseAccumulate | EvalStrategy::SparseAccumulate => {
            let sparse = strategy == EvalStrategy::SparseAccumulate;
            separable_terms(sigma, &cf, &cg, sparse)
        }
        EvalStrategy::DiagonalConvolution => {
            let SymbolForm::DiagonalKernel(m) = sigma.form() else {
                unreachable!("strategy resolution admits only diagonal kernels here")
            };
            let (fw, gw) = if work == grid {
                (f.clone(), g.clone())
            } else {
                (synthesize(&cf), synthesize(&cg))
            };
            diagonal_convolution_on(&**m, &fw, &gw, &cf, &cg, opts)
        }
        EvalStrategy::PerPointQuadrature => Ok(per_point(sigma, &cf, &cg)),
    }
}

fn separable_terms(
    sigma: &Symbol,
    cf: &SpectralCoefficients,
    cg: &SpectralCoefficients,
    sparse: bool,
) -> Result<SampledFunction> {
    let grid = *cf.grid();
    let run = |k: Kernel| -> Option<SampledFunction> {
        let slots = if sparse {
            accumulate_sparse(k, cf, cg)
        } else {
            accumulate_dense(k, cf, cg)
        };
        if slots.iter().all(|c| *c == C64::new(0.0, 0.0)) {
            return None;
        }
        let spec = SpectralCoefficients::from_slots(grid, slots).expect("slot count matches grid");
        Some(synthesize(&spec))
    };
    match sigma.form() {
        SymbolForm::Multiplier(m) => {
            Ok(run(Kernel::Pair(&**m)).unwrap_or_else(|| SampledFunction::zeros(grid)))
        }
        SymbolForm::DiagonalKernel(m) => Ok(run(Kernel::Diff(&**m, Orientation::XiMinusEta))
            .unwrap_or_else(|| SampledFunction::zeros(grid))),
        SymbolForm::ModulationInvariant {
            orientation,
            terms: Some(terms),
            ..
        } => {
            let mut out = SampledFunction::zeros(grid);
            for term in terms {
                let Some(part) = run(Kernel::Diff(&*term.kernel, *orientation)) else {
                    continue;
                };
                for (n, (o, v)) in out.values_mut().iter_mut().zip(part.values()).enumerate() {
                    *o += (term.coefficient)(grid.point(n)) * v;
                }
            }
            Ok(out)
        }
        other => Err(Error::StrategyMismatch {
            strategy: if sparse { "SparseAccumulate" } else { "DenseAccumulate" },
            form: other.name(),
        }),
    }
}

/// `out[ω] = Σ_a σ(a, ω − a) c_a d_{ω−a}` over every lattice pair, in slot order.
fn accumulate_dense(k: Kernel, cf: &SpectralCoefficients, cg: &SpectralCoefficients) -> Vec<C64> {
    let grid = *cf.grid();
    let n = grid.n() as i64;
    let half = grid.half();
    let fs = cf.to_slots();
    let gs = cg.to_slots();
    let inv_l = 1.0 / grid.scale();
    // For difference kernels, tabulate k over every reachable difference index.
    let table: Option<Vec<C64>> = match k {
        Kernel::Diff(kern, o) => Some(
            (-2 * n..=2 * n)
                .map(|d| {
                    let u = d as f64 * inv_l;
                    kern(match o {
                        Orientation::XiMinusEta => u,
                        Orientation::EtaMinusXi => -u,
                    })
                })
                .collect(),
        ),
        Kernel::Pair(_) => None,
    };
    let values: Vec<(i64, C64)> = (-half..half)
        .into_par_iter()
        .map(|w| {
            let lo = (-half).max(w - half + 1);
            let hi = (half - 1).min(w + half);
            let mut acc = C64::new(0.0, 0.0);
            for a in lo..=hi {
                let b = w - a;
                let s = match &table {
                    Some(t) => t[(a - b + 2 * n) as usize],
                    None => k.eval(a as f64 * inv_l, b as f64 * inv_l),
                };
                acc += s * fs[grid.slot(a)] * gs[grid.slot(b)];
            }
            (w, acc)
        })
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); grid.n()];
    for (w, v) in values {
        out[grid.slot(w)] = v;
    }
    out
}

/// Same sum restricted to the non-negligible coefficients.
fn accumulate_sparse(k: Kernel, cf: &SpectralCoefficients, cg: &SpectralCoefficients) -> Vec<C64> {
    let grid = *cf.grid();
    let nf = cf.nonzero(SPARSE_REL_TOL);
    let ng = cg.nonzero(SPARSE_REL_TOL);
    let inv_l = 1.0 / grid.scale();
    let mut out = vec![C64::new(0.0, 0.0); grid.n()];
    for &(a, ca) in &nf {
        let xi = a as f64 * inv_l;
        for &(b, cb) in &ng {
            let w = a + b;
            if !grid.contains_index(w) {
                continue;
            }
            let s = k.eval(xi, b as f64 * inv_l);
            if s != C64::new(0.0, 0.0) {
                out[grid.slot(w)] += s * ca * cb;
            }
        }
    }
    out
}

/// Literal double sum at every grid point.
fn per_point(sigma: &Symbol, cf: &SpectralCoefficients, cg: &SpectralCoefficients) -> SampledFunction {
    let grid = *cf.grid();
    let nf = cf.nonzero(SPARSE_REL_TOL);
    let ng = cg.nonzero(SPARSE_REL_TOL);
    let values: Vec<C64> = (0..grid.n())
        .into_par_iter()
        .map(|n| {
            let x = grid.point(n);
            let mut acc = C64::new(0.0, 0.0);
            for &(a, ca) in &nf {
                let xi = grid.frequency(a);
                for &(b, cb) in &ng {
                    let eta = grid.frequency(b);
                    let s = sigma.eval(x, xi, eta);
                    if s != C64::new(0.0, 0.0) {
                        acc += s * ca * cb * C64::from_polar(1.0, x * (xi + eta));
                    }
                }
            }
            acc
        })
        .collect();
    SampledFunction::new(grid, values).expect("length matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::pointwise_product;

    fn band(grid: GridSpec, idx: &[(i64, f64, f64)]) -> SampledFunction {
        synthesize(
            &SpectralCoefficients::sparse(grid, idx.iter().map(|&(m, re, im)| (m, C64::new(re, im))))
                .unwrap(),
        )
    }

    #[test]
    fn unit_symbol_is_the_product() {
        let grid = GridSpec::new(64, 2.0).unwrap();
        let f = band(grid, &[(1, 1.0, 0.5), (-3, 0.25, -1.0), (7, 0.1, 0.0)]);
        let g = band(grid, &[(0, 2.0, 0.0), (4, -0.5, 0.5)]);
        let fg = pointwise_product(&f, &g, AliasPolicy::Raise).unwrap();
        for s in [
            EvalStrategy::DenseAccumulate,
            EvalStrategy::SparseAccumulate,
            EvalStrategy::PerPointQuadrature,
        ] {
            let t = apply_bilinear(&Symbol::one(), &f, &g, Some(s)).unwrap();
            assert!(t.max_abs_diff(&fg).unwrap() < 1e-12, "{s:?}");
        }
    }

    #[test]
    fn strategy_rules() {
        let general = Symbol::general(|_, _, _| C64::new(1.0, 0.0));
        assert!(matches!(
            resolve_strategy(&general, 4, 4, 64, Some(EvalStrategy::DenseAccumulate)),
            Err(Error::StrategyMismatch { .. })
        ));
        assert_eq!(
            resolve_strategy(&general, 4, 4, 64, None).unwrap(),
            EvalStrategy::PerPointQuadrature
        );
        assert!(matches!(
            resolve_strategy(&Symbol::one(), 4, 4, 64, Some(EvalStrategy::DiagonalConvolution)),
            Err(Error::StrategyMismatch { .. })
        ));
        assert_eq!(
            resolve_strategy(&Symbol::one(), 8, 8, 64, None).unwrap(),
            EvalStrategy::SparseAccumulate
        );
        assert_eq!(
            resolve_strategy(&Symbol::one(), 64, 64, 64, None).unwrap(),
            EvalStrategy::DenseAccumulate
        );
    }

    #[test]
    fn aliasing_policy() {
        let grid = GridSpec::new(32, 1.0).unwrap();
        let f = SampledFunction::harmonic(grid, 10);
        let g = SampledFunction::harmonic(grid, 9);
        assert!(matches!(
            apply_bilinear(&Symbol::one(), &f, &g, None),
            Err(Error::AliasingRisk { max: 19, .. })
        ));
        let opts = EvalOptions {
            alias: AliasPolicy::Upsample,
            ..EvalOptions::default()
        };
        let t = apply_bilinear_with(&Symbol::one(), &f, &g, &opts).unwrap();
        assert_eq!(t.grid().n(), 64);
        let expected = SampledFunction::harmonic(*t.grid(), 19);
        assert!(t.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn zero_input_gives_zero() {
        let grid = GridSpec::new(32, 1.0).unwrap();
        let f = SampledFunction::zeros(grid);
        let g = SampledFunction::harmonic(grid, 3);
        let t = apply_bilinear(&Symbol::one(), &f, &g, None).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }
}
