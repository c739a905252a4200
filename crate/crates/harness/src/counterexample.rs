//! The unboundedness counterexample: exact identity, norm-ratio growth in
//! the number of terms, and the class-estimate scan.

use bilinop_core::symbols::{
    check_class_estimate, counterexample_symbol, growth_trend, BandCutoff, GrowthTrend,
    LowCutoff, SamplePlan,
};
use bilinop_core::{
    apply_bilinear_with, lebesgue_norm, pointwise_product, synthesize, AliasPolicy, EvalOptions,
    GridSpec, SampledFunction, SpectralCoefficients, Symbol, SymbolClassParams, C64,
};
use serde::Serialize;

use crate::config::{parse_strategy, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::report::{Tabular, Timing};
use crate::trials::loglog_slope;

fn psi1_entries(grid: GridSpec, cutoff: &LowCutoff) -> Result<Vec<(i64, C64)>> {
    cutoff.validate_counterexample()?;
    Ok(grid
        .indices()
        .map(|m| (m, C64::new(cutoff.eval(grid.frequency(m)), 0.0)))
        .filter(|(_, c)| c.re != 0.0)
        .collect())
}

/// `ψ₁` sampled from its lattice coefficients `ψ̂₁(m/L)`.
pub fn psi1(grid: GridSpec, cutoff: &LowCutoff) -> Result<SampledFunction> {
    let entries = psi1_entries(grid, cutoff)?;
    Ok(synthesize(&SpectralCoefficients::sparse(grid, entries)?))
}

/// `f = Σ_{j} a_j e^{i 2^j x} ψ₁(x)`, built by shifting the coefficients of `ψ₁`.
pub fn counterexample_input(
    grid: GridSpec,
    j_min: u32,
    coefficients: &[f64],
    cutoff: &LowCutoff,
) -> Result<SampledFunction> {
    let base = psi1_entries(grid, cutoff)?;
    let mut entries = Vec::new();
    for (i, &a) in coefficients.iter().enumerate() {
        let j = j_min + i as u32;
        let shift = 2f64.powi(j as i32) * grid.scale();
        if (shift - shift.round()).abs() > 1e-9 {
            return Err(HarnessError::Config(format!(
                "2^{j} is not a lattice frequency for L = {}",
                grid.scale()
            )));
        }
        if a == 0.0 {
            continue;
        }
        for &(m, v) in &base {
            entries.push((m + shift.round() as i64, v * a));
        }
    }
    Ok(synthesize(&SpectralCoefficients::sparse(grid, entries)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResult {
    pub n: usize,
    pub scale_l: f64,
    pub j_min: u32,
    pub j_max: u32,
    pub coefficients: Vec<f64>,
    pub coefficient_sum: f64,
    pub strategy: String,
    /// `‖T − (Σa) ψ₁²‖₂ / ‖(Σa) ψ₁²‖₂`, with `‖ψ₁²‖₂` as denominator when `Σa = 0`.
    pub relative_l2_error: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub m: u32,
    pub j_max: u32,
    pub norm_f: f64,
    pub norm_psi1: f64,
    pub norm_t: f64,
    pub ratio: f64,
    pub ratio_over_sqrt_m: f64,
    /// `‖(Σ_j |a_j ψ₁|²)^{1/2}‖_p`, which controls `‖f‖_p` for lacunary sums.
    pub square_function: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthResult {
    pub n: usize,
    pub scale_l: f64,
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `log ratio` against `log m`; the square-root law gives 1/2.
    pub fitted_exponent: f64,
    pub ratio_growth: f64,
    pub expected_growth: f64,
    pub within_window: bool,
    pub monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRow {
    pub class: String,
    pub j_max: u32,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassResult {
    pub rows: Vec<ClassRow>,
    /// Largest fitted constant per `jMax` against `BS^0_{1,1;π/4}`.
    pub exotic_trend: GrowthTrend,
    /// `C_{1,0,0}` per `jMax` against `BS^0_{1,0;π/4}`.
    pub classical_alpha1_trend: GrowthTrend,
    /// Every pair of levels `j < j'` grows by at least `2^{j'−j−1}`.
    pub classical_alpha1_unbounded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub identity: IdentityResult,
    pub growth: Option<GrowthResult>,
    pub class_check: Option<ClassResult>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleRow {
    pub section: &'static str,
    pub m: Option<u32>,
    pub j_max: u32,
    pub class: Option<String>,
    pub alpha: Option<u32>,
    pub beta: Option<u32>,
    pub gamma: Option<u32>,
    pub norm_f: Option<f64>,
    pub norm_psi1: Option<f64>,
    pub norm_t: Option<f64>,
    pub ratio: Option<f64>,
    pub value: f64,
}

impl Tabular for CounterexampleReport {
    type Row = CounterexampleRow;
    fn rows(&self) -> Vec<CounterexampleRow> {
        let blank = |section, j_max, value| CounterexampleRow {
            section,
            m: None,
            j_max,
            class: None,
            alpha: None,
            beta: None,
            gamma: None,
            norm_f: None,
            norm_psi1: None,
            norm_t: None,
            ratio: None,
            value,
        };
        let id = &self.identity;
        let mut rows = vec![blank("identity", id.j_max, id.relative_l2_error)];
        if let Some(g) = &self.growth {
            for r in &g.rows {
                rows.push(CounterexampleRow {
                    m: Some(r.m),
                    norm_f: Some(r.norm_f),
                    norm_psi1: Some(r.norm_psi1),
                    norm_t: Some(r.norm_t),
                    ratio: Some(r.ratio),
                    ..blank("growth", r.j_max, r.ratio_over_sqrt_m)
                });
            }
        }
        if let Some(c) = &self.class_check {
            for r in &c.rows {
                rows.push(CounterexampleRow {
                    class: Some(r.class.clone()),
                    alpha: Some(r.alpha),
                    beta: Some(r.beta),
                    gamma: Some(r.gamma),
                    ..blank("class", r.j_max, r.constant)
                });
            }
        }
        rows
    }
}

fn l2_distance(a: &SampledFunction, b: &SampledFunction) -> Result<f64> {
    Ok(lebesgue_norm(&a.sub(b)?, 2.0)?)
}

/// `T_σ(f, ψ₁)` against `(Σ a_j) ψ₁²`.
pub fn identity(
    grid: GridSpec,
    j_min: u32,
    coefficients: &[f64],
    opts: &EvalOptions,
) -> Result<IdentityResult> {
    let j_max = j_min + coefficients.len() as u32 - 1;
    let sigma = counterexample_symbol(j_min, j_max, &BandCutoff::counterexample_default(), &grid)?;
    let cutoff = LowCutoff::counterexample_default();
    let f = counterexample_input(grid, j_min, coefficients, &cutoff)?;
    let g = psi1(grid, &cutoff)?;
    let t = apply_bilinear_with(&sigma, &f, &g, opts)?;
    let sum: f64 = coefficients.iter().sum();
    let sq = pointwise_product(&g, &g, AliasPolicy::Raise)?;
    let expected = sq.scale(C64::new(sum, 0.0));
    let denom = if sum != 0.0 {
        lebesgue_norm(&expected, 2.0)?
    } else {
        lebesgue_norm(&sq, 2.0)?
    };
    let strategy = bilinop_core::operators::resolve_strategy(
        &sigma,
        bilinop_core::analyze(&f).nnz(),
        bilinop_core::analyze(&g).nnz(),
        grid.n(),
        opts.strategy,
    )?;
    Ok(IdentityResult {
        n: grid.n(),
        scale_l: grid.scale(),
        j_min,
        j_max,
        coefficients: coefficients.to_vec(),
        coefficient_sum: sum,
        strategy: strategy.name().to_string(),
        relative_l2_error: l2_distance(&t, &expected)? / denom,
        max_abs_error: t.max_abs_diff(&expected)?,
    })
}

/// Ratio `‖T(f, ψ₁)‖_t / (‖f‖_p ‖ψ₁‖_q)` for `a_j ≡ 1` and `m` terms.
pub fn growth(
    grid: GridSpec,
    j_min: u32,
    m_values: &[u32],
    (p, q, t): (f64, f64, f64),
    window: f64,
) -> Result<GrowthResult> {
    let cutoff = LowCutoff::counterexample_default();
    let g = psi1(grid, &cutoff)?;
    let norm_psi1 = lebesgue_norm(&g, q)?;
    let mut rows = Vec::new();
    for &m in m_values {
        if m == 0 {
            return Err(HarnessError::Config("m must be positive".into()));
        }
        let j_max = j_min + m - 1;
        let sigma =
            counterexample_symbol(j_min, j_max, &BandCutoff::counterexample_default(), &grid)?;
        let ones = vec![1.0; m as usize];
        let f = counterexample_input(grid, j_min, &ones, &cutoff)?;
        let out = apply_bilinear_with(&sigma, &f, &g, &EvalOptions::default())?;
        let norm_f = lebesgue_norm(&f, p)?;
        let norm_t = lebesgue_norm(&out, t)?;
        let ratio = norm_t / (norm_f * norm_psi1);
        let sq = g.scale(C64::new((m as f64).sqrt(), 0.0));
        rows.push(GrowthRow {
            m,
            j_max,
            norm_f,
            norm_psi1,
            norm_t,
            ratio,
            ratio_over_sqrt_m: ratio / (m as f64).sqrt(),
            square_function: lebesgue_norm(&sq, p)?,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.ratio)).collect();
    let (first, last) = (rows.first(), rows.last());
    let (ratio_growth, expected_growth) = match (first, last) {
        (Some(a), Some(b)) => (b.ratio / a.ratio, (b.m as f64 / a.m as f64).sqrt()),
        _ => (1.0, 1.0),
    };
    Ok(GrowthResult {
        n: grid.n(),
        scale_l: grid.scale(),
        fitted_exponent: loglog_slope(&pts),
        ratio_growth,
        expected_growth,
        within_window: (ratio_growth / expected_growth - 1.0).abs() <= window,
        monotone: rows.windows(2).all(|w| w[1].ratio > w[0].ratio),
        rows,
    })
}

fn class_label(p: &SymbolClassParams) -> String {
    format!("BS^{}_{{{},{};pi/4}}", p.order, p.rho, p.delta)
}

/// Fitted class constants of the counterexample symbol as `jMax` grows.
pub fn class_scan(
    grid: GridSpec,
    j_min: u32,
    j_max_values: &[u32],
    max_shell: u32,
    max_order: u32,
    seed: u64,
) -> Result<ClassResult> {
    let quarter = Some(std::f64::consts::FRAC_PI_4);
    let exotic = SymbolClassParams::new(0.0, 1.0, 1.0, quarter)?;
    let classical = SymbolClassParams::new(0.0, 1.0, 0.0, quarter)?;
    let plan = SamplePlan::for_grid(&grid, max_shell, seed);
    let mut rows = Vec::new();
    let mut exotic_max = Vec::new();
    let mut alpha1 = Vec::new();
    for &j_max in j_max_values {
        let sigma: Symbol =
            counterexample_symbol(j_min, j_max, &BandCutoff::counterexample_default(), &grid)?;
        for (params, sink) in [(&exotic, 0), (&classical, 1)] {
            let rep = check_class_estimate(&sigma, params, max_order, &plan, None)?;
            for (key, &constant) in &rep.constants {
                let abc: Vec<u32> = key.split('.').map(|v| v.parse().unwrap_or(0)).collect();
                rows.push(ClassRow {
                    class: class_label(params),
                    j_max,
                    alpha: abc[0],
                    beta: abc[1],
                    gamma: abc[2],
                    constant,
                });
            }
            if sink == 0 {
                exotic_max.push(rep.max_constant());
            } else {
                alpha1.push(rep.constant(1, 0, 0).unwrap_or(f64::NAN));
            }
        }
    }
    let mut unbounded = alpha1.len() > 1;
    for i in 0..alpha1.len() {
        for k in i + 1..alpha1.len() {
            let dj = j_max_values[k] as i32 - j_max_values[i] as i32;
            if alpha1[k] / alpha1[i] < 2f64.powi(dj - 1) {
                unbounded = false;
            }
        }
    }
    Ok(ClassResult {
        rows,
        exotic_trend: growth_trend(&exotic_max),
        classical_alpha1_trend: growth_trend(&alpha1),
        classical_alpha1_unbounded: unbounded,
    })
}

pub fn run(cfg: &ExperimentConfig, timing: &mut Timing) -> Result<CounterexampleReport> {
    cfg.validate()?;
    let cc = &cfg.counterexample;
    if cc.j_max < cc.j_min {
        return Err(HarnessError::Config(format!(
            "jMax = {} below jMin = {}",
            cc.j_max, cc.j_min
        )));
    }
    let grid = cfg.grid()?;
    let opts = EvalOptions {
        strategy: cc.strategy.as_deref().map(parse_strategy).transpose()?,
        ..EvalOptions::default()
    };
    let coefficients = cc.pattern.coefficients(cc.j_min, cc.j_max);
    let identity = timing.time("identity", || identity(grid, cc.j_min, &coefficients, &opts))?;
    let growth = if cc.growth.enabled {
        let g = GridSpec::new(cc.growth.n, cc.growth.scale_l)?;
        Some(timing.time("growth", || {
            growth(g, cc.j_min, &cc.growth.m_values, (cfg.p, cfg.q, cfg.t), cc.growth.window)
        })?)
    } else {
        None
    };
    let class_check = if cc.class_check.enabled {
        let c = &cc.class_check;
        Some(timing.time("class_check", || {
            class_scan(grid, cc.j_min, &c.j_max_values, c.max_shell, c.max_order, cfg.seed)
        })?)
    } else {
        None
    };
    Ok(CounterexampleReport {
        identity,
        growth,
        class_check,
    })
}
