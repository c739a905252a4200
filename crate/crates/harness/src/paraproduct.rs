//! Paraproduct studies: the classical `Π_b` against `‖b‖_∞`, the improved
//! `Π̃_b` against `‖b‖_{W^{ε,p}}`, and the regularity of the multiplication
//! defect compared with the classical remainder.

use bilinop_core::operators::{improved_paraproduct_with, paraproduct_truncation_mass};
use bilinop_core::{
    classical_paraproduct, lebesgue_norm, EvalOptions, EvalStrategy, multiplication_defect,
    pointwise_product, sobolev_norm, AliasPolicy, GridSpec, LPFrame, SampledFunction,
    SobolevParams, ThetaProfile, C64,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::{Tabular, Timing};
use crate::trials::{band_limited, loglog_slope, trial_rng, unit_sobolev, Band};

#[derive(Debug, Clone, Serialize)]
pub struct ParaproductRow {
    /// One of [`STUDIES`].
    pub study: &'static str,
    pub n: usize,
    pub scale: f64,
    pub trial: usize,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

pub const STUDIES: [&str; 6] = [
    "classical",
    "classical_as_written",
    "improved",
    "defect",
    "classical_remainder",
    "product",
];

#[derive(Debug, Clone, Serialize)]
pub struct StudySummary {
    pub study: &'static str,
    pub n: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Slope of `log mean ratio` against `log λ`.
    pub slope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParaproductReport {
    pub epsilon: f64,
    /// `Π_b(f)` for constant `b`, which must vanish.
    pub constant_b_max: f64,
    /// Largest relative `ℓ²` mass of `b` outside the covered levels.
    pub truncation_mass: f64,
    pub summaries: Vec<StudySummary>,
    pub rows: Vec<ParaproductRow>,
}

impl Tabular for ParaproductReport {
    type Row = ParaproductRow;
    fn rows(&self) -> Vec<ParaproductRow> {
        self.rows.clone()
    }
}

impl ParaproductReport {
    pub fn summary(&self, study: &str, n: usize) -> Option<&StudySummary> {
        self.summaries.iter().find(|s| s.study == study && s.n == n)
    }
}

fn push(rows: &mut Vec<ParaproductRow>, study: &'static str, n: usize, scale: f64, trial: usize, num: f64, den: f64) {
    rows.push(ParaproductRow {
        study,
        n,
        scale,
        trial,
        numerator: num,
        denominator: den,
        ratio: num / den,
    });
}

/// Single-scale defect measurements for one pair of analytic wave packets.
pub struct DefectSample {
    pub defect: f64,
    pub classical_remainder: f64,
    pub product: f64,
    pub input_norms: f64,
}

/// `‖D(f,g)‖_{W^{2s,t}}`, `‖fg − Π_f g − Π_g f‖_{W^{2s−1/t,t}}` and
/// `‖fg‖_{W^{2s,t}}` for unit `W^{s,t}` inputs on the shell `[λ/2, λ]`.
pub fn defect_sample(
    frame: &LPFrame,
    theta: &ThetaProfile,
    scale: f64,
    s: f64,
    t: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<DefectSample> {
    let grid = *frame.grid();
    let f = unit_sobolev(band_limited(grid, Band::analytic_shell(scale), rng)?, frame, s, t)?;
    let g = unit_sobolev(band_limited(grid, Band::analytic_shell(scale), rng)?, frame, s, t)?;
    let w = |h: &SampledFunction, r: f64| -> Result<f64> {
        Ok(sobolev_norm(h, &SobolevParams::new(r, t, frame)?)?)
    };
    let input_norms = w(&f, s)? * w(&g, s)?;
    let fg = pointwise_product(&f, &g, AliasPolicy::Raise)?;
    let d = multiplication_defect(&f, &g, theta)?;
    let rem = fg
        .sub(&classical_paraproduct(&f, &g, frame)?)?
        .sub(&classical_paraproduct(&g, &f, frame)?)?;
    Ok(DefectSample {
        defect: w(&d, 2.0 * s)?,
        classical_remainder: w(&rem, 2.0 * s - 1.0 / t)?,
        product: w(&fg, 2.0 * s)?,
        input_norms,
    })
}

pub fn run(cfg: &ExperimentConfig, timing: &mut Timing) -> Result<ParaproductReport> {
    cfg.validate()?;
    let pc = &cfg.paraproduct;
    let (s, p, q, t) = (cfg.s, cfg.p, cfg.q, cfg.t);
    if s < 1.0 / t {
        return Err(HarnessError::Config(format!(
            "the defect study needs s >= 1/t, got s = {s}, t = {t}"
        )));
    }
    if pc.epsilon.is_nan() || pc.epsilon < 0.0 {
        return Err(HarnessError::Config("epsilon must be >= 0".into()));
    }
    let sparse = EvalOptions::with_strategy(EvalStrategy::SparseAccumulate);
    let profile = cfg.profile()?;
    let theta = ThetaProfile::new(profile);
    let mut rows = Vec::new();
    let mut constant_b_max: f64 = 0.0;
    let mut truncation_mass: f64 = 0.0;
    for &n in &pc.sizes {
        let grid = GridSpec::new(n, pc.scale_l)?;
        let frame = LPFrame::new(grid, profile)?;
        let ws = |h: &SampledFunction, r: f64, e: f64| -> Result<f64> {
            Ok(sobolev_norm(h, &SobolevParams::new(r, e, &frame)?)?)
        };
        for (si, &scale) in pc.scales.iter().enumerate() {
            for trial in 0..cfg.trials {
                let mut rng = trial_rng(cfg.seed, ((si as u64) << 32) | trial as u64);
                let b = band_limited(grid, Band::below(scale), &mut rng)?;
                let f = unit_sobolev(band_limited(grid, Band::shell(scale), &mut rng)?, &frame, s, p)?;

                timing.accumulate("classical", || -> Result<()> {
                    // b in the low-frequency slot, where the L∞ bound applies.
                    let pb = classical_paraproduct(&f, &b, &frame)?;
                    let den = lebesgue_norm(&b, f64::INFINITY)? * ws(&f, s, p)?;
                    push(&mut rows, "classical", n, scale, trial, ws(&pb, s, p)?, den);
                    // Definition as written: b supplies the high frequencies.
                    let low = unit_sobolev(band_limited(grid, Band::shell(2.0), &mut rng)?, &frame, s, p)?;
                    let hb = band_limited(grid, Band::shell(scale), &mut rng)?;
                    let pw = classical_paraproduct(&hb, &low, &frame)?;
                    let den = lebesgue_norm(&hb, f64::INFINITY)? * ws(&low, s, p)?;
                    push(&mut rows, "classical_as_written", n, scale, trial, ws(&pw, s, p)?, den);
                    truncation_mass = truncation_mass.max(paraproduct_truncation_mass(&hb, &frame)?);
                    let c = SampledFunction::constant(grid, C64::new(1.5, -0.5));
                    constant_b_max = constant_b_max.max(classical_paraproduct(&c, &f, &frame)?.max_abs());
                    Ok(())
                })?;

                timing.accumulate("improved", || -> Result<()> {
                    let fq = unit_sobolev(f.clone(), &frame, s, q)?;
                    // Band-limited inputs: the pair sum is far cheaper than the dense lattice sweep.
                    let ib = improved_paraproduct_with(&b, &fq, &theta, &sparse)?;
                    let den = ws(&b, pc.epsilon, p)? * ws(&fq, s, q)?;
                    push(&mut rows, "improved", n, scale, trial, ws(&ib, s, t)?, den);
                    Ok(())
                })?;

                let d = timing.accumulate("defect", || defect_sample(&frame, &theta, scale, s, t, &mut rng))?;
                push(&mut rows, "defect", n, scale, trial, d.defect, d.input_norms);
                push(&mut rows, "classical_remainder", n, scale, trial, d.classical_remainder, d.input_norms);
                push(&mut rows, "product", n, scale, trial, d.product, d.input_norms);
            }
        }
    }

    let mut summaries = Vec::new();
    for &n in &pc.sizes {
        for study in STUDIES {
            let mut pts = Vec::new();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for &scale in &pc.scales {
                let r: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.study == study && r.n == n && r.scale == scale)
                    .map(|r| r.ratio)
                    .collect();
                if r.is_empty() {
                    continue;
                }
                lo = r.iter().copied().fold(lo, f64::min);
                hi = r.iter().copied().fold(hi, f64::max);
                pts.push((scale, r.iter().sum::<f64>() / r.len() as f64));
            }
            summaries.push(StudySummary {
                study,
                n,
                max_ratio: hi,
                min_ratio: lo,
                slope: loglog_slope(&pts),
            });
        }
    }
    Ok(ParaproductReport {
        epsilon: pc.epsilon,
        constant_b_max,
        truncation_mass,
        summaries,
        rows,
    })
}
