//! Experiment configuration: a JSON file plus command-line overrides.

use std::path::Path;

use bilinop_core::{BumpProfile, EvalStrategy, ExponentTriple, GridSpec};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub scale_l: f64,
    /// Smoothstep order of the bump profile; 0 selects the exponential profile.
    pub frame_order: u32,
    pub seed: u64,
    pub trials: usize,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub counterexample: CounterexampleConfig,
    pub probe: ProbeConfig,
    pub paraproduct: ParaproductConfig,
    pub bench: BenchConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 32768,
            scale_l: 12.0,
            frame_order: 3,
            seed: 7,
            trials: 8,
            s: 1.0,
            p: 4.0,
            q: 4.0,
            t: 2.0,
            counterexample: CounterexampleConfig::default(),
            probe: ProbeConfig::default(),
            paraproduct: ParaproductConfig::default(),
            bench: BenchConfig::default(),
        }
    }
}

/// Coefficients `a_j` of the counterexample input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientPattern {
    Ones,
    /// `a_j = (−1)^j`.
    Alternating,
    /// `a_{jMin} = 1`, all others 0.
    Single,
    /// `a_{jMin + i} = values[i]`, missing entries are 0.
    Custom { values: Vec<f64> },
}

impl CoefficientPattern {
    pub fn coefficients(&self, j_min: u32, j_max: u32) -> Vec<f64> {
        (j_min..=j_max)
            .map(|j| match self {
                CoefficientPattern::Ones => 1.0,
                CoefficientPattern::Alternating => {
                    if j % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                CoefficientPattern::Single => f64::from(j == j_min),
                CoefficientPattern::Custom { values } => {
                    values.get((j - j_min) as usize).copied().unwrap_or(0.0)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub j_min: u32,
    pub j_max: u32,
    pub pattern: CoefficientPattern,
    /// Strategy name for the identity run; `None` lets the library choose.
    pub strategy: Option<String>,
    pub growth: GrowthConfig,
    pub class_check: ClassCheckConfig,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        Self {
            j_min: 4,
            j_max: 9,
            pattern: CoefficientPattern::Ones,
            strategy: Some("SparseAccumulate".into()),
            growth: GrowthConfig::default(),
            class_check: ClassCheckConfig::default(),
        }
    }
}

/// The `a_j ≡ 1` study of the norm ratio against the number of terms `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub enabled: bool,
    pub n: usize,
    pub scale_l: f64,
    pub m_values: Vec<u32>,
    /// Accepted relative deviation of `ratio(m_last)/ratio(m_first)` from `√(m_last/m_first)`.
    pub window: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            n: 1 << 21,
            scale_l: 1.0,
            m_values: vec![4, 8, 16],
            window: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassCheckConfig {
    pub enabled: bool,
    pub j_max_values: Vec<u32>,
    pub max_shell: u32,
    pub max_order: u32,
}

impl Default for ClassCheckConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            j_max_values: vec![6, 7, 8, 9],
            max_shell: 10,
            max_order: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeSymbol {
    One,
    Reduced,
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub symbol: ProbeSymbol,
    pub sizes: Vec<usize>,
    pub scale_l: f64,
    /// Frequency scales `λ`; inputs live on the shell `[λ/2, λ]`.
    pub scales: Vec<f64>,
    /// Number of dyadic levels of the reduced symbol.
    pub levels: usize,
    /// `m_j(y) = 1 + amplitude · cos(2y)`.
    pub amplitude: f64,
    /// Smoothness values to sweep; empty means the top-level `s`. `--s`
    /// replaces the list.
    pub s_values: Vec<f64>,
    /// "Bounded" means max/min of the per-cell ratios stays below this.
    pub bounded_spread: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            symbol: ProbeSymbol::Reduced,
            sizes: vec![4096, 8192, 16384],
            scale_l: 0.5,
            scales: (4..=9).map(|k| 2f64.powi(k)).collect(),
            levels: 10,
            amplitude: 0.5,
            s_values: vec![0.25, 0.5, 0.75, 1.0],
            bounded_spread: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParaproductConfig {
    pub sizes: Vec<usize>,
    pub scale_l: f64,
    pub scales: Vec<f64>,
    pub epsilon: f64,
}

impl Default for ParaproductConfig {
    fn default() -> Self {
        Self {
            sizes: vec![8192, 16384, 32768],
            scale_l: 1.0,
            scales: (5..=10).map(|k| 2f64.powi(k)).collect(),
            epsilon: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Grid scale is chosen per size so that the Nyquist frequency equals this.
    pub nyquist: f64,
    /// Inputs are band-limited to `|ξ| < band`.
    pub band: f64,
    /// Kernel `m(u) = exp(−u²/(2 w²))` for `|u| ≤ cutoff`, 0 beyond.
    pub kernel_width: f64,
    pub kernel_cutoff: f64,
    pub sparse_n: usize,
    pub sparse_nnz: usize,
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![1024, 2048, 4096],
            nyquist: 10.0,
            band: 4.5,
            kernel_width: 0.4,
            kernel_cutoff: 3.0,
            sparse_n: 16384,
            sparse_nnz: 32,
            repeats: 3,
        }
    }
}

/// Values given on the command line; they win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub scale_l: Option<f64>,
    pub j_max: Option<u32>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub t: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(HarnessError::ParseConfig)
    }

    /// Applies flag overrides. `--n` and `--scale-l` also replace the size
    /// lists and grid scales of the scenario sections.
    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n {
            self.n = n;
            self.probe.sizes = vec![n];
            self.paraproduct.sizes = vec![n];
            self.bench.sizes = vec![n];
        }
        if let Some(l) = o.scale_l {
            self.scale_l = l;
            self.probe.scale_l = l;
            self.paraproduct.scale_l = l;
        }
        if let Some(j) = o.j_max {
            self.counterexample.j_max = j;
        }
        if let Some(s) = o.s {
            self.probe.s_values = vec![s];
        }
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = o.$field { self.$field = v; })* };
        }
        set!(s, p, q, t, trials, seed);
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.n, self.scale_l)?)
    }

    pub fn profile(&self) -> Result<BumpProfile> {
        if self.frame_order == 0 {
            Ok(BumpProfile::Exponential)
        } else {
            Ok(BumpProfile::smoothstep(self.frame_order)?)
        }
    }

    pub fn exponents(&self) -> Result<ExponentTriple> {
        Ok(ExponentTriple::new(self.p, self.q, self.t)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(HarnessError::Config(format!("s = {} must be >= 0", self.s)));
        }
        self.profile()?;
        self.exponents()?;
        Ok(())
    }
}

pub fn parse_strategy(name: &str) -> Result<EvalStrategy> {
    use EvalStrategy::*;
    [DenseAccumulate, SparseAccumulate, DiagonalConvolution, PerPointQuadrature]
        .into_iter()
        .find(|s| s.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| HarnessError::Config(format!("unknown strategy {name:?}")))
}
