//! Symbol representations and the named constructors.
//!
//! Throughout, `ξ` is the frequency variable of the first argument and `η`
//! that of the second.

mod class;
mod elementary;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{BumpProfile, LPFrame, ThetaProfile};
use crate::grid::GridSpec;
use crate::C64;

pub use class::{
    check_class_estimate, growth_trend, ClassReport, GrowthTrend, SamplePlan, MAX_CLASS_ORDER,
};
pub use elementary::{
    decompose_elementary, DecayFit, DecompositionConfig, ElementaryCell, ElementaryDecomposition,
};

pub type Fn1 = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
pub type Fn2 = Arc<dyn Fn(f64, f64) -> C64 + Send + Sync>;
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> C64 + Send + Sync>;

/// Claimed class `BS^m_{ρ,δ;θ}`; `theta = None` is the Coifman-Meyer weight
/// `1 + |ξ| + |η|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolClassParams {
    pub order: f64,
    pub rho: f64,
    pub delta: f64,
    pub theta: Option<f64>,
}

impl SymbolClassParams {
    pub fn new(order: f64, rho: f64, delta: f64, theta: Option<f64>) -> Result<Self> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !order.is_finite() || !unit(rho) || !unit(delta) || delta > rho {
            return Err(Error::InvalidParameter(format!(
                "class parameters m={order}, rho={rho}, delta={delta} need 0 <= delta <= rho <= 1"
            )));
        }
        if let Some(t) = theta {
            let half = std::f64::consts::FRAC_PI_2;
            if !(t > -half && t <= half) {
                return Err(Error::InvalidParameter(format!(
                    "theta = {t} outside (-pi/2, pi/2]"
                )));
            }
        }
        Ok(Self {
            order,
            rho,
            delta,
            theta,
        })
    }

    /// `BS^0_{1,1;π/4}`, singular along the diagonal `ξ = η`.
    pub fn exotic_diagonal() -> Self {
        Self {
            order: 0.0,
            rho: 1.0,
            delta: 1.0,
            theta: Some(std::f64::consts::FRAC_PI_4),
        }
    }

    /// Weight `(1 + |ξ| + |η|)`, `(1 + |ξ|)` or `(1 + |η − tanθ ξ|)`.
    pub fn weight(&self, xi: f64, eta: f64) -> f64 {
        match self.theta {
            None => 1.0 + xi.abs() + eta.abs(),
            Some(t) if t == std::f64::consts::FRAC_PI_2 => 1.0 + xi.abs(),
            Some(t) => 1.0 + (eta - t.tan() * xi).abs(),
        }
    }

    /// Exponent `m + δα − ρ(β + γ)`.
    pub fn exponent(&self, alpha: u32, beta: u32, gamma: u32) -> f64 {
        self.order + self.delta * alpha as f64 - self.rho * (beta + gamma) as f64
    }
}

/// Which difference a modulation-invariant symbol depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// `σ(x, ξ, η) = τ(x, ξ − η)`.
    XiMinusEta,
    /// `σ(x, ξ, η) = τ(x, η − ξ)`.
    EtaMinusXi,
}

impl Orientation {
    pub fn apply(&self, xi: f64, eta: f64) -> f64 {
        match self {
            Orientation::XiMinusEta => xi - eta,
            Orientation::EtaMinusXi => eta - xi,
        }
    }
}

/// One separable piece `a(x) k(u)` of a modulation-invariant symbol.
#[derive(Clone)]
pub struct SeparableTerm {
    pub coefficient: Fn1,
    pub kernel: Fn1,
}

impl SeparableTerm {
    pub fn new(
        coefficient: impl Fn(f64) -> C64 + Send + Sync + 'static,
        kernel: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            coefficient: Arc::new(coefficient),
            kernel: Arc::new(kernel),
        }
    }
}

#[derive(Clone)]
pub enum SymbolForm {
    Multiplier(Fn2),
    /// `σ(ξ, η) = m(ξ − η)`.
    DiagonalKernel(Fn1),
    ModulationInvariant {
        tau: Fn2,
        orientation: Orientation,
        /// Present when `τ(x, u) = Σ a_i(x) k_i(u)` is known term by term.
        terms: Option<Vec<SeparableTerm>>,
    },
    General(Fn3),
    ElementarySum(Arc<ElementaryDecomposition>),
}

impl SymbolForm {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolForm::Multiplier(_) => "Multiplier",
            SymbolForm::DiagonalKernel(_) => "DiagonalKernel",
            SymbolForm::ModulationInvariant { .. } => "ModulationInvariant",
            SymbolForm::General(_) => "General",
            SymbolForm::ElementarySum(_) => "ElementarySum",
        }
    }
}

#[derive(Clone)]
pub struct Symbol {
    form: SymbolForm,
    class: Option<SymbolClassParams>,
    label: String,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("form", &self.form.name())
            .field("class", &self.class)
            .field("label", &self.label)
            .finish()
    }
}

impl Symbol {
    pub fn new(form: SymbolForm) -> Self {
        let label = form.name().to_string();
        Self {
            form,
            class: None,
            label,
        }
    }

    pub fn multiplier(f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Self::new(SymbolForm::Multiplier(Arc::new(f)))
    }

    /// `σ ≡ 1`.
    pub fn one() -> Self {
        Self::multiplier(|_, _| C64::new(1.0, 0.0)).with_label("one")
    }

    pub fn diagonal_kernel(m: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self::new(SymbolForm::DiagonalKernel(Arc::new(m)))
    }

    pub fn modulation_invariant(
        tau: impl Fn(f64, f64) -> C64 + Send + Sync + 'static,
        orientation: Orientation,
    ) -> Self {
        Self::new(SymbolForm::ModulationInvariant {
            tau: Arc::new(tau),
            orientation,
            terms: None,
        })
    }

    /// `τ(x, u) = Σ_i a_i(x) k_i(u)`, keeping the terms for separable evaluation.
    pub fn separable(terms: Vec<SeparableTerm>, orientation: Orientation) -> Self {
        let shared = terms.clone();
        let tau = move |x: f64, u: f64| -> C64 {
            shared
                .iter()
                .map(|t| {
                    let k = (t.kernel)(u);
                    if k == C64::new(0.0, 0.0) {
                        k
                    } else {
                        (t.coefficient)(x) * k
                    }
                })
                .sum()
        };
        Self::new(SymbolForm::ModulationInvariant {
            tau: Arc::new(tau),
            orientation,
            terms: Some(terms),
        })
    }

    pub fn general(f: impl Fn(f64, f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        Self::new(SymbolForm::General(Arc::new(f)))
    }

    pub fn elementary_sum(d: ElementaryDecomposition) -> Self {
        Self::new(SymbolForm::ElementarySum(Arc::new(d)))
    }

    pub fn with_class(mut self, params: SymbolClassParams) -> Self {
        self.class = Some(params);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn form(&self) -> &SymbolForm {
        &self.form
    }

    pub fn class(&self) -> Option<&SymbolClassParams> {
        self.class.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_x_independent(&self) -> bool {
        matches!(
            self.form,
            SymbolForm::Multiplier(_) | SymbolForm::DiagonalKernel(_)
        )
    }

    pub fn eval(&self, x: f64, xi: f64, eta: f64) -> C64 {
        match &self.form {
            SymbolForm::Multiplier(f) => f(xi, eta),
            SymbolForm::DiagonalKernel(m) => m(xi - eta),
            SymbolForm::ModulationInvariant {
                tau, orientation, ..
            } => tau(x, orientation.apply(xi, eta)),
            SymbolForm::General(f) => f(x, xi, eta),
            SymbolForm::ElementarySum(d) => d.reconstruct(x, xi, eta),
        }
    }

    /// `σ(ξ, η)` for x-independent symbols.
    pub fn eval_multiplier(&self, xi: f64, eta: f64) -> Option<C64> {
        match &self.form {
            SymbolForm::Multiplier(f) => Some(f(xi, eta)),
            SymbolForm::DiagonalKernel(m) => Some(m(xi - eta)),
            _ => None,
        }
    }

    /// `c σ`, preserving the form.
    pub fn scaled(&self, c: C64) -> Symbol {
        let form = match &self.form {
            SymbolForm::Multiplier(f) => {
                let f = f.clone();
                SymbolForm::Multiplier(Arc::new(move |a, b| c * f(a, b)))
            }
            SymbolForm::DiagonalKernel(m) => {
                let m = m.clone();
                SymbolForm::DiagonalKernel(Arc::new(move |u| c * m(u)))
            }
            SymbolForm::ModulationInvariant {
                tau,
                orientation,
                terms,
            } => {
                let tau = tau.clone();
                SymbolForm::ModulationInvariant {
                    tau: Arc::new(move |x, u| c * tau(x, u)),
                    orientation: *orientation,
                    terms: terms.as_ref().map(|ts| {
                        ts.iter()
                            .map(|t| {
                                let k = t.kernel.clone();
                                SeparableTerm {
                                    coefficient: t.coefficient.clone(),
                                    kernel: Arc::new(move |u| c * k(u)),
                                }
                            })
                            .collect()
                    }),
                }
            }
            _ => {
                let s = self.clone();
                SymbolForm::General(Arc::new(move |x, a, b| c * s.eval(x, a, b)))
            }
        };
        Symbol {
            form,
            class: self.class,
            label: format!("{c}*{}", self.label),
        }
    }
}

/// Even band cutoff: 0 outside `(a, d)`, 1 on `[b, c]`, with transitions
/// `ρ` on `(a, b)` and `(c, d)`, evaluated at `|ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandCutoff {
    pub outer_low: f64,
    pub inner_low: f64,
    pub inner_high: f64,
    pub outer_high: f64,
    pub profile: BumpProfile,
}

impl BandCutoff {
    pub fn new(
        outer_low: f64,
        inner_low: f64,
        inner_high: f64,
        outer_high: f64,
        profile: BumpProfile,
    ) -> Result<Self> {
        if !(0.0 <= outer_low
            && outer_low < inner_low
            && inner_low <= inner_high
            && inner_high < outer_high
            && outer_high.is_finite())
        {
            return Err(Error::BadCutoffSpec(format!(
                "need 0 <= {outer_low} < {inner_low} <= {inner_high} < {outer_high}"
            )));
        }
        Ok(Self {
            outer_low,
            inner_low,
            inner_high,
            outer_high,
            profile,
        })
    }

    /// Ramps on `(5/7, 5/6)` and `(4/3, 5/3)`, plateau `[5/6, 4/3]`.
    pub fn counterexample_default() -> Self {
        Self {
            outer_low: 5.0 / 7.0,
            inner_low: 5.0 / 6.0,
            inner_high: 4.0 / 3.0,
            outer_high: 5.0 / 3.0,
            profile: BumpProfile::default(),
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= self.outer_low || a >= self.outer_high {
            0.0
        } else if a < self.inner_low {
            self.profile
                .eval((a - self.outer_low) / (self.inner_low - self.outer_low))
        } else if a <= self.inner_high {
            1.0
        } else {
            self.profile
                .eval((self.outer_high - a) / (self.outer_high - self.inner_high))
        }
    }

    /// Checks the support and plateau demanded by the counterexample.
    pub fn validate_counterexample(&self) -> Result<()> {
        let eps = 1e-12;
        if self.outer_low < 5.0 / 7.0 - eps || self.outer_high > 5.0 / 3.0 + eps {
            return Err(Error::BadCutoffSpec(format!(
                "support ({}, {}) leaves (5/7, 5/3)",
                self.outer_low, self.outer_high
            )));
        }
        if self.inner_low > 5.0 / 6.0 + eps || self.inner_high < 4.0 / 3.0 - eps {
            return Err(Error::BadCutoffSpec(format!(
                "plateau [{}, {}] does not contain [5/6, 4/3]",
                self.inner_low, self.inner_high
            )));
        }
        Ok(())
    }
}

/// One-sided low-frequency cutoff: 1 on `[0, plateau]`, `ρ` down to 0 at
/// `edge`, 0 for negative frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowCutoff {
    pub plateau: f64,
    pub edge: f64,
    pub profile: BumpProfile,
}

impl LowCutoff {
    pub fn new(plateau: f64, edge: f64, profile: BumpProfile) -> Result<Self> {
        if !(0.0 <= plateau && plateau < edge && edge.is_finite()) {
            return Err(Error::BadCutoffSpec(format!(
                "need 0 <= {plateau} < {edge}"
            )));
        }
        Ok(Self {
            plateau,
            edge,
            profile,
        })
    }

    /// Plateau `[0, 1/6]`, zero from `1/3` on.
    pub fn counterexample_default() -> Self {
        Self {
            plateau: 1.0 / 6.0,
            edge: 1.0 / 3.0,
            profile: BumpProfile::default(),
        }
    }

    pub fn eval(&self, xi: f64) -> f64 {
        if xi < 0.0 || xi >= self.edge {
            0.0
        } else if xi <= self.plateau {
            1.0
        } else {
            self.profile
                .eval((self.edge - xi) / (self.edge - self.plateau))
        }
    }

    pub fn validate_counterexample(&self) -> Result<()> {
        if self.edge > 1.0 / 3.0 + 1e-12 {
            return Err(Error::BadCutoffSpec(format!(
                "support [0, {}] leaves [0, 1/3]",
                self.edge
            )));
        }
        Ok(())
    }
}

/// `σ(x, ξ, η) = τ(x, η − ξ)` with `τ(x, u) = Σ_{j=jMin}^{jMax} e^{−i 2^j x} ψ̂(2^{−j} u)`.
pub fn counterexample_symbol(
    j_min: u32,
    j_max: u32,
    psi: &BandCutoff,
    grid: &GridSpec,
) -> Result<Symbol> {
    psi.validate_counterexample()?;
    if j_max < j_min {
        return Err(Error::InvalidParameter(format!(
            "jMax = {j_max} below jMin = {j_min}"
        )));
    }
    grid.check_below_nyquist(2f64.powi(j_max as i32) * psi.outer_high)?;
    let terms = (j_min..=j_max)
        .map(|j| {
            let scale = 2f64.powi(j as i32);
            let psi = *psi;
            SeparableTerm::new(
                move |x| C64::from_polar(1.0, -scale * x),
                move |u| C64::new(psi.eval(u / scale), 0.0),
            )
        })
        .collect();
    Ok(Symbol::separable(terms, Orientation::EtaMinusXi)
        .with_class(SymbolClassParams::exotic_diagonal())
        .with_label(format!("counterexample j={j_min}..{j_max}")))
}

/// Coefficient `m_j` of a reduced symbol together with its period.
#[derive(Clone)]
pub struct ReducedCoefficient {
    pub func: Fn1,
    pub period: f64,
}

impl ReducedCoefficient {
    pub fn new(period: f64, func: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            func: Arc::new(func),
            period,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(2.0 * std::f64::consts::PI, move |_| c)
    }
}

/// `σ(x, ξ, η) = Σ_j m_j(2^j x) Ψ̂(2^{−j}(ξ − η))`.
pub fn reduced_symbol(coeffs: Vec<ReducedCoefficient>, frame: &LPFrame) -> Result<Symbol> {
    let grid = frame.grid();
    if coeffs.len() as i64 > frame.k_max() + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} levels requested, the frame resolves {}",
            coeffs.len(),
            frame.k_max() + 1
        )));
    }
    if !coeffs.is_empty() {
        grid.check_below_nyquist(2f64.powi(coeffs.len() as i32))?;
    }
    let mut terms = Vec::with_capacity(coeffs.len());
    for (j, c) in coeffs.into_iter().enumerate() {
        let scale = 2f64.powi(j as i32);
        let cycles = grid.period() * scale / c.period;
        if c.period.is_nan() || c.period <= 0.0 || (cycles - cycles.round()).abs() > 1e-9 * cycles.max(1.0) {
            return Err(Error::NonPeriodicCoefficient { level: j });
        }
        let f = c.func.clone();
        let frame = frame.clone();
        terms.push(SeparableTerm::new(move |x| f(scale * x), move |u| {
            C64::new(frame.psi_hat(u / scale), 0.0)
        }));
    }
    Ok(Symbol::separable(terms, Orientation::XiMinusEta)
        .with_class(SymbolClassParams::exotic_diagonal())
        .with_label("reduced"))
}

/// `σ^{*1}(ξ, η) = σ(−ξ−η, η)` or `σ^{*2}(ξ, η) = σ(ξ, −ξ−η)`.
pub fn transpose_symbol(sigma: &Symbol, which: u8) -> Result<Symbol> {
    if !sigma.is_x_independent() {
        return Err(Error::NotMultiplier);
    }
    let s = sigma.clone();
    let t = match which {
        1 => Symbol::multiplier(move |xi, eta| s.eval(0.0, -xi - eta, eta)),
        2 => Symbol::multiplier(move |xi, eta| s.eval(0.0, xi, -xi - eta)),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "transpose index {which} is not 1 or 2"
            )))
        }
    };
    Ok(t.with_label(format!("{}^*{which}", sigma.label())))
}

/// `Θ̂(ξ−η)Θ̂(ξ+η) + Θ̂(η−ξ)Θ̂(−ξ−η)`, applied to `(b, f)`.
pub fn improved_paraproduct_value(theta: &ThetaProfile, xi: f64, eta: f64) -> f64 {
    theta.eval(xi - eta) * theta.eval(xi + eta) + theta.eval(eta - xi) * theta.eval(-xi - eta)
}

pub fn improved_paraproduct_symbol(theta: ThetaProfile) -> Symbol {
    Symbol::multiplier(move |xi, eta| C64::new(improved_paraproduct_value(&theta, xi, eta), 0.0))
        .with_label("improved paraproduct")
}

/// `τ(ξ, η) = 1 − σ_Π̃(ξ, η) − σ_Π̃(η, ξ)`.
pub fn defect_value(theta: &ThetaProfile, xi: f64, eta: f64) -> f64 {
    1.0 - improved_paraproduct_value(theta, xi, eta) - improved_paraproduct_value(theta, eta, xi)
}

pub fn defect_symbol(theta: ThetaProfile) -> Symbol {
    Symbol::multiplier(move |xi, eta| C64::new(defect_value(&theta, xi, eta), 0.0))
        .with_label("multiplication defect")
}
