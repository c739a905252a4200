use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("lattice index {index} outside [-{half}, {half})")]
    IndexOutOfRange { index: i64, half: i64 },

    #[error("exponent p = {0} is not in (1, inf]")]
    InvalidExponent(f64),

    #[error("grid mismatch: N={left_n} L={left_l} vs N={right_n} L={right_l}")]
    GridMismatch {
        left_n: usize,
        left_l: f64,
        right_n: usize,
        right_l: f64,
    },

    #[error("output spectrum [{min}, {max}] does not fit in [-{half}, {half})")]
    AliasingRisk { min: i64, max: i64, half: i64 },

    #[error("grid too small: kMax = {k_max} < 2")]
    GridTooSmall { k_max: i64 },

    #[error("frequency {frequency} reaches the Nyquist limit {nyquist}")]
    NyquistViolation { frequency: f64, nyquist: f64 },

    #[error("bad cutoff specification: {0}")]
    BadCutoffSpec(String),

    #[error("symbol depends on x; transposes are only available for multipliers")]
    NotMultiplier,

    #[error("strategy {strategy} cannot evaluate a {form} symbol")]
    StrategyMismatch {
        strategy: &'static str,
        form: &'static str,
    },

    #[error("kernel tail mass {tail:.3e} beyond radius {radius} exceeds tolerance {tolerance:.1e}")]
    TruncationTooAggressive {
        radius: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("{} frequency samples are not covered by the requested (j, l) cells", uncovered.len())]
    CoverageGap { uncovered: Vec<(f64, f64)> },

    #[error("coefficient m_{level}(2^{level} x) is not periodic on the grid")]
    NonPeriodicCoefficient { level: usize },

    #[error("exponents do not satisfy 1/p + 1/q = 1/t: {0}")]
    InvalidExponents(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed data file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
