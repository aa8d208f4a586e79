use thiserror::Error;

/// Errors raised by plan construction, evaluation and design.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} outside [0, 1]")]
    FractionRange { what: &'static str, value: f64 },

    #[error("fuzzy vertices must be nondecreasing fractions in [0, 1], got {0:?}")]
    VertexOrder(Vec<f64>),

    #[error("cut level {0} outside [0, 1]")]
    CutLevel(f64),

    #[error("theta = {theta} outside [0, {max}]: shifted support would leave [0, 1]")]
    ThetaRange { theta: f64, max: f64 },

    #[error("invalid plan: {0}")]
    Plan(String),

    #[error("interval endpoints inverted: [{lo}, {hi}]")]
    IntervalOrder { lo: f64, hi: f64 },

    #[error(
        "inspection errors delta1 = {delta1}, delta2 = {delta2} invalid: \
         each must lie in [0, 1) and delta1 + delta2 < 1"
    )]
    InspectionErrors { delta1: f64, delta2: f64 },

    #[error("lot size {lot_size} smaller than sample size {sample_size}")]
    LotSize { lot_size: u32, sample_size: u32 },

    #[error("invalid requirement: {0}")]
    Requirement(String),

    #[error("invalid simulation config: {0}")]
    Simulation(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
