//! Error taxonomy for the whole pipeline, with the CLI exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("model: negative probability {value} at {region} step ({di},{dj})")]
    NegativeProbability {
        region: &'static str,
        di: i32,
        dj: i32,
        value: f64,
    },

    #[error("model: {region} probabilities sum to {sum}, not 1")]
    SumNotOne { region: &'static str, sum: f64 },

    #[error("model: step ({di},{dj}) not allowed in region {region}")]
    UnsupportedStep {
        region: &'static str,
        di: i32,
        dj: i32,
    },

    #[error("model: malformed step key `{key}` in region {region}")]
    BadStepKey { region: &'static str, key: String },

    #[error("model: {0}")]
    BadModelDocument(String),

    #[error("walk out of scope: interior drift is zero (heavy-tailed case)")]
    OutOfScopeZeroDrift,

    #[error("walk is not ergodic")]
    NotErgodic,

    #[error("kernel: complex branch point {re}+{im}i of {side}-discriminant")]
    ComplexBranchPoint { side: char, re: f64, im: f64 },

    #[error("kernel: branch point {value} of {side}-discriminant lies on the unit circle")]
    BranchPointOnUnitCircle { side: char, value: f64 },

    #[error("kernel: walk is singular (kernel polynomial reducible)")]
    SingularWalk,

    #[error("kernel: branch points {a} and {b} of {side}-discriminant coincide (genus 0)")]
    Genus0Walk { side: char, a: f64, b: f64 },

    #[error("kernel: kernel not quadratic in {0}")]
    DegenerateKernel(char),

    #[error("kernel: quadratic degenerate at {at}: leading and linear coefficients both vanish")]
    DegenerateQuadratic { at: f64 },

    #[error("singularity: no sign change of {side}-side boundary kernel in (1, {hi}] despite nonnegative endpoint value {endpoint}")]
    BracketFailure { side: char, hi: f64, endpoint: f64 },

    #[error("singularity: root {re}+{im}i of the {side}-sextic matches neither factor (residuals {r0} and {r1})")]
    AttributionAmbiguous {
        side: char,
        re: f64,
        im: f64,
        r0: f64,
        r1: f64,
    },

    #[error("asymptotics: {0} is not a branch point")]
    NotABranchPoint(f64),

    #[error("asymptotics: gamma function pole at alpha = {0}")]
    AlphaAtGammaPole(f64),

    #[error("asymptotics: oracle unavailable for {0}")]
    OracleUnavailable(&'static str),

    #[error("asymptotics: evaluator for {which} at {arg} is outside its safe radius {radius}")]
    NonconvergentEvaluator {
        which: &'static str,
        arg: f64,
        radius: f64,
    },

    #[error("asymptotics: oracle grid too shallow for requested depth {needed} (have {have})")]
    OracleTooShallow { needed: usize, have: usize },

    #[error("oracle: stationary solver did not converge after {iterations} sweeps (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("oracle: evaluation argument {arg} outside estimated radius {radius}")]
    OutsideRadius { arg: f64, radius: f64 },

    #[error("oracle: decay-fit window too noisy (r2 = {r2})")]
    WindowTooNoisy { r2: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit codes: 2 validation, 3 out-of-scope model, 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            NegativeProbability { .. }
            | SumNotOne { .. }
            | UnsupportedStep { .. }
            | BadStepKey { .. }
            | BadModelDocument(_)
            | Io(_)
            | Json(_) => 2,
            OutOfScopeZeroDrift
            | NotErgodic
            | ComplexBranchPoint { .. }
            | BranchPointOnUnitCircle { .. }
            | SingularWalk
            | Genus0Walk { .. }
            | DegenerateKernel(_) => 3,
            DegenerateQuadratic { .. }
            | BracketFailure { .. }
            | AttributionAmbiguous { .. }
            | NotABranchPoint(_)
            | AlphaAtGammaPole(_)
            | OracleUnavailable(_)
            | NonconvergentEvaluator { .. }
            | OracleTooShallow { .. }
            | NoConvergence { .. }
            | OutsideRadius { .. }
            | WindowTooNoisy { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
