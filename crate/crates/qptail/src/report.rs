//! The machine-readable report document and its deterministic
//! serialization (floats fixed at 12 significant digits).

use serde::Serialize;
use serde_json::Value;

use crate::asymptotics::{AsymptoticLaw, MarginalCase, PhiCheckReport};
use crate::kernel::{BranchPoints, Discriminant, KernelPolynomials};
use crate::oracle::EmpiricalLaw;
use crate::singularity::{SexticFactorization, SingularityReport};
use crate::walk::{DriftVectors, Ergodicity, RawModel, ShapeClass};
use crate::Tolerances;

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub truncation: usize,
    pub tolerances: Tolerances,
    pub direction: String,
    pub j_max: usize,
}

/// Everything the analytic pipeline produced for one coordinate direction.
#[derive(Clone, Debug, Serialize)]
pub struct DirectionReport {
    pub direction: char,
    pub kernel: KernelPolynomials,
    pub discriminant: Discriminant,
    pub branch_points: BranchPoints,
    pub sextic: SexticFactorization,
    pub singularity: SingularityReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub laws: Vec<AsymptoticLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marginal_case: Option<MarginalCase>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleSummary {
    pub truncation: usize,
    pub iterations: usize,
    pub residual: f64,
    pub pi00: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyRow {
    pub target: String,
    pub rate_predicted: f64,
    pub rate_empirical: f64,
    pub exponent_predicted: f64,
    pub exponent_empirical: f64,
    /// Aggregate ratio of observed to predicted values over the fit window.
    pub coefficient_ratio: f64,
    pub alternation_predicted: bool,
    pub alternation_detected: bool,
    pub fit_r2: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub model: RawModel,
    pub config: ConfigEcho,
    pub drift: DriftVectors,
    pub ergodicity: Ergodicity,
    pub shapes: ShapeClass,
    pub directions: Vec<DirectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_check: Option<PhiCheckReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verification: Vec<VerifyRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub empirical: Vec<(String, EmpiricalLaw)>,
}

/// Round to 12 significant digits for reproducible output.
pub fn round_sig12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(f) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig12(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize with every float fixed at 12 significant digits; identical
/// inputs produce byte-identical output.
pub fn to_deterministic_json<T: Serialize>(doc: &T) -> crate::Result<String> {
    let mut value = serde_json::to_value(doc)?;
    round_value(&mut value);
    Ok(serde_json::to_string_pretty(&value)?)
}
