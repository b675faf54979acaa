//! Exact tail asymptotics for quarter-plane random walks.
//!
//! Given the four region transition distributions of an ergodic
//! nearest-neighbour random walk on the quarter plane, this crate locates
//! the dominant singularities of the boundary generating functions,
//! classifies the walk into one of four asymptotic types (with periodic
//! variants for X-shaped walks), and produces the tail laws
//! `pi_n ~ C n^beta rho^n` for boundary, marginal, and fixed-offset joint
//! probabilities. A truncated-chain stationary solver serves as a
//! brute-force oracle for every prediction.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod poly;
pub mod report;
pub mod singularity;
pub mod walk;

use serde::Serialize;

pub use error::{Error, Result};

/// Numerical thresholds used across the pipeline. All relative.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    /// Roots with |imag| below this (relative) are coerced real.
    pub real_coerce: f64,
    /// Minimum relative branch-point gap for the genus-1 verdict.
    pub distinct: f64,
    /// Relative equality tolerance for case-boundary comparisons.
    pub case_eq: f64,
    /// Width of the near-boundary warning band around case equalities.
    pub warn_band: f64,
    /// Stationary solver L1 stopping tolerance.
    pub solver: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            real_coerce: 1e-9,
            distinct: 1e-7,
            case_eq: 1e-8,
            warn_band: 1e-5,
            solver: 1e-13,
        }
    }
}

/// The full analytic state for one coordinate direction of a walk.
/// The y-direction analysis of a walk is the x-direction analysis of its
/// transpose.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub spec: walk::WalkSpec,
    pub drift: walk::DriftVectors,
    pub ergodicity: walk::Ergodicity,
    pub shapes: walk::ShapeClass,
    pub kp: kernel::KernelPolynomials,
    pub disc: kernel::Discriminant,
    pub bp: kernel::BranchPoints,
    pub sextic: singularity::SexticFactorization,
    pub report: singularity::SingularityReport,
}

/// Run the analytic pipeline (no oracle): validate scope, build kernel
/// data, locate singularities, classify.
pub fn analyze(spec: &walk::WalkSpec, tol: &Tolerances) -> Result<Analysis> {
    let drift = walk::drift_vectors(spec);
    let ergodicity = walk::check_ergodic(&drift);
    match ergodicity {
        walk::Ergodicity::Ergodic(_) => {}
        walk::Ergodicity::NotErgodic => return Err(Error::NotErgodic),
        walk::Ergodicity::OutOfScopeZeroDrift => return Err(Error::OutOfScopeZeroDrift),
    }
    let shapes = walk::classify_shape(spec);
    let kp = kernel::build_polynomials(spec);
    let disc = kernel::discriminant(spec);
    let bp = kernel::branch_points(&disc, tol)?;
    kernel::check_nonsingular_genus1(&kp, &disc, &bp, tol)?;
    let sextic = singularity::build_sextic(&kp, &bp)?;
    let report = singularity::locate_and_classify(&kp, &bp, &sextic, &shapes, tol)?;
    Ok(Analysis {
        spec: spec.clone(),
        drift,
        ergodicity,
        shapes,
        kp,
        disc,
        bp,
        sextic,
        report,
    })
}
