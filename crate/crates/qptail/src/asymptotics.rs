//! Tail-law computation: square-root decompositions at branch points, the
//! per-case coefficient formulas for the boundary generating function, the
//! Tauberian-like transfer, and assembly of boundary, marginal, and joint
//! laws with oracle-backed error bars.
//!
//! Every unknown generating-function value (pi2 at a point, its
//! derivative, pi1 at a point, pi00) comes from the truncated stationary
//! oracle; coefficients carry error bars propagated from the evaluator
//! bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{self, ExtReal, KernelPolynomials};
use crate::oracle::{self, GfKind, StationaryGrid};
use crate::poly::Poly;
use crate::singularity::{self, CaseLabel, SexticFactorization, SingularityReport};
use crate::walk::DriftVectors;
use crate::Tolerances;

/// Threshold scale factor of the nonvanishing-hypothesis test.
pub const NONVANISHING_TOL: f64 = 1e-8;

/// Oracle-backed access to the unknown generating functions. `swapped`
/// reads the grid through the (x <-> y) mirror so one solved grid serves
/// both coordinate directions.
pub struct GfAccess<'a> {
    grid: &'a StationaryGrid,
    swapped: bool,
    /// Estimated dominant singularity of pi1 (safe evaluation radius).
    pub x_radius: f64,
    /// Estimated dominant singularity of pi2.
    pub y_radius: f64,
}

impl<'a> GfAccess<'a> {
    pub fn new(grid: &'a StationaryGrid, swapped: bool, x_radius: f64, y_radius: f64) -> Self {
        GfAccess {
            grid,
            swapped,
            x_radius,
            y_radius,
        }
    }

    pub fn pi00(&self) -> f64 {
        self.grid.at(0, 0)
    }

    fn kind(&self, k: GfKind) -> GfKind {
        if !self.swapped {
            return k;
        }
        match k {
            GfKind::Pi1 => GfKind::Pi2,
            GfKind::Pi2 => GfKind::Pi1,
            GfKind::Pi1Prime => GfKind::Pi2Prime,
            GfKind::Pi2Prime => GfKind::Pi1Prime,
        }
    }

    pub fn pi1_at(&self, x: f64) -> Result<(f64, f64)> {
        oracle::eval_gf(self.grid, self.kind(GfKind::Pi1), x, self.x_radius)
    }

    pub fn pi2_at(&self, y: f64) -> Result<(f64, f64)> {
        oracle::eval_gf(self.grid, self.kind(GfKind::Pi2), y, self.y_radius)
    }

    pub fn pi1_prime_at(&self, x: f64) -> Result<(f64, f64)> {
        oracle::eval_gf(self.grid, self.kind(GfKind::Pi1Prime), x, self.x_radius)
    }

    pub fn pi2_prime_at(&self, y: f64) -> Result<(f64, f64)> {
        oracle::eval_gf(self.grid, self.kind(GfKind::Pi2Prime), y, self.y_radius)
    }
}

/// First-order error propagation through a formula that is affine in its
/// oracle inputs: bump each input by its bound and accumulate the shifts.
fn with_error<F>(inputs: &[(f64, f64)], f: F) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let values: Vec<f64> = inputs.iter().map(|(v, _)| *v).collect();
    let base = f(&values);
    let mut err = 0.0;
    for (i, (_, bound)) in inputs.iter().enumerate() {
        if *bound == 0.0 {
            continue;
        }
        let mut bumped = values.clone();
        bumped[i] += bound;
        err += (f(&bumped) - base).abs();
    }
    (base, err)
}

/// Values of the square-root decomposition of Y0 and h1(x, Y0(x)) at a
/// branch point x_dom = +-x3, all taken in the limit x -> x_dom.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SqrtDecomposition {
    pub x_dom: f64,
    /// p = Y0(x_dom) = -b/(2a).
    pub p: f64,
    /// q, with the branch sign convention: negative at +x3.
    pub q: f64,
    /// p1 = h1(x_dom, Y0(x_dom)).
    pub p1: f64,
    /// q1 = a1(x_dom) q.
    pub q1: f64,
    /// Difference-quotient limits -x_dom p'(x_dom) and -x_dom p1'(x_dom).
    pub p_star: f64,
    pub p1_star: f64,
}

fn d1_poly(kp: &KernelPolynomials) -> Poly {
    kp.b.mul(&kp.b).sub(&kp.a.mul(&kp.c).scale(4.0))
}

/// Decompose at a branch point `x_dom` (|x_dom| must equal x3).
pub fn sqrt_decomposition(
    kp: &KernelPolynomials,
    x_dom: f64,
    x3: f64,
) -> Result<SqrtDecomposition> {
    if (x_dom.abs() - x3).abs() > 1e-9 * x3 {
        return Err(Error::NotABranchPoint(x_dom));
    }
    let a = kp.a.eval(x_dom);
    let p = kernel::y_branch_point_value(kp, x_dom);
    let d1p = d1_poly(kp).derivative().eval(x_dom);
    // q^2 = -x_dom D1'(x_dom) / (4 a^2) by L'Hopital at the simple root.
    let q_sq = (-x_dom * d1p / (4.0 * a * a)).max(0.0);
    let q = if x_dom > 0.0 { -q_sq.sqrt() } else { q_sq.sqrt() };
    let a1 = kp.a1.eval(x_dom);
    let p1 = a1 * p + kp.b1.eval(x_dom);
    // p = -b/(2a), so p' = (b a' - a b') / (2 a^2).
    let p_prime = (kp.b.eval(x_dom) * kp.a.derivative().eval(x_dom)
        - a * kp.b.derivative().eval(x_dom))
        / (2.0 * a * a);
    let p1_prime =
        p_prime * a1 + p * kp.a1.derivative().eval(x_dom) + kp.b1.derivative().eval(x_dom);
    Ok(SqrtDecomposition {
        x_dom,
        p,
        q,
        p1,
        q1: a1 * q,
        p_star: -x_dom * p_prime,
        p1_star: -x_dom * p1_prime,
    })
}

/// A tail law a_n ~ prefactor n^(alpha-1) R^(-n) obtained from the
/// generating-function limit (1 - z/R)^alpha A(z) -> g.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransferLaw {
    pub prefactor: f64,
    pub exponent: f64,
    pub rate: f64,
}

impl TransferLaw {
    pub fn predict(&self, n: usize) -> f64 {
        self.prefactor * (n as f64).powf(self.exponent) * self.rate.powi(n as i32)
    }
}

/// Tauberian-like transfer for a single dominant singularity.
pub fn tauberian_transfer(alpha: f64, g: f64, radius: f64) -> Result<TransferLaw> {
    if alpha < 0.4 && (alpha - alpha.round()).abs() < 1e-9 && alpha.round() <= 0.0 {
        return Err(Error::AlphaAtGammaPole(alpha));
    }
    Ok(TransferLaw {
        prefactor: g / libm::tgamma(alpha),
        exponent: alpha - 1.0,
        rate: 1.0 / radius,
    })
}

/// One singularity's contribution for the multi-singularity transfer.
#[derive(Clone, Copy, Debug)]
pub struct TransferTerm {
    pub zeta: f64,
    pub alpha: f64,
    pub g: f64,
}

/// Coefficient prediction a_n ~ sum_k g_k/Gamma(alpha_k) n^(alpha_k-1)
/// zeta_k^(-n) for finitely many singularities on the convergence circle.
pub fn tauberian_transfer_multi(terms: &[TransferTerm]) -> Result<Vec<TransferLaw>> {
    terms
        .iter()
        .map(|t| tauberian_transfer(t.alpha, t.g, t.zeta))
        .collect()
}

/// Sum of the per-singularity transfer laws at n (signed rates encode
/// negative singularities).
pub fn transfer_predict(laws: &[TransferLaw], n: usize) -> f64 {
    laws.iter().map(|l| l.predict(n)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LawTarget {
    BoundaryX,
    BoundaryY,
    MarginalX,
    MarginalY,
    JointX(usize),
    JointY(usize),
}

/// An exact tail law pi_n ~ [C + (-1)^(n-1) C_neg] n^beta rate^(n-1).
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticLaw {
    pub target: LawTarget,
    pub rate: f64,
    pub exponent: f64,
    pub coefficient: f64,
    pub coefficient_error: f64,
    pub periodic_coefficient: Option<f64>,
    /// 1/Y1(x_dom) for joint laws.
    pub j_factor: Option<f64>,
}

impl AsymptoticLaw {
    pub fn predict(&self, n: usize) -> f64 {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 }; // (-1)^(n-1)
        let c = self.coefficient + sign * self.periodic_coefficient.unwrap_or(0.0);
        c * (n as f64).powf(self.exponent) * self.rate.powi(n as i32 - 1)
    }
}

/// L(x): residue factor of pi1 at a simple zero of the sextic.
fn l_value(
    kp: &KernelPolynomials,
    sextic: &SexticFactorization,
    gf: &GfAccess,
    x: f64,
) -> Result<(f64, f64)> {
    let y0 = kernel::y0_at(kp, x)?;
    let pi2 = gf.pi2_at(y0)?;
    let pi00 = (gf.pi00(), 0.0);
    let h2 = kp.h2(x, y0);
    let h0 = kp.h0(x, y0);
    let f1t = singularity::f1_tilde_at(kp, x)?;
    let fp = sextic.f.poly.derivative().eval(x);
    Ok(with_error(&[pi2, pi00], |v| {
        (h2 * v[0] + h0 * v[1]) * f1t / (x * fp)
    }))
}

/// L~(y): the mirrored residue factor of pi2 at a zero of the y-side
/// sextic g.
fn l_tilde_value(
    kp: &KernelPolynomials,
    sextic: &SexticFactorization,
    gf: &GfAccess,
    y: f64,
) -> Result<(f64, f64)> {
    let x0 = kernel::x0_at(kp, y)?;
    let pi1 = gf.pi1_at(x0)?;
    let pi00 = (gf.pi00(), 0.0);
    let h1 = kp.h1(x0, y);
    let h0 = kp.h0(x0, y);
    // g1~(y) = at(y) h2(X1(y), y), stable via at*X1 = -bt - at*X0.
    let at_x1 = -kp.bt.eval(y) - kp.at.eval(y) * x0;
    let g1t = kp.a2t.eval(y) * at_x1 + kp.at.eval(y) * kp.b2t.eval(y);
    let gp = sextic.g.poly.derivative().eval(y);
    Ok(with_error(&[pi1, pi00], |v| {
        (h1 * v[0] + h0 * v[1]) * g1t / (y * gp)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DomKind {
    Pole,    // x*
    Induced, // x~1
    Triple,  // x* = x~1 = x3
}

fn dominant_kind(report: &SingularityReport, tol: &Tolerances) -> DomKind {
    let eq = |a: f64, b: f64| (a - b).abs() <= tol.case_eq * a.abs().max(b.abs()).max(1.0);
    let xs = report.xstar.finite().unwrap_or(f64::INFINITY);
    let xt = report.xtilde1.finite().unwrap_or(f64::INFINITY);
    if xs.is_finite() && eq(xs, report.x3) && xt.is_finite() && eq(xt, report.x3) {
        DomKind::Triple
    } else if xs <= xt {
        DomKind::Pole
    } else {
        DomKind::Induced
    }
}

/// The case coefficient c_{0,i} of Theorem 3.1 evaluated at the dominant
/// singularity `xd` (the periodic companion passes xd = -x_dom).
pub fn boundary_coefficient(
    kp: &KernelPolynomials,
    sextic: &SexticFactorization,
    report: &SingularityReport,
    gf: &GfAccess,
    xd: f64,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    match report.case_label {
        CaseLabel::Case1 => match dominant_kind(report, tol) {
            DomKind::Pole => l_value(kp, sextic, gf, xd),
            DomKind::Induced => {
                let y0 = kernel::y0_at(kp, xd)?;
                let (lt, lt_err) = l_tilde_value(kp, sextic, gf, y0)?;
                let h1 = kp.h1(xd, y0);
                let h2 = kp.h2(xd, y0);
                let y0p = kernel::y0_prime(kp, xd)?;
                let factor = -h2 * y0 / (h1 * y0p * xd);
                Ok((factor * lt, factor.abs() * lt_err))
            }
            DomKind::Triple => {
                let sd = sqrt_decomposition(kp, xd, report.x3)?;
                let y0 = sd.p;
                let (lt, lt_err) = l_tilde_value(kp, sextic, gf, y0)?;
                let h2 = kp.h2(xd, y0);
                let factor = h2 * y0 / (sd.q1 * sd.q);
                Ok((factor * lt, factor.abs() * lt_err))
            }
        },
        CaseLabel::Case2a => {
            let sd = sqrt_decomposition(kp, xd, report.x3)?;
            let y0 = sd.p;
            let pi2 = gf.pi2_at(y0)?;
            let pi00 = (gf.pi00(), 0.0);
            let h2 = kp.h2(xd, y0);
            let h0 = kp.h0(xd, y0);
            Ok(with_error(&[pi2, pi00], |v| {
                (h2 * v[0] + h0 * v[1]) / (-sd.q1)
            }))
        }
        CaseLabel::Case2b => {
            let sd = sqrt_decomposition(kp, xd, report.x3)?;
            let y0 = sd.p;
            let (lt, lt_err) = l_tilde_value(kp, sextic, gf, y0)?;
            let h1 = kp.h1(xd, y0);
            let h2 = kp.h2(xd, y0);
            let factor = h2 * y0 / (h1 * sd.q);
            Ok((factor * lt, factor.abs() * lt_err))
        }
        CaseLabel::Case3 => {
            let sd = sqrt_decomposition(kp, xd, report.x3)?;
            let y0 = sd.p;
            let pi2 = gf.pi2_at(y0)?;
            let pi2p = gf.pi2_prime_at(y0)?;
            let pi00 = (gf.pi00(), 0.0);
            let h1 = kp.h1(xd, y0);
            let h2 = kp.h2(xd, y0);
            let h0 = kp.h0(xd, y0);
            let h1y = kp.h1_dy(xd);
            let h2y = kp.h2_dy(xd, y0);
            let h0y = kp.h0_dy(xd);
            Ok(with_error(&[pi2, pi2p, pi00], |v| {
                let t = (h2 * v[0] + h0 * v[2]) / (-h1);
                let t_y = (h2y * v[0] + h2 * v[1] + h0y * v[2] + h1y * t) / (-h1);
                -0.5 * sd.q * t_y
            }))
        }
        CaseLabel::Case4 => {
            let y0 = kernel::y0_at(kp, xd)?;
            let x0 = kernel::x0_at(kp, y0)?;
            let pi1 = gf.pi1_at(x0)?;
            let pi00 = (gf.pi00(), 0.0);
            let h2 = kp.h2(xd, y0);
            let h1_b = kp.h1(x0, y0);
            let h0_b = kp.h0(x0, y0);
            // Total derivatives along the branch curves.
            let y0p = kernel::y0_prime(kp, xd)?;
            let h1_tot = kp.a1.derivative().eval(xd) * y0
                + kp.a1.eval(xd) * y0p
                + kp.b1.derivative().eval(xd);
            let x0p = kernel::x0_prime(kp, y0)?;
            let g0_tot = kp.a2t.derivative().eval(y0) * x0
                + kp.a2t.eval(y0) * x0p
                + kp.b2t.derivative().eval(y0);
            let den = xd * xd * h1_tot * y0p * g0_tot;
            Ok(with_error(&[pi1, pi00], |v| {
                h2 * (h1_b * v[0] + h0_b * v[1]) / den
            }))
        }
    }
}

/// Outcome of the boundary analysis: the (possibly downgraded) report and
/// the law for pi_{n,0}.
pub struct BoundaryAnalysis {
    pub report: SingularityReport,
    pub law: AsymptoticLaw,
}

/// Test the nonvanishing hypotheses behind the pole cases; on failure,
/// remove the vanishing candidate and re-classify (the paper's
/// removable-pole fallback).
fn nonvanishing_filter(
    kp: &KernelPolynomials,
    report: &SingularityReport,
    shapes: &crate::walk::ShapeClass,
    gf: &GfAccess,
    tol: &Tolerances,
) -> Result<SingularityReport> {
    let mut xstar = report.xstar;
    let mut xtilde1 = report.xtilde1;
    let mut ok = true;
    if let ExtReal::Finite(xs) = report.xstar {
        let y0 = kernel::y0_at(kp, xs)?;
        let (pi2, _) = gf.pi2_at(y0)?;
        let h2 = kp.h2(xs, y0);
        let h0 = kp.h0(xs, y0);
        let num = h2 * pi2 + h0 * gf.pi00();
        let scale = (h2 * pi2).abs() + (h0 * gf.pi00()).abs();
        if num.abs() <= NONVANISHING_TOL * scale {
            ok = false;
            xstar = ExtReal::PosInf;
        }
    }
    if let ExtReal::Finite(ys) = report.ystar {
        let x0 = kernel::x0_at(kp, ys)?;
        let (pi1, _) = gf.pi1_at(x0)?;
        let h1 = kp.h1(x0, ys);
        let h0 = kp.h0(x0, ys);
        let num = h1 * pi1 + h0 * gf.pi00();
        let scale = (h1 * pi1).abs() + (h0 * gf.pi00()).abs();
        if num.abs() <= NONVANISHING_TOL * scale {
            ok = false;
            xtilde1 = ExtReal::PosInf;
        }
    }
    if ok {
        return Ok(report.clone());
    }
    let (case_label, x_dom, periodic, mut warnings) =
        singularity::classify(xstar, xtilde1, report.x3, shapes, tol);
    warnings.push(
        "nonvanishing hypothesis failed at a pole candidate; downgraded per the removable-pole fallback"
            .to_string(),
    );
    Ok(SingularityReport {
        xstar,
        xtilde1,
        x_dom,
        case_label,
        periodic,
        nonvanishing_ok: false,
        warnings,
        ..report.clone()
    })
}

/// Boundary tail law for pi_{n,0}: nonvanishing check, case coefficient,
/// and the periodic companion when the X-shaped scenario prescribes one.
/// 1/Gamma(alpha) normalization folding the Tauberian transfer into the
/// law coefficient: alpha = 1, 1/2, -1/2 + 1 ... per case.
fn gamma_fold(case: CaseLabel) -> f64 {
    match case {
        // Case 1: alpha = 1, Gamma = 1. Case 4: alpha = 2, Gamma = 1.
        CaseLabel::Case1 | CaseLabel::Case4 => 1.0,
        // Cases 2 and 3 transfer through alpha = 1/2: Gamma = sqrt(pi).
        CaseLabel::Case2a | CaseLabel::Case2b | CaseLabel::Case3 => {
            1.0 / std::f64::consts::PI.sqrt()
        }
    }
}

pub fn boundary_law(
    kp: &KernelPolynomials,
    sextic: &SexticFactorization,
    report: &SingularityReport,
    shapes: &crate::walk::ShapeClass,
    gf: &GfAccess,
    tol: &Tolerances,
) -> Result<BoundaryAnalysis> {
    let report = nonvanishing_filter(kp, report, shapes, gf, tol)?;
    let fold = gamma_fold(report.case_label);
    let (c, c_err) = boundary_coefficient(kp, sextic, &report, gf, report.x_dom, tol)?;
    let periodic_coefficient = if report.periodic {
        let (cn, _) = boundary_coefficient(kp, sextic, &report, gf, -report.x_dom, tol)?;
        Some(cn * fold)
    } else {
        None
    };
    Ok(BoundaryAnalysis {
        law: AsymptoticLaw {
            target: LawTarget::BoundaryX,
            rate: 1.0 / report.x_dom,
            exponent: report.case_label.exponent(),
            coefficient: c * fold,
            coefficient_error: c_err * fold,
            periodic_coefficient,
            j_factor: None,
        },
        report,
    })
}

/// Joint-law coefficient pair at one dominant singularity.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JointCoefficients {
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub inv_y1: f64,
    pub inv_y0: f64,
}

/// A_i/B_i of Theorem 4.1 from the boundary coefficient c_{i,0} at the
/// singularity `xd`.
pub fn joint_coefficients(
    kp: &KernelPolynomials,
    report: &SingularityReport,
    c0: f64,
    xd: f64,
) -> Result<JointCoefficients> {
    let c = kp.c.eval(xd);
    let b1 = kp.b1.eval(xd);
    match report.case_label {
        CaseLabel::Case1 => {
            let y0 = kernel::y0_at(kp, xd)?;
            let y1 = kernel::y1_at(kp, xd)?;
            let a = kp.a.eval(xd);
            let h1 = kp.h1(xd, y0);
            let b = -h1 * c0 / (a * (y1 - y0) * y0);
            Ok(JointCoefficients {
                a_coeff: -b - c0 * b1 / c,
                b_coeff: b,
                inv_y1: 1.0 / y1,
                inv_y0: 1.0 / y0,
            })
        }
        CaseLabel::Case2a | CaseLabel::Case2b | CaseLabel::Case3 => {
            let y = kernel::y_branch_point_value(kp, xd);
            let a = kp.a.eval(xd);
            let h1 = kp.h1(xd, y);
            let b = if report.case_label == CaseLabel::Case3 {
                -h1 * c0 / c
            } else {
                -c0 * h1 / (a * y * y) // equal to -c0 h1 / c at the branch point
            };
            Ok(JointCoefficients {
                a_coeff: -c0 * b1 / c,
                b_coeff: b,
                inv_y1: 1.0 / y,
                inv_y0: 1.0 / y,
            })
        }
        CaseLabel::Case4 => {
            let y0 = kernel::y0_at(kp, xd)?;
            let y1 = kernel::y1_at(kp, xd)?;
            Ok(JointCoefficients {
                a_coeff: -b1 * c0 / c,
                b_coeff: 0.0,
                inv_y1: 1.0 / y1,
                inv_y0: 1.0 / y0,
            })
        }
    }
}

fn joint_j_coefficient(jc: &JointCoefficients, case: CaseLabel, j: usize) -> f64 {
    let jm1 = (j - 1) as f64;
    match case {
        CaseLabel::Case1 => jc.a_coeff * jc.inv_y1.powf(jm1) + jc.b_coeff * jc.inv_y0.powf(jm1),
        CaseLabel::Case2a | CaseLabel::Case2b | CaseLabel::Case3 => {
            (jc.a_coeff + jm1 * jc.b_coeff) * jc.inv_y1.powf(jm1)
        }
        CaseLabel::Case4 => jc.a_coeff * jc.inv_y1.powf(jm1),
    }
}

/// Tail law of pi_{n,j} for fixed j >= 1.
pub fn joint_law(
    kp: &KernelPolynomials,
    report: &SingularityReport,
    boundary: &AsymptoticLaw,
    j: usize,
) -> Result<AsymptoticLaw> {
    assert!(j >= 1);
    let jc = joint_coefficients(kp, report, boundary.coefficient, report.x_dom)?;
    let coeff = joint_j_coefficient(&jc, report.case_label, j);
    let rel_err = if boundary.coefficient != 0.0 {
        (boundary.coefficient_error / boundary.coefficient).abs()
    } else {
        0.0
    };
    let periodic_coefficient = match boundary.periodic_coefficient {
        Some(cn) => {
            let jcn = joint_coefficients(kp, report, cn, -report.x_dom)?;
            Some(joint_j_coefficient(&jcn, report.case_label, j))
        }
        None => None,
    };
    Ok(AsymptoticLaw {
        target: LawTarget::JointX(j),
        rate: boundary.rate,
        exponent: boundary.exponent,
        coefficient: coeff,
        coefficient_error: coeff.abs() * rel_err,
        periodic_coefficient,
        j_factor: Some(jc.inv_y1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MarginalCase {
    /// The dominant singularity of pi1 dominates the marginal.
    A,
    /// The kernel root X1(1) dominates: exact geometric decay.
    B,
    /// X1(1) = x*: geometric (Y0(x*) = 1) or factor n (Y1(x*) = 1).
    C,
    /// X1(1) = x3 < x*: exact geometric decay.
    D,
    /// X1(1) = x3 = x*: exact geometric decay.
    E,
}

/// Tail law of the marginal distribution pi_n = sum_{j>=0} pi_{n,j},
/// assembled from the pi(x, 1) residue and, when the rates coincide, the
/// boundary term.
pub fn marginal_law(
    kp: &KernelPolynomials,
    sextic: &SexticFactorization,
    report: &SingularityReport,
    drift: &DriftVectors,
    boundary: &AsymptoticLaw,
    gf: &GfAccess,
    tol: &Tolerances,
) -> Result<(AsymptoticLaw, MarginalCase)> {
    let at1 = kp.at.eval(1.0);
    let pi00 = (gf.pi00(), 0.0);
    let den = |x: f64| -kp.h(x, 1.0);
    // Shared boundary-plus-interior factor for the A-type assembly.
    let a_type = |xd: f64| 1.0 + kp.h1(xd, 1.0) / den(xd);

    let a_case_law = |case: MarginalCase| -> (AsymptoticLaw, MarginalCase) {
        let factor = a_type(report.x_dom);
        let neg = boundary
            .periodic_coefficient
            .map(|cn| cn * a_type(-report.x_dom));
        (
            AsymptoticLaw {
                target: LawTarget::MarginalX,
                rate: boundary.rate,
                exponent: boundary.exponent,
                coefficient: boundary.coefficient * factor,
                coefficient_error: boundary.coefficient_error * factor.abs(),
                periodic_coefficient: neg,
                j_factor: None,
            },
            case,
        )
    };

    if drift.m.0 >= 0.0 {
        // X1(1) = 1: the kernel contributes no zero outside the unit circle.
        return Ok(a_case_law(MarginalCase::A));
    }

    let x1_one = kernel::x1_at(kp, 1.0)?;
    let xs = report.xstar.finite().unwrap_or(f64::INFINITY);
    let bnd_dom = report.x_dom;
    let eq = |a: f64, b: f64| (a - b).abs() <= tol.case_eq * a.abs().max(b.abs()).max(1.0);

    if bnd_dom < x1_one && !eq(bnd_dom, x1_one) {
        return Ok(a_case_law(MarginalCase::A));
    }

    // Whether y = 1 is the small or the large kernel root at X1(1). When
    // Y0(X1(1)) = 1 the interlace identity forces the pi(x, 1) numerator
    // to vanish there: the candidate pole is removable.
    let other_root_large = |x: f64| kp.c.eval(x) / kp.a.eval(x) >= 1.0;

    if x1_one < bnd_dom && !eq(bnd_dom, x1_one) {
        if other_root_large(x1_one) {
            // Removable: the marginal inherits pi1's singularity.
            return Ok(a_case_law(MarginalCase::A));
        }
        // Genuine simple pole of pi(x, 1) at X1(1); pi1 is analytic there.
        let pi1 = gf.pi1_at(x1_one)?;
        let pi2_1 = gf.pi2_at(1.0)?;
        let h1 = kp.h1(x1_one, 1.0);
        let h2 = kp.h2(x1_one, 1.0);
        let h0 = kp.h0(x1_one, 1.0);
        let (c, e) = with_error(&[pi1, pi2_1, pi00], |v| {
            (h1 * v[0] + h2 * v[1] + h0 * v[2]) / (at1 * x1_one * (x1_one - 1.0))
        });
        return Ok((
            AsymptoticLaw {
                target: LawTarget::MarginalX,
                rate: 1.0 / x1_one,
                exponent: 0.0,
                coefficient: c,
                coefficient_error: e,
                periodic_coefficient: None,
                j_factor: None,
            },
            MarginalCase::B,
        ));
    }

    // Coincidence X1(1) = x3: then y = 1 is the double kernel root at x3,
    // the numerator vanishes at x3, and the square-root part of pi1 takes
    // over: a factor n^{-1/2} law rather than the bare pole.
    if eq(x1_one, report.x3) {
        let x3 = report.x3;
        let fold = 1.0 / std::f64::consts::PI.sqrt();
        if eq(xs, report.x3) {
            // E: x* = x3 as well, so h1(x, 1) has a simple zero at x3 and
            // the boundary's n^{-1/2} behaviour carries over.
            let h1_dx = kp.a1.derivative().eval(x3) + kp.b1.derivative().eval(x3);
            let factor = 1.0 + h1_dx / (-at1 * (x3 - 1.0));
            return Ok((
                AsymptoticLaw {
                    target: LawTarget::MarginalX,
                    rate: 1.0 / x3,
                    exponent: -0.5,
                    coefficient: boundary.coefficient * factor,
                    coefficient_error: boundary.coefficient_error * factor.abs(),
                    periodic_coefficient: None,
                    j_factor: None,
                },
                MarginalCase::E,
            ));
        }
        // D: sqrt-part coefficient of pi1 at x3 is -2 c_{0,3}.
        let (c03, c03_err) = boundary_coefficient(kp, sextic, report, gf, x3, tol)?;
        let h1 = kp.h1(x3, 1.0);
        let scale = -2.0 * h1 / (at1 * (x3 - 1.0) * x3) * fold;
        return Ok((
            AsymptoticLaw {
                target: LawTarget::MarginalX,
                rate: 1.0 / x3,
                exponent: -0.5,
                coefficient: scale * c03,
                coefficient_error: scale.abs() * c03_err,
                periodic_coefficient: None,
                j_factor: None,
            },
            MarginalCase::D,
        ));
    }

    // C: X1(1) = x* < x3.
    let y0 = kernel::y0_at(kp, xs)?;
    if (y0 - 1.0).abs() <= 1e-6 {
        // Y0(x*) = 1: h1(x, 1) vanishes at x*, leaving a simple pole.
        let pi2_1 = gf.pi2_at(1.0)?;
        let h1_dx = kp.a1.derivative().eval(xs) + kp.b1.derivative().eval(xs);
        let h2 = kp.h2(xs, 1.0);
        let h0 = kp.h0(xs, 1.0);
        let c_bnd = (boundary.coefficient, boundary.coefficient_error);
        let (c, e) = with_error(&[c_bnd, pi2_1, pi00], |v| {
            v[0] * (1.0 + h1_dx / (-at1 * (xs - 1.0)))
                + (h2 * v[1] + h0 * v[2]) / (at1 * xs * (xs - 1.0))
        });
        Ok((
            AsymptoticLaw {
                target: LawTarget::MarginalX,
                rate: 1.0 / xs,
                exponent: 0.0,
                coefficient: c,
                coefficient_error: e,
                periodic_coefficient: None,
                j_factor: None,
            },
            MarginalCase::C,
        ))
    } else {
        // Y1(x*) = 1: x* is a double pole of pi(x, 1), factor n.
        let h1 = kp.h1(xs, 1.0);
        let scale = h1 / (at1 * xs * (xs - 1.0));
        Ok((
            AsymptoticLaw {
                target: LawTarget::MarginalX,
                rate: 1.0 / xs,
                exponent: 1.0,
                coefficient: scale * boundary.coefficient,
                coefficient_error: scale.abs() * boundary.coefficient_error,
                periodic_coefficient: None,
                j_factor: None,
            },
            MarginalCase::C,
        ))
    }
}

/// Residual report of the generating-function recursion identities
/// verified against oracle partial sums at a fixed x.
#[derive(Clone, Debug, Serialize)]
pub struct PhiCheckReport {
    pub x: f64,
    pub depth: usize,
    pub max_balance_residual: f64,
    pub max_closed_form_residual: f64,
    pub max_w_identity_residual: f64,
}

/// Verify the three-term balance identities, the w recursion, and the
/// closed forms for h1 phi_j against oracle partial sums.
pub fn phi_recursion_check(
    kp: &KernelPolynomials,
    grid: &StationaryGrid,
    gf: &GfAccess,
    depth: usize,
    x: f64,
) -> Result<PhiCheckReport> {
    if depth + 2 > grid.size {
        return Err(Error::OracleTooShallow {
            needed: depth + 2,
            have: grid.size,
        });
    }
    if x.abs() >= gf.x_radius * 0.99 {
        return Err(Error::NonconvergentEvaluator {
            which: "phi",
            arg: x,
            radius: gf.x_radius,
        });
    }
    let phi = |j: usize| -> f64 {
        let mut acc = 0.0;
        let mut pow = 1.0;
        for i in 1..=grid.size {
            acc += grid.at(i, j) * pow;
            pow *= x;
        }
        acc
    };
    let pi0 = |j: usize| grid.at(0, j);
    let a = kp.a.eval(x);
    let b = kp.b.eval(x);
    let c = kp.c.eval(x);
    let a1 = kp.a1.eval(x);
    let b1 = kp.b1.eval(x);
    let a2 = kp.a2.eval(x);
    let b2 = kp.b2.eval(x);
    let c2 = kp.c2.eval(x);
    let a0 = kp.a0.eval(x);
    let b0 = kp.b0.eval(x);
    let pi00 = gf.pi00();

    let a_star = |j: usize| -> f64 {
        match j {
            0 => -c2 * pi0(1) - b0 * pi00,
            1 => -c2 * pi0(2) - b2 * pi0(1) - a0 * pi00,
            _ => -c2 * pi0(j + 1) - b2 * pi0(j) - a2 * pi0(j - 1),
        }
    };

    let phis: Vec<f64> = (0..=depth + 1).map(phi).collect();
    let mut max_balance = 0.0f64;
    for j in 0..=depth {
        let r = match j {
            0 => c * phis[1] + b1 * phis[0] - a_star(0),
            1 => c * phis[2] + b * phis[1] + a1 * phis[0] - a_star(1),
            _ => c * phis[j + 1] + b * phis[j] + a * phis[j - 1] - a_star(j),
        };
        max_balance = max_balance.max(r.abs());
    }

    let y = kernel::y0_at(kp, x)?;
    if y.abs() >= gf.y_radius * 0.99 {
        return Err(Error::NonconvergentEvaluator {
            which: "f_k",
            arg: y,
            radius: gf.y_radius,
        });
    }
    let u = y / c;

    // w_{-1}, w_0, w_1, ... stored with index offset 1.
    let mut w = vec![-a1 / (a * u), -b1];
    for _ in 1..=depth {
        let k = w.len();
        w.push(b * u * w[k - 1] + (1.0 + b * u) * w[k - 2]);
    }
    let mut max_w = 0.0f64;
    for j in 1..=depth {
        let wj1 = w[j]; // w_{j-1}
        let wj2 = w[j - 1]; // w_{j-2}
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = sign * (b * u * wj1 + (1.0 + b * u) * wj2) + b1 + a1 * y;
        let rhs = sign * (1.0 + b * u) * wj1;
        max_w = max_w.max((lhs - rhs).abs());
    }

    // f_k(x) with y = Y0(x): weighted tails of the vertical boundary column.
    let f_k = |k: usize| -> f64 {
        let mut s_a = 0.0; // sum_{j >= k-1} pi_{0,j} y^(j-(k-1))
        let mut s_b = 0.0;
        let mut s_c = 0.0;
        let mut pow = 1.0;
        for j in (k - 1)..=grid.size {
            let p = pi0(j);
            s_a += p * pow;
            if j >= k {
                s_b += p * pow / y;
            }
            if j > k {
                s_c += p * pow / (y * y);
            }
            pow *= y;
        }
        -a2 * s_a - b2 * s_b - c2 * s_c
    };

    let g1 = a_star(0) * a1 - b1 * a_star(1);
    let h1 = a1 * y + b1;
    let sign = |p: i64| if p % 2 == 0 { 1.0 } else { -1.0 };
    let mut max_closed = 0.0f64;
    for j in 1..=depth {
        let rhs = if j == 1 {
            y * u * f_k(2) * w[1] + u * g1
        } else {
            let mut acc = sign(j as i64 + 1) * y * u * f_k(j + 1) * w[j];
            let mut au_pow = 1.0;
            for k in 0..=(j - 2) {
                acc += u * sign(j as i64 + 1 - k as i64) * a_star(j - k) * w[j - k] * au_pow;
                au_pow *= a * u;
            }
            acc + u * g1 * au_pow
        };
        let lhs = h1 * phis[j];
        max_closed = max_closed.max((lhs - rhs).abs());
    }

    Ok(PhiCheckReport {
        x,
        depth,
        max_balance_residual: max_balance,
        max_closed_form_residual: max_closed,
        max_w_identity_residual: max_w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transfer_of_shifted_geometric_is_exact() {
        // A(z) = (1 - z/2)^{-1}: a_n = 2^{-n}.
        let law = tauberian_transfer(1.0, 1.0, 2.0).unwrap();
        for n in [0usize, 1, 5, 40, 200] {
            let want = 0.5f64.powi(n as i32);
            assert!((law.predict(n) - want).abs() <= 1e-15 * want);
        }
    }

    #[test]
    fn transfer_of_inverse_sqrt_matches_series() {
        // A(z) = (1 - z)^{-1/2}: a_n = C(2n, n) / 4^n ~ n^{-1/2}/sqrt(pi).
        let law = tauberian_transfer(0.5, 1.0, 1.0).unwrap();
        let mut a_n = 1.0f64;
        for n in 1..=200usize {
            a_n *= (2.0 * n as f64 - 1.0) / (2.0 * n as f64);
            if n == 200 {
                let rel = (law.predict(n) - a_n).abs() / a_n;
                assert!(rel < 0.02, "relative error {rel}");
            }
        }
    }

    #[test]
    fn transfer_rejects_gamma_poles() {
        assert!(matches!(
            tauberian_transfer(0.0, 1.0, 2.0),
            Err(Error::AlphaAtGammaPole(_))
        ));
        assert!(matches!(
            tauberian_transfer(-2.0, 1.0, 2.0),
            Err(Error::AlphaAtGammaPole(_))
        ));
        assert!(tauberian_transfer(-0.5, 1.0, 2.0).is_ok());
    }

    #[test]
    fn two_singularity_alternation_is_reproduced() {
        // A(z) = g1/(1 - z) + g2/(1 + z): a_n = g1 + (-1)^n g2 exactly.
        let (g1, g2) = (0.7, 0.25);
        let laws = tauberian_transfer_multi(&[
            TransferTerm {
                zeta: 1.0,
                alpha: 1.0,
                g: g1,
            },
            TransferTerm {
                zeta: -1.0,
                alpha: 1.0,
                g: g2,
            },
        ])
        .unwrap();
        for n in 0..64usize {
            let want = g1 + if n % 2 == 0 { g2 } else { -g2 };
            let got = transfer_predict(&laws, n);
            assert!((got - want).abs() < 1e-12, "n = {n}: {got} vs {want}");
        }
    }
}
