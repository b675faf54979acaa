//! Dominant-singularity location and case classification: the sextic
//! factor polynomial and its root attribution, the boundary-kernel zeros
//! x* and y*, the induced pole candidate x~1 = X1(y*), and the exhaustive
//! case table with X-shaped periodic scenarios.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{self, BranchPoints, ExtReal, KernelPolynomials};
use crate::poly::Poly;
use crate::walk::ShapeClass;
use crate::Tolerances;

/// Residual threshold (relative) for attributing a sextic root to one of
/// the two branch factors.
pub const ATTRIBUTION_TOL: f64 = 1e-8;
/// Relative accuracy of the bisection refinement for x* and y*.
pub const BISECT_TOL: f64 = 1e-12;
/// A candidate zero endpoint value above -1e-12 counts as nonnegative.
pub const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootAttribution {
    ZeroOfF0,
    ZeroOfF1Tilde,
    BranchPoint,
    Unresolved,
}

/// One side's factor polynomial f = a b1^2 - b b1 a1 + c a1^2 together
/// with its roots and their attribution to f0 = h1(x, Y0(x)) or
/// f1~ = a(x) h1(x, Y1(x)).
#[derive(Clone, Debug, Serialize)]
pub struct SexticSide {
    pub poly: Poly,
    pub roots: Vec<(f64, f64)>,
    pub attribution: Vec<RootAttribution>,
    pub residuals: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SexticFactorization {
    pub f: SexticSide,
    pub g: SexticSide,
}

/// f0(x) = h1(x, Y0(x)) = a1(x) Y0(x) + b1(x).
pub fn f0_at(kp: &KernelPolynomials, x: f64) -> Result<f64> {
    let y0 = kernel::y0_at(kp, x)?;
    Ok(kp.a1.eval(x) * y0 + kp.b1.eval(x))
}

/// f1~(x) = a(x) h1(x, Y1(x)) = a1(x) [a Y1](x) + a(x) b1(x), finite even
/// where a vanishes.
pub fn f1_tilde_at(kp: &KernelPolynomials, x: f64) -> Result<f64> {
    let ay1 = kernel::a_y1(kp, Complex64::new(x, 0.0))?;
    Ok(kp.a1.eval(x) * ay1.re + kp.a.eval(x) * kp.b1.eval(x))
}

/// g0(y) = h2(X0(y), y) = a2t(y) X0(y) + b2t(y).
pub fn g0_at(kp: &KernelPolynomials, y: f64) -> Result<f64> {
    let x0 = kernel::x0_at(kp, y)?;
    Ok(kp.a2t.eval(y) * x0 + kp.b2t.eval(y))
}

/// f0 at the branch point x3, where Y0 = Y1 = -b/(2a).
pub fn f0_at_branch(kp: &KernelPolynomials, x3: f64) -> f64 {
    kp.a1.eval(x3) * kernel::y_branch_point_value(kp, x3) + kp.b1.eval(x3)
}

/// g0 at the branch point y3, where X0 = X1 = -bt/(2at).
pub fn g0_at_branch(kp: &KernelPolynomials, y3: f64) -> f64 {
    kp.a2t.eval(y3) * kernel::x_branch_point_value(kp, y3) + kp.b2t.eval(y3)
}

fn sextic_poly(a: &Poly, b: &Poly, c: &Poly, a1: &Poly, b1: &Poly) -> Poly {
    a.mul(&b1.mul(b1))
        .sub(&b.mul(&b1.mul(a1)))
        .add(&c.mul(&a1.mul(a1)))
}

fn attribute_side(
    kp: &KernelPolynomials,
    poly: &Poly,
    branch: &[ExtReal; 4],
    side: char,
    x_side: bool,
) -> Result<SexticSide> {
    let mut roots = Vec::new();
    let mut attribution = Vec::new();
    let mut residuals = Vec::new();
    for z in poly.roots() {
        // The two factor values at the root; on the y-side the mirrored
        // polynomials play the roles of (a, b, a1, b1).
        let (bv, a1z, b1z, az, bz) = if x_side {
            (
                kernel::eval_y(kp, z)?,
                kp.a1.eval_complex(z),
                kp.b1.eval_complex(z),
                kp.a.eval_complex(z),
                kp.b.eval_complex(z),
            )
        } else {
            (
                kernel::eval_x(kp, z)?,
                kp.a2t.eval_complex(z),
                kp.b2t.eval_complex(z),
                kp.at.eval_complex(z),
                kp.bt.eval_complex(z),
            )
        };
        let ay1 = -bz - az * bv.y0;
        let r0 = (a1z * bv.y0 + b1z).norm();
        let r1 = (a1z * ay1 + az * b1z).norm();
        let scale0 = (a1z.norm() * bv.y0.norm() + b1z.norm()).max(1.0);
        let scale1 = (a1z.norm() * ay1.norm() + az.norm() * b1z.norm()).max(1.0);
        let ok0 = r0 <= ATTRIBUTION_TOL * scale0;
        let ok1 = r1 <= ATTRIBUTION_TOL * scale1;
        let near_branch = branch.iter().any(|p| match p {
            ExtReal::Finite(v) => (z - Complex64::new(*v, 0.0)).norm() <= 1e-6 * (1.0 + v.abs()),
            _ => false,
        });
        let att = match (ok0, ok1) {
            (true, true) => RootAttribution::BranchPoint,
            (true, false) => RootAttribution::ZeroOfF0,
            (false, true) => RootAttribution::ZeroOfF1Tilde,
            (false, false) => {
                if near_branch {
                    // Both factor evaluations lose accuracy right at a
                    // branch point; the root is structural there.
                    RootAttribution::BranchPoint
                } else {
                    return Err(Error::AttributionAmbiguous {
                        side,
                        re: z.re,
                        im: z.im,
                        r0,
                        r1,
                    });
                }
            }
        };
        roots.push((z.re, z.im));
        attribution.push(att);
        residuals.push((r0, r1));
    }
    Ok(SexticSide {
        poly: poly.clone(),
        roots,
        attribution,
        residuals,
    })
}

/// Build both factor polynomials and attribute every root.
pub fn build_sextic(kp: &KernelPolynomials, bp: &BranchPoints) -> Result<SexticFactorization> {
    let f = sextic_poly(&kp.a, &kp.b, &kp.c, &kp.a1, &kp.b1);
    let g = sextic_poly(&kp.at, &kp.bt, &kp.ct, &kp.a2t, &kp.b2t);
    Ok(SexticFactorization {
        f: attribute_side(kp, &f, &bp.x, 'x', true)?,
        g: attribute_side(kp, &g, &bp.y, 'y', false)?,
    })
}

/// Locate the unique zero of `eval` in (1, hi] by grid scan plus
/// bisection. The function is negative just right of 1 and nonnegative at
/// hi for in-scope walks.
fn locate_zero<F>(eval: F, hi: f64, value_at_hi: f64, side: char) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if value_at_hi.abs() <= ENDPOINT_TOL {
        return Ok(hi);
    }
    const GRID: usize = 4096;
    let step = (hi - 1.0) / GRID as f64;
    let mut lo = (1.0 + step * 1e-6).min(hi);
    if eval(lo)? >= 0.0 {
        // Zero hugging 1; tighten the left endpoint.
        let tight = 1.0 + (hi - 1.0) * 1e-12;
        if eval(tight)? >= 0.0 {
            return Err(Error::BracketFailure {
                side,
                hi,
                endpoint: value_at_hi,
            });
        }
        lo = tight;
    }
    let mut hi_b = hi;
    let mut found = false;
    for k in 1..=GRID {
        let t = if k == GRID { hi } else { 1.0 + step * k as f64 };
        if t <= lo {
            continue;
        }
        let ft = if k == GRID { value_at_hi } else { eval(t)? };
        if ft >= 0.0 {
            hi_b = t;
            found = true;
            break;
        }
        lo = t;
    }
    if !found {
        return Err(Error::BracketFailure {
            side,
            hi,
            endpoint: value_at_hi,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi_b);
        if (hi_b - lo) <= BISECT_TOL * mid {
            break;
        }
        if eval(mid)? < 0.0 {
            lo = mid;
        } else {
            hi_b = mid;
        }
    }
    Ok(0.5 * (lo + hi_b))
}

/// x*: the unique zero of h1(x, Y0(x)) in (1, x3] when f0(x3) >= 0,
/// infinity otherwise. Cross-checked against the sextic roots.
pub fn find_xstar(
    kp: &KernelPolynomials,
    bp: &BranchPoints,
    sextic: &SexticFactorization,
) -> Result<ExtReal> {
    let x3 = bp.x3();
    let f0_x3 = f0_at_branch(kp, x3);
    if f0_x3 < -ENDPOINT_TOL {
        return Ok(ExtReal::PosInf);
    }
    let z = locate_zero(|x| f0_at(kp, x), x3, f0_x3, 'x')?;
    check_against_roots(&sextic.f, z, x3, 'x')?;
    Ok(ExtReal::Finite(z))
}

/// y* from g0 over (1, y3], and the induced candidate x~1 = X1(y*).
pub fn find_ystar_and_xtilde1(
    kp: &KernelPolynomials,
    bp: &BranchPoints,
    sextic: &SexticFactorization,
) -> Result<(ExtReal, ExtReal)> {
    let y3 = bp.y3();
    let g0_y3 = g0_at_branch(kp, y3);
    if g0_y3 < -ENDPOINT_TOL {
        return Ok((ExtReal::PosInf, ExtReal::PosInf));
    }
    let ystar = locate_zero(|y| g0_at(kp, y), y3, g0_y3, 'y')?;
    check_against_roots(&sextic.g, ystar, y3, 'y')?;
    let xt1 = kernel::x1_at(kp, ystar)?;
    if xt1.is_finite() {
        Ok((ExtReal::Finite(ystar), ExtReal::Finite(xt1)))
    } else {
        Ok((ExtReal::Finite(ystar), ExtReal::PosInf))
    }
}

fn check_against_roots(side: &SexticSide, z: f64, hi: f64, name: char) -> Result<()> {
    let ok = side
        .roots
        .iter()
        .any(|(re, im)| ((re - z).powi(2) + im.powi(2)).sqrt() <= 1e-8 * (1.0 + z.abs()));
    if ok {
        Ok(())
    } else {
        Err(Error::BracketFailure {
            side: name,
            hi,
            endpoint: z,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    /// Simple-pole dominant singularity: exact geometric decay.
    Case1,
    /// x* = x3 < x~1: square-root singularity, factor n^{-1/2}.
    Case2a,
    /// x~1 = x3 < x*: square-root singularity, factor n^{-1/2}.
    Case2b,
    /// Branch point dominates: factor n^{-3/2}.
    Case3,
    /// Double pole x* = x~1 < x3: factor n.
    Case4,
}

impl CaseLabel {
    /// Polynomial exponent of the tail law.
    pub fn exponent(self) -> f64 {
        match self {
            CaseLabel::Case1 => 0.0,
            CaseLabel::Case2a | CaseLabel::Case2b => -0.5,
            CaseLabel::Case3 => -1.5,
            CaseLabel::Case4 => 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularityReport {
    pub xstar: ExtReal,
    pub ystar: ExtReal,
    /// Y0(x*) when x* is finite.
    pub ytilde0: Option<f64>,
    pub xtilde1: ExtReal,
    pub x3: f64,
    pub y3: f64,
    pub x_dom: f64,
    pub case_label: CaseLabel,
    /// 1: interior not X-shaped; 2: only interior; 3: interior and
    /// horizontal; 4: interior and vertical; 5: all three.
    pub shape_scenario: u8,
    pub periodic: bool,
    pub nonvanishing_ok: bool,
    pub f0_at_x3: f64,
    pub g0_at_y3: f64,
    pub warnings: Vec<String>,
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn ext_min(values: &[ExtReal]) -> f64 {
    values
        .iter()
        .filter_map(|v| v.finite())
        .fold(f64::INFINITY, f64::min)
}

fn shape_scenario(shapes: &ShapeClass) -> u8 {
    match (
        shapes.interior_x_shaped,
        shapes.h1_x_shaped,
        shapes.h2_x_shaped,
    ) {
        (false, _, _) => 1,
        (true, false, false) => 2,
        (true, true, false) => 3,
        (true, false, true) => 4,
        (true, true, true) => 5,
    }
}

/// Classify from the three candidates. Exposed separately so the
/// nonvanishing fallback can re-classify with a candidate removed.
pub fn classify(
    xstar: ExtReal,
    xtilde1: ExtReal,
    x3: f64,
    shapes: &ShapeClass,
    tol: &Tolerances,
) -> (CaseLabel, f64, bool, Vec<String>) {
    let xs = xstar.finite().unwrap_or(f64::INFINITY);
    let xt = xtilde1.finite().unwrap_or(f64::INFINITY);
    let x_dom = ext_min(&[xstar, xtilde1, ExtReal::Finite(x3)]);

    let eq_s3 = xs.is_finite() && rel_eq(xs, x3, tol.case_eq);
    let eq_t3 = xt.is_finite() && rel_eq(xt, x3, tol.case_eq);
    let eq_st = xs.is_finite() && xt.is_finite() && rel_eq(xs, xt, tol.case_eq);

    let mut warnings = Vec::new();
    for (label, a, b, eq) in [
        ("x* vs x3", xs, x3, eq_s3),
        ("x~1 vs x3", xt, x3, eq_t3),
        ("x* vs x~1", xs, xt, eq_st),
    ] {
        if a.is_finite()
            && b.is_finite()
            && !eq
            && rel_eq(a, b, tol.warn_band)
        {
            warnings.push(format!(
                "near case boundary: {label} differ by less than the warning band ({a} vs {b})"
            ));
        }
    }

    let case = if eq_s3 && eq_t3 {
        CaseLabel::Case1 // triple coincidence
    } else if eq_st && xs < x3 && !eq_s3 {
        CaseLabel::Case4
    } else if eq_s3 && xt > x3 {
        CaseLabel::Case2a
    } else if eq_t3 && xs > x3 {
        CaseLabel::Case2b
    } else if x3 < xs && x3 < xt {
        CaseLabel::Case3
    } else {
        CaseLabel::Case1
    };

    let scenario = shape_scenario(shapes);
    let dom_is_xstar = xs.is_finite() && rel_eq(x_dom, xs, tol.case_eq);
    let dom_is_xt1 = xt.is_finite() && rel_eq(x_dom, xt, tol.case_eq);
    let periodic = match scenario {
        1 => false,
        2 => case == CaseLabel::Case3,
        3 => match case {
            CaseLabel::Case1 => dom_is_xstar && !dom_is_xt1 && !eq_s3,
            CaseLabel::Case2a => true,
            CaseLabel::Case3 => true,
            _ => false,
        },
        4 => match case {
            CaseLabel::Case1 => dom_is_xt1 && !dom_is_xstar && !eq_t3,
            CaseLabel::Case2b => true,
            CaseLabel::Case3 => true,
            _ => false,
        },
        _ => true, // scenario 5: every case keeps the +-x_dom pair
    };

    (case, x_dom, periodic, warnings)
}

/// Full singularity analysis for the x direction.
pub fn locate_and_classify(
    kp: &KernelPolynomials,
    bp: &BranchPoints,
    sextic: &SexticFactorization,
    shapes: &ShapeClass,
    tol: &Tolerances,
) -> Result<SingularityReport> {
    let x3 = bp.x3();
    let y3 = bp.y3();
    let xstar = find_xstar(kp, bp, sextic)?;
    let (ystar, xtilde1) = find_ystar_and_xtilde1(kp, bp, sextic)?;
    let ytilde0 = match xstar {
        ExtReal::Finite(xs) => Some(kernel::y0_at(kp, xs)?),
        _ => None,
    };
    let (case_label, x_dom, periodic, mut warnings) = classify(xstar, xtilde1, x3, shapes, tol);
    if shape_scenario(shapes) == 5 {
        warnings.push(
            "fully X-shaped walk: interior and boundary steps preserve the parity of m+n, so \
             the stationary mass concentrates on a single parity class (one parity of each \
             tail sequence is structurally null)"
                .to_string(),
        );
    }
    Ok(SingularityReport {
        xstar,
        ystar,
        ytilde0,
        xtilde1,
        x3,
        y3,
        x_dom,
        case_label,
        shape_scenario: shape_scenario(shapes),
        periodic,
        nonvanishing_ok: true,
        f0_at_x3: f0_at_branch(kp, x3),
        g0_at_y3: g0_at_branch(kp, y3),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{branch_points, build_polynomials, discriminant};
    use crate::walk::{classify_shape, reference_walk_w1, WalkSpec};

    fn analyze_parts(
        spec: &WalkSpec,
    ) -> (
        KernelPolynomials,
        BranchPoints,
        SexticFactorization,
        ShapeClass,
    ) {
        let tol = Tolerances::default();
        let kp = build_polynomials(spec);
        let disc = discriminant(spec);
        let bp = branch_points(&disc, &tol).unwrap();
        let sextic = build_sextic(&kp, &bp).unwrap();
        let shapes = classify_shape(spec);
        (kp, bp, sextic, shapes)
    }

    #[test]
    fn w1_sextic_has_root_at_one() {
        let (_, _, sextic, _) = analyze_parts(&reference_walk_w1());
        assert!(sextic.f.poly.eval(1.0).abs() < 1e-12);
        assert!(sextic
            .f
            .roots
            .iter()
            .any(|(re, im)| (re - 1.0).abs() < 1e-8 && im.abs() < 1e-8));
    }

    #[test]
    fn sextic_product_identity_on_the_real_segment() {
        // f(x) = f0(x) * f1~(x) between x2 and x3.
        let spec = reference_walk_w1();
        let (kp, bp, sextic, _) = analyze_parts(&spec);
        let x2 = bp.x[1].finite().unwrap();
        let x3 = bp.x3();
        for k in 1..100 {
            let x = x2 + (x3 - x2) * k as f64 / 100.0;
            let lhs = sextic.f.poly.eval(x);
            let rhs = f0_at(&kp, x).unwrap() * f1_tilde_at(&kp, x).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1e-12);
            assert!(
                (lhs - rhs).abs() <= 1e-9 * scale,
                "x = {x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn w1_xstar_and_mirror() {
        let spec = reference_walk_w1();
        let (kp, bp, sextic, shapes) = analyze_parts(&spec);
        let f0_x3 = f0_at_branch(&kp, bp.x3());
        assert!((f0_x3 - 1.2928).abs() < 1e-3, "f0(x3) = {f0_x3}");
        let report =
            locate_and_classify(&kp, &bp, &sextic, &shapes, &Tolerances::default()).unwrap();
        let xs = report.xstar.finite().expect("finite x*");
        assert!((xs - 2.5573).abs() < 1e-3, "x* = {xs}");
        // Residual at the located zero.
        assert!(f0_at(&kp, xs).unwrap().abs() < 1e-10);
        // W1 is (x<->y)-symmetric: y* = x*.
        let ys = report.ystar.finite().expect("finite y*");
        assert!((ys - xs).abs() < 1e-10);
        assert!((report.y3 - report.x3).abs() < 1e-10);
        // |Y0(x*)| <= 1 for a pole candidate.
        let yt0 = report.ytilde0.unwrap();
        assert!((yt0 - 0.8866).abs() < 1e-3, "Y0(x*) = {yt0}");
        // x~1 = X1(y*) beyond x*.
        let xt1 = report.xtilde1.finite().expect("finite x~1");
        assert!((xt1 - 3.3827).abs() < 2e-3, "x~1 = {xt1}");
        assert_eq!(report.case_label, CaseLabel::Case1);
        assert!((report.x_dom - xs).abs() < 1e-12);
        assert!(!report.periodic);
        assert_eq!(report.shape_scenario, 1);
    }

    #[test]
    fn uniqueness_of_f0_zero_on_grid() {
        let spec = reference_walk_w1();
        let (kp, bp, _, _) = analyze_parts(&spec);
        let x3 = bp.x3();
        let mut crossings = 0;
        let mut prev = f0_at(&kp, 1.0 + 1e-6).unwrap();
        let steps = ((x3 - 1.0) / 1e-3).ceil() as usize;
        for k in 1..=steps {
            let x = 1.0 + (x3 - 1.0) * k as f64 / steps as f64;
            let cur = f0_at(&kp, x).unwrap();
            if prev < 0.0 && cur >= 0.0 {
                crossings += 1;
            }
            prev = cur;
        }
        assert_eq!(crossings, 1);
    }

    #[test]
    fn special_random_walk_sextic_structure() {
        // Cross-shaped interior, p1_{-1,1} = p1_{-1,0} = 0.
        let spec = WalkSpec::from_steps(
            &[
                (1, 0, 0.1),
                (-1, 0, 0.3),
                (0, 1, 0.15),
                (0, -1, 0.25),
                (0, 0, 0.2),
            ],
            &[(1, 0, 0.2), (0, 1, 0.3), (1, 1, 0.1), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let (_kp, bp, sextic, _) = analyze_parts(&spec);
        // Six roots, all real, two at zero.
        assert_eq!(sextic.f.roots.len(), 6);
        for (re, im) in &sextic.f.roots {
            assert!(
                im.abs() <= 1e-7 * (1.0 + re.abs()),
                "complex root {re}+{im}i"
            );
        }
        let zeros = sextic
            .f
            .roots
            .iter()
            .filter(|(re, im)| re.abs() < 1e-9 && im.abs() < 1e-9)
            .count();
        assert_eq!(zeros, 2);
        // One root in [x2, x3] besides 1, one in (-inf, x1], one in [x4, inf).
        let x1 = bp.x[0].finite().unwrap();
        let x2 = bp.x[1].finite().unwrap();
        let x3 = bp.x3();
        let x4 = bp.x[3].finite().unwrap();
        let tol = 1e-7;
        let mut in_mid = 0;
        let mut below = 0;
        let mut above = 0;
        for (re, im) in &sextic.f.roots {
            if im.abs() > 1e-7 || re.abs() < 1e-9 {
                continue;
            }
            if *re >= x2 - tol && *re <= x3 + tol {
                in_mid += 1;
            } else if *re <= x1 + tol {
                below += 1;
            } else if *re >= x4 - tol {
                above += 1;
            }
        }
        assert_eq!(in_mid, 2, "roots in [x2,x3] (incl. 1)");
        assert_eq!(below, 1);
        assert_eq!(above, 1);
    }

    #[test]
    fn fully_x_shaped_sextic_is_even_with_two_complex_roots() {
        let spec = WalkSpec::from_steps(
            &[
                (1, 1, 0.05),
                (-1, 1, 0.15),
                (1, -1, 0.10),
                (-1, -1, 0.30),
                (0, 0, 0.40),
            ],
            &[(-1, 1, 0.095), (1, 1, 0.005), (0, 0, 0.9)],
            &[(1, -1, 0.095), (1, 1, 0.005), (0, 0, 0.9)],
            &[(1, 0, 0.3), (0, 1, 0.3), (1, 1, 0.2), (0, 0, 0.2)],
        )
        .unwrap();
        let (_, _, sextic, shapes) = analyze_parts(&spec);
        assert!(shapes.interior_x_shaped && shapes.h1_x_shaped && shapes.h2_x_shaped);
        // Odd coefficients vanish.
        for (k, c) in sextic.f.poly.coeffs.iter().enumerate() {
            if k % 2 == 1 {
                assert!(c.abs() < 1e-15, "odd coefficient {k} = {c}");
            }
        }
        // f(1) = f(-1) = 0, roots in +- pairs, exactly two complex roots.
        assert!(sextic.f.poly.eval(1.0).abs() < 1e-12);
        assert!(sextic.f.poly.eval(-1.0).abs() < 1e-12);
        let complex_count = sextic
            .f
            .roots
            .iter()
            .filter(|(re, im)| im.abs() > 1e-7 * (1.0 + re.abs()))
            .count();
        assert_eq!(complex_count, 2);
    }

    #[test]
    fn infinite_candidates_give_case3() {
        let shapes = ShapeClass {
            interior_x_shaped: false,
            h1_x_shaped: false,
            h2_x_shaped: false,
        };
        let (case, x_dom, periodic, _) = classify(
            ExtReal::PosInf,
            ExtReal::PosInf,
            2.5,
            &shapes,
            &Tolerances::default(),
        );
        assert_eq!(case, CaseLabel::Case3);
        assert_eq!(x_dom, 2.5);
        assert!(!periodic);
    }

    #[test]
    fn x_shaped_case3_is_periodic() {
        let shapes = ShapeClass {
            interior_x_shaped: true,
            h1_x_shaped: true,
            h2_x_shaped: true,
        };
        let (case, _, periodic, _) = classify(
            ExtReal::PosInf,
            ExtReal::PosInf,
            3.0,
            &shapes,
            &Tolerances::default(),
        );
        assert_eq!(case, CaseLabel::Case3);
        assert!(periodic);
    }

    #[test]
    fn case_table_edges() {
        let tol = Tolerances::default();
        let plain = ShapeClass {
            interior_x_shaped: false,
            h1_x_shaped: false,
            h2_x_shaped: false,
        };
        // x* = x~1 = x3: triple coincidence is Case 1.
        let (case, _, _, _) = classify(
            ExtReal::Finite(2.0),
            ExtReal::Finite(2.0),
            2.0,
            &plain,
            &tol,
        );
        assert_eq!(case, CaseLabel::Case1);
        // x* = x~1 < x3: Case 4.
        let (case, _, _, _) = classify(
            ExtReal::Finite(2.0),
            ExtReal::Finite(2.0),
            3.0,
            &plain,
            &tol,
        );
        assert_eq!(case, CaseLabel::Case4);
        // x* = x3 < x~1: Case 2a.
        let (case, _, _, _) = classify(
            ExtReal::Finite(2.0),
            ExtReal::Finite(2.5),
            2.0,
            &plain,
            &tol,
        );
        assert_eq!(case, CaseLabel::Case2a);
        // x~1 = x3 < x*: Case 2b.
        let (case, _, _, _) = classify(
            ExtReal::Finite(2.5),
            ExtReal::Finite(2.0),
            2.0,
            &plain,
            &tol,
        );
        assert_eq!(case, CaseLabel::Case2b);
        // Near-boundary warning band: x* just below x3 classifies Case 1
        // but flags the proximity to the Case 2a boundary.
        let (case, _, _, warnings) = classify(
            ExtReal::Finite(2.0 * (1.0 - 1e-6)),
            ExtReal::Finite(2.5),
            2.0,
            &plain,
            &tol,
        );
        assert_eq!(case, CaseLabel::Case1);
        assert!(!warnings.is_empty());
    }
}
