//! Kernel polynomials, discriminants, branch points, and the algebraic
//! branches Y0/Y1 and X0/X1 of the kernel equation h(x, y) = 0.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::walk::{Region, WalkSpec};
use crate::Tolerances;

/// Residual threshold of the square-discriminant reducibility test.
pub const SQUARE_RESIDUAL_TOL: f64 = 1e-10;

/// Coefficient polynomials of the kernel system. The plain names are
/// polynomials in x, the `_t` names their tilde counterparts in y:
///
///   h  = a y^2 + b y + c      = at x^2 + bt x + ct
///   h1 = a1 y + b1            = a1t x^2 + b1t x + c1t
///   h2 = a2t x + b2t          = a2 y^2 + b2 y + c2
///   h0 = a0 y + b0            = a0t x + b0t
#[derive(Clone, Debug, Serialize)]
pub struct KernelPolynomials {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub at: Poly,
    pub bt: Poly,
    pub ct: Poly,
    pub a1: Poly,
    pub b1: Poly,
    pub a1t: Poly,
    pub b1t: Poly,
    pub c1t: Poly,
    pub a2: Poly,
    pub b2: Poly,
    pub c2: Poly,
    pub a2t: Poly,
    pub b2t: Poly,
    pub a0: Poly,
    pub b0: Poly,
    pub a0t: Poly,
    pub b0t: Poly,
}

/// Populate every coefficient polynomial from the walk's distributions.
pub fn build_polynomials(spec: &WalkSpec) -> KernelPolynomials {
    let p = |i, j| spec.p(Region::Interior, i, j);
    let p1 = |i, j| spec.p(Region::Horizontal, i, j);
    let p2 = |i, j| spec.p(Region::Vertical, i, j);
    let p0 = |i, j| spec.p(Region::Origin, i, j);
    KernelPolynomials {
        a: Poly::new(vec![p(-1, 1), p(0, 1), p(1, 1)]),
        b: Poly::new(vec![p(-1, 0), p(0, 0) - 1.0, p(1, 0)]),
        c: Poly::new(vec![p(-1, -1), p(0, -1), p(1, -1)]),
        at: Poly::new(vec![p(1, -1), p(1, 0), p(1, 1)]),
        bt: Poly::new(vec![p(0, -1), p(0, 0) - 1.0, p(0, 1)]),
        ct: Poly::new(vec![p(-1, -1), p(-1, 0), p(-1, 1)]),
        a1: Poly::new(vec![p1(-1, 1), p1(0, 1), p1(1, 1)]),
        b1: Poly::new(vec![p1(-1, 0), p1(0, 0) - 1.0, p1(1, 0)]),
        a1t: Poly::new(vec![p1(1, 0), p1(1, 1)]),
        b1t: Poly::new(vec![p1(0, 0) - 1.0, p1(0, 1)]),
        c1t: Poly::new(vec![p1(-1, 0), p1(-1, 1)]),
        a2: Poly::new(vec![p2(0, 1), p2(1, 1)]),
        b2: Poly::new(vec![p2(0, 0) - 1.0, p2(1, 0)]),
        c2: Poly::new(vec![p2(0, -1), p2(1, -1)]),
        a2t: Poly::new(vec![p2(1, -1), p2(1, 0), p2(1, 1)]),
        b2t: Poly::new(vec![p2(0, -1), p2(0, 0) - 1.0, p2(0, 1)]),
        a0: Poly::new(vec![p0(0, 1), p0(1, 1)]),
        b0: Poly::new(vec![p0(0, 0) - 1.0, p0(1, 0)]),
        a0t: Poly::new(vec![p0(1, 0), p0(1, 1)]),
        b0t: Poly::new(vec![p0(0, 0) - 1.0, p0(0, 1)]),
    }
}

impl KernelPolynomials {
    pub fn h(&self, x: f64, y: f64) -> f64 {
        (self.a.eval(x) * y + self.b.eval(x)) * y + self.c.eval(x)
    }

    pub fn h1(&self, x: f64, y: f64) -> f64 {
        self.a1.eval(x) * y + self.b1.eval(x)
    }

    pub fn h2(&self, x: f64, y: f64) -> f64 {
        (self.a2.eval(x) * y + self.b2.eval(x)) * y + self.c2.eval(x)
    }

    pub fn h0(&self, x: f64, y: f64) -> f64 {
        self.a0.eval(x) * y + self.b0.eval(x)
    }

    pub fn h_tilde(&self, x: f64, y: f64) -> f64 {
        (self.at.eval(y) * x + self.bt.eval(y)) * x + self.ct.eval(y)
    }

    /// d h1 / dy at fixed x.
    pub fn h1_dy(&self, x: f64) -> f64 {
        self.a1.eval(x)
    }

    /// d h2 / dy at fixed x.
    pub fn h2_dy(&self, x: f64, y: f64) -> f64 {
        2.0 * self.a2.eval(x) * y + self.b2.eval(x)
    }

    /// d h0 / dy at fixed x.
    pub fn h0_dy(&self, x: f64) -> f64 {
        self.a0.eval(x)
    }
}

/// Discriminant coefficient vectors: `d` for D1(x) = b^2 - 4ac and `dt`
/// for the y-side D2(y), both via the explicit closed forms.
#[derive(Clone, Debug, Serialize)]
pub struct Discriminant {
    pub d: [f64; 5],
    pub dt: [f64; 5],
    pub effective_degree: usize,
    pub effective_degree_t: usize,
}

fn discriminant_coeffs(p: impl Fn(i32, i32) -> f64) -> [f64; 5] {
    [
        p(-1, 0) * p(-1, 0) - 4.0 * p(-1, 1) * p(-1, -1),
        2.0 * p(-1, 0) * (p(0, 0) - 1.0) - 4.0 * (p(-1, 1) * p(0, -1) + p(0, 1) * p(-1, -1)),
        (p(0, 0) - 1.0) * (p(0, 0) - 1.0) + 2.0 * p(1, 0) * p(-1, 0)
            - 4.0 * (p(1, 1) * p(-1, -1) + p(1, -1) * p(-1, 1) + p(0, 1) * p(0, -1)),
        2.0 * p(1, 0) * (p(0, 0) - 1.0) - 4.0 * (p(1, 1) * p(0, -1) + p(0, 1) * p(1, -1)),
        p(1, 0) * p(1, 0) - 4.0 * p(1, 1) * p(1, -1),
    ]
}

pub fn discriminant(spec: &WalkSpec) -> Discriminant {
    let d = discriminant_coeffs(|i, j| spec.p(Region::Interior, i, j));
    // D2 is the x-side discriminant of the transposed interior map.
    let dt = discriminant_coeffs(|i, j| spec.p(Region::Interior, j, i));
    let eff = |v: &[f64; 5]| Poly::new(v.to_vec()).effective_degree(1e-14);
    Discriminant {
        effective_degree: eff(&d),
        effective_degree_t: eff(&dt),
        d,
        dt,
    }
}

impl Discriminant {
    pub fn d1(&self) -> Poly {
        Poly::new(self.d.to_vec())
    }

    pub fn d2(&self) -> Poly {
        Poly::new(self.dt.to_vec())
    }
}

/// An extended real: finite, or a point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl ExtReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        !matches!(self, ExtReal::Finite(_))
    }

    pub fn magnitude(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.abs(),
            _ => f64::INFINITY,
        }
    }
}

/// Branch points of the two discriminants, ordered by modulus with points
/// at infinity last: |x1| <= |x2| < 1 < x3 <= |x4| in the in-scope cases.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchPoints {
    pub x: [ExtReal; 4],
    pub y: [ExtReal; 4],
}

impl BranchPoints {
    pub fn x3(&self) -> f64 {
        self.x[2].finite().expect("x3 finite for in-scope walks")
    }

    pub fn y3(&self) -> f64 {
        self.y[2].finite().expect("y3 finite for in-scope walks")
    }
}

fn side_branch_points(poly: &Poly, side: char, tol: &Tolerances) -> Result<[ExtReal; 4]> {
    let deg = poly.degree();
    let trimmed = Poly::new(poly.coeffs[..=deg].to_vec());
    let mut finite = Vec::new();
    for z in trimmed.roots() {
        if z.im.abs() > tol.real_coerce * (1.0 + z.re.abs()) {
            // Conjugate pairs would be reported twice; one error suffices.
            if z.im > 0.0 {
                return Err(Error::ComplexBranchPoint {
                    side,
                    re: z.re,
                    im: z.im,
                });
            }
            continue;
        }
        finite.push(z.re);
    }
    finite.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .unwrap()
            .then(a.partial_cmp(b).unwrap())
    });
    // Within a modulus tie the pair inside the unit circle lists the
    // negative point first and the pair outside lists the positive first,
    // matching the x1..x4 labelling of the X-shaped symmetric cases.
    for k in [0, 2] {
        if finite.len() >= k + 2 {
            let (lo, hi) = (finite[k], finite[k + 1]);
            let tied = (lo.abs() - hi.abs()).abs() <= tol.distinct * (1.0 + hi.abs());
            if tied && lo * hi < 0.0 {
                let (neg, pos) = if lo < 0.0 { (lo, hi) } else { (hi, lo) };
                let inside = pos.abs() < 1.0;
                finite[k] = if inside { neg } else { pos };
                finite[k + 1] = if inside { pos } else { neg };
            }
        }
    }
    for v in &finite {
        if (v.abs() - 1.0).abs() <= tol.real_coerce {
            return Err(Error::BranchPointOnUnitCircle { side, value: *v });
        }
    }
    let mut out = [ExtReal::PosInf; 4];
    for (slot, v) in out.iter_mut().zip(finite.iter()) {
        *slot = ExtReal::Finite(*v);
    }
    Ok(out)
}

/// Locate the branch points of both discriminants. Degrees below four
/// contribute points at infinity.
pub fn branch_points(disc: &Discriminant, tol: &Tolerances) -> Result<BranchPoints> {
    Ok(BranchPoints {
        x: side_branch_points(&disc.d1(), 'x', tol)?,
        y: side_branch_points(&disc.d2(), 'y', tol)?,
    })
}

/// Best quadratic (or lower-degree) square approximation residual of a
/// quartic; a tiny residual means the discriminant is a perfect square and
/// the kernel factors.
fn square_test_residual(d: &Poly) -> f64 {
    let scale = d.max_coeff().max(1e-300);
    let deg = d.degree();
    let coef = |k: usize| d.coeffs.get(k).copied().unwrap_or(0.0);
    let residual = match deg {
        4 => {
            let d4 = coef(4);
            if d4 < 0.0 {
                return f64::INFINITY;
            }
            let e2 = d4.sqrt();
            if e2 <= 1e-150 {
                return f64::INFINITY;
            }
            let e1 = coef(3) / (2.0 * e2);
            let e0 = (coef(2) - e1 * e1) / (2.0 * e2);
            (2.0 * e1 * e0 - coef(1)).abs() + (e0 * e0 - coef(0)).abs()
        }
        2 => {
            let d2 = coef(2);
            if d2 < 0.0 {
                return f64::INFINITY;
            }
            let e1 = d2.sqrt();
            if e1 <= 1e-150 {
                return f64::INFINITY;
            }
            let e0 = coef(1) / (2.0 * e1);
            (e0 * e0 - coef(0)).abs()
        }
        0 => {
            if coef(0) >= 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        _ => f64::INFINITY, // odd degree is never a square
    };
    residual / scale
}

/// Verify the walk is non-singular with genus 1: the kernel is quadratic
/// in both variables, irreducible (square-discriminant test), and all
/// finite branch points on each side are pairwise distinct.
pub fn check_nonsingular_genus1(
    kp: &KernelPolynomials,
    disc: &Discriminant,
    bp: &BranchPoints,
    tol: &Tolerances,
) -> Result<()> {
    if kp.a.is_zero(1e-14) {
        return Err(Error::DegenerateKernel('y'));
    }
    if kp.at.is_zero(1e-14) {
        return Err(Error::DegenerateKernel('x'));
    }
    if square_test_residual(&disc.d1()) < SQUARE_RESIDUAL_TOL
        || square_test_residual(&disc.d2()) < SQUARE_RESIDUAL_TOL
    {
        return Err(Error::SingularWalk);
    }
    for (points, side) in [(&bp.x, 'x'), (&bp.y, 'y')] {
        let x3 = points[2].finite().unwrap_or(1.0);
        let gap_tol = tol.distinct * x3.abs().max(1.0);
        let finite: Vec<f64> = points.iter().filter_map(|p| p.finite()).collect();
        for i in 0..finite.len() {
            for j in (i + 1)..finite.len() {
                if (finite[i] - finite[j]).abs() <= gap_tol {
                    return Err(Error::Genus0Walk {
                        side,
                        a: finite[i],
                        b: finite[j],
                    });
                }
            }
        }
    }
    Ok(())
}

/// The two kernel roots at a point: y0 is the smaller-modulus branch.
#[derive(Clone, Copy, Debug)]
pub struct BranchValue {
    pub y0: Complex64,
    /// None encodes the infinite second root (leading coefficient zero).
    pub y1: Option<Complex64>,
}

impl BranchValue {
    pub fn y0_real(&self) -> f64 {
        self.y0.re
    }

    pub fn y1_real(&self) -> f64 {
        self.y1.map(|v| v.re).unwrap_or(f64::INFINITY)
    }
}

fn solve_quadratic_branches(a: Complex64, b: Complex64, c: Complex64) -> Result<BranchValue> {
    let zero_tol = 1e-14 * (a.norm() + b.norm() + c.norm()).max(1.0);
    if a.norm() <= zero_tol {
        if b.norm() <= zero_tol {
            return Err(Error::DegenerateQuadratic { at: f64::NAN });
        }
        return Ok(BranchValue {
            y0: -c / b,
            y1: None,
        });
    }
    let disc = b * b - 4.0 * a * c;
    let sq = disc.sqrt();
    // Pick the sign that avoids cancellation in -b -+ sqrt.
    let q = if (b + sq).norm() >= (b - sq).norm() {
        -0.5 * (b + sq)
    } else {
        -0.5 * (b - sq)
    };
    let (r1, r2) = if q.norm() <= zero_tol {
        (Complex64::new(0.0, 0.0), q / a) // c == 0: roots 0 and -b/a
    } else {
        (c / q, q / a)
    };
    // Smaller modulus first; break exact ties toward the smaller real part.
    let (y0, y1) = if r1.norm() < r2.norm() || (r1.norm() == r2.norm() && r1.re <= r2.re) {
        (r1, r2)
    } else {
        (r2, r1)
    };
    Ok(BranchValue { y0, y1: Some(y1) })
}

/// Evaluate the y-branches of h(x, .) = 0 at a (possibly complex) x.
pub fn eval_y(kp: &KernelPolynomials, x: Complex64) -> Result<BranchValue> {
    solve_quadratic_branches(
        kp.a.eval_complex(x),
        kp.b.eval_complex(x),
        kp.c.eval_complex(x),
    )
}

/// Evaluate the x-branches of h(., y) = 0 at a (possibly complex) y.
pub fn eval_x(kp: &KernelPolynomials, y: Complex64) -> Result<BranchValue> {
    solve_quadratic_branches(
        kp.at.eval_complex(y),
        kp.bt.eval_complex(y),
        kp.ct.eval_complex(y),
    )
}

/// Y0 at a real x where both roots are real (in particular on [x2, x3]).
pub fn y0_at(kp: &KernelPolynomials, x: f64) -> Result<f64> {
    Ok(eval_y(kp, Complex64::new(x, 0.0))?.y0_real())
}

/// Y1 at a real x; +inf when a(x) = 0.
pub fn y1_at(kp: &KernelPolynomials, x: f64) -> Result<f64> {
    Ok(eval_y(kp, Complex64::new(x, 0.0))?.y1_real())
}

pub fn x0_at(kp: &KernelPolynomials, y: f64) -> Result<f64> {
    Ok(eval_x(kp, Complex64::new(y, 0.0))?.y0_real())
}

pub fn x1_at(kp: &KernelPolynomials, y: f64) -> Result<f64> {
    Ok(eval_x(kp, Complex64::new(y, 0.0))?.y1_real())
}

/// The common branch value -b/(2a) at a branch point of D1.
pub fn y_branch_point_value(kp: &KernelPolynomials, x: f64) -> f64 {
    -kp.b.eval(x) / (2.0 * kp.a.eval(x))
}

/// The common branch value -bt/(2at) at a branch point of D2.
pub fn x_branch_point_value(kp: &KernelPolynomials, y: f64) -> f64 {
    -kp.bt.eval(y) / (2.0 * kp.at.eval(y))
}

/// Y0'(x) off branch points, by implicit differentiation of h(x, Y0) = 0.
pub fn y0_prime(kp: &KernelPolynomials, x: f64) -> Result<f64> {
    let y = y0_at(kp, x)?;
    let num = kp.a.derivative().eval(x) * y * y + kp.b.derivative().eval(x) * y
        + kp.c.derivative().eval(x);
    let den = 2.0 * kp.a.eval(x) * y + kp.b.eval(x);
    Ok(-num / den)
}

/// X0'(y) off branch points.
pub fn x0_prime(kp: &KernelPolynomials, y: f64) -> Result<f64> {
    let x = x0_at(kp, y)?;
    let num = kp.at.derivative().eval(y) * x * x + kp.bt.derivative().eval(y) * x
        + kp.ct.derivative().eval(y);
    let den = 2.0 * kp.at.eval(y) * x + kp.bt.eval(y);
    Ok(-num / den)
}

/// a(x) * Y1(x), finite even where a vanishes (equals -b - a*Y0).
pub fn a_y1(kp: &KernelPolynomials, x: Complex64) -> Result<Complex64> {
    let bv = eval_y(kp, x)?;
    Ok(-kp.b.eval_complex(x) - kp.a.eval_complex(x) * bv.y0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::reference_walk_w1;

    fn w1_kp() -> KernelPolynomials {
        build_polynomials(&reference_walk_w1())
    }

    fn assert_coeffs(got: &Poly, want: &[f64]) {
        assert_eq!(got.coeffs.len(), want.len());
        for (g, w) in got.coeffs.iter().zip(want) {
            assert!((g - w).abs() < 1e-15, "{:?} vs {want:?}", got.coeffs);
        }
    }

    #[test]
    fn w1_coefficient_polynomials() {
        let kp = w1_kp();
        assert_coeffs(&kp.a, &[0.0, 0.1, 0.0]);
        assert_coeffs(&kp.b, &[0.3, -0.8, 0.1]);
        assert_coeffs(&kp.c, &[0.0, 0.3, 0.0]);
        assert_coeffs(&kp.a1, &[0.0, 0.3, 0.0]);
        assert_coeffs(&kp.b1, &[0.2, -0.6, 0.1]);
        // W1 is (x<->y)-symmetric, so the tilde side mirrors.
        assert_coeffs(&kp.at, &kp.a.coeffs);
        assert_coeffs(&kp.bt, &kp.b.coeffs);
    }

    #[test]
    fn fundamental_identities_at_one() {
        let kp = w1_kp();
        assert!((kp.a.eval(1.0) + kp.b.eval(1.0) + kp.c.eval(1.0)).abs() < 1e-14);
        assert!(kp.h(1.0, 1.0).abs() < 1e-14);
        assert!(kp.h1(1.0, 1.0).abs() < 1e-14);
        assert!(kp.h2(1.0, 1.0).abs() < 1e-14);
        assert!(kp.h0(1.0, 1.0).abs() < 1e-14);
    }

    #[test]
    fn h_two_reconstructions_agree() {
        let kp = w1_kp();
        for k in 0..100 {
            let x = -1.9 + 0.038 * k as f64;
            let y = 1.7 - 0.031 * k as f64;
            let lhs = kp.h(x, y);
            let rhs = kp.h_tilde(x, y);
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "mismatch at ({x},{y})");
        }
    }

    #[test]
    fn w1_discriminant_coefficients() {
        let disc = discriminant(&reference_walk_w1());
        // D1 = (0.1x^2 - 0.8x + 0.3)^2 - 0.12x^2
        assert!((disc.d[4] - 0.01).abs() < 1e-15);
        assert!((disc.d[0] - 0.09).abs() < 1e-15);
        assert_eq!(disc.effective_degree, 4);
        // Explicit coefficients agree with b^2 - 4ac coefficient-wise.
        let kp = w1_kp();
        let direct = kp.b.mul(&kp.b).sub(&kp.a.mul(&kp.c).scale(4.0));
        for k in 0..5 {
            let got = disc.d[k];
            let want = direct.coeffs.get(k).copied().unwrap_or(0.0);
            assert!((got - want).abs() < 1e-14, "d{k}: {got} vs {want}");
        }
    }

    #[test]
    fn degenerate_degree_discriminant() {
        // No rightward interior steps: d4 = d3 = 0.
        let spec = WalkSpec::from_steps(
            &[(-1, 0, 0.4), (0, 1, 0.2), (0, -1, 0.3), (0, 0, 0.1)],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let disc = discriminant(&spec);
        assert_eq!(disc.d[4], 0.0);
        assert_eq!(disc.d[3], 0.0);
        assert!(disc.effective_degree <= 2);
    }

    #[test]
    fn w1_branch_points() {
        // Independent oracle: roots of b(x) = +-2 sqrt(a(x) c(x)), i.e. of
        // 0.1x^2 - (0.8 +- 2 sqrt(0.03)) x + 0.3.
        let s = (0.03f64).sqrt();
        let quad = |sgn: f64| {
            let bq = 0.8 + sgn * 2.0 * s;
            let disc = (bq * bq - 4.0 * 0.1 * 0.3).sqrt();
            ((bq - disc) / 0.2, (bq + disc) / 0.2)
        };
        let (x1, x4) = quad(1.0);
        let (x2, x3) = quad(-1.0);
        let disc = discriminant(&reference_walk_w1());
        let bp = branch_points(&disc, &Tolerances::default()).unwrap();
        let expect = [x1, x2, x3, x4];
        for (k, want) in expect.iter().enumerate() {
            let got = bp.x[k].finite().unwrap();
            assert!((got - want).abs() < 1e-9, "x{}: {got} vs {want}", k + 1);
        }
        assert!((bp.x3() - 3.732050807568877).abs() < 1e-9);
        // Lemma ordering
        assert!(bp.x[0].magnitude() <= bp.x[1].magnitude());
        assert!(bp.x[1].magnitude() < 1.0);
        assert!(1.0 < bp.x3());
    }

    #[test]
    fn degree_three_discriminant_gives_infinite_x4() {
        // p_{1,0} = 2 sqrt(p_{1,1} p_{1,-1}) forces d4 = 0.
        let spec = WalkSpec::from_steps(
            &[
                (1, 1, 0.05),
                (1, -1, 0.05),
                (1, 0, 0.1),
                (-1, 0, 0.35),
                (0, 1, 0.1),
                (0, -1, 0.25),
                (0, 0, 0.1),
            ],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let disc = discriminant(&spec);
        assert!(disc.d[4].abs() < 1e-16);
        let bp = branch_points(&disc, &Tolerances::default()).unwrap();
        assert_eq!(bp.x[3], ExtReal::PosInf);
        assert!(bp.x[2].finite().unwrap() > 1.0);
    }

    #[test]
    fn x_shaped_interior_pairs_branch_points() {
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
        let disc = discriminant(&spec);
        assert!(disc.d[1].abs() < 1e-16 && disc.d[3].abs() < 1e-16);
        let bp = branch_points(&disc, &Tolerances::default()).unwrap();
        let x3 = bp.x3();
        let x4 = bp.x[3].finite().unwrap();
        assert!((x3 + x4).abs() < 1e-12, "x3 = {x3}, x4 = {x4}");
        let x1 = bp.x[0].finite().unwrap();
        let x2 = bp.x[1].finite().unwrap();
        assert!((x1 + x2).abs() < 1e-12);
        assert!(x1 < 0.0 && x2 > 0.0 && x3 > 0.0 && x4 < 0.0);
    }

    #[test]
    fn w1_passes_nonsingular_genus1() {
        let spec = reference_walk_w1();
        let kp = build_polynomials(&spec);
        let disc = discriminant(&spec);
        let bp = branch_points(&disc, &Tolerances::default()).unwrap();
        assert!(check_nonsingular_genus1(&kp, &disc, &bp, &Tolerances::default()).is_ok());
    }

    #[test]
    fn pure_diagonal_walk_is_singular() {
        // Interior on {(1,1),(-1,-1),(0,0)}: D1 is a perfect square.
        let spec = WalkSpec::from_steps(
            &[(1, 1, 0.2), (-1, -1, 0.5), (0, 0, 0.3)],
            &[(1, 0, 0.1), (-1, 0, 0.2), (0, 1, 0.3), (0, 0, 0.4)],
            &[(0, 1, 0.1), (0, -1, 0.2), (1, 0, 0.3), (0, 0, 0.4)],
            &[(1, 0, 0.5), (0, 1, 0.5)],
        )
        .unwrap();
        let kp = build_polynomials(&spec);
        let disc = discriminant(&spec);
        assert!(square_test_residual(&disc.d1()) < SQUARE_RESIDUAL_TOL);
        let bp = BranchPoints {
            x: [ExtReal::PosInf; 4],
            y: [ExtReal::PosInf; 4],
        };
        assert!(matches!(
            check_nonsingular_genus1(&kp, &disc, &bp, &Tolerances::default()),
            Err(Error::SingularWalk)
        ));
    }

    #[test]
    fn colliding_branch_points_rejected_as_genus0() {
        let spec = reference_walk_w1();
        let kp = build_polynomials(&spec);
        let disc = discriminant(&spec);
        let mut bp = branch_points(&disc, &Tolerances::default()).unwrap();
        bp.x[1] = ExtReal::Finite(bp.x3() + 1e-9);
        assert!(matches!(
            check_nonsingular_genus1(&kp, &disc, &bp, &Tolerances::default()),
            Err(Error::Genus0Walk { .. })
        ));
    }

    #[test]
    fn w1_branch_values() {
        let kp = w1_kp();
        // Y0(1) = min(1, c(1)/a(1)) = min(1, 3) = 1
        let y0_1 = y0_at(&kp, 1.0).unwrap();
        assert!((y0_1 - 1.0).abs() < 1e-12);
        let y1_1 = y1_at(&kp, 1.0).unwrap();
        assert!((y1_1 - 3.0).abs() < 1e-12);
        // Branch-point limit at x3
        let x3 = 3.732050807568877;
        let v = y_branch_point_value(&kp, x3);
        assert!((v - 1.7320508075688772).abs() < 1e-9);
    }

    #[test]
    fn vieta_consistency_off_the_cuts() {
        let kp = w1_kp();
        let mut x = 0.913f64;
        for _ in 0..1000 {
            x = (x * 137.11).fract() * 6.0 - 3.0; // deterministic scatter in (-3, 3)
            let z = Complex64::new(x, 0.35);
            let bv = eval_y(&kp, z).unwrap();
            let a = kp.a.eval_complex(z);
            if a.norm() < 1e-12 {
                continue;
            }
            let y1 = bv.y1.unwrap();
            let sum = a * (bv.y0 + y1) + kp.b.eval_complex(z);
            let prod = a * bv.y0 * y1 - kp.c.eval_complex(z);
            let scale = kp.b.eval_complex(z).norm().max(kp.c.eval_complex(z).norm()) + 1.0;
            assert!(sum.norm() <= 1e-10 * scale);
            assert!(prod.norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn unit_circle_bound_on_y0() {
        let kp = w1_kp();
        for k in 0..360 {
            let t = std::f64::consts::TAU * (k as f64 + 0.5) / 360.0;
            let z = Complex64::new(t.cos(), t.sin());
            let bv = eval_y(&kp, z).unwrap();
            assert!(
                bv.y0.norm() <= 1.0 + 1e-9,
                "|Y0| = {} at angle {t}",
                bv.y0.norm()
            );
        }
    }

    #[test]
    fn degenerate_quadratic_is_an_error() {
        let kp = w1_kp();
        // a(0) = 0 and b(0) = 0.3 != 0: one finite root -c/b, other infinite.
        let bv = eval_y(&kp, Complex64::new(0.0, 0.0)).unwrap();
        assert!(bv.y1.is_none());
        assert!((bv.y0.re - 0.0).abs() < 1e-15);
        // Construct a kernel with a = b = 0 at x = 0.
        let mut kp2 = kp.clone();
        kp2.b = Poly::new(vec![0.0, -0.8, 0.1]);
        assert!(matches!(
            eval_y(&kp2, Complex64::new(0.0, 0.0)),
            Err(Error::DegenerateQuadratic { .. })
        ));
    }
}
