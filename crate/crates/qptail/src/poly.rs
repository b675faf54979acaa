//! Dense univariate real polynomials with ascending-degree coefficient
//! storage, plus companion-matrix root finding.

use num_complex::Complex64;
use serde::Serialize;

/// Relative threshold below which a leading coefficient is treated as zero.
pub const DEGREE_TRIM_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Poly {
    /// Coefficients, `coeffs[k]` multiplying `x^k`.
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// Largest coefficient magnitude, 0 for the zero polynomial.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Highest index with |coefficient| > tol_rel * max |coefficient|.
    pub fn effective_degree(&self, tol_rel: f64) -> usize {
        let scale = self.max_coeff();
        if scale == 0.0 {
            return 0;
        }
        let thresh = tol_rel * scale;
        let mut deg = 0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.abs() > thresh {
                deg = k;
            }
        }
        deg
    }

    pub fn degree(&self) -> usize {
        self.effective_degree(DEGREE_TRIM_TOL)
    }

    pub fn is_zero(&self, tol_abs: f64) -> bool {
        self.max_coeff() <= tol_abs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect();
        Poly { coeffs }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (k, slot) in coeffs.iter_mut().enumerate() {
            let a = self.coeffs.get(k).copied().unwrap_or(0.0);
            let b = other.coeffs.get(k).copied().unwrap_or(0.0);
            *slot = a + b;
        }
        Poly { coeffs }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }
    }

    /// All complex roots of the polynomial after trimming the degree at
    /// `DEGREE_TRIM_TOL`. Structurally zero low-order coefficients are
    /// factored out exactly; the remaining roots come from the
    /// Aberth-Ehrlich simultaneous iteration with a Newton polish.
    pub fn roots(&self) -> Vec<Complex64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(deg);
        // Exact zero roots (coefficients that vanish identically, as in
        // x^2 * q(x) builds) are split off before iterating.
        let mut lo = 0;
        while lo < deg && self.coeffs[lo].abs() <= 1e-250 {
            out.push(Complex64::new(0.0, 0.0));
            lo += 1;
        }
        let monic: Vec<f64> = {
            let lead = self.coeffs[deg];
            self.coeffs[lo..=deg].iter().map(|c| c / lead).collect()
        };
        out.extend(aberth(&monic));
        out
    }

    /// Real roots: complex roots with |imag| <= coerce_tol * (1 + |real|).
    pub fn real_roots(&self, coerce_tol: f64) -> Vec<f64> {
        self.roots()
            .into_iter()
            .filter(|z| z.im.abs() <= coerce_tol * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .collect()
    }
}

fn eval_monic(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    // coeffs holds a monic polynomial, ascending; returns (p(z), p'(z)).
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Simultaneous root iteration for a monic polynomial with all roots
/// distinct up to working precision. Clusters (multiple roots) converge
/// linearly to the usual eps^(1/m) accuracy.
fn aberth(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![Complex64::new(-coeffs[0], 0.0)];
    }
    // Cauchy-style inclusion radius for initial guesses.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * (k as f64 + 0.354) / n as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    for _ in 0..300 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval_monic(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut repulse = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        repulse += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() > 1e-12 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish, then snap near-real roots onto the axis.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_monic(coeffs, *zi);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.norm() < 1.0 {
                    *zi -= step;
                }
            }
        }
        if zi.im.abs() <= 1e-14 * (1.0 + zi.re.abs()) {
            zi.im = 0.0;
        }
    }
    z
}
