//! Brute-force ground truth: a truncated-chain stationary solver, partial
//! sum evaluators for the generating functions, and log-linear decay-law
//! fitting used to cross-validate every analytic prediction.
//!
//! The chain is truncated to the box {0..N}^2; transitions that would
//! leave the box are redirected to the source state, which keeps every
//! row stochastic. The stationary vector is computed by in-place
//! successive-substitution sweeps in lexicographic order, with the
//! self-transition handled implicitly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::walk::{Region, WalkSpec};

pub const ITERATION_CAP: usize = 200_000;

/// Truncated stationary distribution with solver diagnostics.
#[derive(Clone, Debug)]
pub struct StationaryGrid {
    /// Truncation size: states (m, n) with 0 <= m, n <= size.
    pub size: usize,
    /// Row-major probabilities, index m * (size + 1) + n.
    pub pi: Vec<f64>,
    /// Final balance-equation L1 residual.
    pub residual: f64,
    pub iterations: usize,
}

impl StationaryGrid {
    #[inline]
    pub fn at(&self, m: usize, n: usize) -> f64 {
        self.pi[m * (self.size + 1) + n]
    }

    pub fn row(&self, j: usize) -> Vec<f64> {
        (0..=self.size).map(|m| self.at(m, j)).collect()
    }

    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..=self.size).map(|n| self.at(i, n)).collect()
    }

    pub fn marginal_x(&self) -> Vec<f64> {
        (0..=self.size)
            .map(|m| (0..=self.size).map(|n| self.at(m, n)).sum())
            .collect()
    }

    pub fn marginal_y(&self) -> Vec<f64> {
        (0..=self.size)
            .map(|n| (0..=self.size).map(|m| self.at(m, n)).sum())
            .collect()
    }
}

fn region_of(m: usize, n: usize) -> Region {
    match (m, n) {
        (0, 0) => Region::Origin,
        (_, 0) => Region::Horizontal,
        (0, _) => Region::Vertical,
        _ => Region::Interior,
    }
}

/// Effective self-transition probability of a state: its hold step plus
/// every step redirected back from the truncation edge.
fn stay_probability(spec: &WalkSpec, size: usize, m: usize, n: usize) -> f64 {
    let region = region_of(m, n);
    let mut stay = spec.p(region, 0, 0);
    for di in -1..=1i32 {
        for dj in -1..=1i32 {
            if di == 0 && dj == 0 {
                continue;
            }
            let tm = m as i64 + di as i64;
            let tn = n as i64 + dj as i64;
            if tm < 0 || tn < 0 {
                continue; // outside the quarter plane: zero probability by support
            }
            if tm > size as i64 || tn > size as i64 {
                stay += spec.p(region, di, dj);
            }
        }
    }
    stay
}

/// Inflow to (m, n) from its in-box neighbours, excluding the self term.
fn inflow(spec: &WalkSpec, pi: &[f64], size: usize, m: usize, n: usize) -> f64 {
    let stride = size + 1;
    let mut acc = 0.0;
    for di in -1..=1i32 {
        for dj in -1..=1i32 {
            if di == 0 && dj == 0 {
                continue;
            }
            let sm = m as i64 - di as i64;
            let sn = n as i64 - dj as i64;
            if sm < 0 || sn < 0 || sm > size as i64 || sn > size as i64 {
                continue;
            }
            let p = spec.p(region_of(sm as usize, sn as usize), di, dj);
            if p != 0.0 {
                acc += pi[sm as usize * stride + sn as usize] * p;
            }
        }
    }
    acc
}

/// Solve the truncated chain's stationary distribution by successive
/// substitution until the per-sweep L1 change drops below `tol`.
pub fn solve_stationary(spec: &WalkSpec, size: usize, tol: f64) -> Result<StationaryGrid> {
    assert!(size >= 50, "truncation size must be at least 50");
    let stride = size + 1;
    let cells = stride * stride;
    let mut pi = vec![0.0f64; cells];
    // Product-geometric start; any positive vector converges.
    for m in 0..=size {
        for n in 0..=size {
            pi[m * stride + n] = 0.25f64.powi((m + n).min(600) as i32).max(1e-280);
        }
    }
    normalize(&mut pi);

    // Interior step probabilities for the fast path, indexed [di+1][dj+1].
    let mut pint = [[0.0f64; 3]; 3];
    for di in -1..=1i32 {
        for dj in -1..=1i32 {
            pint[(di + 1) as usize][(dj + 1) as usize] = spec.p(Region::Interior, di, dj);
        }
    }
    let interior_stay = pint[1][1];

    // The absolute L1 criterion alone cannot see the geometric far tail
    // still filling in (its contribution is exponentially small), so the
    // sweep also tracks the worst relative change over representable
    // entries and requires both to settle.
    let rel_tol = (1e3 * tol).min(1e-8);
    let mut iterations = 0;
    loop {
        let mut change = 0.0f64;
        let mut rel_change = 0.0f64;
        for m in 0..=size {
            let fast_row = m >= 2 && m + 1 <= size;
            for n in 0..=size {
                let idx = m * stride + n;
                let new = if fast_row && n >= 2 && n + 1 <= size {
                    // All eight neighbours are interior states inside the box.
                    let up = idx - stride;
                    let down = idx + stride;
                    let acc = pi[up - 1] * pint[2][2]
                        + pi[up] * pint[2][1]
                        + pi[up + 1] * pint[2][0]
                        + pi[idx - 1] * pint[1][2]
                        + pi[idx + 1] * pint[1][0]
                        + pi[down - 1] * pint[0][2]
                        + pi[down] * pint[0][1]
                        + pi[down + 1] * pint[0][0];
                    acc / (1.0 - interior_stay)
                } else {
                    let stay = stay_probability(spec, size, m, n);
                    inflow(spec, &pi, size, m, n) / (1.0 - stay)
                };
                let delta = (new - pi[idx]).abs();
                change += delta;
                if new > 1e-250 {
                    let r = delta / new;
                    if r > rel_change {
                        rel_change = r;
                    }
                }
                pi[idx] = new;
            }
        }
        normalize(&mut pi);
        iterations += 1;
        if change < tol && rel_change < rel_tol {
            break;
        }
        if iterations >= ITERATION_CAP {
            return Err(Error::NoConvergence {
                iterations,
                residual: change,
            });
        }
    }

    // Balance residual |pi - pi P| in L1, reusing the sweep kernels.
    let mut residual = 0.0;
    for m in 0..=size {
        for n in 0..=size {
            let stay = stay_probability(spec, size, m, n);
            let target = inflow(spec, &pi, size, m, n) + stay * pi[m * stride + n];
            residual += (target - pi[m * stride + n]).abs();
        }
    }

    Ok(StationaryGrid {
        size,
        pi,
        residual,
        iterations,
    })
}

fn normalize(pi: &mut [f64]) {
    let sum: f64 = pi.iter().sum();
    let inv = 1.0 / sum;
    for v in pi.iter_mut() {
        *v *= inv;
    }
}

#[derive(Clone, Copy, Debug)]
pub enum GfKind {
    Pi1,
    Pi2,
    Pi1Prime,
    Pi2Prime,
}

/// Partial-sum evaluation of a boundary generating function or its
/// derivative, with an honest error bound: a geometric tail bound at the
/// predicted decay rate plus a truncation-bias allowance over the last
/// quarter of the grid.
pub fn eval_gf(grid: &StationaryGrid, kind: GfKind, arg: f64, radius: f64) -> Result<(f64, f64)> {
    let margin = 0.01;
    if arg.abs() >= radius * (1.0 - margin) {
        return Err(Error::OutsideRadius { arg, radius });
    }
    let seq: Vec<f64> = match kind {
        GfKind::Pi1 | GfKind::Pi1Prime => grid.row(0),
        GfKind::Pi2 | GfKind::Pi2Prime => grid.column(0),
    };
    let derivative = matches!(kind, GfKind::Pi1Prime | GfKind::Pi2Prime);
    let mut value = 0.0f64;
    let mut bias = 0.0f64;
    let mut last = 0.0f64;
    let bias_from = 3 * grid.size / 4;
    // pi_1(x) = sum_{m>=1} pi_{m,0} x^{m-1}; derivative shifts the power.
    let mut pow = 1.0f64; // arg^{m-1} or arg^{m-2} tracked incrementally
    for m in 1..=grid.size {
        let term = if derivative {
            if m == 1 {
                continue;
            }
            let t = (m - 1) as f64 * seq[m] * pow;
            pow *= arg;
            t
        } else {
            let t = seq[m] * pow;
            pow *= arg;
            t
        };
        value += term;
        last = term.abs();
        if m > bias_from {
            bias += term.abs();
        }
    }
    let q = (arg.abs() / radius).min(1.0 - 1e-9);
    let geom_tail = last * q / (1.0 - q) * if derivative { 2.0 } else { 1.0 };
    Ok((value, geom_tail + bias))
}

/// Interior generating function pi(x, y) = sum_{m,n>=1} pi_{m,n} x^{m-1} y^{n-1}.
pub fn eval_pi_xy(
    grid: &StationaryGrid,
    x: f64,
    y: f64,
    x_radius: f64,
    y_radius: f64,
) -> Result<(f64, f64)> {
    let margin = 0.01;
    if x.abs() >= x_radius * (1.0 - margin) {
        return Err(Error::OutsideRadius {
            arg: x,
            radius: x_radius,
        });
    }
    if y.abs() >= y_radius * (1.0 - margin) {
        return Err(Error::OutsideRadius {
            arg: y,
            radius: y_radius,
        });
    }
    let mut value = 0.0;
    let mut bias = 0.0;
    let mut last = 0.0;
    let bias_from = 3 * grid.size / 4;
    let mut xp = 1.0;
    for m in 1..=grid.size {
        let mut row_acc = 0.0;
        let mut yp = 1.0;
        for n in 1..=grid.size {
            row_acc += grid.at(m, n) * yp;
            yp *= y;
        }
        let term = row_acc * xp;
        xp *= x;
        value += term;
        last = term.abs();
        if m > bias_from {
            bias += term.abs();
        }
    }
    let q = (x.abs() / x_radius).max(y.abs() / y_radius).min(1.0 - 1e-9);
    Ok((value, last * q / (1.0 - q) + bias))
}

#[derive(Clone, Copy, Debug)]
pub enum Target {
    /// The sequence pi_{., j}.
    Row(usize),
    /// The sequence pi_{i, .}.
    Column(usize),
    MarginalX,
    MarginalY,
}

/// Fitted decay law of a positive sequence.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmpiricalLaw {
    pub rate_hat: f64,
    pub exponent_hat: f64,
    /// Coefficient in the pi_n ~ C n^beta rate^{n-1} normalization.
    pub coeff_hat: f64,
    pub window: (usize, usize),
    pub r2: f64,
    pub alternation_detected: bool,
    /// Present when the odd/even subsequences were fitted separately.
    pub odd_even_rates: Option<(f64, f64)>,
}

impl EmpiricalLaw {
    /// The theory admits exactly these polynomial exponents; verdicts
    /// classify the raw estimate to the nearest one.
    pub fn exponent_verdict(&self) -> f64 {
        let mut best = 0.0;
        let mut dist = f64::INFINITY;
        for cand in [0.0, -0.5, -1.5, 1.0] {
            let d = (cand - self.exponent_hat).abs();
            if d < dist {
                dist = d;
                best = cand;
            }
        }
        best
    }
}

struct RawFit {
    log_c: f64,
    log_rate: f64,
    exponent: f64,
    r2: f64,
}

/// Least squares of log s_n = c + n log(rate) + beta log(n) over the
/// supplied (n, s_n) pairs, with centered regressors for conditioning.
fn ls_fit(points: &[(f64, f64)]) -> Option<RawFit> {
    const P: usize = 3;
    if points.len() < 2 * P {
        return None;
    }
    let k = points.len() as f64;
    let regressors = |n: f64| [1.0, n, n.ln()];
    let mut means = [0.0f64; P];
    for &(n, _) in points {
        for (m, r) in means.iter_mut().zip(regressors(n)) {
            *m += r / k;
        }
    }
    means[0] = 0.0;
    let mut a = [[0.0f64; P]; P];
    let mut b = [0.0f64; P];
    for &(n, s) in points {
        let mut row = regressors(n);
        for i in 1..P {
            row[i] -= means[i];
        }
        let y = s.ln();
        for i in 0..P {
            for j in 0..P {
                a[i][j] += row[i] * row[j];
            }
            b[i] += row[i] * y;
        }
    }
    let sol = solve_sym(a, b)?;
    let log_rate = sol[1];
    let exponent = sol[2];
    let log_c = sol[0] - log_rate * means[1] - exponent * means[2];
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    let mean_y: f64 = points.iter().map(|&(_, s)| s.ln()).sum::<f64>() / k;
    for &(n, s) in points {
        let y = s.ln();
        let fit = log_c + log_rate * n + exponent * n.ln();
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Some(RawFit {
        log_c,
        log_rate,
        exponent,
        r2,
    })
}

fn solve_sym<const P: usize>(mut a: [[f64; P]; P], mut b: [f64; P]) -> Option<[f64; P]> {
    for col in 0..P {
        let mut piv = col;
        for r in (col + 1)..P {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..P {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            for c in col..P {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut out = [0.0; P];
    for i in 0..P {
        out[i] = b[i] / a[i][i];
    }
    Some(out)
}

fn collect_points(seq: &[f64], window: (usize, usize), parity: Option<usize>) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for n in window.0..=window.1.min(seq.len().saturating_sub(1)) {
        if let Some(p) = parity {
            if n % 2 != p {
                continue;
            }
        }
        let s = seq[n];
        if s > 1e-290 {
            pts.push((n as f64, s));
        }
    }
    pts
}

/// Fit one parity class (`0` even, `1` odd) of the sequence alone.
pub fn fit_decay_parity(seq: &[f64], window: (usize, usize), parity: usize) -> Result<EmpiricalLaw> {
    match ls_fit(&collect_points(seq, window, Some(parity))) {
        Some(f) if f.r2 >= 0.99 => Ok(EmpiricalLaw {
            rate_hat: f.log_rate.exp(),
            exponent_hat: f.exponent,
            coeff_hat: (f.log_c + f.log_rate).exp(),
            window,
            r2: f.r2,
            alternation_detected: false,
            odd_even_rates: None,
        }),
        Some(f) => Err(Error::WindowTooNoisy { r2: f.r2 }),
        None => Err(Error::WindowTooNoisy { r2: f64::NAN }),
    }
}

/// Fit a decay law on `seq` over the window [lo, hi]. Detects an
/// alternating (odd/even) structure by comparing subsequence fits.
pub fn fit_decay(seq: &[f64], window: (usize, usize)) -> Result<EmpiricalLaw> {
    let full = ls_fit(&collect_points(seq, window, None));
    let odd = ls_fit(&collect_points(seq, window, Some(1)));
    let even = ls_fit(&collect_points(seq, window, Some(0)));

    let sub_ok = |f: &RawFit| f.r2 >= 0.99;
    let alternating = match (&odd, &even) {
        (Some(o), Some(e)) => {
            let rates_close = (o.log_rate - e.log_rate).abs() < 0.02;
            let gap = (o.log_c - e.log_c).abs();
            sub_ok(o) && sub_ok(e) && rates_close && gap > 0.1
        }
        _ => false,
    };

    let law = |f: &RawFit, alternation: bool, odd_even: Option<(f64, f64)>| {
        let rate = f.log_rate.exp();
        EmpiricalLaw {
            rate_hat: rate,
            exponent_hat: f.exponent,
            // log s_n = log C + (n-1) log rate + beta log n + log rate
            coeff_hat: (f.log_c + f.log_rate).exp(),
            window,
            r2: f.r2,
            alternation_detected: alternation,
            odd_even_rates: odd_even,
        }
    };

    if alternating {
        let (o, e) = (odd.as_ref().unwrap(), even.as_ref().unwrap());
        let merged = RawFit {
            log_c: 0.5 * (o.log_c + e.log_c),
            log_rate: 0.5 * (o.log_rate + e.log_rate),
            exponent: 0.5 * (o.exponent + e.exponent),
            r2: o.r2.min(e.r2),
        };
        return Ok(law(
            &merged,
            true,
            Some((o.log_rate.exp(), e.log_rate.exp())),
        ));
    }
    match full {
        Some(f) if f.r2 >= 0.99 => Ok(law(&f, false, None)),
        Some(f) => Err(Error::WindowTooNoisy { r2: f.r2 }),
        None => Err(Error::WindowTooNoisy { r2: f64::NAN }),
    }
}

/// Fit the decay law of a grid target over the standard window [N/4, N/2].
pub fn empirical_decay(
    grid: &StationaryGrid,
    target: Target,
    _rate_hint: f64,
) -> Result<EmpiricalLaw> {
    let seq = match target {
        Target::Row(j) => grid.row(j),
        Target::Column(i) => grid.column(i),
        Target::MarginalX => grid.marginal_x(),
        Target::MarginalY => grid.marginal_y(),
    };
    fit_decay(&seq, (grid.size / 4, grid.size / 2))
}
