//! Sigmoid-like model of the frequency response and its damped
//! least-squares fit.
//!
//! The model is a logistic gate multiplied by a saturating rise plus a
//! floor:
//!
//! ```text
//! F(r) = a1 * (1 - exp(-a3 r)) / (1 + exp(-a2 (r - a4))) + a5
//! ```
//!
//! `a5` is the low-resistance frequency floor, `a1` the rise amplitude,
//! `a4` the transition center (near the sensitivity peak), `1/a2` the
//! transition width, and `1/a3` the onset of saturation.

use crate::error::{Error, Result};

/// Fitted coefficients and fit diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SigmoidFit {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// Root-mean-square residual divided by the largest sample magnitude.
    /// Absolute least squares cannot pin the low plateau of a curve that
    /// spans orders of magnitude, so residuals are reported against the
    /// curve's scale rather than pointwise.
    pub rmse_rel: f64,
    /// Accepted damped-least-squares iterations.
    pub iterations: u32,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: u32,
    /// Relative parameter-change threshold that ends the iteration.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 200,
            tol: 1e-8,
        }
    }
}

pub fn eval(p: &[f64; 5], r: f64) -> f64 {
    let [a1, a2, a3, a4, a5] = *p;
    a1 * (1.0 - (-a3 * r).exp()) / (1.0 + (-a2 * (r - a4)).exp()) + a5
}

/// Analytic partial derivatives of the model with respect to the five
/// coefficients.
fn jacobian_row(p: &[f64; 5], r: f64) -> [f64; 5] {
    let [a1, a2, a3, a4, _] = *p;
    let e3 = (-a3 * r).exp();
    let s = 1.0 / (1.0 + (-a2 * (r - a4)).exp());
    let rise = 1.0 - e3;
    let gate_slope = s * (1.0 - s);
    [
        rise * s,
        a1 * rise * gate_slope * (r - a4),
        a1 * r * e3 * s,
        -a1 * rise * gate_slope * a2,
        1.0,
    ]
}

/// Data-driven starting point: the floor from the first sample, the
/// amplitude from the range, the center and width from the discrete
/// relative-slope peak, and the saturation rate from the 95% point.
pub fn initial_guess(data: &[(f64, f64)]) -> [f64; 5] {
    let a5 = data[0].1;
    let f_max = data.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let a1 = (f_max - a5).max(0.0);

    let mut rcf_max = 0.0_f64;
    let mut r_at_peak = 0.5 * (data[0].0 + data[data.len() - 1].0);
    for i in 1..data.len() - 1 {
        let (r_lo, f_lo) = data[i - 1];
        let (r_mid, f_mid) = data[i];
        let (r_hi, f_hi) = data[i + 1];
        let denom = (r_hi - r_lo) * f_mid.max(f64::MIN_POSITIVE);
        let rcf = (f_hi - f_lo) / denom;
        if rcf > rcf_max {
            rcf_max = rcf;
            r_at_peak = r_mid;
        }
    }
    let a4 = r_at_peak;
    let a2 = if a1 > 0.0 {
        (4.0 * rcf_max * (1.0 + a5 / a1)).max(1e-6)
    } else {
        0.01
    };

    let f95 = a5 + 0.95 * (f_max - a5);
    let r95 = data
        .iter()
        .find(|p| p.1 >= f95)
        .map(|p| p.0)
        .unwrap_or(r_at_peak);
    let r_span = data[data.len() - 1].0 - data[0].0;
    let a3 = 1.0 / r95.max(0.05 * r_span).max(f64::MIN_POSITIVE);

    [a1, a2, a3, a4, a5]
}

fn sum_squares(p: &[f64; 5], data: &[(f64, f64)]) -> f64 {
    data.iter()
        .map(|&(r, f)| {
            let d = eval(p, r) - f;
            d * d
        })
        .sum()
}

/// Gaussian elimination with partial pivoting on the 5x5 normal system.
fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    for col in 0..5 {
        let pivot = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..5 {
            let k = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (c, pv) in pivot_row.iter().enumerate().skip(col) {
                a[row][c] -= k * pv;
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = [0.0; 5];
    for col in (0..5).rev() {
        let mut acc = b[col];
        for c in col + 1..5 {
            acc -= a[col][c] * x[c];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

/// Fit the model to `(r, f)` samples by Gauss-Newton steps on the normal
/// equations with multiplicative damping: the damping grows tenfold on a
/// rejected step and shrinks on an accepted one. Convergence is declared
/// when the relative parameter change of an accepted step falls below
/// `opts.tol`; hitting `opts.max_iter` returns the best point found with
/// `converged = false`.
pub fn fit(data: &[(f64, f64)], opts: FitOptions) -> Result<SigmoidFit> {
    if data.len() < 6 {
        return Err(Error::InvalidParam(format!(
            "at least 6 samples required to fit 5 coefficients, got {}",
            data.len()
        )));
    }
    let mut p = initial_guess(data);
    let mut sse = sum_squares(&p, data);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    'outer: while iterations < opts.max_iter {
        // Normal equations at the current point.
        let mut jtj = [[0.0_f64; 5]; 5];
        let mut jtr = [0.0_f64; 5];
        for &(r, f) in data {
            let row = jacobian_row(&p, r);
            let resid = eval(&p, r) - f;
            for i in 0..5 {
                jtr[i] += row[i] * resid;
                for j in 0..5 {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        if jtr.iter().all(|g| *g == 0.0) {
            converged = true;
            break;
        }
        let max_diag = jtj.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max);

        loop {
            let mut aug = jtj;
            for (i, row) in aug.iter_mut().enumerate() {
                row[i] += lambda * row[i].max(1e-12 * max_diag).max(1e-300);
            }
            let rhs = [-jtr[0], -jtr[1], -jtr[2], -jtr[3], -jtr[4]];
            let step = solve5(aug, rhs);
            let trial = step.map(|d| {
                let mut t = p;
                for i in 0..5 {
                    t[i] += d[i];
                }
                (d, t)
            });
            if let Some((d, t)) = trial {
                let sse_t = sum_squares(&t, data);
                if sse_t.is_finite() && sse_t <= sse {
                    let rel_change = d
                        .iter()
                        .zip(&p)
                        .map(|(di, pi)| di.abs() / (pi.abs() + 1e-30))
                        .fold(0.0, f64::max);
                    p = t;
                    sse = sse_t;
                    lambda = (lambda * 0.3).max(1e-15);
                    iterations += 1;
                    if rel_change < opts.tol {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                return Err(Error::SingularFit(lambda));
            }
        }
    }

    let positive = p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0 && p[3] > 0.0 && p[4] >= 0.0;
    let scale = data
        .iter()
        .map(|p| p.1.abs())
        .fold(f64::MIN_POSITIVE, f64::max);
    let rmse_rel = (sse / data.len() as f64).sqrt() / scale;
    Ok(SigmoidFit {
        a1: p[0],
        a2: p[1],
        a3: p[2],
        a4: p[3],
        a5: p[4],
        rmse_rel,
        iterations,
        converged: converged && positive,
    })
}
