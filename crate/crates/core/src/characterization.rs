//! Frequency-response characterization: F(R) sweeps, the relative
//! sensitivity curve RCF(R) = (1/F) dF/dR, the low/high-resistance
//! frequency-jump ratio, and the sigmoid-like fit of a sweep.

use crate::analytic;
use crate::circuit::CircuitBase;
use crate::error::{Error, Result};
use crate::sigmoid::{self, FitOptions, SigmoidFit};
use crate::single_cap;

/// One successful sweep grid point.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub r: f64,
    pub f: f64,
    pub t1: f64,
    pub t2: f64,
}

/// A grid point whose cycle computation failed; the sweep carries on.
#[derive(Debug, Clone)]
pub struct SweepFailure {
    pub r: f64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub failures: Vec<SweepFailure>,
}

#[derive(Debug, Clone, Copy)]
pub struct RcfPoint {
    pub r: f64,
    pub rcf: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RcfResult {
    pub points: Vec<RcfPoint>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Validation("sweep grid is empty".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::Validation(format!(
            "grid values must be >= 0, got {}",
            grid[0]
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "grid values must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Closed-form frequency of the basic single-capacitor oscillator; the
/// limit oracle for `r -> 0` (`c0 = c2`) and `r -> inf` (series `c1 c2`).
pub fn single_cap_frequency(
    sw: &crate::switch::SwitchParams,
    i0: f64,
    c0: f64,
) -> Result<f64> {
    single_cap::frequency(sw, i0, c0)
}

/// Steady frequency and phase durations across a resistance grid.
/// Failures at individual grid points are recorded without aborting the
/// remaining points.
pub fn sweep_f_of_r(base: &CircuitBase, grid: &[f64]) -> Result<SweepResult> {
    check_grid(grid)?;
    let mut out = SweepResult::default();
    for &r in grid {
        match base.with_r(r).and_then(|c| analytic::limit_cycle(&c)) {
            Ok(sol) => out.points.push(SweepPoint {
                r,
                f: sol.f,
                t1: sol.t1,
                t2: sol.t2,
            }),
            Err(e) => out.failures.push(SweepFailure {
                r,
                message: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Relative frequency sensitivity to the control resistance, by central
/// differences with half-width `dr` (forward difference below `r = dr`).
pub fn rcf_curve(base: &CircuitBase, grid: &[f64], dr: f64) -> Result<RcfResult> {
    check_grid(grid)?;
    if dr.is_nan() || dr <= 0.0 {
        return Err(Error::Validation(format!("dr > 0 required, got {dr}")));
    }
    let f_at = |r: f64| -> Result<f64> { Ok(analytic::limit_cycle(&base.with_r(r)?)?.f) };
    let mut out = RcfResult::default();
    for &r in grid {
        let rcf = if r >= dr {
            let f_lo = f_at(r - dr)?;
            let f_mid = f_at(r)?;
            let f_hi = f_at(r + dr)?;
            (f_hi - f_lo) / (2.0 * dr * f_mid)
        } else {
            let f_mid = f_at(r)?;
            let f_hi = f_at(r + dr)?;
            (f_hi - f_mid) / (dr * f_mid)
        };
        out.points.push(RcfPoint { r, rcf });
    }
    Ok(out)
}

/// Ratio of the high-resistance frequency (series capacitance) to the
/// low-resistance frequency (`c2` alone). Both limits are closed-form
/// single-capacitor oscillators, so the ratio reduces to `(c1 + c2)/c1`.
pub fn frequency_jump(base: &CircuitBase) -> Result<f64> {
    let c_series = base.c1() * base.c2() / (base.c1() + base.c2());
    let f_high = single_cap::frequency(base.switch(), base.i0(), c_series)?;
    let f_low = single_cap::frequency(base.switch(), base.i0(), base.c2())?;
    Ok(f_high / f_low)
}

/// Fit the sigmoid-like model to a sweep. Requires at least 20 successful
/// points so the transition region is actually constrained.
pub fn fit_sigmoid(sweep: &SweepResult) -> Result<SigmoidFit> {
    fit_sigmoid_with(sweep, FitOptions::default())
}

pub fn fit_sigmoid_with(sweep: &SweepResult, opts: FitOptions) -> Result<SigmoidFit> {
    if sweep.points.len() < 20 {
        return Err(Error::Validation(format!(
            "sigmoid fit needs at least 20 sweep points, got {}",
            sweep.points.len()
        )));
    }
    let data: Vec<(f64, f64)> = sweep.points.iter().map(|p| (p.r, p.f)).collect();
    sigmoid::fit(&data, opts)
}

/// Uniform grid helper for sweeps: `points` values from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + i as f64 * step).collect()
}
