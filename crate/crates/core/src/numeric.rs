//! Brute-force verification path: direct time stepping of the circuit
//! equations with event-localized switching.
//!
//! The derivative is formed straight from the Kirchhoff current balance in
//! conductance form, so this module shares no solution mathematics with
//! the closed-form engine in [`crate::analytic`]:
//!
//! ```text
//! du1/dt = (i0 - (u1 + u2)*g_sw - u1*g_r) / c1
//! du2/dt = (i0 - (u1 + u2)*g_sw) / c2
//! ```
//!
//! Two steppers sit on top of it. [`integrate`] is a classical fixed-step
//! explicit 4th-order run that samples a waveform on a uniform grid; its
//! step must satisfy the stability guard for the fastest mode. The
//! event-only paths ([`spike_train`], [`oracle_frequency`], and the
//! lock-step [`CircuitSim`] used by networks) use an A-stable trapezoidal
//! rule with adaptive sub-steps instead: the stiffness ratio of this
//! circuit grows like `c2/(c1 r)` and reaches 1e8 in valid configurations,
//! where any fixed explicit step would need billions of steps per period.
//! In both paths a step that straddles a switching threshold is bisected
//! on the interpolated step, the state flips at the located instant, and
//! integration resumes there.

use crate::analytic;
use crate::circuit::{CircuitBase, CircuitParams};
use crate::error::{Error, Result};
use crate::switch::SwitchState;
use crate::waveform::{Sample, SpikeTrain, Waveform};

/// Control resistances below this floor are clamped before forming the
/// shunt conductance; the divider is already indistinguishable from a
/// short two orders of magnitude above it.
const R_FLOOR: f64 = 1e-3;
/// Fixed-step guard: `dt` must not exceed this fraction of the fastest
/// mode's time constant.
const GUARD_FACTOR: f64 = 0.05;
/// Base sub-step as a fraction of the fastest time constant, applied right
/// after every switching event while the fast transient is alive.
const BASE_RESOLUTION: f64 = 0.02;
/// Sub-step cap as a fraction of the slow time constant.
const SLOW_RESOLUTION: f64 = 0.01;
/// Geometric sub-step growth once the fast transient has decayed.
const STEP_GROWTH: f64 = 1.25;
/// The sub-step may not exceed this fraction of the time elapsed since
/// the last switching event, so the post-event transient stays resolved
/// until its amplitude is negligible.
const RESOLVE_FRACTION: f64 = 1.0 / 50.0;
/// Bisection iterations when localizing an event on a step; 12 halvings
/// place the event within 2.5e-4 of the straddling step.
const EVENT_BISECTIONS: u32 = 12;
/// Hard sub-step budget per driver call.
const MAX_SUBSTEPS: u64 = 200_000_000;

/// Conductance-form coefficients of `dx/dt = f - A x` for one conduction
/// state and one control resistance.
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    a11: f64,
    a12: f64,
    a21: f64,
    a22: f64,
    f1: f64,
    f2: f64,
}

impl Coeffs {
    fn new(base: &CircuitBase, r: f64, state: SwitchState) -> Self {
        let g_sw = 1.0 / base.switch().branch_resistance(state);
        let g_r = 1.0 / r.max(R_FLOOR);
        Self {
            a11: (g_sw + g_r) / base.c1(),
            a12: g_sw / base.c1(),
            a21: g_sw / base.c2(),
            a22: g_sw / base.c2(),
            f1: base.i0() / base.c1(),
            f2: base.i0() / base.c2(),
        }
    }

    fn deriv(&self, u1: f64, u2: f64) -> (f64, f64) {
        (
            self.f1 - self.a11 * u1 - self.a12 * u2,
            self.f2 - self.a21 * u1 - self.a22 * u2,
        )
    }

    /// Gershgorin bound on the fastest decay rate.
    fn fast_rate(&self) -> f64 {
        (self.a11 + self.a12).max(self.a21 + self.a22)
    }

    /// `trace/det`, an estimate of the slow time constant good to a
    /// factor of two.
    fn slow_tau(&self) -> f64 {
        let det = self.a11 * self.a22 - self.a12 * self.a21;
        (self.a11 + self.a22) / det
    }

    fn rk4(&self, u1: f64, u2: f64, h: f64) -> (f64, f64) {
        let (k11, k12) = self.deriv(u1, u2);
        let (k21, k22) = self.deriv(u1 + 0.5 * h * k11, u2 + 0.5 * h * k12);
        let (k31, k32) = self.deriv(u1 + 0.5 * h * k21, u2 + 0.5 * h * k22);
        let (k41, k42) = self.deriv(u1 + h * k31, u2 + h * k32);
        (
            u1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41),
            u2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42),
        )
    }

    /// Trapezoidal step: solve `(I + hA/2) x' = (I - hA/2) x + h f`.
    fn trapezoidal(&self, u1: f64, u2: f64, h: f64) -> (f64, f64) {
        let p11 = 1.0 + 0.5 * h * self.a11;
        let p12 = 0.5 * h * self.a12;
        let p21 = 0.5 * h * self.a21;
        let p22 = 1.0 + 0.5 * h * self.a22;
        let rhs1 = u1 - 0.5 * h * (self.a11 * u1 + self.a12 * u2) + h * self.f1;
        let rhs2 = u2 - 0.5 * h * (self.a21 * u1 + self.a22 * u2) + h * self.f2;
        let det = p11 * p22 - p12 * p21;
        ((p22 * rhs1 - p12 * rhs2) / det, (p11 * rhs2 - p21 * rhs1) / det)
    }
}

fn fast_rate_max(base: &CircuitBase, r: f64) -> f64 {
    Coeffs::new(base, r, SwitchState::On)
        .fast_rate()
        .max(Coeffs::new(base, r, SwitchState::Off).fast_rate())
}

/// Largest fixed step [`integrate`] accepts for this circuit.
pub fn step_guard(c: &CircuitParams) -> f64 {
    GUARD_FACTOR / fast_rate_max(c.base(), c.r())
}

/// Default fixed step: resolves the fastest mode with 50 steps per time
/// constant.
pub fn default_dt(c: &CircuitParams) -> f64 {
    BASE_RESOLUTION / fast_rate_max(c.base(), c.r())
}

/// Threshold the present state is armed against, and whether it is
/// approached from below.
fn armed_level(base: &CircuitBase, state: SwitchState) -> (f64, bool) {
    match state {
        SwitchState::Off => (base.switch().u_th(), true),
        SwitchState::On => (base.switch().u_h(), false),
    }
}

fn crossed(level: f64, from_below: bool, usw: f64) -> bool {
    if from_below {
        usw > level
    } else {
        usw < level
    }
}

/// Bisect the cubic Hermite interpolant of a straddling step down to the
/// event instant. Returns `(theta, u1, u2)` at the event.
fn locate_event(
    u_a: (f64, f64),
    d_a: (f64, f64),
    u_b: (f64, f64),
    d_b: (f64, f64),
    h: f64,
    level: f64,
) -> (f64, f64, f64) {
    let interp = |theta: f64| -> (f64, f64) {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (
            h00 * u_a.0 + h10 * h * d_a.0 + h01 * u_b.0 + h11 * h * d_b.0,
            h00 * u_a.1 + h10 * h * d_a.1 + h01 * u_b.1 + h11 * h * d_b.1,
        )
    };
    let p = |theta: f64| -> f64 {
        let (u1, u2) = interp(theta);
        u1 + u2 - level
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let p_lo = p(lo);
    for _ in 0..EVENT_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if p(mid) * p_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let (u1, u2) = interp(theta);
    (theta, u1, u2)
}

/// Fixed-step 4th-order integration of the circuit from power-on
/// (`u1 = u2 = 0`, switch OFF), sampling the waveform every `dt` and
/// recording every turn-on instant.
///
/// `r_of_t`, when given, overrides the circuit's control resistance; it is
/// sampled at sub-step boundaries and held piecewise-constant within a
/// step. `dt` must satisfy the stability guard for the fastest phase at
/// every resistance the run visits.
pub fn integrate(
    c: &CircuitParams,
    t_end: f64,
    dt: f64,
    r_of_t: Option<&dyn Fn(f64) -> f64>,
) -> Result<(Waveform, SpikeTrain)> {
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Error::InvalidParam(format!(
            "t_end > 0 and dt > 0 required: t_end = {t_end}, dt = {dt}"
        )));
    }
    let base = c.base();
    if r_of_t.is_none() {
        let max_dt = step_guard(c);
        if dt > max_dt {
            return Err(Error::StepTooLarge { dt, max_dt });
        }
    }

    let mut u1 = 0.0_f64;
    let mut u2 = 0.0_f64;
    let mut state = SwitchState::Off;
    let mut t = 0.0_f64;
    let mut spikes = Vec::new();
    let mut samples = Vec::with_capacity((t_end / dt) as usize + 2);
    samples.push(Sample {
        t,
        u1,
        u2,
        usw: 0.0,
        isw: 0.0,
        state,
    });

    let mut k = 1u64;
    loop {
        let t_next = k as f64 * dt;
        // The tiny slack keeps the final grid point when k*dt lands on
        // t_end up to rounding.
        if t_next > t_end * (1.0 + 1e-12) {
            break;
        }
        while t < t_next {
            let r_now = r_of_t.map_or(c.r(), |f| f(t));
            if r_of_t.is_some() {
                let max_dt = GUARD_FACTOR / fast_rate_max(base, r_now);
                if dt > max_dt {
                    return Err(Error::StepTooLarge { dt, max_dt });
                }
            }
            let co = Coeffs::new(base, r_now, state);
            let h = t_next - t;
            let d_a = co.deriv(u1, u2);
            let (v1, v2) = co.rk4(u1, u2, h);
            let (level, from_below) = armed_level(base, state);
            if crossed(level, from_below, v1 + v2) {
                let d_b = co.deriv(v1, v2);
                let (theta, e1, e2) = locate_event((u1, u2), d_a, (v1, v2), d_b, h, level);
                t += theta * h;
                u1 = e1;
                u2 = e2;
                state = match state {
                    SwitchState::Off => {
                        spikes.push(t);
                        SwitchState::On
                    }
                    SwitchState::On => SwitchState::Off,
                };
            } else {
                t = t_next;
                u1 = v1;
                u2 = v2;
            }
            if !(u1.is_finite() && u2.is_finite()) {
                return Err(Error::NonFinite { t });
            }
        }
        let usw = u1 + u2;
        samples.push(Sample {
            t: t_next,
            u1,
            u2,
            usw,
            isw: base.switch().current(usw, state),
            state,
        });
        k += 1;
    }
    Ok((Waveform { samples }, SpikeTrain { times: spikes }))
}

/// A stepping oscillator with persistent state, for event-only runs and
/// lock-step co-simulation. Starts from power-on: both capacitors
/// discharged, switch OFF.
#[derive(Debug, Clone)]
pub struct CircuitSim {
    base: CircuitBase,
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    pub state: SwitchState,
    h: f64,
    last_event_t: f64,
}

impl CircuitSim {
    pub fn new(base: CircuitBase) -> Self {
        Self {
            base,
            t: 0.0,
            u1: 0.0,
            u2: 0.0,
            state: SwitchState::Off,
            h: 0.0,
            last_event_t: 0.0,
        }
    }

    pub fn usw(&self) -> f64 {
        self.u1 + self.u2
    }

    /// Advance to `until` under a fixed control resistance, appending
    /// turn-on times to `spikes`.
    pub fn advance(&mut self, r: f64, until: f64, spikes: &mut Vec<f64>) -> Result<()> {
        self.advance_with(&|_| r, until, f64::INFINITY, spikes, None)
    }

    /// Adaptive trapezoidal driver. `dt_base` caps the post-event sub-step
    /// (pass infinity for the automatic fast-mode resolution); `stop_after`
    /// ends the run early once that many spikes have accumulated in total.
    pub fn advance_with(
        &mut self,
        r_fn: &dyn Fn(f64) -> f64,
        until: f64,
        dt_base: f64,
        spikes: &mut Vec<f64>,
        stop_after: Option<usize>,
    ) -> Result<()> {
        let mut budget = 0u64;
        while self.t < until {
            if let Some(n) = stop_after {
                if spikes.len() >= n {
                    return Ok(());
                }
            }
            budget += 1;
            if budget > MAX_SUBSTEPS {
                return Err(Error::TooManySteps(MAX_SUBSTEPS));
            }

            let r_now = r_fn(self.t);
            let co = Coeffs::new(&self.base, r_now, self.state);
            let base_h = dt_base.min(BASE_RESOLUTION / co.fast_rate());
            let d_a = co.deriv(self.u1, self.u2);

            // Step caps: resolve the slow mode, do not overrun the horizon,
            // and shorten toward an armed threshold so no crossing can be
            // stepped over.
            let (level, from_below) = armed_level(&self.base, self.state);
            let mut h_max = (SLOW_RESOLUTION * co.slow_tau()).min(until - self.t);
            let rate = d_a.0 + d_a.1;
            let dist = level - self.usw();
            if rate != 0.0 {
                let t_est = dist / rate;
                if t_est > 0.0 {
                    h_max = h_max.min(0.5 * t_est + base_h);
                }
            }
            if self.h <= 0.0 {
                self.h = base_h;
            }
            let h = self.h.min(h_max).max(base_h.min(until - self.t));

            let (v1, v2) = co.trapezoidal(self.u1, self.u2, h);
            if crossed(level, from_below, v1 + v2) {
                let d_b = co.deriv(v1, v2);
                let (theta, e1, e2) =
                    locate_event((self.u1, self.u2), d_a, (v1, v2), d_b, h, level);
                self.t += theta * h;
                self.u1 = e1;
                self.u2 = e2;
                self.state = match self.state {
                    SwitchState::Off => {
                        spikes.push(self.t);
                        SwitchState::On
                    }
                    SwitchState::On => SwitchState::Off,
                };
                self.h = 0.0;
                self.last_event_t = self.t;
            } else {
                self.t += h;
                self.u1 = v1;
                self.u2 = v2;
                let ramp = ((self.t - self.last_event_t) * RESOLVE_FRACTION).max(base_h);
                self.h = (h * STEP_GROWTH).min(ramp);
            }
            if !(self.u1.is_finite() && self.u2.is_finite()) {
                return Err(Error::NonFinite { t: self.t });
            }
        }
        Ok(())
    }
}

/// Turn-on times over `[0, t_end]` via the adaptive event-only driver.
/// `dt` caps the post-event sub-step; `r_of_t` as in [`integrate`].
pub fn spike_train(
    c: &CircuitParams,
    t_end: f64,
    dt: f64,
    r_of_t: Option<&dyn Fn(f64) -> f64>,
) -> Result<SpikeTrain> {
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Error::InvalidParam(format!(
            "t_end > 0 and dt > 0 required: t_end = {t_end}, dt = {dt}"
        )));
    }
    let mut sim = CircuitSim::new(*c.base());
    let mut spikes = Vec::new();
    let fixed = c.r();
    let r_fn: &dyn Fn(f64) -> f64 = match r_of_t {
        Some(f) => f,
        None => &move |_| fixed,
    };
    sim.advance_with(r_fn, t_end, dt, &mut spikes, None)?;
    Ok(SpikeTrain { times: spikes })
}

/// Steady frequency measured after the turn-on transient has fully
/// relaxed, with the settle horizon derived from this module's own time
/// constants.
///
/// The turn-on map relaxes at roughly the mean of the two phases' slow
/// rates. That relaxation can span thousands of periods when the phases
/// nearly decouple (large `r`, large `c2/c1`), where a fixed settle count
/// would still be measuring the startup drift. Sixteen e-folds after the
/// first spike the inter-spike intervals are periodic far below the
/// cross-check tolerances, and nine spikes there pin the frequency.
pub fn settled_frequency(c: &CircuitParams, dt: f64) -> Result<f64> {
    let base = c.base();
    let r = c.r();
    let tau_on = Coeffs::new(base, r, SwitchState::On).slow_tau();
    let tau_off = Coeffs::new(base, r, SwitchState::Off).slow_tau();
    let settle = 32.0 / (1.0 / tau_on + 1.0 / tau_off);
    let horizon = 200.0 * tau_on.max(tau_off);

    let mut sim = CircuitSim::new(*base);
    let mut spikes = Vec::new();
    sim.advance_with(&|_| r, horizon, dt, &mut spikes, Some(1))?;
    if spikes.is_empty() {
        return Err(Error::InsufficientSpikes { got: 0, need: 10 });
    }
    let t_measure = spikes[0] + settle;
    sim.advance_with(&|_| r, t_measure, dt, &mut spikes, None)?;
    let have = spikes.len();
    sim.advance_with(&|_| r, t_measure + horizon, dt, &mut spikes, Some(have + 9))?;
    if spikes.len() < have + 9 {
        return Err(Error::InsufficientSpikes {
            got: spikes.len(),
            need: have + 9,
        });
    }
    Ok(8.0 / (spikes[have + 8] - spikes[have]))
}

/// Measured steady frequency: run until `settle + measure` turn-ons, drop
/// the settling spikes, and divide spike count by elapsed time.
///
/// The run is capped at 100 estimated periods (from the closed-form
/// engine, or 1 s when that estimate is unavailable); too few spikes
/// inside the cap is an error. Prefer [`settled_frequency`] when the
/// settle requirement is not known in advance.
pub fn oracle_frequency(c: &CircuitParams, settle: usize, measure: usize, dt: f64) -> Result<f64> {
    if measure < 2 {
        return Err(Error::InvalidParam(format!(
            "measure_spikes >= 2 required, got {measure}"
        )));
    }
    let period_est = analytic::limit_cycle(c).map_or(1.0, |s| 1.0 / s.f);
    let cap = 100.0 * period_est;
    let need = settle + measure;
    let mut sim = CircuitSim::new(*c.base());
    let mut spikes = Vec::new();
    sim.advance_with(&|_| c.r(), cap, dt, &mut spikes, Some(need))?;
    if spikes.len() < need {
        return Err(Error::InsufficientSpikes {
            got: spikes.len(),
            need,
        });
    }
    let window = spikes[need - 1] - spikes[settle];
    Ok((measure - 1) as f64 / window)
}
