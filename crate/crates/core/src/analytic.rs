//! Exact piecewise-exponential solution of the two-capacitor oscillator.
//!
//! While the switch holds one conduction state with resistance `r_sw`, the
//! capacitor voltages obey a constant-coefficient linear system:
//!
//! ```text
//! du1/dt = a1 * (v0 - b*u1 - u2)        a1 = 1/(r_sw*c1)   b  = (r + r_sw)/r
//! du2/dt = a2 * (v0 - u1 - u2)          a2 = 1/(r_sw*c2)   v0 = r_sw*i0
//! ```
//!
//! whose solution is a pair of decaying exponentials with rates `alpha1 <
//! alpha2` ([`PhasePiece`]). A full period stitches an ON piece (ends when
//! the switch voltage `u1 + u2` falls to `u_h`) to an OFF piece (ends when
//! it climbs back to `u_th`); the crossing instants are transcendental and
//! located by bracketed bisection. The steady oscillation is the fixed
//! point of the turn-on map ([`limit_cycle`]).
//!
//! `r = 0` shorts `c1`, leaving a single-capacitor oscillator on `c2`;
//! that case is routed to the reduced [`ReducedPhase`] representation
//! instead of the two-exponential form, whose `b` would diverge.

use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::switch::SwitchState;
use crate::waveform::{Sample, Waveform};

/// Relative tolerance in `t` for crossing times located by bisection.
const CROSSING_REL_TOL: f64 = 1e-12;
/// Crossing search horizon in units of the slow time constant. Any
/// reachable level is reached well inside this window.
const HORIZON_TAUS: f64 = 200.0;
/// Plain fixed-point sweeps before secant acceleration takes over.
const PLAIN_CYCLES: u32 = 6;

/// One exponential segment of the piecewise solution, with coefficients
/// for the conduction state and the solution constants `m1`, `m2` anchored
/// to the initial condition `(u10, u20)` at local time zero.
#[derive(Debug, Clone, Copy)]
pub struct PhasePiece {
    /// Switch branch resistance for this phase.
    pub r_sw: f64,
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
    pub v0: f64,
    /// Discriminant `4*a1*a2 + (a1*b - a2)^2`, strictly positive.
    pub d: f64,
    /// Slow decay rate (smaller root).
    pub alpha1: f64,
    /// Fast decay rate (larger root).
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub m1: f64,
    pub m2: f64,
    pub u10: f64,
    pub u20: f64,
    /// Absolute time this piece starts at, for stitched schedules.
    pub t_start: f64,
}

impl PhasePiece {
    /// Phase coefficients for conduction resistance `r_sw`. The solution
    /// constants start at the stationary point `(0, v0)`; anchor them with
    /// [`PhasePiece::with_initial`].
    ///
    /// Fails for `r = 0`, which has no two-capacitor phase; callers route
    /// that case to the reduced model.
    pub fn coefficients(c: &CircuitParams, r_sw: f64) -> Result<Self> {
        if c.r() == 0.0 {
            return Err(Error::InvalidParam(
                "r = 0 shorts c1; use the reduced single-capacitor route".into(),
            ));
        }
        let a1 = 1.0 / (r_sw * c.c1());
        let a2 = 1.0 / (r_sw * c.c2());
        // b - 1 carried separately: at large r the product a1*a2*(b - 1)
        // would lose all precision if formed from a rounded b.
        let b_excess = r_sw / c.r();
        let b = 1.0 + b_excess;
        let v0 = r_sw * c.i0();
        let diff = a1 * b - a2;
        let d = 4.0 * a1 * a2 + diff * diff;
        let sq = d.sqrt();
        let alpha2 = 0.5 * (a1 * b + a2 + sq);
        // Product of roots over the larger root; the direct subtraction
        // cancels catastrophically when a1*b >> a2.
        let alpha1 = a1 * a2 * b_excess / alpha2;
        // Same trick for the eigenvector slopes: beta1*beta2 = -a1*a2.
        let (beta1, beta2) = if diff >= 0.0 {
            let beta1 = 0.5 * (diff + sq);
            (beta1, -a1 * a2 / beta1)
        } else {
            let beta2 = 0.5 * (diff - sq);
            (-a1 * a2 / beta2, beta2)
        };
        Ok(Self {
            r_sw,
            a1,
            a2,
            b,
            v0,
            d,
            alpha1,
            alpha2,
            beta1,
            beta2,
            m1: 0.0,
            m2: 0.0,
            u10: 0.0,
            u20: v0,
            t_start: 0.0,
        })
    }

    /// The same piece re-anchored so local time zero starts at `(u10, u20)`.
    pub fn with_initial(mut self, u10: f64, u20: f64) -> Self {
        // beta1 - beta2 equals sqrt(d) exactly; using it directly keeps the
        // denominator safe from the mixed-precision beta pair.
        let sq = self.d.sqrt();
        self.m1 = (self.a1 * (u20 - self.v0) + u10 * self.beta2) / (self.a1 * sq);
        self.m2 = -(self.m1 + u10 / self.a1);
        self.u10 = u10;
        self.u20 = u20;
        self
    }

    /// `(u1, u2, usw)` at local time `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let e1 = (-self.alpha1 * t).exp();
        let e2 = (-self.alpha2 * t).exp();
        let u1 = -self.a1 * (self.m1 * e1 + self.m2 * e2);
        let u2 = self.v0 + self.m1 * self.beta1 * e1 + self.m2 * self.beta2 * e2;
        (u1, u2, u1 + u2)
    }

    /// Switch voltage as `k + p*exp(-alpha1 t) + q*exp(-alpha2 t)`.
    fn usw_coefficients(&self) -> (f64, f64, f64) {
        let p = self.m1 * (self.beta1 - self.a1);
        let q = self.m2 * (self.beta2 - self.a1);
        (self.v0, p, q)
    }

    /// First time in `(0, t_max]` at which the switch voltage reaches
    /// `level`, to 1e-12 relative precision in `t`.
    ///
    /// A two-exponential curve has at most one interior extremum, and its
    /// location is available in closed form, so bracketing the monotone
    /// segments on either side cannot miss the first crossing. Bisection
    /// then refines the bracket unconditionally.
    pub fn crossing_time(&self, level: f64, t_max: f64) -> Result<f64> {
        let (k, p, q) = self.usw_coefficients();
        let g = |t: f64| k + p * (-self.alpha1 * t).exp() + q * (-self.alpha2 * t).exp() - level;

        let mut knots = vec![0.0];
        if p * q < 0.0 {
            let ratio = -(self.alpha2 * q) / (self.alpha1 * p);
            if ratio > 0.0 {
                let t_star = ratio.ln() / (self.alpha2 - self.alpha1);
                if t_star > 0.0 && t_star < t_max {
                    knots.push(t_star);
                }
            }
        }
        knots.push(t_max);
        first_root_in_segments(&g, &knots, level, t_max)
    }
}

/// One phase of the `r = 0` oscillator: `c1` is shorted, so `u1` is pinned
/// at zero and `u2` follows a single RC exponential toward `v_inf`.
#[derive(Debug, Clone, Copy)]
pub struct ReducedPhase {
    pub r_sw: f64,
    /// Asymptotic voltage `r_sw * i0`.
    pub v_inf: f64,
    /// Initial `u2` at local time zero.
    pub u20: f64,
    /// Time constant `r_sw * c2`.
    pub tau: f64,
    pub t_start: f64,
}

impl ReducedPhase {
    fn new(c: &CircuitParams, r_sw: f64, u20: f64) -> Self {
        Self {
            r_sw,
            v_inf: r_sw * c.i0(),
            u20,
            tau: r_sw * c.c2(),
            t_start: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let u2 = self.v_inf + (self.u20 - self.v_inf) * (-t / self.tau).exp();
        (0.0, u2, u2)
    }

    pub fn crossing_time(&self, level: f64, t_max: f64) -> Result<f64> {
        let g = |t: f64| self.eval(t).2 - level;
        first_root_in_segments(&g, &[0.0, t_max], level, t_max)
    }
}

/// A solution segment from either circuit topology.
#[derive(Debug, Clone, Copy)]
pub enum Phase {
    /// Two-capacitor solution (`r > 0`).
    Coupled(PhasePiece),
    /// Shorted-`c1` solution (`r = 0`).
    Reduced(ReducedPhase),
}

impl Phase {
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            Phase::Coupled(p) => p.eval(t),
            Phase::Reduced(p) => p.eval(t),
        }
    }

    pub fn crossing_time(&self, level: f64, t_max: f64) -> Result<f64> {
        match self {
            Phase::Coupled(p) => p.crossing_time(level, t_max),
            Phase::Reduced(p) => p.crossing_time(level, t_max),
        }
    }

    pub fn r_sw(&self) -> f64 {
        match self {
            Phase::Coupled(p) => p.r_sw,
            Phase::Reduced(p) => p.r_sw,
        }
    }

    pub fn t_start(&self) -> f64 {
        match self {
            Phase::Coupled(p) => p.t_start,
            Phase::Reduced(p) => p.t_start,
        }
    }

    fn with_t_start(mut self, t: f64) -> Self {
        match &mut self {
            Phase::Coupled(p) => p.t_start = t,
            Phase::Reduced(p) => p.t_start = t,
        }
        self
    }

    /// Search horizon matched to the slowest decay of the phase.
    fn horizon(&self) -> f64 {
        match self {
            Phase::Coupled(p) => HORIZON_TAUS / p.alpha1,
            Phase::Reduced(p) => HORIZON_TAUS * p.tau,
        }
    }
}

/// Scan consecutive `[knots[i], knots[i+1]]` windows for the first sign
/// change of `g` and refine it by bisection. The knots must cover the
/// monotone segments of `g`.
fn first_root_in_segments(
    g: &dyn Fn(f64) -> f64,
    knots: &[f64],
    level: f64,
    t_max: f64,
) -> Result<f64> {
    let mut lo = knots[0];
    let mut g_lo = g(lo);
    if g_lo == 0.0 {
        // Starting exactly on the level; step off it by a sliver so the
        // departure direction decides the bracket.
        lo = knots[1] * 1e-15;
        g_lo = g(lo);
        if g_lo == 0.0 {
            return Ok(lo);
        }
    }
    for &hi in &knots[1..] {
        if hi <= lo {
            continue;
        }
        let g_hi = g(hi);
        if g_hi == 0.0 {
            return Ok(hi);
        }
        if g_lo * g_hi < 0.0 {
            return Ok(bisect(g, lo, g_lo, hi));
        }
        lo = hi;
        g_lo = g_hi;
    }
    Err(Error::NoCrossing { level, t_max })
}

fn bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut g_lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= CROSSING_REL_TOL * hi {
            return mid;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if g_lo * g_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            g_lo = g_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Power-on transient: the OFF-phase solution from `(0, 0)` up to the
/// first turn-on. Returns `(t0, u10, u20)` with `u10 + u20 = u_th` to
/// crossing tolerance.
pub fn startup_transient(c: &CircuitParams) -> Result<(f64, f64, f64)> {
    let phase = off_phase(c, 0.0, 0.0);
    let t0 = phase.crossing_time(c.switch().u_th(), phase.horizon())?;
    let (u1, u2, _) = phase.eval(t0);
    Ok((t0, u1, u2))
}

fn on_phase(c: &CircuitParams, u10: f64, u20: f64) -> Phase {
    if c.r() == 0.0 {
        Phase::Reduced(ReducedPhase::new(c, c.switch().r_on(), u20))
    } else {
        Phase::Coupled(
            PhasePiece::coefficients(c, c.switch().r_on())
                .expect("r > 0 checked")
                .with_initial(u10, u20),
        )
    }
}

fn off_phase(c: &CircuitParams, u10: f64, u20: f64) -> Phase {
    if c.r() == 0.0 {
        Phase::Reduced(ReducedPhase::new(c, c.switch().r_off(), u20))
    } else {
        Phase::Coupled(
            PhasePiece::coefficients(c, c.switch().r_off())
                .expect("r > 0 checked")
                .with_initial(u10, u20),
        )
    }
}

/// One full cycle advanced from a turn-on state.
#[derive(Debug, Clone, Copy)]
pub struct CycleStep {
    pub on: Phase,
    pub off: Phase,
    pub t1: f64,
    pub t2: f64,
    pub u10_next: f64,
    pub u20_next: f64,
}

/// Advance one full ON/OFF cycle from the turn-on state `u10` (with
/// `u20 = u_th - u10`), returning the next turn-on state. This is the map
/// whose fixed point is the limit cycle.
pub fn advance_cycle(c: &CircuitParams, u10: f64) -> Result<CycleStep> {
    let sw = c.switch();
    let u20 = sw.u_th() - u10;
    let on = on_phase(c, u10, u20);
    let t1 = on.crossing_time(sw.u_h(), on.horizon())?;
    let (x1, x2, _) = on.eval(t1);
    let off = off_phase(c, x1, x2);
    let t2 = off.crossing_time(sw.u_th(), off.horizon())?;
    let (y1, y2, _) = off.eval(t2);
    Ok(CycleStep {
        on,
        off: off.with_t_start(t1),
        t1,
        t2,
        u10_next: y1,
        u20_next: y2,
    })
}

/// Steady periodic solution of the oscillator.
#[derive(Debug, Clone, Copy)]
pub struct CycleSolution {
    /// Startup time from power-on to the first turn-on.
    pub t0: f64,
    /// ON duration.
    pub t1: f64,
    /// OFF duration.
    pub t2: f64,
    /// Oscillation frequency `1/(t1 + t2)`.
    pub f: f64,
    /// Capacitor voltages at turn-on, on the limit cycle.
    pub u10: f64,
    pub u20: f64,
    pub on: Phase,
    pub off: Phase,
    pub converged: bool,
    /// Cycles of the turn-on map evaluated.
    pub iterations: u32,
}

/// [`limit_cycle_with`] at the default tolerance `1e-10` and cycle budget
/// `1000`.
pub fn limit_cycle(c: &CircuitParams) -> Result<CycleSolution> {
    limit_cycle_with(c, 1e-10, 1000)
}

/// Iterate the turn-on map to its fixed point and report the steady cycle.
///
/// `tol` is relative to `u_th`: the cycle is converged when successive
/// turn-on states agree within `tol * u_th` in both coordinates. Plain
/// iteration runs first; if contraction is slow (it approaches unity as
/// `r` grows and the two phases decouple), a secant iteration on the
/// one-dimensional turn-on map finishes the job with the same criterion.
pub fn limit_cycle_with(c: &CircuitParams, tol: f64, max_cycles: u32) -> Result<CycleSolution> {
    let (t0, u10_start, _) = startup_transient(c)?;
    let scale = c.switch().u_th();
    let finish = |s: f64, step: CycleStep, iterations: u32| CycleSolution {
        t0,
        t1: step.t1,
        t2: step.t2,
        f: 1.0 / (step.t1 + step.t2),
        u10: s,
        u20: scale - s,
        on: step.on,
        off: step.off,
        converged: true,
        iterations,
    };

    if c.r() == 0.0 {
        // Shorted c1: the turn-on state is pinned at (0, u_th) and the
        // first cycle already is the limit cycle.
        let step = advance_cycle(c, 0.0)?;
        return Ok(finish(0.0, step, 1));
    }

    let mut iterations = 0u32;
    let mut s = u10_start;
    let mut prev: Option<(f64, f64)> = None;
    while iterations < max_cycles.min(PLAIN_CYCLES) {
        let step = advance_cycle(c, s)?;
        iterations += 1;
        let residual = step.u10_next - s;
        if residual.abs() <= tol * scale {
            return Ok(finish(s, step, iterations));
        }
        prev = Some((s, residual));
        s = step.u10_next;
    }

    // Secant on g(s) = map(s) - s; the plain iterates seed the bracket.
    let (mut s_a, mut g_a) = prev.expect("at least one plain cycle ran");
    let mut s_b = s;
    while iterations < max_cycles {
        let step = advance_cycle(c, s_b)?;
        iterations += 1;
        let g_b = step.u10_next - s_b;
        if g_b.abs() <= tol * scale {
            return Ok(finish(s_b, step, iterations));
        }
        let denom = g_b - g_a;
        let s_next = if denom.abs() < f64::MIN_POSITIVE {
            step.u10_next
        } else {
            s_b - g_b * (s_b - s_a) / denom
        };
        s_a = s_b;
        g_a = g_b;
        s_b = s_next;
    }
    Err(Error::CycleNotConverged {
        iterations,
        residual: g_a.abs(),
    })
}

/// Sampled trajectory from power-on: the startup piece followed by the
/// actual cycle sequence (not the converged cycle), so the waveform is the
/// exact solution of the piecewise system from `(0, 0)`.
pub fn sample_waveform(c: &CircuitParams, t_end: f64, dt: f64) -> Result<Waveform> {
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::InvalidParam(format!(
            "t_end > 0 and dt > 0 required: t_end = {t_end}, dt = {dt}"
        )));
    }
    let sw = c.switch();

    // Build the schedule of (absolute start, phase, state) segments.
    let startup = off_phase(c, 0.0, 0.0);
    let t0 = startup.crossing_time(sw.u_th(), startup.horizon())?;
    let mut schedule = vec![(0.0, startup, SwitchState::Off)];
    let (mut u10, _, _) = startup.eval(t0);
    let mut t = t0;
    while t < t_end {
        let step = advance_cycle(c, u10)?;
        schedule.push((t, step.on, SwitchState::On));
        schedule.push((t + step.t1, step.off, SwitchState::Off));
        t += step.t1 + step.t2;
        u10 = step.u10_next;
    }

    let mut samples = Vec::with_capacity((t_end / dt) as usize + 2);
    let mut seg = 0usize;
    let mut k = 0u64;
    loop {
        let tk = k as f64 * dt;
        if tk > t_end * (1.0 + 1e-12) {
            break;
        }
        while seg + 1 < schedule.len() && schedule[seg + 1].0 <= tk {
            seg += 1;
        }
        let (t_start, phase, state) = schedule[seg];
        let (u1, u2, usw) = phase.eval(tk - t_start);
        samples.push(Sample {
            t: tk,
            u1,
            u2,
            usw,
            isw: sw.current(usw, state),
            state,
        });
        k += 1;
    }
    Ok(Waveform { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitParams;
    use crate::single_cap;
    use crate::switch::SwitchParams;
    use approx::assert_relative_eq;

    fn demo_switch() -> SwitchParams {
        SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
    }

    /// High-supply reference circuit (3 mA, 10 nF / 1 uF, 100 Ohm).
    fn fast_circuit() -> CircuitParams {
        CircuitParams::new(demo_switch(), 3e-3, 10e-9, 1e-6, 100.0).unwrap()
    }

    /// Low-supply reference circuit (150 uA), r attached per test.
    fn slow_base(r: f64) -> CircuitParams {
        CircuitParams::new(demo_switch(), 150e-6, 10e-9, 1e-6, r).unwrap()
    }

    #[test]
    fn coefficients_match_direct_substitution() {
        let p = PhasePiece::coefficients(&fast_circuit(), 200.0).unwrap();
        assert_relative_eq!(p.b, 3.0, max_relative = 1e-15);
        assert_relative_eq!(p.a1, 5.0e5, max_relative = 1e-15);
        assert_relative_eq!(p.v0, 0.6, max_relative = 1e-15);
        assert!(p.d > 0.0);
        assert!(p.alpha1 > 0.0 && p.alpha1 < p.alpha2);
    }

    #[test]
    fn rates_match_system_matrix_eigenvalues() {
        // Oracle: eigenvalues of [[-a1 b, -a1], [-a2, -a2]] from its
        // characteristic polynomial, computed from the matrix entries.
        let p = PhasePiece::coefficients(&fast_circuit(), 40_000.0).unwrap();
        let (m11, m12, m21, m22) = (-p.a1 * p.b, -p.a1, -p.a2, -p.a2);
        let trace = m11 + m22;
        let det = m11 * m22 - m12 * m21;
        let disc = (trace * trace - 4.0 * det).sqrt();
        let lam_slow = 0.5 * (trace + disc);
        let lam_fast = 0.5 * (trace - disc);
        assert_relative_eq!(p.alpha1, -lam_slow, max_relative = 1e-9);
        assert_relative_eq!(p.alpha2, -lam_fast, max_relative = 1e-12);
        assert_relative_eq!(p.alpha1 * p.alpha2, det, max_relative = 1e-12);
        assert_relative_eq!(p.alpha1 + p.alpha2, -trace, max_relative = 1e-12);
    }

    #[test]
    fn stationary_point_has_zero_coefficients() {
        let p = PhasePiece::coefficients(&fast_circuit(), 200.0).unwrap();
        let anchored = p.with_initial(0.0, p.v0);
        assert_eq!(anchored.m1, 0.0);
        assert_eq!(anchored.m2, 0.0);
        let (u1, u2, _) = anchored.eval(123.0);
        assert_relative_eq!(u1, 0.0, epsilon = 1e-15);
        assert_relative_eq!(u2, anchored.v0, max_relative = 1e-15);
    }

    #[test]
    fn zero_start_coefficients_solve_the_linear_system() {
        // Oracle: solve the 2x2 system m1 + m2 = -u10/a1,
        // m1*beta1 + m2*beta2 = u20 - v0 numerically.
        let p = PhasePiece::coefficients(&fast_circuit(), 40_000.0).unwrap();
        let anchored = p.with_initial(0.0, 0.0);
        let sq = p.beta1 - p.beta2;
        assert_relative_eq!(anchored.m1, -p.v0 / sq, max_relative = 1e-12);
        assert_relative_eq!(anchored.m2, p.v0 / sq, max_relative = 1e-12);
    }

    #[test]
    fn eval_reproduces_initial_conditions() {
        let p = PhasePiece::coefficients(&fast_circuit(), 40_000.0).unwrap();
        for (u10, u20) in [(0.0, 0.0), (0.5, 3.5), (-1.2, 3.2), (4.0, -0.7)] {
            let anchored = p.with_initial(u10, u20);
            let (u1, u2, usw) = anchored.eval(0.0);
            assert_relative_eq!(u1, u10, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(u2, u20, max_relative = 1e-12, epsilon = 1e-12);
            assert_relative_eq!(usw, u10 + u20, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn eval_relaxes_to_stationary_point() {
        let p = PhasePiece::coefficients(&fast_circuit(), 200.0)
            .unwrap()
            .with_initial(0.5, 3.5);
        let t = 60.0 / p.alpha1;
        let (u1, u2, usw) = p.eval(t);
        assert_relative_eq!(u1, 0.0, epsilon = 1e-10);
        assert_relative_eq!(u2, p.v0, max_relative = 1e-10);
        assert_relative_eq!(usw, p.v0, max_relative = 1e-10);
    }

    #[test]
    fn crossing_matches_single_capacitor_charge_time() {
        // r = 0 startup is a plain RC charge on c2; the bisection result
        // must match the closed-form log expression.
        let c = slow_base(0.0);
        let phase = ReducedPhase::new(&c, 40_000.0, 0.0);
        let t_cross = phase.crossing_time(4.0, 10.0).unwrap();
        let oracle = single_cap::startup_time(c.switch(), c.i0(), c.c2()).unwrap();
        assert_relative_eq!(t_cross, oracle, max_relative = 1e-9);
    }

    #[test]
    fn unreachable_level_reports_no_crossing() {
        let c = slow_base(100.0);
        let phase = off_phase(&c, 0.0, 0.0);
        // Asymptote is i0*r_off = 6 V; 7 V is never reached.
        let err = phase.crossing_time(7.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::NoCrossing { .. }));
    }

    #[test]
    fn crossing_result_sits_on_the_level() {
        let c = fast_circuit();
        let phase = off_phase(&c, 0.3, 1.7);
        let t = phase.crossing_time(4.0, 1.0).unwrap();
        let (_, _, usw) = phase.eval(t);
        assert!((usw - 4.0).abs() <= 1e-9 * 4.0);
    }

    #[test]
    fn startup_lands_on_the_threshold() {
        let c = fast_circuit();
        let (t0, u10, u20) = startup_transient(&c).unwrap();
        assert!(t0 > 0.0);
        assert_relative_eq!(u10 + u20, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn limit_cycle_stitch_points_hit_both_thresholds() {
        for c in [fast_circuit(), slow_base(150.0), slow_base(0.0)] {
            let sol = limit_cycle(&c).unwrap();
            assert!(sol.converged);
            assert!(sol.t0 > 0.0 && sol.t1 > 0.0 && sol.t2 > 0.0);
            assert_relative_eq!(sol.f, 1.0 / (sol.t1 + sol.t2), max_relative = 1e-15);
            let (_, _, usw_on) = sol.on.eval(0.0);
            let (_, _, usw_off_end) = sol.off.eval(sol.t2);
            let (_, _, usw_on_end) = sol.on.eval(sol.t1);
            assert!((usw_on - 4.0).abs() <= 1e-9 * 4.0);
            assert!((usw_on_end - 2.0).abs() <= 1e-9 * 4.0);
            assert!((usw_off_end - 4.0).abs() <= 1e-9 * 4.0);
        }
    }

    #[test]
    fn huge_r_approaches_series_capacitance_oscillator() {
        let c = slow_base(1e9);
        let sol = limit_cycle(&c).unwrap();
        let c0 = c.c1() * c.c2() / (c.c1() + c.c2());
        let oracle = single_cap::frequency(c.switch(), c.i0(), c0).unwrap();
        assert_relative_eq!(sol.f, oracle, max_relative = 1e-3);
    }

    #[test]
    fn frequency_invariant_under_tolerance_tightening() {
        for r in [60.0, 150.0, 250.0] {
            let c = slow_base(r);
            let loose = limit_cycle_with(&c, 1e-10, 1000).unwrap();
            let tight = limit_cycle_with(&c, 1e-13, 2000).unwrap();
            assert_relative_eq!(loose.f, tight.f, max_relative = 1e-8);
        }
    }

    #[test]
    fn waveform_stays_in_the_oscillation_band() {
        let c = fast_circuit();
        let sol = limit_cycle(&c).unwrap();
        let t_end = sol.t0 + 5.0 / sol.f;
        let wave = sample_waveform(&c, t_end, t_end / 4000.0).unwrap();
        let eps = 1e-6 * 4.0;
        for s in wave.samples.iter().filter(|s| s.t > sol.t0) {
            assert!(s.usw >= 2.0 - eps && s.usw <= 4.0 + eps, "usw = {}", s.usw);
            assert_relative_eq!(s.usw, s.u1 + s.u2, max_relative = 1e-12, epsilon = 1e-12);
        }
        let mut t_prev = f64::NEG_INFINITY;
        for s in &wave.samples {
            assert!(s.t > t_prev);
            t_prev = s.t;
        }
    }

    #[test]
    fn current_jumps_up_at_turn_on() {
        let c = fast_circuit();
        let sol = limit_cycle(&c).unwrap();
        let t_end = sol.t0 + 3.0 / sol.f;
        let wave = sample_waveform(&c, t_end, t_end / 20_000.0).unwrap();
        let mut jumps = 0;
        for w in wave.samples.windows(2) {
            if w[0].state == SwitchState::Off && w[1].state == SwitchState::On {
                assert!(w[1].isw > w[0].isw * 10.0);
                jumps += 1;
            }
        }
        assert!(jumps >= 3);
    }
}
