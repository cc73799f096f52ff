//! Closed-form timing of the basic single-capacitor relaxation oscillator:
//! one capacitor `c0` in parallel with the switch, charged by a constant
//! current `i0`.
//!
//! In the OFF state the capacitor charges through `r_off` toward
//! `i0*r_off` (which must exceed `u_th` for the switch to fire); in the ON
//! state it discharges through `r_on` toward `i0*r_on` (which must sit
//! below `u_h` for the switch to release). Both phases are single RC
//! exponentials, so the phase durations are plain logarithms. This module
//! doubles as the limit oracle for the two-capacitor circuit: `r -> 0`
//! behaves like `c0 = c2`, `r -> inf` like the series combination.

use crate::error::{Error, Result};
use crate::switch::SwitchParams;

fn check_drive(sw: &SwitchParams, i0: f64, c0: f64) -> Result<()> {
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::InvalidParam(format!("c0 > 0 violated: c0 = {c0}")));
    }
    if i0 * sw.r_off() <= sw.u_th() {
        return Err(Error::InvalidParam(format!(
            "i0*r_off = {} V does not exceed u_th = {} V; the OFF phase never fires",
            i0 * sw.r_off(),
            sw.u_th()
        )));
    }
    if i0 * sw.r_on() >= sw.u_h() {
        return Err(Error::InvalidParam(format!(
            "i0*r_on = {} V does not drop below u_h = {} V; the ON phase never releases",
            i0 * sw.r_on(),
            sw.u_h()
        )));
    }
    Ok(())
}

/// `(t_on, t_off)` phase durations of the steady oscillation.
pub fn on_off_times(sw: &SwitchParams, i0: f64, c0: f64) -> Result<(f64, f64)> {
    check_drive(sw, i0, c0)?;
    let v_off = i0 * sw.r_off();
    let v_on = i0 * sw.r_on();
    let t_off = sw.r_off() * c0 * ((v_off - sw.u_h()) / (v_off - sw.u_th())).ln();
    let t_on = sw.r_on() * c0 * ((sw.u_th() - v_on) / (sw.u_h() - v_on)).ln();
    Ok((t_on, t_off))
}

/// Steady oscillation frequency `1/(t_on + t_off)`.
pub fn frequency(sw: &SwitchParams, i0: f64, c0: f64) -> Result<f64> {
    let (t_on, t_off) = on_off_times(sw, i0, c0)?;
    Ok(1.0 / (t_on + t_off))
}

/// Time from power-on (capacitor discharged) to the first turn-on.
pub fn startup_time(sw: &SwitchParams, i0: f64, c0: f64) -> Result<f64> {
    check_drive(sw, i0, c0)?;
    let v_off = i0 * sw.r_off();
    Ok(sw.r_off() * c0 * (v_off / (v_off - sw.u_th())).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn demo_switch() -> SwitchParams {
        SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
    }

    #[test]
    fn reference_circuit_timing() {
        // 150 uA through 40 kOhm gives a 6 V target: t_off = 0.04*ln(2).
        let sw = demo_switch();
        let (t_on, t_off) = on_off_times(&sw, 150e-6, 1e-6).unwrap();
        assert_relative_eq!(t_off, 0.04 * 2.0_f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(
            t_on,
            200.0 * 1e-6 * ((4.0_f64 - 0.03) / (2.0 - 0.03)).ln(),
            max_relative = 1e-12
        );
        // Frozen landmarks for the same point.
        assert_relative_eq!(t_off, 0.027726, max_relative = 1e-4);
        assert_relative_eq!(t_on, 1.401e-4, max_relative = 1e-3);
        let f = frequency(&sw, 150e-6, 1e-6).unwrap();
        assert_relative_eq!(f, 35.886, max_relative = 1e-4);
    }

    #[test]
    fn doubling_capacitance_halves_frequency() {
        let sw = demo_switch();
        let f1 = frequency(&sw, 150e-6, 1e-6).unwrap();
        let f2 = frequency(&sw, 150e-6, 2e-6).unwrap();
        assert_relative_eq!(f1, 2.0 * f2, max_relative = 1e-12);
    }

    #[test]
    fn drive_ordering_is_enforced() {
        // i0*r_off = 3.6 V < u_th: never fires.
        let sw = demo_switch();
        assert!(frequency(&sw, 0.9e-4, 1e-6).is_err());
        // i0*r_on = 2.2 V > u_h: never releases.
        assert!(frequency(&sw, 1.1e-2, 1e-6).is_err());
        assert!(frequency(&sw, 150e-6, 0.0).is_err());
    }

    #[test]
    fn startup_is_longer_than_recharge() {
        // Charging 0 -> u_th spans more of the exponential than u_h -> u_th.
        let sw = demo_switch();
        let t0 = startup_time(&sw, 150e-6, 1e-6).unwrap();
        let (_, t_off) = on_off_times(&sw, 150e-6, 1e-6).unwrap();
        assert!(t0 > t_off);
    }
}
