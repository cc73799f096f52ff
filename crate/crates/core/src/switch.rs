//! Hysteretic two-state switch: piecewise-ohmic branches plus
//! threshold-driven state transitions.

use crate::error::{Error, Result};

/// Conduction state of the switch. Exactly one state holds at any instant;
/// transitions are driven by the voltage across the switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SwitchState {
    Off,
    On,
}

impl SwitchState {
    pub fn label(self) -> &'static str {
        match self {
            SwitchState::On => "ON",
            SwitchState::Off => "OFF",
        }
    }
}

/// Threshold and branch parameters of an S-type switch.
///
/// The I-V law is ohmic within a state (`u/r_off` when OFF, `u/r_on` when
/// ON). The device turns ON when the voltage exceeds `u_th` and OFF when it
/// falls below `u_h`; between the two thresholds the state is retained,
/// which is the hysteresis that makes relaxation oscillation possible.
///
/// Construction validates `0 < u_h < u_th`, `0 < r_on < r_off`, and that
/// the bias window (`u_th/r_off`, `u_h/r_on`) is nonempty, so downstream
/// code may assume a well-formed device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchParams {
    u_th: f64,
    u_h: f64,
    r_on: f64,
    r_off: f64,
}

impl SwitchParams {
    pub fn new(u_th: f64, u_h: f64, r_on: f64, r_off: f64) -> Result<Self> {
        for (name, v) in [
            ("u_th", u_th),
            ("u_h", u_h),
            ("r_on", r_on),
            ("r_off", r_off),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be finite")));
            }
        }
        if u_h <= 0.0 {
            return Err(Error::InvalidParam(format!("0 < u_h violated: u_h = {u_h}")));
        }
        if u_h >= u_th {
            return Err(Error::InvalidParam(format!(
                "u_h < u_th violated: u_h = {u_h}, u_th = {u_th}"
            )));
        }
        if r_on <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "0 < r_on violated: r_on = {r_on}"
            )));
        }
        if r_on >= r_off {
            return Err(Error::InvalidParam(format!(
                "r_on < r_off violated: r_on = {r_on}, r_off = {r_off}"
            )));
        }
        if u_th / r_off >= u_h / r_on {
            return Err(Error::InvalidParam(format!(
                "empty bias window: u_th/r_off = {} A is not below u_h/r_on = {} A",
                u_th / r_off,
                u_h / r_on
            )));
        }
        Ok(Self {
            u_th,
            u_h,
            r_on,
            r_off,
        })
    }

    pub fn u_th(&self) -> f64 {
        self.u_th
    }

    pub fn u_h(&self) -> f64 {
        self.u_h
    }

    pub fn r_on(&self) -> f64 {
        self.r_on
    }

    pub fn r_off(&self) -> f64 {
        self.r_off
    }

    pub fn branch_resistance(&self, state: SwitchState) -> f64 {
        match state {
            SwitchState::On => self.r_on,
            SwitchState::Off => self.r_off,
        }
    }

    /// Branch current at voltage `u` in the given conduction state.
    pub fn current(&self, u: f64, state: SwitchState) -> f64 {
        u / self.branch_resistance(state)
    }

    /// Next conduction state after observing voltage `u`.
    ///
    /// The comparisons are strict: OFF turns ON only for `u > u_th`, ON
    /// turns OFF only for `u < u_h`, and equality at either threshold
    /// retains the present state.
    pub fn transition(&self, u: f64, state: SwitchState) -> SwitchState {
        match state {
            SwitchState::Off if u > self.u_th => SwitchState::On,
            SwitchState::On if u < self.u_h => SwitchState::Off,
            s => s,
        }
    }

    /// Supply-current window `(i_th, i_h)` within which the DC bias point
    /// is unstable and the circuit relaxation-oscillates.
    pub fn ndr_window(&self) -> (f64, f64) {
        (self.u_th / self.r_off, self.u_h / self.r_on)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_switch() -> SwitchParams {
        SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
    }

    #[test]
    fn branch_currents() {
        let p = demo_switch();
        assert_eq!(p.current(3.0, SwitchState::Off), 7.5e-5);
        assert_eq!(p.current(0.0, SwitchState::On), 0.0);
        assert_eq!(p.current(2.0, SwitchState::On), 1.0e-2);
    }

    #[test]
    fn transitions_follow_thresholds() {
        let p = demo_switch();
        assert_eq!(p.transition(4.1, SwitchState::Off), SwitchState::On);
        assert_eq!(p.transition(3.0, SwitchState::On), SwitchState::On);
        assert_eq!(p.transition(3.0, SwitchState::Off), SwitchState::Off);
        assert_eq!(p.transition(1.9, SwitchState::On), SwitchState::Off);
    }

    #[test]
    fn equality_retains_state() {
        let p = demo_switch();
        assert_eq!(p.transition(4.0, SwitchState::Off), SwitchState::Off);
        assert_eq!(p.transition(2.0, SwitchState::On), SwitchState::On);
    }

    #[test]
    fn ndr_window_values() {
        let p = demo_switch();
        let (i_th, i_h) = p.ndr_window();
        assert_eq!(i_th, 4.0 / 40_000.0);
        assert_eq!(i_h, 2.0 / 200.0);
        // Both supply currents used throughout the test suite sit inside.
        for i0 in [150e-6, 3e-3] {
            assert!(i_th < i0 && i0 < i_h);
        }
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(SwitchParams::new(4.0, 2.0, 200.0, 200.0).is_err());
        assert!(SwitchParams::new(2.0, 4.0, 200.0, 40_000.0).is_err());
        assert!(SwitchParams::new(4.0, 4.0, 200.0, 40_000.0).is_err());
        assert!(SwitchParams::new(4.0, -1.0, 200.0, 40_000.0).is_err());
        // Window empty: u_th/r_off = 0.0133 > u_h/r_on = 0.01.
        assert!(SwitchParams::new(4.0, 2.0, 200.0, 300.0).is_err());
    }

    #[test]
    fn error_names_violated_invariant() {
        let err = SwitchParams::new(2.0, 4.0, 200.0, 40_000.0).unwrap_err();
        assert!(err.to_string().contains("u_h < u_th"));
    }
}
