//! Oscillator circuit parameters: switch, supply current, capacitor pair,
//! and the control resistor shunting the first capacitor.

use crate::error::{Error, Result};
use crate::switch::SwitchParams;

/// Everything about an oscillator except the control resistance.
///
/// Sweeps, networks, and conversion modules vary `r` at runtime, so the
/// fixed part is validated once here and combined with an `r` on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitBase {
    switch: SwitchParams,
    i0: f64,
    c1: f64,
    c2: f64,
}

impl CircuitBase {
    pub fn new(switch: SwitchParams, i0: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c1 > 0.0) {
            return Err(Error::InvalidParam(format!("c1 > 0 violated: c1 = {c1}")));
        }
        if !(c2.is_finite() && c2 > 0.0) {
            return Err(Error::InvalidParam(format!("c2 > 0 violated: c2 = {c2}")));
        }
        if !i0.is_finite() {
            return Err(Error::InvalidParam("i0 must be finite".into()));
        }
        let (i_th, i_h) = switch.ndr_window();
        if !(i0 > i_th && i0 < i_h) {
            return Err(Error::InvalidParam(format!(
                "supply current i0 = {i0} A outside the oscillation window ({i_th}, {i_h}) A"
            )));
        }
        Ok(Self { switch, i0, c1, c2 })
    }

    pub fn switch(&self) -> &SwitchParams {
        &self.switch
    }

    pub fn i0(&self) -> f64 {
        self.i0
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn with_r(&self, r: f64) -> Result<CircuitParams> {
        CircuitParams::from_base(*self, r)
    }
}

/// A complete oscillator instance. `r = 0` is legal and shorts the first
/// capacitor, reducing the circuit to a single-capacitor oscillator on `c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    base: CircuitBase,
    r: f64,
}

impl CircuitParams {
    pub fn new(switch: SwitchParams, i0: f64, c1: f64, c2: f64, r: f64) -> Result<Self> {
        Self::from_base(CircuitBase::new(switch, i0, c1, c2)?, r)
    }

    fn from_base(base: CircuitBase, r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParam(format!("r >= 0 violated: r = {r}")));
        }
        Ok(Self { base, r })
    }

    pub fn base(&self) -> &CircuitBase {
        &self.base
    }

    pub fn switch(&self) -> &SwitchParams {
        self.base.switch()
    }

    pub fn i0(&self) -> f64 {
        self.base.i0()
    }

    pub fn c1(&self) -> f64 {
        self.base.c1()
    }

    pub fn c2(&self) -> f64 {
        self.base.c2()
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_switch() -> SwitchParams {
        SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
    }

    #[test]
    fn accepts_reference_circuits() {
        // The two supply levels exercised throughout the suite.
        assert!(CircuitParams::new(demo_switch(), 3e-3, 10e-9, 1e-6, 100.0).is_ok());
        assert!(CircuitParams::new(demo_switch(), 150e-6, 10e-9, 1e-6, 0.0).is_ok());
    }

    #[test]
    fn rejects_bias_outside_window() {
        let err = CircuitParams::new(demo_switch(), 2e-2, 10e-9, 1e-6, 100.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0.0001") && msg.contains("0.01"), "{msg}");
        assert!(CircuitParams::new(demo_switch(), 1e-4, 10e-9, 1e-6, 100.0).is_err());
    }

    #[test]
    fn rejects_nonphysical_passives() {
        assert!(CircuitParams::new(demo_switch(), 3e-3, 0.0, 1e-6, 100.0).is_err());
        assert!(CircuitParams::new(demo_switch(), 3e-3, 10e-9, -1e-6, 100.0).is_err());
        assert!(CircuitParams::new(demo_switch(), 3e-3, 10e-9, 1e-6, -1.0).is_err());
    }
}
