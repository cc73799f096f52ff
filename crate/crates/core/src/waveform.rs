//! Sampled trajectories and switching-event records shared by the
//! closed-form and time-stepping engines.

use crate::switch::SwitchState;

/// One sampled instant of the oscillator state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    pub usw: f64,
    pub isw: f64,
    pub state: SwitchState,
}

/// Densely sampled trajectory with strictly increasing sample times.
#[derive(Debug, Clone, Default)]
pub struct Waveform {
    pub samples: Vec<Sample>,
}

/// Turn-on instants (OFF -> ON transitions), strictly increasing.
/// An empty train is a valid result of a non-oscillating or short run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpikeTrain {
    pub times: Vec<f64>,
}

impl SpikeTrain {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Consecutive inter-spike intervals.
    pub fn intervals(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }
}
