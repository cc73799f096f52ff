//! Simulation and characterization workbench for relaxation oscillators
//! built on hysteretic S-type switches.
//!
//! The circuit under study is a current-fed switch shunted by two series
//! capacitors, the first of which is bypassed by a control resistor `r`.
//! Its firing rate responds to `r` with a sharp sigmoid-like transition,
//! which makes the oscillator usable as a rate-coding spiking neuron whose
//! input is a resistance. The crate provides:
//!
//! - [`switch`], [`circuit`]: validated device and circuit parameters;
//! - [`analytic`]: the exact piecewise-exponential solution, switching
//!   times, and the limit cycle;
//! - [`numeric`]: an independent time-stepping integrator used to
//!   cross-check the closed-form results;
//! - [`characterization`]: frequency-vs-resistance sweeps, the relative
//!   sensitivity curve, and a sigmoid-like fit of the response;
//! - [`network`]: receptor maps, frequency-to-resistance conversion
//!   modules, and lock-step co-simulation of oscillator neurons;
//! - [`config`], [`runner`], [`output`]: the experiment-file format, the
//!   command dispatcher behind the `sigosc` binary, and CSV/JSON/SVG
//!   emission.

pub mod analytic;
pub mod characterization;
pub mod circuit;
pub mod config;
pub mod error;
pub mod network;
pub mod numeric;
pub mod output;
pub mod runner;
pub mod sigmoid;
pub mod single_cap;
pub mod switch;
pub mod waveform;

pub use error::{Error, Result};
