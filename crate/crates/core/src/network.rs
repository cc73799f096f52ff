//! Rate-coded spiking layer: receptor maps that turn a stimulus into a
//! control resistance, conversion modules that turn incoming spike rates
//! into a control resistance, and lock-step co-simulation of oscillator
//! neurons wired through those modules.
//!
//! Information lives in firing rates: a neuron's output frequency follows
//! its control resistance through the oscillator's sigmoid-like response,
//! and each conversion module is a monotone (clamped affine) map, so more
//! input spikes mean a higher output rate for excitatory edges and a lower
//! one for inhibitory edges.

use crate::circuit::CircuitBase;
use crate::error::{Error, Result};
use crate::numeric::CircuitSim;
use crate::waveform::SpikeTrain;

/// Output-resistance limits every receptor and conversion module respects.
#[derive(Debug, Clone, Copy)]
pub struct Clamp {
    pub lo: f64,
    pub hi: f64,
}

impl Clamp {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(Error::InvalidParam(format!(
                "clamp requires 0 <= r_min < r_max, got ({lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn apply(&self, r: f64) -> f64 {
        r.clamp(self.lo, self.hi)
    }
}

/// Stimulus-to-resistance law of an artificial receptor.
#[derive(Debug, Clone, Copy)]
pub enum ReceptorKind {
    /// `r_base + gain * stimulus`.
    Linear { r_base: f64, gain: f64 },
    /// Thermistor-style law `r_ref * (1 + tcr * (t - t_ref))`.
    Tcr { r_ref: f64, tcr: f64, t_ref: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct ReceptorMap {
    pub kind: ReceptorKind,
    pub clamp: Clamp,
}

/// Control resistance produced by a receptor under the given stimulus
/// (stimulus units for the linear law, kelvin for the thermal law).
pub fn receptor_resistance(m: &ReceptorMap, stimulus: f64) -> f64 {
    let raw = match m.kind {
        ReceptorKind::Linear { r_base, gain } => r_base + gain * stimulus,
        ReceptorKind::Tcr { r_ref, tcr, t_ref } => r_ref * (1.0 + tcr * (stimulus - t_ref)),
    };
    m.clamp.apply(raw)
}

/// Frequency-to-resistance conversion module, one per neuron input stage.
#[derive(Debug, Clone, Copy)]
pub enum ConversionModule {
    /// Spike counter latched into a resistance at fixed window boundaries.
    /// Inhibitory inputs decrement the count.
    Counter {
        window: f64,
        r0: f64,
        /// Ohms per counted spike.
        slope: f64,
        clamp: Clamp,
    },
    /// Storage capacitor `c_s` charged by `q_spike` per pulse and drained
    /// through the shunt `r_s`; its voltage sets the resistance.
    Integrator {
        c_s: f64,
        r_s: f64,
        q_spike: f64,
        r0: f64,
        /// Ohms per volt on the storage capacitor.
        slope: f64,
        clamp: Clamp,
    },
    /// Spikes heat a resistive element that cools toward ambient much more
    /// slowly than it is heated, integrating the input rate into a
    /// temperature; a thermistor map turns that into the resistance.
    Thermal {
        heat_per_spike: f64,
        thermal_capacity: f64,
        cooling_rate: f64,
        ambient: f64,
        r_ref: f64,
        tcr: f64,
        t_ref: f64,
        clamp: Clamp,
    },
}

impl ConversionModule {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| -> Result<()> {
            if !(v.is_finite() && v > 0.0) {
                Err(Error::InvalidParam(format!("{name} > 0 violated: {v}")))
            } else {
                Ok(())
            }
        };
        match *self {
            ConversionModule::Counter { window, slope, .. } => {
                bad("window", window)?;
                if !slope.is_finite() {
                    return Err(Error::InvalidParam("counter slope must be finite".into()));
                }
            }
            ConversionModule::Integrator {
                c_s, r_s, q_spike, ..
            } => {
                bad("c_s", c_s)?;
                bad("r_s", r_s)?;
                bad("q_spike", q_spike)?;
            }
            ConversionModule::Thermal {
                heat_per_spike,
                thermal_capacity,
                cooling_rate,
                ambient,
                ..
            } => {
                bad("heat_per_spike", heat_per_spike)?;
                bad("thermal_capacity", thermal_capacity)?;
                bad("cooling_rate", cooling_rate)?;
                bad("ambient", ambient)?;
            }
        }
        Ok(())
    }

    /// Coarsest lock-step `dt` this module resolves meaningfully.
    fn max_dt(&self) -> f64 {
        match *self {
            ConversionModule::Counter { window, .. } => window / 4.0,
            ConversionModule::Integrator { c_s, r_s, .. } => 0.25 * r_s * c_s,
            ConversionModule::Thermal { cooling_rate, .. } => 0.25 / cooling_rate,
        }
    }
}

/// Runtime state of a conversion module.
#[derive(Debug, Clone, Copy)]
pub enum CmState {
    Counter {
        count: f64,
        elapsed: f64,
        latched: f64,
    },
    Integrator {
        v: f64,
    },
    Thermal {
        temp: f64,
    },
}

/// State at power-on: empty counter latched at its zero-count output,
/// discharged storage capacitor, heater at ambient.
pub fn initial_state(cm: &ConversionModule) -> CmState {
    match *cm {
        ConversionModule::Counter { r0, clamp, .. } => CmState::Counter {
            count: 0.0,
            elapsed: 0.0,
            latched: clamp.apply(r0),
        },
        ConversionModule::Integrator { .. } => CmState::Integrator { v: 0.0 },
        ConversionModule::Thermal { ambient, .. } => CmState::Thermal { temp: ambient },
    }
}

/// Advance a conversion module by `dt`, feeding it the signed number of
/// spikes that arrived during the step, and return the control resistance
/// it outputs for the next step.
pub fn cm_step(cm: &ConversionModule, state: &mut CmState, net_events: f64, dt: f64) -> f64 {
    match (cm, state) {
        (
            ConversionModule::Counter {
                window, r0, slope, clamp,
            },
            CmState::Counter {
                count,
                elapsed,
                latched,
            },
        ) => {
            *count += net_events;
            *elapsed += dt;
            while *elapsed >= *window {
                *latched = clamp.apply(r0 + slope * *count);
                *count = 0.0;
                *elapsed -= window;
            }
            *latched
        }
        (
            ConversionModule::Integrator {
                c_s,
                r_s,
                q_spike,
                r0,
                slope,
                clamp,
            },
            CmState::Integrator { v },
        ) => {
            *v = *v * (-dt / (r_s * c_s)).exp() + net_events * q_spike / c_s;
            clamp.apply(r0 + slope * *v)
        }
        (
            ConversionModule::Thermal {
                heat_per_spike,
                thermal_capacity,
                cooling_rate,
                ambient,
                r_ref,
                tcr,
                t_ref,
                clamp,
            },
            CmState::Thermal { temp },
        ) => {
            let decayed = ambient + (*temp - ambient) * (-cooling_rate * dt).exp();
            *temp = (decayed + net_events * heat_per_spike / thermal_capacity).max(*ambient);
            clamp.apply(r_ref * (1.0 + tcr * (*temp - t_ref)))
        }
        _ => unreachable!("state kind matches its module"),
    }
}

/// External drive attached to one neuron.
#[derive(Debug, Clone)]
pub enum StimulusSource {
    /// Uniform spike train; the k-th spike arrives at `k / rate`.
    UniformRate(f64),
    /// Explicit spike times, strictly increasing.
    Times(Vec<f64>),
    /// Receptor drive: the neuron's control resistance is forced to the
    /// receptor output for a piecewise-constant stimulus signal given as
    /// `(time, value)` samples; the conversion module is bypassed.
    ReceptorDrive {
        map: ReceptorMap,
        signal: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone)]
pub struct Stimulus {
    pub target: String,
    pub source: StimulusSource,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub from: String,
    pub to: String,
    /// `+1` excitatory, `-1` inhibitory.
    pub sign: i32,
}

#[derive(Debug, Clone)]
pub struct NeuronSpec {
    pub id: String,
    pub base: CircuitBase,
    pub cm: ConversionModule,
}

#[derive(Debug, Clone, Default)]
pub struct NetworkSpec {
    pub neurons: Vec<NeuronSpec>,
    pub edges: Vec<Edge>,
    pub stimuli: Vec<Stimulus>,
}

impl NetworkSpec {
    fn index_of(&self, id: &str) -> Option<usize> {
        self.neurons.iter().position(|n| n.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.neurons.is_empty() {
            return Err(Error::Validation("network has no neurons".into()));
        }
        for (i, n) in self.neurons.iter().enumerate() {
            if self.neurons[..i].iter().any(|m| m.id == n.id) {
                return Err(Error::Validation(format!("duplicate neuron id '{}'", n.id)));
            }
            n.cm.validate()?;
        }
        for e in &self.edges {
            if self.index_of(&e.from).is_none() || self.index_of(&e.to).is_none() {
                return Err(Error::Validation(format!(
                    "edge {} -> {} references an unknown neuron",
                    e.from, e.to
                )));
            }
            if e.from == e.to {
                return Err(Error::Validation(format!(
                    "self-loop on '{}' rejected",
                    e.from
                )));
            }
            if e.sign != 1 && e.sign != -1 {
                return Err(Error::Validation(format!(
                    "edge sign must be +1 or -1, got {}",
                    e.sign
                )));
            }
        }
        for s in &self.stimuli {
            if self.index_of(&s.target).is_none() {
                return Err(Error::Validation(format!(
                    "stimulus targets unknown neuron '{}'",
                    s.target
                )));
            }
            match &s.source {
                StimulusSource::UniformRate(rate) => {
                    if !(rate.is_finite() && *rate >= 0.0) {
                        return Err(Error::Validation(format!(
                            "stimulus rate must be >= 0, got {rate}"
                        )));
                    }
                }
                StimulusSource::Times(times) => {
                    if times.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(Error::Validation(
                            "stimulus times must be strictly increasing".into(),
                        ));
                    }
                }
                StimulusSource::ReceptorDrive { signal, .. } => {
                    if signal.is_empty() {
                        return Err(Error::Validation("receptor signal is empty".into()));
                    }
                    if signal.windows(2).any(|w| w[1].0 <= w[0].0) {
                        return Err(Error::Validation(
                            "receptor signal times must be strictly increasing".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Spikes a stimulus delivers during `[t0, t1)`, tracked by a cursor.
fn stimulus_count(source: &StimulusSource, cursor: &mut usize, t1: f64) -> f64 {
    match source {
        StimulusSource::UniformRate(rate) => {
            if *rate <= 0.0 {
                return 0.0;
            }
            let mut n = 0.0;
            while (*cursor + 1) as f64 / rate < t1 {
                *cursor += 1;
                n += 1.0;
            }
            n
        }
        StimulusSource::Times(times) => {
            let mut n = 0.0;
            while *cursor < times.len() && times[*cursor] < t1 {
                *cursor += 1;
                n += 1.0;
            }
            n
        }
        StimulusSource::ReceptorDrive { .. } => 0.0,
    }
}

/// Stepwise-held receptor signal value at time `t`.
fn signal_value(signal: &[(f64, f64)], t: f64) -> f64 {
    let mut v = signal[0].1;
    for &(ts, val) in signal {
        if ts <= t {
            v = val;
        } else {
            break;
        }
    }
    v
}

/// Lock-step co-simulation.
///
/// Each step of length `dt`, every neuron's conversion module consumes the
/// signed spikes its in-edges emitted during the previous step (plus any
/// external stimulus spikes of this step), produces the control
/// resistance, and the neuron's circuit advances by `dt` under that
/// resistance. Spikes travel between neurons with a one-step delay, which
/// keeps the update order immaterial and the run deterministic.
pub fn simulate_network(
    spec: &NetworkSpec,
    duration: f64,
    dt: f64,
) -> Result<Vec<(String, SpikeTrain)>> {
    spec.validate()?;
    if !(duration > 0.0 && dt > 0.0) {
        return Err(Error::Validation(format!(
            "duration > 0 and dt > 0 required, got {duration}, {dt}"
        )));
    }
    for n in &spec.neurons {
        let cap = n.cm.max_dt();
        if dt > cap {
            return Err(Error::Validation(format!(
                "dt = {dt} s too coarse for neuron '{}': its conversion module resolves at most {cap} s",
                n.id
            )));
        }
    }

    let n = spec.neurons.len();
    let mut sims: Vec<CircuitSim> = spec
        .neurons
        .iter()
        .map(|ns| CircuitSim::new(ns.base))
        .collect();
    let mut cm_states: Vec<CmState> = spec.neurons.iter().map(|ns| initial_state(&ns.cm)).collect();
    // (source index, sign) per neuron.
    let mut in_edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in &spec.edges {
        let from = spec.index_of(&e.from).unwrap();
        let to = spec.index_of(&e.to).unwrap();
        in_edges[to].push((from, e.sign as f64));
    }
    // (neuron index, source, cursor) per stimulus; receptor drives are
    // resolved separately.
    let mut stim_cursors: Vec<(usize, &StimulusSource, usize)> = spec
        .stimuli
        .iter()
        .map(|s| (spec.index_of(&s.target).unwrap(), &s.source, 0usize))
        .collect();
    let receptor_for: Vec<Option<&Stimulus>> = (0..n)
        .map(|i| {
            spec.stimuli.iter().find(|s| {
                matches!(s.source, StimulusSource::ReceptorDrive { .. })
                    && spec.index_of(&s.target) == Some(i)
            })
        })
        .collect();

    let mut trains: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut prev_counts: Vec<f64> = vec![0.0; n];
    let steps = (duration / dt).ceil() as u64;

    for k in 0..steps {
        let t_next = ((k + 1) as f64 * dt).min(duration);

        let mut net: Vec<f64> = (0..n)
            .map(|i| {
                in_edges[i]
                    .iter()
                    .map(|&(src, sign)| sign * prev_counts[src])
                    .sum()
            })
            .collect();
        for (target, source, cursor) in stim_cursors.iter_mut() {
            net[*target] += stimulus_count(source, cursor, t_next);
        }

        let mut new_counts = vec![0.0; n];
        for i in 0..n {
            let t_now = sims[i].t;
            let r = match receptor_for[i] {
                Some(stim) => match &stim.source {
                    StimulusSource::ReceptorDrive { map, signal } => {
                        receptor_resistance(map, signal_value(signal, t_now))
                    }
                    _ => unreachable!(),
                },
                None => cm_step(&spec.neurons[i].cm, &mut cm_states[i], net[i], dt),
            };
            let before = trains[i].len();
            sims[i].advance(r, t_next, &mut trains[i])?;
            new_counts[i] = (trains[i].len() - before) as f64;
        }
        prev_counts = new_counts;
    }

    Ok(spec
        .neurons
        .iter()
        .zip(trains)
        .map(|(ns, times)| (ns.id.clone(), SpikeTrain { times }))
        .collect())
}

/// Firing rate as spike count over the half-open window `[t_start, t_end)`
/// divided by the window length. Zero for empty windows.
pub fn output_rate(train: &SpikeTrain, t_start: f64, t_end: f64) -> f64 {
    if t_end <= t_start {
        return 0.0;
    }
    let count = train
        .times
        .iter()
        .filter(|&&t| t >= t_start && t < t_end)
        .count();
    count as f64 / (t_end - t_start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switch::SwitchParams;
    use approx::assert_relative_eq;

    fn demo_switch() -> SwitchParams {
        SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
    }

    fn demo_base() -> CircuitBase {
        CircuitBase::new(demo_switch(), 150e-6, 10e-9, 1e-6).unwrap()
    }

    fn wide_clamp() -> Clamp {
        Clamp::new(50.0, 280.0).unwrap()
    }

    fn integrator_cm() -> ConversionModule {
        ConversionModule::Integrator {
            c_s: 1e-6,
            r_s: 1e4,
            q_spike: 1e-8,
            r0: 0.0,
            slope: 1e4,
            clamp: wide_clamp(),
        }
    }

    #[test]
    fn receptor_reference_points() {
        let linear = ReceptorMap {
            kind: ReceptorKind::Linear {
                r_base: 120.0,
                gain: 30.0,
            },
            clamp: Clamp::new(0.0, 1e4).unwrap(),
        };
        assert_eq!(receptor_resistance(&linear, 0.0), 120.0);
        assert_eq!(receptor_resistance(&linear, 2.0), 180.0);
        let tcr = ReceptorMap {
            kind: ReceptorKind::Tcr {
                r_ref: 200.0,
                tcr: 0.02,
                t_ref: 300.0,
            },
            clamp: Clamp::new(0.0, 1e4).unwrap(),
        };
        assert_eq!(receptor_resistance(&tcr, 300.0), 200.0);
        assert_relative_eq!(receptor_resistance(&tcr, 310.0), 240.0);
    }

    #[test]
    fn receptor_output_respects_clamp() {
        let m = ReceptorMap {
            kind: ReceptorKind::Linear {
                r_base: 100.0,
                gain: 1000.0,
            },
            clamp: Clamp::new(50.0, 300.0).unwrap(),
        };
        assert_eq!(receptor_resistance(&m, -10.0), 50.0);
        assert_eq!(receptor_resistance(&m, 10.0), 300.0);
    }

    #[test]
    fn integrator_charge_injection_and_decay() {
        let cm = integrator_cm();
        let mut st = initial_state(&cm);
        // One spike raises v by q/c = 10 mV (after negligible decay).
        cm_step(&cm, &mut st, 1.0, 1e-9);
        match st {
            CmState::Integrator { v } => assert_relative_eq!(v, 1e-2, max_relative = 1e-6),
            _ => unreachable!(),
        }
        // With no input the voltage decays to zero and the output returns
        // to the clamp floor.
        let mut r = 0.0;
        for _ in 0..100_000 {
            r = cm_step(&cm, &mut st, 0.0, 1e-3);
        }
        assert_eq!(r, 50.0);
        match st {
            CmState::Integrator { v } => assert!(v < 1e-12),
            _ => unreachable!(),
        }
    }

    #[test]
    fn thermal_steady_state_balances_heating_and_cooling() {
        let cm = ConversionModule::Thermal {
            heat_per_spike: 1e-3,
            thermal_capacity: 1e-2,
            cooling_rate: 10.0,
            ambient: 300.0,
            r_ref: 200.0,
            tcr: 0.01,
            t_ref: 300.0,
            clamp: Clamp::new(50.0, 500.0).unwrap(),
        };
        let mut st = initial_state(&cm);
        // nu = 200 Hz steady drive: predicted rise over ambient is
        // nu*heat/(cap*cooling) = 200*1e-3/(1e-2*10) = 2 K. Measured after
        // ten cooling time constants.
        let dt = 1e-3;
        for k in 0u64..1000 {
            let spikes = if k.is_multiple_of(5) { 1.0 } else { 0.0 };
            cm_step(&cm, &mut st, spikes, dt);
        }
        match st {
            CmState::Thermal { temp } => {
                assert_relative_eq!(temp - 300.0, 2.0, max_relative = 0.05);
            }
            _ => unreachable!(),
        }
        // Drive removed: the heater cools back to ambient and the output
        // returns to the thermistor value there (clamped).
        let mut r = 0.0;
        for _ in 0..20_000 {
            r = cm_step(&cm, &mut st, 0.0, dt);
        }
        match st {
            CmState::Thermal { temp } => assert!((temp - 300.0).abs() < 1e-9),
            _ => unreachable!(),
        }
        assert_relative_eq!(r, 200.0, max_relative = 1e-12);
    }

    #[test]
    fn receptor_composed_with_the_oscillator_is_monotone() {
        // A positive-gain receptor raises the control resistance with the
        // stimulus; the oscillator's response rises with resistance, so
        // the firing rate is nondecreasing along a stimulus ramp.
        let map = ReceptorMap {
            kind: ReceptorKind::Linear {
                r_base: 100.0,
                gain: 40.0,
            },
            clamp: Clamp::new(50.0, 280.0).unwrap(),
        };
        let base = demo_base();
        let mut prev = 0.0;
        for stimulus in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0] {
            let r = receptor_resistance(&map, stimulus);
            let f = crate::analytic::limit_cycle(&base.with_r(r).unwrap())
                .unwrap()
                .f;
            assert!(f >= prev, "f({stimulus}) = {f} fell below {prev}");
            prev = f;
        }
    }

    #[test]
    fn counter_latches_at_window_boundaries() {
        let cm = ConversionModule::Counter {
            window: 1e-3,
            r0: 50.0,
            slope: 10.0,
            clamp: Clamp::new(50.0, 280.0).unwrap(),
        };
        let mut st = initial_state(&cm);
        // Three spikes inside the first window: output latches when the
        // window closes, not before.
        assert_eq!(cm_step(&cm, &mut st, 3.0, 4e-4), 50.0);
        assert_eq!(cm_step(&cm, &mut st, 0.0, 4e-4), 50.0);
        assert_eq!(cm_step(&cm, &mut st, 0.0, 4e-4), 80.0);
        // Inhibition drives the count negative; the clamp floors it.
        for _ in 0..3 {
            cm_step(&cm, &mut st, -2.0, 4e-4);
        }
        match st {
            CmState::Counter { latched, .. } => assert_eq!(latched, 50.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn validation_catches_bad_wiring() {
        let neuron = |id: &str| NeuronSpec {
            id: id.into(),
            base: demo_base(),
            cm: integrator_cm(),
        };
        let mut spec = NetworkSpec {
            neurons: vec![neuron("a"), neuron("b")],
            edges: vec![Edge {
                from: "a".into(),
                to: "b".into(),
                sign: 1,
            }],
            stimuli: vec![],
        };
        assert!(spec.validate().is_ok());
        spec.edges[0].to = "c".into();
        assert!(spec.validate().is_err());
        spec.edges[0].to = "a".into();
        assert!(spec.validate().is_err(), "self-loop must be rejected");
        spec.edges.clear();
        spec.neurons.push(neuron("a"));
        assert!(spec.validate().is_err(), "duplicate id must be rejected");
    }

    #[test]
    fn free_running_neuron_matches_the_cycle_engine() {
        let spec = NetworkSpec {
            neurons: vec![NeuronSpec {
                id: "solo".into(),
                base: demo_base(),
                cm: integrator_cm(),
            }],
            edges: vec![],
            stimuli: vec![],
        };
        let trains = simulate_network(&spec, 0.25, 1e-4).unwrap();
        // Steady rate from the settled inter-spike intervals.
        let tail: Vec<f64> = trains[0].1.times.iter().copied().filter(|t| *t > 0.1).collect();
        assert!(tail.len() >= 3);
        let rate = (tail.len() - 1) as f64 / (tail[tail.len() - 1] - tail[0]);
        // No input: the integrator floor is 50 ohm.
        let c = demo_base().with_r(50.0).unwrap();
        let f = crate::analytic::limit_cycle(&c).unwrap().f;
        assert_relative_eq!(rate, f, max_relative = 0.01);
    }

    #[test]
    fn output_rate_counts_over_the_window() {
        assert_eq!(output_rate(&SpikeTrain::default(), 0.0, 1.0), 0.0);
        let train = SpikeTrain {
            times: (1..=50).map(|k| k as f64 * 0.02).collect(),
        };
        // Half-open window: the spike at t = 1.0 falls outside, so the
        // count is off by at most the one-count quantization.
        let rate = output_rate(&train, 0.0, 1.0);
        assert!((rate - 50.0).abs() <= 1.0, "rate = {rate}");
        assert_eq!(output_rate(&train, 0.0, 1.001), 50.0 / 1.001);
        assert_eq!(output_rate(&train, 1.0, 1.0), 0.0);
        // Against the mean inter-spike interval of a long steady train.
        let mean_isi = 0.02;
        assert_relative_eq!(rate, 1.0 / mean_isi, max_relative = 0.02);
    }

    #[test]
    fn deterministic_and_decoupled_without_edges() {
        let spec = NetworkSpec {
            neurons: vec![
                NeuronSpec {
                    id: "a".into(),
                    base: demo_base(),
                    cm: integrator_cm(),
                },
                NeuronSpec {
                    id: "b".into(),
                    base: demo_base(),
                    cm: integrator_cm(),
                },
            ],
            edges: vec![],
            stimuli: vec![Stimulus {
                target: "a".into(),
                source: StimulusSource::UniformRate(200.0),
            }],
        };
        let run1 = simulate_network(&spec, 0.1, 1e-4).unwrap();
        let run2 = simulate_network(&spec, 0.1, 1e-4).unwrap();
        assert_eq!(run1.len(), 2);
        for (a, b) in run1.iter().zip(&run2) {
            assert_eq!(a.1, b.1, "identical runs must be bit-stable");
        }
        // Neuron b never hears about a's input.
        let solo = NetworkSpec {
            neurons: vec![spec.neurons[1].clone()],
            edges: vec![],
            stimuli: vec![],
        };
        let solo_run = simulate_network(&solo, 0.1, 1e-4).unwrap();
        assert_eq!(run1[1].1, solo_run[0].1);
    }

    #[test]
    fn receptor_drive_overrides_the_conversion_module() {
        let map = ReceptorMap {
            kind: ReceptorKind::Linear {
                r_base: 100.0,
                gain: 50.0,
            },
            clamp: Clamp::new(50.0, 280.0).unwrap(),
        };
        let spec = NetworkSpec {
            neurons: vec![NeuronSpec {
                id: "rx".into(),
                base: demo_base(),
                cm: integrator_cm(),
            }],
            edges: vec![],
            stimuli: vec![Stimulus {
                target: "rx".into(),
                source: StimulusSource::ReceptorDrive {
                    map,
                    signal: vec![(0.0, 0.0), (0.1, 3.0)],
                },
            }],
        };
        let trains = simulate_network(&spec, 0.2, 1e-4).unwrap();
        let low = output_rate(&trains[0].1, 0.05, 0.1);
        let high = output_rate(&trains[0].1, 0.15, 0.2);
        // Stimulus steps 0 -> 3 units, resistance 100 -> 250 ohm, so the
        // firing rate must climb.
        assert!(high > low * 1.5, "low = {low}, high = {high}");
    }
}
