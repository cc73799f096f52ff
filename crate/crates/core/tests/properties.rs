//! Property suites: structural invariants of the switch law, the
//! closed-form phase solution against its own differential equation, and
//! cross-checks between the closed-form and time-stepping engines.

use proptest::prelude::*;
use sigosc::analytic::{self, PhasePiece};
use sigosc::circuit::CircuitParams;
use sigosc::numeric;
use sigosc::switch::{SwitchParams, SwitchState};

fn demo_switch() -> SwitchParams {
    SwitchParams::new(4.0, 2.0, 200.0, 40_000.0).unwrap()
}

/// Log-uniform circuit strategy over the validated parameter ranges.
fn any_circuit() -> impl Strategy<Value = CircuitParams> {
    (
        0.0f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
    )
        .prop_map(|(a, b, c, d)| {
            let c1 = 1e-9 * 100f64.powf(a);
            let c2 = 1e-7 * 100f64.powf(b);
            let r = 1.0 * 1000f64.powf(c);
            let i0 = 2e-4 * 25f64.powf(d);
            CircuitParams::new(demo_switch(), i0, c1, c2, r).unwrap()
        })
}

proptest! {
    #[test]
    fn transition_is_idempotent(u in -1.0f64..8.0, on in proptest::bool::ANY) {
        let p = demo_switch();
        let state = if on { SwitchState::On } else { SwitchState::Off };
        let once = p.transition(u, state);
        prop_assert_eq!(p.transition(u, once), once);
    }

    #[test]
    fn branch_currents_are_ordered_and_monotone(
        u in 1e-3f64..10.0,
        du in 1e-6f64..1.0,
    ) {
        let p = demo_switch();
        prop_assert!(p.current(u, SwitchState::On) > p.current(u, SwitchState::Off));
        for state in [SwitchState::On, SwitchState::Off] {
            prop_assert!(p.current(u + du, state) > p.current(u, state));
        }
        prop_assert_eq!(p.current(0.0, SwitchState::On), 0.0);
        prop_assert_eq!(p.current(0.0, SwitchState::Off), 0.0);
    }

    #[test]
    fn ndr_window_is_nonempty(
        u_th in 1.0f64..10.0,
        h_frac in 0.1f64..0.9,
        r_on in 10.0f64..1e3,
        r_ratio in 3.0f64..1e3,
    ) {
        let u_h = u_th * h_frac;
        let r_off = r_on * r_ratio;
        if let Ok(p) = SwitchParams::new(u_th, u_h, r_on, r_off) {
            let (i_th, i_h) = p.ndr_window();
            prop_assert!(i_th < i_h);
        }
    }

    #[test]
    fn anchoring_reproduces_initial_conditions(
        c in any_circuit(),
        off in proptest::bool::ANY,
        u10 in -2.0f64..4.0,
        u20 in -1.0f64..6.0,
    ) {
        let r_sw = if off { c.switch().r_off() } else { c.switch().r_on() };
        let piece = PhasePiece::coefficients(&c, r_sw).unwrap().with_initial(u10, u20);
        prop_assert!(piece.d > 0.0 && piece.b >= 1.0);
        prop_assert!(piece.alpha1 > 0.0 && piece.alpha1 < piece.alpha2);
        let (v1, v2, vsw) = piece.eval(0.0);
        prop_assert!((v1 - u10).abs() <= 1e-12 * u10.abs().max(1.0));
        prop_assert!((v2 - u20).abs() <= 1e-12 * u20.abs().max(1.0));
        prop_assert!((vsw - (u10 + u20)).abs() <= 1e-12 * (u10 + u20).abs().max(1.0));
    }

    /// Central-difference derivatives of the closed-form solution must
    /// satisfy the circuit equations themselves.
    #[test]
    fn phase_solution_satisfies_the_circuit_equations(
        c in any_circuit(),
        off in proptest::bool::ANY,
        u10 in -1.0f64..4.0,
        frac in 0.01f64..3.0,
    ) {
        let r_sw = if off { c.switch().r_off() } else { c.switch().r_on() };
        let piece = PhasePiece::coefficients(&c, r_sw)
            .unwrap()
            .with_initial(u10, c.switch().u_th() - u10);
        let t = frac / piece.alpha1;
        // Resolve the fast mode near t = 0 but grow with t, or the
        // difference quotient drowns in cancellation at large rate ratios.
        let h = (1e-4 / piece.alpha2).max(1e-7 * t);
        let (u1, u2, _) = piece.eval(t);
        let (p1, p2, _) = piece.eval(t + h);
        let (m1, m2, _) = piece.eval(t - h);
        let fd1 = (p1 - m1) / (2.0 * h);
        let fd2 = (p2 - m2) / (2.0 * h);
        let rhs1 = piece.a1 * (piece.v0 - piece.b * u1 - u2);
        let rhs2 = piece.a2 * (piece.v0 - u1 - u2);
        let scale1 = rhs1.abs().max(1e-3 * piece.a1 * piece.v0);
        let scale2 = rhs2.abs().max(1e-3 * piece.a2 * piece.v0);
        prop_assert!((fd1 - rhs1).abs() <= 1e-6 * scale1,
            "fd1 = {fd1}, rhs1 = {rhs1}");
        prop_assert!((fd2 - rhs2).abs() <= 1e-6 * scale2,
            "fd2 = {fd2}, rhs2 = {rhs2}");
    }

    /// Whenever a crossing is reported, the switch voltage there equals
    /// the requested level.
    #[test]
    fn located_crossings_sit_on_the_level(
        c in any_circuit(),
        from_off in proptest::bool::ANY,
    ) {
        let sw = *c.switch();
        let (r_sw, start, level) = if from_off {
            (sw.r_off(), (0.0, sw.u_h()), sw.u_th())
        } else {
            (sw.r_on(), (0.5, sw.u_th() - 0.5), sw.u_h())
        };
        let piece = PhasePiece::coefficients(&c, r_sw)
            .unwrap()
            .with_initial(start.0, start.1);
        let horizon = 200.0 / piece.alpha1;
        if let Ok(t) = piece.crossing_time(level, horizon) {
            let (_, _, usw) = piece.eval(t);
            prop_assert!((usw - level).abs() <= 1e-9 * sw.u_th(),
                "usw = {usw} at t = {t}, level = {level}");
        }
    }

    /// Scaling both capacitances by k scales every time by k and the
    /// frequency by exactly 1/k.
    #[test]
    fn frequency_scales_inversely_with_capacitance(
        c in any_circuit(),
        k in 0.1f64..10.0,
    ) {
        let sol = analytic::limit_cycle(&c).unwrap();
        let scaled = CircuitParams::new(
            *c.switch(), c.i0(), k * c.c1(), k * c.c2(), c.r()).unwrap();
        let sol_k = analytic::limit_cycle(&scaled).unwrap();
        prop_assert!((sol_k.f * k - sol.f).abs() <= 1e-9 * sol.f,
            "f = {}, k*f_k = {}", sol.f, sol_k.f * k);
    }

    /// Conversion modules never emit a resistance outside their clamp.
    #[test]
    fn conversion_module_outputs_stay_clamped(
        events in proptest::collection::vec(-5.0f64..20.0, 1..60),
        dt in 1e-5f64..1e-3,
    ) {
        use sigosc::network::{cm_step, initial_state, Clamp, ConversionModule};
        let clamp = Clamp::new(50.0, 280.0).unwrap();
        let modules = [
            ConversionModule::Counter { window: 5e-3, r0: 40.0, slope: 25.0, clamp },
            ConversionModule::Integrator {
                c_s: 1e-6, r_s: 1e4, q_spike: 1e-8, r0: 0.0, slope: 1e4, clamp,
            },
            ConversionModule::Thermal {
                heat_per_spike: 1e-3, thermal_capacity: 1e-2, cooling_rate: 10.0,
                ambient: 300.0, r_ref: 40.0, tcr: 0.05, t_ref: 300.0, clamp,
            },
        ];
        for cm in &modules {
            let mut st = initial_state(cm);
            for &n in &events {
                let r = cm_step(cm, &mut st, n, dt);
                prop_assert!((50.0..=280.0).contains(&r), "r = {r}");
            }
        }
    }
}

/// The distance between successive turn-on states shrinks monotonically
/// once the transient has decayed (a factor 1.05 allows numerical noise).
#[test]
fn cycle_map_is_contracting() {
    for (c1, c2, r, i0) in [
        (10e-9, 1e-6, 100.0, 3e-3),
        (10e-9, 1e-6, 150.0, 150e-6),
        (2.5e-9, 1e-6, 220.0, 150e-6),
        (50e-9, 5e-6, 40.0, 1e-3),
    ] {
        let c = CircuitParams::new(demo_switch(), i0, c1, c2, r).unwrap();
        let (_, mut s, _) = analytic::startup_transient(&c).unwrap();
        let mut prev_dist: Option<f64> = None;
        for cycle in 0..12 {
            let step = analytic::advance_cycle(&c, s).unwrap();
            let dist = (step.u10_next - s).abs();
            if let Some(d) = prev_dist {
                if cycle >= 3 && d > 1e-14 {
                    assert!(
                        dist <= 1.05 * d,
                        "distance grew {d} -> {dist} at cycle {cycle} (r = {r})"
                    );
                }
            }
            prev_dist = Some(dist);
            s = step.u10_next;
        }
    }
}

/// The closed-form waveform must match the independent integrator sample
/// by sample, well within half a percent of the threshold voltage.
#[test]
fn waveforms_from_both_engines_agree_pointwise() {
    let c = CircuitParams::new(demo_switch(), 3e-3, 10e-9, 1e-6, 100.0).unwrap();
    let sol = analytic::limit_cycle(&c).unwrap();
    let t_end = sol.t0 + 6.0 / sol.f;
    let dt = numeric::default_dt(&c);
    let (wave_num, train) = numeric::integrate(&c, t_end, dt, None).unwrap();
    let wave_ana = analytic::sample_waveform(&c, t_end, dt).unwrap();

    // Align at the first spike; both startups are computed from the same
    // initial state, so the shift is only integration error.
    let shift = train.times[0] - sol.t0;
    assert!(shift.abs() < 1e-3 * sol.t0, "startup shift {shift}");

    let tol = 0.005 * c.switch().u_th();
    let n = wave_num.samples.len().min(wave_ana.samples.len());
    let mut worst = 0.0f64;
    for i in 0..n {
        let d = (wave_num.samples[i].usw - wave_ana.samples[i].usw).abs();
        worst = worst.max(d);
    }
    assert!(worst <= tol, "worst pointwise gap {worst} V exceeds {tol} V");
}

/// Startup time from the closed form against the integrator's first spike.
#[test]
fn startup_matches_first_numeric_spike() {
    let c = CircuitParams::new(demo_switch(), 3e-3, 10e-9, 1e-6, 100.0).unwrap();
    let (t0, _, _) = analytic::startup_transient(&c).unwrap();
    assert!(t0 > 0.0);
    let (_, train) = numeric::integrate(&c, 2.0 * t0, numeric::default_dt(&c), None).unwrap();
    let diff = (train.times[0] - t0).abs() / t0;
    assert!(diff < 1e-3, "startup differs by {diff}");
}
