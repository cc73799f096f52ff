//! Command dispatch: run a parsed experiment and emit its outputs.

use std::path::{Path, PathBuf};

use crate::analytic;
use crate::characterization::{self, fit_sigmoid_with, rcf_curve, sweep_f_of_r};
use crate::config::{Engine, ExperimentSpec};
use crate::error::{Error, Result};
use crate::network::simulate_network;
use crate::numeric;
use crate::output;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("values are finite");
    text.push('\n');
    emit(&text, out)
}

fn emit_svg(svg: Option<&Path>, points: &[(f64, f64)], x: &str, y: &str, log_y: bool) -> Result<()> {
    if let Some(path) = svg {
        std::fs::write(path, output::svg_line_chart(points, x, y, log_y))?;
    }
    Ok(())
}

fn waveform_json(wave: &crate::waveform::Waveform) -> serde_json::Value {
    serde_json::json!({
        "samples": wave
            .samples
            .iter()
            .map(|s| {
                serde_json::json!({
                    "t_s": s.t,
                    "u1_v": s.u1,
                    "u2_v": s.u2,
                    "usw_v": s.usw,
                    "isw_a": s.isw,
                    "state": s.state.label(),
                })
            })
            .collect::<Vec<_>>()
    })
}

/// Execute the experiment, writing the main result to `out` (stdout when
/// absent) in the requested format, and an optional single-polyline SVG.
pub fn run(
    spec: &ExperimentSpec,
    out: Option<&Path>,
    format: Format,
    svg: Option<&Path>,
) -> Result<()> {
    match spec {
        ExperimentSpec::Iv {
            switch,
            u_max,
            points,
        } => {
            let (i_th, i_h) = switch.ndr_window();
            match format {
                Format::Csv => emit(&output::iv_csv(switch, *u_max, *points), out)?,
                Format::Json => {
                    let step = u_max / (*points - 1) as f64;
                    let rows: Vec<_> = (0..*points)
                        .map(|i| {
                            let u = i as f64 * step;
                            serde_json::json!({
                                "u_v": u,
                                "i_off_a": u / switch.r_off(),
                                "i_on_a": u / switch.r_on(),
                            })
                        })
                        .collect();
                    emit_json(
                        &serde_json::json!({ "i_th_a": i_th, "i_h_a": i_h, "rows": rows }),
                        out,
                    )?;
                }
            }
            if svg.is_some() {
                return Err(Error::Validation(
                    "iv does not produce an SVG plot".into(),
                ));
            }
            Ok(())
        }

        ExperimentSpec::Simulate {
            circuit,
            t_end,
            dt,
            engine,
        } => {
            let wave = match engine {
                Engine::Analytic => {
                    let dt = dt.unwrap_or(t_end / 5000.0);
                    analytic::sample_waveform(circuit, *t_end, dt)?
                }
                Engine::Numeric => {
                    let dt = dt.unwrap_or_else(|| numeric::default_dt(circuit));
                    numeric::integrate(circuit, *t_end, dt, None)?.0
                }
            };
            match format {
                Format::Csv => emit(&output::waveform_csv(&wave), out)?,
                Format::Json => emit_json(&waveform_json(&wave), out)?,
            }
            let pts: Vec<(f64, f64)> = wave.samples.iter().map(|s| (s.t, s.usw)).collect();
            emit_svg(svg, &pts, "t (s)", "usw (V)", false)
        }

        ExperimentSpec::Sweep { base, grid } => {
            let sweep = sweep_f_of_r(base, grid)?;
            for fail in &sweep.failures {
                eprintln!("sweep: r = {} ohm failed: {}", fail.r, fail.message);
            }
            match format {
                Format::Csv => emit(&output::sweep_csv(&sweep), out)?,
                Format::Json => {
                    let points: Vec<_> = sweep
                        .points
                        .iter()
                        .map(|p| {
                            serde_json::json!({
                                "r_ohm": p.r, "f_hz": p.f, "t1_s": p.t1, "t2_s": p.t2
                            })
                        })
                        .collect();
                    let failures: Vec<_> = sweep
                        .failures
                        .iter()
                        .map(|f| serde_json::json!({ "r_ohm": f.r, "error": f.message }))
                        .collect();
                    emit_json(
                        &serde_json::json!({ "points": points, "failures": failures }),
                        out,
                    )?;
                }
            }
            let pts: Vec<(f64, f64)> = sweep.points.iter().map(|p| (p.r, p.f)).collect();
            emit_svg(svg, &pts, "r (ohm)", "f (Hz)", false)
        }

        ExperimentSpec::Rcf { base, grid, dr } => {
            let rcf = rcf_curve(base, grid, *dr)?;
            match format {
                Format::Csv => emit(&output::rcf_csv(&rcf), out)?,
                Format::Json => {
                    let points: Vec<_> = rcf
                        .points
                        .iter()
                        .map(|p| serde_json::json!({ "r_ohm": p.r, "rcf_per_ohm": p.rcf }))
                        .collect();
                    emit_json(&serde_json::json!({ "points": points }), out)?;
                }
            }
            let pts: Vec<(f64, f64)> = rcf.points.iter().map(|p| (p.r, p.rcf)).collect();
            emit_svg(svg, &pts, "r (ohm)", "rcf (1/ohm)", false)
        }

        ExperimentSpec::Fit { base, grid, opts } => {
            let sweep = sweep_f_of_r(base, grid)?;
            let fit = fit_sigmoid_with(&sweep, *opts)?;
            match format {
                Format::Csv => emit(&output::fit_csv(&fit), out)?,
                Format::Json => emit_json(&output::fit_json(&fit), out)?,
            }
            let params = [fit.a1, fit.a2, fit.a3, fit.a4, fit.a5];
            let pts: Vec<(f64, f64)> = grid
                .iter()
                .map(|&r| (r, crate::sigmoid::eval(&params, r)))
                .collect();
            emit_svg(svg, &pts, "r (ohm)", "fitted f (Hz)", false)
        }

        ExperimentSpec::Ramp {
            base,
            r_start,
            r_end,
            t_end,
            dt,
        } => {
            let circuit = base.with_r(*r_start)?;
            let span = *t_end;
            let (r0, r1) = (*r_start, *r_end);
            let ramp = move |t: f64| r0 + (r1 - r0) * (t / span).clamp(0.0, 1.0);
            let train =
                numeric::spike_train(&circuit, *t_end, dt.unwrap_or(f64::INFINITY), Some(&ramp))?;
            match format {
                Format::Csv => emit(&output::spikes_csv(&train), out)?,
                Format::Json => emit_json(&serde_json::json!({ "t_s": train.times }), out)?,
            }
            let pts: Vec<(f64, f64)> = train
                .times
                .windows(2)
                .map(|w| (0.5 * (w[0] + w[1]), 1.0 / (w[1] - w[0])))
                .collect();
            emit_svg(svg, &pts, "t (s)", "instantaneous rate (Hz)", false)
        }

        ExperimentSpec::Network { spec, duration, dt } => {
            let trains = simulate_network(spec, *duration, *dt)?;
            if svg.is_some() {
                return Err(Error::Validation(
                    "network does not produce an SVG plot".into(),
                ));
            }
            match format {
                Format::Json => {
                    let mut map = serde_json::Map::new();
                    for (id, train) in &trains {
                        map.insert(id.clone(), serde_json::json!(train.times));
                    }
                    emit_json(&serde_json::json!({ "neurons": map }), out)
                }
                Format::Csv => {
                    let out = out.ok_or_else(|| {
                        Error::Validation(
                            "network CSV writes one file per neuron; --out is required".into(),
                        )
                    })?;
                    for (id, train) in &trains {
                        let path = suffixed(out, id);
                        std::fs::write(path, output::spikes_csv(train))?;
                    }
                    Ok(())
                }
            }
        }

        ExperimentSpec::Jump { base } => {
            let ratio = characterization::frequency_jump(base)?;
            let f_low =
                characterization::single_cap_frequency(base.switch(), base.i0(), base.c2())?;
            let c_series = base.c1() * base.c2() / (base.c1() + base.c2());
            let f_high =
                characterization::single_cap_frequency(base.switch(), base.i0(), c_series)?;
            if svg.is_some() {
                return Err(Error::Validation(
                    "jump does not produce an SVG plot".into(),
                ));
            }
            match format {
                Format::Json => emit_json(
                    &serde_json::json!({
                        "ratio": ratio, "f_low_hz": f_low, "f_high_hz": f_high
                    }),
                    out,
                ),
                Format::Csv => emit(
                    &format!("ratio,f_low_hz,f_high_hz\n{ratio},{f_low},{f_high}\n"),
                    out,
                ),
            }
        }
    }
}

/// `spikes.csv` + id `a` -> `spikes_a.csv`.
fn suffixed(path: &Path, id: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{id}.{ext}"))
}
