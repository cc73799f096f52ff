//! CSV, JSON, and SVG emission. Numbers are printed in Rust's shortest
//! round-trip decimal form so identical runs produce byte-identical files.

use crate::characterization::{RcfResult, SweepResult};
use crate::sigmoid::SigmoidFit;
use crate::switch::SwitchParams;
use crate::waveform::{SpikeTrain, Waveform};

pub fn waveform_csv(wave: &Waveform) -> String {
    let mut out = String::from("t_s,u1_v,u2_v,usw_v,isw_a,state\n");
    for s in &wave.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.t,
            s.u1,
            s.u2,
            s.usw,
            s.isw,
            s.state.label()
        ));
    }
    out
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("r_ohm,f_hz,t1_s,t2_s\n");
    for p in &sweep.points {
        out.push_str(&format!("{},{},{},{}\n", p.r, p.f, p.t1, p.t2));
    }
    out
}

pub fn rcf_csv(rcf: &RcfResult) -> String {
    let mut out = String::from("r_ohm,rcf_per_ohm\n");
    for p in &rcf.points {
        out.push_str(&format!("{},{}\n", p.r, p.rcf));
    }
    out
}

pub fn spikes_csv(train: &SpikeTrain) -> String {
    let mut out = String::from("t_s\n");
    for t in &train.times {
        out.push_str(&format!("{t}\n"));
    }
    out
}

pub fn iv_csv(switch: &SwitchParams, u_max: f64, points: usize) -> String {
    let mut out = String::from("u_v,i_off_a,i_on_a\n");
    let step = u_max / (points - 1) as f64;
    for i in 0..points {
        let u = i as f64 * step;
        out.push_str(&format!(
            "{},{},{}\n",
            u,
            u / switch.r_off(),
            u / switch.r_on()
        ));
    }
    out
}

pub fn fit_json(fit: &SigmoidFit) -> serde_json::Value {
    serde_json::json!({
        "a1_hz": fit.a1,
        "a2_per_ohm": fit.a2,
        "a3_per_ohm": fit.a3,
        "a4_ohm": fit.a4,
        "a5_hz": fit.a5,
        "rmse_rel": fit.rmse_rel,
        "iterations": fit.iterations,
        "converged": fit.converged,
    })
}

pub fn fit_csv(fit: &SigmoidFit) -> String {
    format!(
        "a1_hz,a2_per_ohm,a3_per_ohm,a4_ohm,a5_hz,rmse_rel,iterations,converged\n{},{},{},{},{},{},{},{}\n",
        fit.a1, fit.a2, fit.a3, fit.a4, fit.a5, fit.rmse_rel, fit.iterations, fit.converged
    )
}

/// Minimal deterministic line chart: one polyline over labeled axes.
pub fn svg_line_chart(points: &[(f64, f64)], x_label: &str, y_label: &str, log_y: bool) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const ML: f64 = 80.0;
    const MR: f64 = 25.0;
    const MT: f64 = 25.0;
    const MB: f64 = 60.0;

    let ys = |v: f64| if log_y { v.max(f64::MIN_POSITIVE).log10() } else { v };
    let finite: Vec<(f64, f64)> = points
        .iter()
        .map(|&(x, y)| (x, ys(y)))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0.is_finite() && y0.is_finite()) {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));

    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let tick_y = if log_y {
            format!("1e{}", fmt_tick(fy))
        } else {
            fmt_tick(fy)
        };
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            px(fx),
            H - MB + 20.0,
            fmt_tick(fx)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"end\">{}</text>\n",
            ML - 8.0,
            py(fy) + 4.0,
            tick_y
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"15\" text-anchor=\"middle\">{x_label}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-size=\"15\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{y_label}</text>\n",
        MT + (H - MT - MB) / 2.0,
        MT + (H - MT - MB) / 2.0
    ));

    let coords: Vec<String> = finite
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    ));
    svg.push_str("</svg>\n");
    svg
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}
