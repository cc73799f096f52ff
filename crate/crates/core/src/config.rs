//! Experiment-file parsing: flat INI-style sections with unit-suffixed
//! keys, strict about unknown sections and keys. One config file can
//! drive several commands; sections a command does not use are still
//! validated but otherwise ignored.

use std::collections::BTreeMap;
use std::path::Path;

use crate::circuit::{CircuitBase, CircuitParams};
use crate::error::{Error, Result};
use crate::network::{
    Clamp, ConversionModule, Edge, NetworkSpec, NeuronSpec, Stimulus, StimulusSource,
};
use crate::sigmoid::FitOptions;
use crate::switch::SwitchParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Iv,
    Simulate,
    Sweep,
    Rcf,
    Fit,
    Ramp,
    Network,
    Jump,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Iv => "iv",
            CommandKind::Simulate => "simulate",
            CommandKind::Sweep => "sweep",
            CommandKind::Rcf => "rcf",
            CommandKind::Fit => "fit",
            CommandKind::Ramp => "ramp",
            CommandKind::Network => "network",
            CommandKind::Jump => "jump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Numeric,
}

/// A fully validated experiment, ready to run.
#[derive(Debug, Clone)]
pub enum ExperimentSpec {
    Iv {
        switch: SwitchParams,
        u_max: f64,
        points: usize,
    },
    Simulate {
        circuit: CircuitParams,
        t_end: f64,
        dt: Option<f64>,
        engine: Engine,
    },
    Sweep {
        base: CircuitBase,
        grid: Vec<f64>,
    },
    Rcf {
        base: CircuitBase,
        grid: Vec<f64>,
        dr: f64,
    },
    Fit {
        base: CircuitBase,
        grid: Vec<f64>,
        opts: FitOptions,
    },
    Ramp {
        base: CircuitBase,
        r_start: f64,
        r_end: f64,
        t_end: f64,
        dt: Option<f64>,
    },
    Network {
        spec: NetworkSpec,
        duration: f64,
        dt: f64,
    },
    Jump {
        base: CircuitBase,
    },
}

#[derive(Debug, Clone)]
struct Item {
    key: String,
    value: String,
    line: usize,
    col: usize,
}

#[derive(Debug, Default)]
struct Raw {
    sections: Vec<(String, Vec<Item>)>,
}

impl Raw {
    fn get(&self, name: &str) -> Option<&[Item]> {
        self.sections
            .iter()
            .find(|(s, _)| s == name)
            .map(|(_, items)| items.as_slice())
    }
}

const SECTIONS: &[&str] = &[
    "switch", "circuit", "sweep", "rcf", "simulate", "ramp", "fit", "network", "iv",
];

fn static_keys(section: &str) -> Option<&'static [&'static str]> {
    Some(match section {
        "switch" => &["u_th_v", "u_h_v", "r_on_ohm", "r_off_ohm"],
        "circuit" => &["i0_a", "c1_f", "c2_f", "r_ohm"],
        "sweep" => &["r_min_ohm", "r_max_ohm", "points", "scale"],
        "rcf" => &["dr_ohm"],
        "simulate" => &["t_end_s", "dt_s", "engine"],
        "ramp" => &["r_start_ohm", "r_end_ohm", "t_end_s", "dt_s"],
        "fit" => &["max_iter", "tol"],
        "iv" => &["u_max_v", "points"],
        _ => return None,
    })
}

/// Keys in [network] besides the dynamic neuron/edge/stim patterns.
const NETWORK_KEYS: &[&str] = &["duration_s", "dt_s"];

fn parse_error(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::ConfigParse {
        line,
        col,
        message: message.into(),
    }
}

fn network_key_ok(key: &str) -> bool {
    if NETWORK_KEYS.contains(&key) {
        return true;
    }
    if let Some(rest) = key.strip_prefix("neuron.") {
        return rest.splitn(2, '.').count() == 2;
    }
    if let Some(rest) = key.strip_prefix("edge.") {
        return !rest.is_empty() && !rest.contains('.');
    }
    if let Some(rest) = key.strip_prefix("stim.") {
        if let Some((id, field)) = rest.rsplit_once('.') {
            return !id.is_empty() && (field == "rate_hz" || field == "file");
        }
        return false;
    }
    false
}

fn parse_raw(text: &str) -> Result<Raw> {
    let mut raw = Raw::default();
    let mut current: Option<usize> = None;
    for (line_idx, full_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = match full_line.find('#') {
            Some(pos) => &full_line[..pos],
            None => full_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        if trimmed.starts_with('[') {
            let end = trimmed
                .find(']')
                .ok_or_else(|| parse_error(line_no, indent + 1, "unterminated section header"))?;
            let name = trimmed[1..end].trim().to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(parse_error(
                    line_no,
                    indent + 1,
                    format!("unknown section [{name}]"),
                ));
            }
            current = Some(
                raw.sections
                    .iter()
                    .position(|(s, _)| *s == name)
                    .unwrap_or_else(|| {
                        raw.sections.push((name.clone(), Vec::new()));
                        raw.sections.len() - 1
                    }),
            );
            let after = &trimmed[end + 1..];
            let rest = after.trim_start();
            if rest.trim_end().is_empty() {
                continue;
            }
            // Key=value pairs may follow the header on the same line.
            let col0 = indent + end + 1 + (after.len() - rest.len());
            parse_pairs(rest, line_no, col0, &mut raw, current)?;
            continue;
        }
        if current.is_none() {
            return Err(parse_error(
                line_no,
                indent + 1,
                "key=value before any [section]",
            ));
        }
        parse_pairs(trimmed, line_no, indent, &mut raw, current)?;
    }

    // Strict key validation.
    for (section, items) in &raw.sections {
        for item in items {
            let ok = match section.as_str() {
                "network" => network_key_ok(&item.key),
                s => static_keys(s).is_some_and(|keys| keys.contains(&item.key.as_str())),
            };
            if !ok {
                return Err(parse_error(
                    item.line,
                    item.col,
                    format!("unknown key '{}' in [{}]", item.key, section),
                ));
            }
        }
        // Duplicate keys are ambiguous; reject.
        for (i, item) in items.iter().enumerate() {
            if items[..i].iter().any(|p| p.key == item.key) {
                return Err(parse_error(
                    item.line,
                    item.col,
                    format!("duplicate key '{}' in [{}]", item.key, section),
                ));
            }
        }
    }
    Ok(raw)
}

fn parse_pairs(
    chunk: &str,
    line_no: usize,
    chunk_col: usize,
    raw: &mut Raw,
    current: Option<usize>,
) -> Result<()> {
    let idx = current.expect("section established by caller");
    let mut offset = 0usize;
    for token in chunk.split_whitespace() {
        let start = offset + chunk[offset..].find(token).expect("token comes from chunk");
        offset = start + token.len();
        let col = chunk_col + start + 1;
        let (key, value) = token.split_once('=').ok_or_else(|| {
            parse_error(line_no, col, format!("expected key=value, got '{token}'"))
        })?;
        if key.is_empty() || value.is_empty() {
            return Err(parse_error(
                line_no,
                col,
                format!("empty key or value in '{token}'"),
            ));
        }
        raw.sections[idx].1.push(Item {
            key: key.to_string(),
            value: value.to_string(),
            line: line_no,
            col,
        });
    }
    Ok(())
}

struct Section<'a> {
    name: &'a str,
    items: &'a [Item],
}

impl<'a> Section<'a> {
    fn item(&self, key: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.key == key)
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let item = self.required(key)?;
        parse_f64(item)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.item(key) {
            Some(item) => parse_f64(item),
            None => Ok(default),
        }
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.item(key).map(parse_f64).transpose()
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.item(key) {
            Some(item) => item.value.parse::<usize>().map_err(|e| {
                parse_error(item.line, item.col, format!("bad integer '{}': {e}", item.value))
            }),
            None => Ok(default),
        }
    }

    fn str_or(&self, key: &str, default: &'a str) -> &str {
        self.item(key).map_or(default, |i| i.value.as_str())
    }

    fn required(&self, key: &str) -> Result<&Item> {
        self.item(key).ok_or_else(|| {
            Error::Validation(format!("missing key '{}' in [{}]", key, self.name))
        })
    }
}

fn parse_f64(item: &Item) -> Result<f64> {
    item.value.parse::<f64>().map_err(|e| {
        parse_error(
            item.line,
            item.col,
            format!("bad number '{}': {e}", item.value),
        )
    })
}

fn section<'a>(raw: &'a Raw, name: &'a str, cmd: CommandKind) -> Result<Section<'a>> {
    raw.get(name)
        .map(|items| Section { name, items })
        .ok_or_else(|| {
            Error::Validation(format!(
                "command '{}' requires a [{}] section",
                cmd.name(),
                name
            ))
        })
}

fn build_switch(raw: &Raw, cmd: CommandKind) -> Result<SwitchParams> {
    let s = section(raw, "switch", cmd)?;
    SwitchParams::new(
        s.f64("u_th_v")?,
        s.f64("u_h_v")?,
        s.f64("r_on_ohm")?,
        s.f64("r_off_ohm")?,
    )
    .map_err(|e| Error::Validation(e.to_string()))
}

fn build_base(raw: &Raw, cmd: CommandKind) -> Result<(CircuitBase, f64)> {
    let switch = build_switch(raw, cmd)?;
    let s = section(raw, "circuit", cmd)?;
    let base = CircuitBase::new(switch, s.f64("i0_a")?, s.f64("c1_f")?, s.f64("c2_f")?)
        .map_err(|e| Error::Validation(e.to_string()))?;
    Ok((base, s.f64("r_ohm")?))
}

fn build_grid(raw: &Raw, cmd: CommandKind) -> Result<Vec<f64>> {
    let s = section(raw, "sweep", cmd)?;
    let lo = s.f64("r_min_ohm")?;
    let hi = s.f64("r_max_ohm")?;
    let points = s.usize_or("points", 301)?;
    if points == 0 {
        return Err(Error::Validation("points >= 1 required".into()));
    }
    if hi < lo {
        return Err(Error::Validation(format!(
            "r_min_ohm <= r_max_ohm violated: {lo} > {hi}"
        )));
    }
    match s.str_or("scale", "linear") {
        "linear" => Ok(crate::characterization::linear_grid(lo, hi, points)),
        "log" => {
            if lo <= 0.0 {
                return Err(Error::Validation(
                    "log scale requires r_min_ohm > 0".into(),
                ));
            }
            if points == 1 {
                return Ok(vec![lo]);
            }
            let ratio = (hi / lo).powf(1.0 / (points - 1) as f64);
            Ok((0..points).map(|i| lo * ratio.powi(i as i32)).collect())
        }
        other => Err(Error::Validation(format!(
            "scale must be linear or log, got '{other}'"
        ))),
    }
}

fn build_network(raw: &Raw, base: CircuitBase, dir: Option<&Path>) -> Result<(NetworkSpec, f64, f64)> {
    let s = section(raw, "network", CommandKind::Network)?;
    let duration = s.f64("duration_s")?;
    let dt = s.f64("dt_s")?;

    // Group neuron.<id>.<param> items preserving first-appearance order.
    let mut order: Vec<String> = Vec::new();
    let mut params: BTreeMap<String, Vec<&Item>> = BTreeMap::new();
    for item in s.items {
        if let Some(rest) = item.key.strip_prefix("neuron.") {
            let (id, _) = rest.split_once('.').expect("validated shape");
            if !params.contains_key(id) {
                order.push(id.to_string());
            }
            params.entry(id.to_string()).or_default().push(item);
        }
    }

    let mut neurons = Vec::new();
    for id in &order {
        let items = &params[id];
        let look = |param: &str| -> Option<&Item> {
            items
                .iter()
                .find(|i| i.key == format!("neuron.{id}.{param}"))
                .copied()
        };
        let num = |param: &str, default: f64| -> Result<f64> {
            look(param).map_or(Ok(default), parse_f64)
        };
        let kind = look("cm").map_or("integrator", |i| i.value.as_str());
        let clamp = Clamp::new(num("r_min_ohm", 50.0)?, num("r_max_ohm", 280.0)?)
            .map_err(|e| Error::Validation(e.to_string()))?;
        let known: &[&str] = match kind {
            "counter" => &["cm", "window_s", "r0_ohm", "slope_ohm", "r_min_ohm", "r_max_ohm"],
            "integrator" => &[
                "cm",
                "c_s_f",
                "r_s_ohm",
                "q_spike_c",
                "r0_ohm",
                "slope_ohm_per_v",
                "r_min_ohm",
                "r_max_ohm",
            ],
            "thermal" => &[
                "cm",
                "heat_per_spike_j",
                "thermal_capacity_j_per_k",
                "cooling_rate_per_s",
                "ambient_k",
                "r_ref_ohm",
                "tcr_per_k",
                "t_ref_k",
                "r_min_ohm",
                "r_max_ohm",
            ],
            other => {
                return Err(Error::Validation(format!(
                    "neuron.{id}.cm must be counter, integrator, or thermal, got '{other}'"
                )))
            }
        };
        for item in items {
            let param = item.key.strip_prefix(&format!("neuron.{id}.")).unwrap();
            if !known.contains(&param) {
                return Err(parse_error(
                    item.line,
                    item.col,
                    format!("unknown parameter '{param}' for {kind} conversion module"),
                ));
            }
        }
        let cm = match kind {
            "counter" => ConversionModule::Counter {
                window: num("window_s", 5e-3)?,
                r0: num("r0_ohm", 50.0)?,
                slope: num("slope_ohm", 10.0)?,
                clamp,
            },
            "integrator" => ConversionModule::Integrator {
                c_s: num("c_s_f", 1e-6)?,
                r_s: num("r_s_ohm", 1e4)?,
                q_spike: num("q_spike_c", 1e-8)?,
                r0: num("r0_ohm", 0.0)?,
                slope: num("slope_ohm_per_v", 1e4)?,
                clamp,
            },
            _ => ConversionModule::Thermal {
                heat_per_spike: num("heat_per_spike_j", 1e-3)?,
                thermal_capacity: num("thermal_capacity_j_per_k", 1e-2)?,
                cooling_rate: num("cooling_rate_per_s", 10.0)?,
                ambient: num("ambient_k", 300.0)?,
                r_ref: num("r_ref_ohm", 50.0)?,
                tcr: num("tcr_per_k", 0.02)?,
                t_ref: num("t_ref_k", 300.0)?,
                clamp,
            },
        };
        neurons.push(NeuronSpec {
            id: id.clone(),
            base,
            cm,
        });
    }

    let mut edges = Vec::new();
    let mut stimuli = Vec::new();
    for item in s.items {
        if item.key.starts_with("edge.") {
            let parts: Vec<&str> = item.value.split(':').collect();
            if parts.len() != 3 {
                return Err(parse_error(
                    item.line,
                    item.col,
                    format!("edge must be <src>:<dst>:<+1|-1>, got '{}'", item.value),
                ));
            }
            let sign = match parts[2] {
                "+1" | "1" => 1,
                "-1" => -1,
                other => {
                    return Err(parse_error(
                        item.line,
                        item.col,
                        format!("edge sign must be +1 or -1, got '{other}'"),
                    ))
                }
            };
            edges.push(Edge {
                from: parts[0].to_string(),
                to: parts[1].to_string(),
                sign,
            });
        } else if let Some(rest) = item.key.strip_prefix("stim.") {
            let (id, field) = rest.rsplit_once('.').expect("validated shape");
            let source = match field {
                "rate_hz" => StimulusSource::UniformRate(parse_f64(item)?),
                _ => {
                    let path = dir.map_or_else(
                        || std::path::PathBuf::from(&item.value),
                        |d| d.join(&item.value),
                    );
                    StimulusSource::Times(load_spike_times(&path)?)
                }
            };
            stimuli.push(Stimulus {
                target: id.to_string(),
                source,
            });
        }
    }

    Ok((
        NetworkSpec {
            neurons,
            edges,
            stimuli,
        },
        duration,
        dt,
    ))
}

/// Spike-times file: one time per line, an optional `t_s` header, `#`
/// comments allowed.
pub fn load_spike_times(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut times = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (idx == 0 && line == "t_s") {
            continue;
        }
        let t: f64 = line.parse().map_err(|e| {
            Error::Validation(format!("{}:{}: bad spike time '{line}': {e}", path.display(), idx + 1))
        })?;
        times.push(t);
    }
    Ok(times)
}

/// Parse config text and build the experiment for `kind`. `base_dir`
/// anchors relative paths referenced from the config (stimulus files).
pub fn experiment(kind: CommandKind, text: &str, base_dir: Option<&Path>) -> Result<ExperimentSpec> {
    let raw = parse_raw(text)?;
    Ok(match kind {
        CommandKind::Iv => {
            let switch = build_switch(&raw, kind)?;
            let (u_max, points) = match raw.get("iv") {
                Some(items) => {
                    let s = Section { name: "iv", items };
                    (
                        s.f64_or("u_max_v", 1.5 * switch.u_th())?,
                        s.usize_or("points", 201)?,
                    )
                }
                None => (1.5 * switch.u_th(), 201),
            };
            if points < 2 {
                return Err(Error::Validation("iv points >= 2 required".into()));
            }
            ExperimentSpec::Iv {
                switch,
                u_max,
                points,
            }
        }
        CommandKind::Simulate => {
            let (base, r) = build_base(&raw, kind)?;
            let s = section(&raw, "simulate", kind)?;
            let engine = match s.str_or("engine", "analytic") {
                "analytic" => Engine::Analytic,
                "numeric" => Engine::Numeric,
                other => {
                    return Err(Error::Validation(format!(
                        "engine must be analytic or numeric, got '{other}'"
                    )))
                }
            };
            ExperimentSpec::Simulate {
                circuit: base.with_r(r).map_err(|e| Error::Validation(e.to_string()))?,
                t_end: s.f64("t_end_s")?,
                dt: s.f64_opt("dt_s")?,
                engine,
            }
        }
        CommandKind::Sweep => {
            let (base, _) = build_base(&raw, kind)?;
            ExperimentSpec::Sweep {
                base,
                grid: build_grid(&raw, kind)?,
            }
        }
        CommandKind::Rcf => {
            let (base, _) = build_base(&raw, kind)?;
            let dr = match raw.get("rcf") {
                Some(items) => Section { name: "rcf", items }.f64_or("dr_ohm", 0.5)?,
                None => 0.5,
            };
            ExperimentSpec::Rcf {
                base,
                grid: build_grid(&raw, kind)?,
                dr,
            }
        }
        CommandKind::Fit => {
            let (base, _) = build_base(&raw, kind)?;
            let opts = match raw.get("fit") {
                Some(items) => {
                    let s = Section { name: "fit", items };
                    FitOptions {
                        max_iter: s.usize_or("max_iter", 200)? as u32,
                        tol: s.f64_or("tol", 1e-8)?,
                    }
                }
                None => FitOptions::default(),
            };
            ExperimentSpec::Fit {
                base,
                grid: build_grid(&raw, kind)?,
                opts,
            }
        }
        CommandKind::Ramp => {
            let (base, _) = build_base(&raw, kind)?;
            let s = section(&raw, "ramp", kind)?;
            let r_start = s.f64("r_start_ohm")?;
            let r_end = s.f64("r_end_ohm")?;
            if r_start < 0.0 || r_end < 0.0 {
                return Err(Error::Validation(format!(
                    "ramp resistances must be >= 0, got {r_start} and {r_end}"
                )));
            }
            ExperimentSpec::Ramp {
                base,
                r_start,
                r_end,
                t_end: s.f64("t_end_s")?,
                dt: s.f64_opt("dt_s")?,
            }
        }
        CommandKind::Network => {
            let (base, _) = build_base(&raw, kind)?;
            let (spec, duration, dt) = build_network(&raw, base, base_dir)?;
            spec.validate()?;
            ExperimentSpec::Network { spec, duration, dt }
        }
        CommandKind::Jump => {
            let (base, _) = build_base(&raw, kind)?;
            ExperimentSpec::Jump { base }
        }
    })
}
