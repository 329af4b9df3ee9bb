//! Scenario configuration: `section.key = value [unit]`, one entry per line.
//!
//! Every key is declared in [`PARAMS`] with its physical kind, the unit it is
//! displayed in and its default. Values given in another unit of the same kind
//! are converted to the display unit at parse time; accessors return SI.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Length,
    Time,
    /// Angular frequency.
    Rate,
    Speed,
    /// Mirror loss or transmission.
    Loss,
    Number,
    Count,
    Flag,
    Choice(&'static [&'static str]),
    Text,
}

impl Kind {
    /// Accepted units and their size in SI.
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Length => &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("nm", 1e-9), ("km", 1e3)],
            Kind::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6), ("ns", 1e-9)],
            Kind::Rate => &[("MHz2pi", 2.0 * PI * 1e6), ("kHz2pi", 2.0 * PI * 1e3), ("rad/s", 1.0)],
            Kind::Speed => &[("km/s", 1e3), ("m/s", 1.0)],
            Kind::Loss => &[("ppm", 1e-6)],
            _ => &[],
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        self.units().iter().find(|(u, _)| *u == unit).map(|(_, f)| *f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Any,
    Positive,
    NonNegative,
    Probability,
    /// Inclusive range in the display unit.
    Between(f64, f64),
    PowerOfTwo,
}

impl Bound {
    fn check(self, v: f64) -> Result<(), String> {
        let ok = match self {
            Bound::Any => true,
            Bound::Positive => v > 0.0,
            Bound::NonNegative => v >= 0.0,
            Bound::Probability => (0.0..=1.0).contains(&v),
            Bound::Between(lo, hi) => (lo..=hi).contains(&v),
            Bound::PowerOfTwo => v >= 1.0 && (v as u64).is_power_of_two(),
        };
        if ok {
            return Ok(());
        }
        Err(match self {
            Bound::Any => unreachable!(),
            Bound::Positive => format!("{v} must be positive"),
            Bound::NonNegative => format!("{v} must be non-negative"),
            Bound::Probability => format!("{v} is outside [0, 1]"),
            Bound::Between(lo, hi) => format!("{v} is outside [{lo}, {hi}]"),
            Bound::PowerOfTwo => format!("{v} is not a power of two"),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    /// Display unit; empty for unitless kinds.
    pub unit: &'static str,
    pub list: bool,
    pub bound: Bound,
    /// Default in the display unit, in the file grammar; `None` means unset.
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn p(key: &'static str, kind: Kind, unit: &'static str, bound: Bound, default: &'static str, help: &'static str) -> Param {
    Param { key, kind, unit, list: false, bound, default: Some(default), help }
}

const fn list(key: &'static str, kind: Kind, unit: &'static str, bound: Bound, default: &'static str, help: &'static str) -> Param {
    Param { key, kind, unit, list: true, bound, default: Some(default), help }
}

use Bound::*;
use Kind::*;

pub const STRATEGIES: &[&str] = &["restart", "keep"];
pub const RECYCLING: &[&str] = &["leaving_manifold", "all_escapes"];

pub static PARAMS: &[Param] = &[
    Param { key: "run.seed", kind: Count, unit: "", list: false, bound: Any, default: None, help: "RNG seed; required by sampled commands" },
    p("run.out_dir", Text, "", Any, ".", "directory for output files"),
    // heralding cavity
    p("cavity_h.length", Length, "um", Positive, "400", "mirror spacing"),
    p("cavity_h.roc1", Length, "um", Positive, "500", "radius of curvature, mirror 1"),
    p("cavity_h.roc2", Length, "um", Positive, "500", "radius of curvature, mirror 2"),
    p("cavity_h.wavelength", Length, "nm", Positive, "795", ""),
    p("cavity_h.t_oc", Loss, "ppm", NonNegative, "400", "output-coupler transmission"),
    p("cavity_h.t_hr", Loss, "ppm", NonNegative, "10", "high reflector transmission"),
    p("cavity_h.parasitic", Loss, "ppm", NonNegative, "20", "scatter and absorption per mirror"),
    p("cavity_h.atom_position", Length, "um", NonNegative, "200", "distance of the atom from mirror 1"),
    p("cavity_h.probe_position", Length, "um", NonNegative, "100", "second atom position for the coupling report"),
    p("cavity_h.partial_linewidth", Rate, "MHz2pi", NonNegative, "1.4375", "decay rate on the cavity transition"),
    p("cavity_h.atomic_linewidth", Rate, "MHz2pi", Positive, "5.75", "linewidth entering the cooperativity"),
    // entangling (telecom) cavity; output coupler on mirror 2
    p("cavity_t.length", Length, "um", Positive, "75", "mirror spacing"),
    p("cavity_t.roc1", Length, "um", Positive, "100", "radius of curvature, mirror 1"),
    p("cavity_t.roc2", Length, "um", Positive, "200", "radius of curvature, mirror 2 (output)"),
    p("cavity_t.wavelength", Length, "nm", Positive, "1476", ""),
    p("cavity_t.t_oc", Loss, "ppm", NonNegative, "600", "output-coupler transmission"),
    p("cavity_t.t_hr", Loss, "ppm", NonNegative, "10", "high reflector transmission"),
    p("cavity_t.parasitic", Loss, "ppm", NonNegative, "20", "scatter and absorption per mirror"),
    p("cavity_t.atom_position", Length, "um", NonNegative, "37.5", "distance of the atom from mirror 1"),
    p("cavity_t.partial_linewidth", Rate, "MHz2pi", NonNegative, "0.675", "decay rate on the cavity transition"),
    p("cavity_t.atomic_linewidth", Rate, "MHz2pi", Positive, "1.92", "linewidth entering the cooperativity"),
    p("fiber.mode_radius", Length, "um", Positive, "5", "telecom fiber mode-field radius"),
    p("fiber.index", Number, "", Between(1.0, 4.0), "1.45", "substrate refractive index"),
    // level scheme
    p("scheme.gamma_upper", Rate, "MHz2pi", NonNegative, "1.92", "upper-state linewidth"),
    p("scheme.gamma_upper_to_intermediate", Rate, "MHz2pi", NonNegative, "0.675", "free-space decay into each intermediate state"),
    p("scheme.gamma_intermediate", Rate, "MHz2pi", NonNegative, "5.75", "intermediate-state linewidth"),
    p("scheme.gamma_intermediate_to_final", Rate, "MHz2pi", NonNegative, "1.4375", "free-space decay into the same-sign final state"),
    p("scheme.gamma_intermediate_to_ground", Rate, "MHz2pi", NonNegative, "0.4791666666666667", "free-space decay back to the initial state"),
    p("scheme.telecom_sign", Number, "", Between(-1.0, 1.0), "1", ""),
    p("scheme.herald_sign", Number, "", Between(-1.0, 1.0), "1", ""),
    // crossed-cavity rates seen by the atom
    p("cascade.g_t", Rate, "MHz2pi", NonNegative, "70", "telecom coupling"),
    p("cascade.kappa_t_oc", Rate, "MHz2pi", NonNegative, "95", ""),
    p("cascade.kappa_t_loss", Rate, "MHz2pi", NonNegative, "8", ""),
    p("cascade.g_h", Rate, "MHz2pi", NonNegative, "16.3", "heralding coupling"),
    p("cascade.kappa_h_oc", Rate, "MHz2pi", NonNegative, "11.9", ""),
    p("cascade.kappa_h_loss", Rate, "MHz2pi", NonNegative, "1.5", ""),
    p("cascade.fiber_efficiency", Number, "", Probability, "0.96", "telecom fiber coupling"),
    p("cascade.light_shift", Rate, "MHz2pi", Any, "0", "constant detuning of the upper level"),
    p("cascade.worst_case_recycling", Flag, "", Any, "false", "return escaping decays to the initial state"),
    p("cascade.recycling_scope", Choice(RECYCLING), "", Any, "leaving_manifold", ""),
    p("cascade.n_traj", Count, "", Positive, "20000", "trajectories per point"),
    p("cascade.flux_points", Count, "", Between(2.0, 1e6), "2001", "grid points for the flux curves"),
    list("cascade.sweep_fwhm", Time, "ns", Positive, "5,6,7,8,9,10", "pulse widths for the sweep"),
    p("pulse.fwhm", Time, "ns", Positive, "5.9", "control pulse FWHM (intensity)"),
    // herald amplitudes a, b, c
    p("herald.a", Number, "", Any, "-1", ""),
    p("herald.b", Number, "", Any, "1.7320508075688772", ""),
    p("herald.c", Number, "", Any, "-2.449489742783178", ""),
    list("contrast.fwhm", Time, "ns", Positive, "5.9,15,25", "pulse widths"),
    p("contrast.n_traj", Count, "", Positive, "20000", "trajectories per width"),
    p("contrast.bootstrap", Count, "", NonNegative, "0", "bootstrap resamples for the standard error (0 = off)"),
    list("contrast.windows", Time, "ns", Positive, "0.25,1,2,5,10", "post-selection windows"),
    // repeater chain
    p("repeater.attenuation_length", Length, "km", Positive, "22", ""),
    p("repeater.fiber_speed", Speed, "km/s", Positive, "200000", ""),
    p("repeater.latency", Time, "us", Positive, "100", "local processing time per attempt"),
    p("repeater.p_ht", Number, "", Probability, "0.53", "photon pair success probability"),
    p("repeater.eta_h", Number, "", Probability, "0.8", "heralding detection efficiency"),
    p("repeater.eta_t", Number, "", Probability, "0.8", "telecom transmission into the fiber"),
    p("repeater.swap_ratio", Number, "", Probability, "0.61", "swap success before detection"),
    p("repeater.p_p", Number, "", Probability, "0.8", "state-detection probability"),
    list("repeater.links", Count, "", PowerOfTwo, "1,2,4", "elementary links per chain"),
    list("repeater.strategies", Choice(STRATEGIES), "", Any, "restart", ""),
    p("repeater.mc", Flag, "", Any, "false", "sample the restart strategy too"),
    p("repeater.distance_min", Length, "km", Positive, "20", ""),
    p("repeater.distance_max", Length, "km", Positive, "250", ""),
    p("repeater.distance_step", Length, "km", Positive, "10", ""),
    p("repeater.runs", Count, "", Positive, "100000", "Monte Carlo runs per point"),
    p("repeater.bootstrap", Count, "", Between(2.0, 1e7), "1000", "bootstrap resamples"),
    // key rate
    p("keyrate.contrast", Number, "", Probability, "0.97", "two-photon interference contrast"),
    list("keyrate.links", Count, "", PowerOfTwo, "2,4", ""),
    p("keyrate.fidelity_min", Number, "", Between(0.25, 1.0), "0.8", "smallest swap fidelity in the table"),
    p("keyrate.fidelity_step", Number, "", Between(1e-6, 0.75), "0.01", ""),
    list("keyrate.targets", Number, "", Between(0.0, 1.0), "0,0.25,0.5", "secret fractions for the threshold search"),
];

pub fn param(key: &str) -> Option<&'static Param> {
    PARAMS.iter().find(|p| p.key == key)
}

/// One parsed value, numbers in the display unit.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Numbers(Vec<f64>),
    Counts(Vec<u64>),
    Flag(bool),
    Words(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    /// 1-based line in the config file; `None` for flag overrides.
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: ")?,
            None => write!(f, "override: ")?,
        }
        if let Some(k) = &self.key {
            write!(f, "`{k}`: ")?;
        }
        f.write_str(&self.message)
    }
}

/// Validated scenario. Unset optional keys are absent from `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    values: BTreeMap<&'static str, Value>,
}

fn parse_value(param: &Param, text: &str) -> Result<Value, String> {
    let text = text.trim();
    if param.kind == Kind::Text {
        return if text.is_empty() { Err("empty value".into()) } else { Ok(Value::Words(vec![text.to_string()])) };
    }
    // the unit, if any, is the last whitespace-separated token
    let (body, unit) = match text.rsplit_once(char::is_whitespace) {
        Some((b, u)) if !u.ends_with(',') && !b.trim_end().ends_with(',') => (b.trim(), Some(u)),
        _ => (text, None),
    };
    let units = param.kind.units();
    let factor = if units.is_empty() {
        if let Some(u) = unit {
            return Err(format!("unexpected unit `{u}` for a unitless quantity"));
        }
        1.0
    } else {
        let u = unit.ok_or_else(|| {
            let names: Vec<_> = units.iter().map(|x| x.0).collect();
            format!("missing unit (one of {})", names.join(", "))
        })?;
        let given = param.kind.factor(u).ok_or_else(|| format!("unknown unit `{u}`"))?;
        let display = param.kind.factor(param.unit).expect("display unit is registered");
        if u == param.unit { 1.0 } else { given / display }
    };
    let items: Vec<&str> = body.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err("empty value".into());
    }
    if !param.list && items.len() > 1 {
        return Err("expected a single value".into());
    }
    match param.kind {
        Kind::Flag => match body {
            "true" => Ok(Value::Flag(true)),
            "false" => Ok(Value::Flag(false)),
            _ => Err(format!("`{body}` is not true or false")),
        },
        Kind::Choice(options) => {
            for w in &items {
                if !options.contains(w) {
                    return Err(format!("`{w}` is not one of {}", options.join(", ")));
                }
            }
            Ok(Value::Words(items.iter().map(|s| s.to_string()).collect()))
        }
        Kind::Text => unreachable!(),
        Kind::Count => {
            let v = items
                .iter()
                .map(|s| s.parse::<u64>().map_err(|_| format!("`{s}` is not a non-negative integer")))
                .collect::<Result<Vec<_>, _>>()?;
            for x in &v {
                param.bound.check(*x as f64)?;
            }
            Ok(Value::Counts(v))
        }
        _ => {
            let v = items
                .iter()
                .map(|s| match s.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x * factor),
                    _ => Err(format!("`{s}` is not a finite number")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            for x in &v {
                param.bound.check(*x)?;
            }
            Ok(Value::Numbers(v))
        }
    }
}

/// Splits `section.key = value unit`; `None` for blank and comment lines.
fn split_line(line: &str) -> Option<Result<(&str, &str), String>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return None;
    }
    Some(match line.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err("expected `section.key = value [unit]`".into()),
    })
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let values = PARAMS
            .iter()
            .filter_map(|p| p.default.map(|d| (p.key, parse_value(p, &with_unit(p, d)).expect("valid default"))))
            .collect();
        Self { values }
    }
}

fn with_unit(p: &Param, v: &str) -> String {
    if p.unit.is_empty() { v.to_string() } else { format!("{v} {}", p.unit) }
}

/// Parses a configuration file. Keys not present keep their defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, Vec<ConfigError>> {
    let mut cfg = ScenarioConfig::default();
    let mut errors = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some(parsed) = split_line(raw) else { continue };
        let err = |key: Option<&str>, message: String| ConfigError { line: Some(line), key: key.map(String::from), message };
        let (key, value) = match parsed {
            Ok(kv) => kv,
            Err(m) => {
                errors.push(err(None, m));
                continue;
            }
        };
        let Some(param) = param(key) else {
            errors.push(err(Some(key), "unknown key".into()));
            continue;
        };
        if let Some(first) = seen.insert(param.key, line) {
            errors.push(err(Some(key), format!("already set on line {first}")));
            continue;
        }
        match parse_value(param, value) {
            Ok(v) => {
                cfg.values.insert(param.key, v);
            }
            Err(m) => errors.push(err(Some(key), m)),
        }
    }
    if let Err(e) = cfg.check_consistency() {
        errors.push(ConfigError { line: None, key: None, message: e });
    }
    if errors.is_empty() { Ok(cfg) } else { Err(errors) }
}

impl ScenarioConfig {
    /// Applies a `section.key = value [unit]` override from the command line.
    pub fn set(&mut self, entry: &str) -> Result<(), ConfigError> {
        let err = |key: Option<&str>, message: String| ConfigError { line: None, key: key.map(String::from), message };
        let (key, value) = match split_line(entry) {
            Some(Ok(kv)) => kv,
            _ => return Err(err(None, format!("cannot parse `{entry}` as `section.key = value [unit]`"))),
        };
        let param = param(key).ok_or_else(|| err(Some(key), "unknown key".into()))?;
        let v = parse_value(param, value).map_err(|m| err(Some(key), m))?;
        self.values.insert(param.key, v);
        Ok(())
    }

    /// Cross-key checks; run once after every override is applied.
    pub fn check_consistency(&self) -> Result<(), String> {
        if self.num("repeater.distance_max") < self.num("repeater.distance_min") {
            return Err("repeater.distance_max is below repeater.distance_min".into());
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Value> {
        assert!(param(key).is_some(), "unregistered key {key}");
        self.values.get(key)
    }

    fn num(&self, key: &str) -> f64 {
        self.nums(key)[0]
    }

    fn nums(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Some(Value::Numbers(v)) => v,
            other => panic!("{key} is not numeric: {other:?}"),
        }
    }

    fn si_factor(key: &str) -> f64 {
        let p = param(key).expect("registered");
        p.kind.factor(p.unit).unwrap_or(1.0)
    }

    /// Value in SI units.
    pub fn si(&self, key: &str) -> f64 {
        self.num(key) * Self::si_factor(key)
    }

    pub fn si_list(&self, key: &str) -> Vec<f64> {
        let f = Self::si_factor(key);
        self.nums(key).iter().map(|v| v * f).collect()
    }

    /// Value in the display unit of the key (km for distances, ns for pulses).
    pub fn display(&self, key: &str) -> f64 {
        self.num(key)
    }

    pub fn display_list(&self, key: &str) -> Vec<f64> {
        self.nums(key).to_vec()
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts(key)[0]
    }

    pub fn counts(&self, key: &str) -> Vec<u64> {
        match self.get(key) {
            Some(Value::Counts(v)) => v.clone(),
            other => panic!("{key} is not a count: {other:?}"),
        }
    }

    pub fn flag(&self, key: &str) -> bool {
        matches!(self.get(key), Some(Value::Flag(true)))
    }

    pub fn words(&self, key: &str) -> Vec<String> {
        match self.get(key) {
            Some(Value::Words(v)) => v.clone(),
            other => panic!("{key} is not text: {other:?}"),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.values.get("run.seed").map(|_| self.count("run.seed"))
    }

    /// `(key, value with unit)` for every key, in declaration order.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        PARAMS
            .iter()
            .map(|p| {
                let text = match self.values.get(p.key) {
                    None => "unset".to_string(),
                    Some(Value::Numbers(v)) => with_unit(p, &join(v)),
                    Some(Value::Counts(v)) => join(v),
                    Some(Value::Flag(b)) => b.to_string(),
                    Some(Value::Words(w)) => w.join(","),
                };
                (p.key, text)
            })
            .collect()
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// The shipped default configuration, one documented line per key.
pub fn default_config_text() -> String {
    let cfg = ScenarioConfig::default();
    let mut out = String::from("# qrep scenario configuration\n# grammar: section.key = value [unit]\n");
    let mut section = "";
    for (p, (key, value)) in PARAMS.iter().zip(cfg.resolved()) {
        let s = key.split('.').next().unwrap_or("");
        if s != section {
            out.push('\n');
            section = s;
        }
        let line = if value == "unset" { format!("# {key} = 1") } else { format!("{key} = {value}") };
        if p.help.is_empty() {
            out.push_str(&line);
        } else {
            out.push_str(&format!("{line:<48} # {}", p.help));
        }
        out.push('\n');
    }
    out
}
