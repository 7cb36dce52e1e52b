//! Flat `key = value` run configuration with line-level diagnostics.

use std::fmt;
use std::path::PathBuf;

use hyplyap_core::BoundaryTiming;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Linear2x2,
    SaintVenant,
    CustomTable,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Linear2x2 => "linear2x2",
            ModelKind::SaintVenant => "saint-venant",
            ModelKind::CustomTable => "custom-table",
        }
    }
}

/// A fully resolved run description. Optional fields fall back to
/// model-specific defaults at build time.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub cells: usize,
    pub cfl: f64,
    pub final_time: f64,
    pub xi: f64,
    pub mu: f64,
    /// True when the config text set `mu` itself; the channel command sweeps
    /// a default set of rates otherwise.
    pub mu_explicit: bool,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub k12: Option<f64>,
    pub k21: Option<f64>,
    pub amp: f64,
    pub rain_amp: f64,
    pub gravity: f64,
    pub friction: f64,
    pub bed_slope: Option<f64>,
    pub kappa0: Option<f64>,
    pub kappal: Option<f64>,
    pub boundary_timing: BoundaryTiming,
    pub friction_with_g: bool,
    pub strict: bool,
    pub record_stride: usize,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelKind::Linear2x2,
            cells: 1600,
            cfl: 0.75,
            final_time: 10.0,
            xi: 0.125,
            mu: 0.575,
            mu_explicit: false,
            p1: None,
            p2: None,
            k12: None,
            k21: None,
            amp: 0.01,
            rain_amp: 0.25,
            gravity: 9.81,
            friction: 0.1,
            bed_slope: None,
            kappa0: None,
            kappal: None,
            boundary_timing: BoundaryTiming::Post,
            friction_with_g: false,
            strict: false,
            record_stride: 1,
            out: None,
        }
    }
}

impl RunConfig {
    /// Boundary gains after defaulting: explicit `k12`/`k21` win, otherwise
    /// the model preset values. Physical `kappa` gains are mapped by the
    /// channel builder, which knows the steady boundary depths.
    pub fn default_gains(&self) -> (f64, f64) {
        match self.model {
            ModelKind::SaintVenant => (0.75, 0.75),
            _ => (0.5, 0.5),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.problems.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "config error: {p}")?;
        }
        Ok(())
    }
}

impl ConfigError {
    fn one(problem: String) -> Self {
        ConfigError {
            problems: vec![problem],
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model",
    "J",
    "cfl",
    "T",
    "xi",
    "mu",
    "p1",
    "p2",
    "k12",
    "k21",
    "amp",
    "rain-amp",
    "g",
    "cf",
    "sb",
    "kappa0",
    "kappal",
    "boundary-timing",
    "friction-with-g",
    "strict",
    "record-stride",
    "out",
];

/// Parses a config file on top of the built-in defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    apply_config(RunConfig::default(), text)
}

/// Parses `text` as overrides on an existing configuration (used to layer a
/// config file over a preset).
pub fn apply_config(mut cfg: RunConfig, text: &str) -> Result<RunConfig, ConfigError> {
    let mut problems = Vec::new();
    let mut unknown = Vec::new();
    let mut seen: Vec<&str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            problems.push(format!(
                "line {lineno}: expected `key = value`, got `{line}`"
            ));
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        if !KNOWN_KEYS.contains(&key) {
            unknown.push(format!("`{key}` (line {lineno})"));
            continue;
        }
        if let Some(prev) = seen.iter().find(|k| **k == key) {
            problems.push(format!("line {lineno}: key `{prev}` given more than once"));
            continue;
        }
        seen.push(KNOWN_KEYS.iter().find(|k| **k == key).unwrap());

        let mut float = |field: &mut f64| match value.parse::<f64>() {
            Ok(v) if v.is_finite() => *field = v,
            _ => problems.push(format!(
                "line {lineno}: key `{key}` needs a finite number, got `{value}`"
            )),
        };
        match key {
            "model" => match value {
                "linear2x2" => cfg.model = ModelKind::Linear2x2,
                "saint-venant" => cfg.model = ModelKind::SaintVenant,
                "custom-table" => cfg.model = ModelKind::CustomTable,
                _ => problems.push(format!(
                    "line {lineno}: model must be linear2x2 | saint-venant | custom-table, got `{value}`"
                )),
            },
            "J" => match value.parse::<usize>() {
                Ok(v) => cfg.cells = v,
                Err(_) => problems.push(format!(
                    "line {lineno}: key `J` needs a positive integer, got `{value}`"
                )),
            },
            "cfl" => float(&mut cfg.cfl),
            "T" => float(&mut cfg.final_time),
            "xi" => float(&mut cfg.xi),
            "mu" => {
                float(&mut cfg.mu);
                cfg.mu_explicit = true;
            }
            "p1" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.p1 = Some(v);
            }
            "p2" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.p2 = Some(v);
            }
            "k12" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.k12 = Some(v);
            }
            "k21" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.k21 = Some(v);
            }
            "amp" => float(&mut cfg.amp),
            "rain-amp" => float(&mut cfg.rain_amp),
            "g" => float(&mut cfg.gravity),
            "cf" => float(&mut cfg.friction),
            "sb" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.bed_slope = Some(v);
            }
            "kappa0" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.kappa0 = Some(v);
            }
            "kappal" => {
                let mut v = 0.0;
                float(&mut v);
                cfg.kappal = Some(v);
            }
            "boundary-timing" => match value {
                "pre" => cfg.boundary_timing = BoundaryTiming::Pre,
                "post" => cfg.boundary_timing = BoundaryTiming::Post,
                _ => problems.push(format!(
                    "line {lineno}: boundary-timing must be pre | post, got `{value}`"
                )),
            },
            "friction-with-g" => match parse_bool(value) {
                Some(v) => cfg.friction_with_g = v,
                None => problems.push(format!(
                    "line {lineno}: key `friction-with-g` needs true | false, got `{value}`"
                )),
            },
            "strict" => match parse_bool(value) {
                Some(v) => cfg.strict = v,
                None => problems.push(format!(
                    "line {lineno}: key `strict` needs true | false, got `{value}`"
                )),
            },
            "record-stride" => match value.parse::<usize>() {
                Ok(v) if v >= 1 => cfg.record_stride = v,
                _ => problems.push(format!(
                    "line {lineno}: key `record-stride` needs an integer >= 1, got `{value}`"
                )),
            },
            "out" => cfg.out = Some(PathBuf::from(value)),
            _ => unreachable!("key list covered above"),
        }
    }

    if !unknown.is_empty() {
        problems.push(format!("unknown keys: {}", unknown.join(", ")));
    }
    if let Err(e) = validate(&cfg) {
        problems.extend(e.problems);
    }
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { problems })
    }
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let mut problems = Vec::new();
    if cfg.cells < 2 {
        problems.push(format!("J must be at least 2, got {}", cfg.cells));
    }
    if !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        problems.push(format!("cfl must lie in (0, 1], got {}", cfg.cfl));
    }
    if !(cfg.final_time > 0.0) {
        problems.push(format!("T must be positive, got {}", cfg.final_time));
    }
    if !(cfg.xi > 0.0) {
        problems.push(format!("xi must be positive, got {}", cfg.xi));
    }
    if !(cfg.mu > 0.0) {
        problems.push(format!("mu must be positive, got {}", cfg.mu));
    }
    if cfg.amp < 0.0 {
        problems.push(format!("amp must be non-negative, got {}", cfg.amp));
    }
    if cfg.rain_amp < 0.0 {
        problems.push(format!(
            "rain-amp must be non-negative, got {}",
            cfg.rain_amp
        ));
    }
    if !(cfg.gravity > 0.0) {
        problems.push(format!("g must be positive, got {}", cfg.gravity));
    }
    if cfg.friction < 0.0 {
        problems.push(format!("cf must be non-negative, got {}", cfg.friction));
    }
    for (name, v) in [("p1", cfg.p1), ("p2", cfg.p2)] {
        if let Some(v) = v {
            if !(v > 0.0) {
                problems.push(format!("{name} must be positive, got {v}"));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(ConfigError { problems })
    }
}

/// Built-in preset configs, addressable by name from the command line.
pub fn preset(name: &str) -> Result<RunConfig, ConfigError> {
    let text = match name {
        "linear-4.1" => include_str!("../presets/linear-4.1.cfg"),
        "sv-4.2" => include_str!("../presets/sv-4.2.cfg"),
        other => {
            return Err(ConfigError::one(format!(
                "unknown preset `{other}` (available: linear-4.1, sv-4.2)"
            )))
        }
    };
    parse_config(text)
}
