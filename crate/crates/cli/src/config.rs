//! Line-based `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing mandatory key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Particles,
    Matrix,
    Density,
    Primitive,
    Compare,
    Report,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Particles => "particles",
            Channel::Matrix => "matrix",
            Channel::Density => "density",
            Channel::Primitive => "primitive",
            Channel::Compare => "compare",
            Channel::Report => "report",
        }
    }
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "particles" => Channel::Particles,
            "matrix" => Channel::Matrix,
            "density" => Channel::Density,
            "primitive" => Channel::Primitive,
            "compare" => Channel::Compare,
            "report" => Channel::Report,
            other => return Err(format!("unknown channel `{other}`")),
        })
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Named initial data; how each is realised depends on the channel.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    Uniform,
    OneAtom,
    EquallySpaced,
    /// `exp(κ cos(θ − π))`, normalised.
    CosineBump(f64),
    /// `(1 + a cos θ)/2π`.
    Cosine(f64),
    /// Two von Mises bumps (κ = 20) at π/2 and 3π/2.
    TwoCluster,
    Csv(PathBuf),
}

impl InitialDatum {
    pub fn describe(&self) -> String {
        match self {
            InitialDatum::Uniform => "uniform".into(),
            InitialDatum::OneAtom => "one_atom".into(),
            InitialDatum::EquallySpaced => "equally_spaced".into(),
            InitialDatum::CosineBump(k) => format!("cosine_bump({k})"),
            InitialDatum::Cosine(a) => format!("cosine({a})"),
            InitialDatum::TwoCluster => "two_cluster".into(),
            InitialDatum::Csv(p) => format!("csv:{}", p.display()),
        }
    }
}

fn call_argument(s: &str, name: &str) -> Option<Result<f64, String>> {
    let rest = s.strip_prefix(name)?.trim_start();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", inner.trim())))
}

impl FromStr for InitialDatum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(arg) = call_argument(s, "cosine_bump") {
            let k = arg?;
            if !(k > 0.0) || !k.is_finite() {
                return Err(format!("cosine_bump needs κ > 0, got {k}"));
            }
            return Ok(InitialDatum::CosineBump(k));
        }
        if let Some(arg) = call_argument(s, "cosine") {
            let a = arg?;
            if !(a.abs() <= 1.0) {
                return Err(format!("cosine needs |a| ≤ 1, got {a}"));
            }
            return Ok(InitialDatum::Cosine(a));
        }
        if let Some(path) = s.strip_prefix("csv:") {
            return Ok(InitialDatum::Csv(PathBuf::from(path.trim())));
        }
        Ok(match s {
            "uniform" => InitialDatum::Uniform,
            "one_atom" => InitialDatum::OneAtom,
            "equally_spaced" => InitialDatum::EquallySpaced,
            "two_cluster" => InitialDatum::TwoCluster,
            other => return Err(format!("unknown initial datum `{other}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Dyson,
    MatrixMatched,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dyson" => Ok(Preset::Dyson),
            "matrix_matched" => Ok(Preset::MatrixMatched),
            other => Err(format!("unknown preset `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channel: Channel,
    /// Particle counts; only `compare` accepts more than one.
    pub n: Vec<usize>,
    pub m: Option<usize>,
    pub t_end: f64,
    /// Step for particles and matrices, step cap for the PDE solvers.
    pub dt: Option<f64>,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub runs: usize,
    pub initial: InitialDatum,
    pub out_dir: PathBuf,
    pub record_every: usize,
    pub record_interval: f64,
    pub preset: Preset,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub report: bool,
    /// Trajectory CSV consumed by the `report` channel.
    pub input: Option<PathBuf>,
    /// Safety factor for the PDE solvers' adaptive steps.
    pub cfl: Option<f64>,
}

const KEYS: &[&str] = &[
    "channel",
    "N",
    "M",
    "T",
    "dt",
    "epsilon",
    "seed",
    "runs",
    "initial",
    "out",
    "record_every",
    "record_interval",
    "preset",
    "alpha",
    "beta",
    "report",
    "input",
    "cfl",
];

fn positive<T: FromStr + PartialOrd + Default + Copy>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    let x: T = v.parse().map_err(|_| at(line, format!("`{key}` expects a number, got `{v}`")))?;
    if !(x > T::default()) {
        return Err(at(line, format!("`{key}` must be positive, got `{v}`")));
    }
    Ok(x)
}

fn positive_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = positive(line, key, v)?;
    if !x.is_finite() {
        return Err(at(line, format!("`{key}` must be finite")));
    }
    Ok(x)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with(text, None)
}

/// Parses `text`; `channel` (from the command line) fills in a missing
/// `channel` key and must agree with it when both are present.
pub fn parse_config_with(text: &str, channel_arg: Option<Channel>) -> Result<ExperimentConfig, ConfigError> {
    let mut channel = None;
    let mut cfl = None;
    let mut n = Vec::new();
    let mut m = None;
    let mut t_end = None;
    let mut dt = None;
    let mut epsilon = None;
    let mut seed = 0;
    let mut runs = 1;
    let mut initial = None;
    let mut out_dir = PathBuf::from("out");
    let mut record_every = 10;
    let mut record_interval = 0.01;
    let mut preset = Preset::Dyson;
    let mut alpha = None;
    let mut beta = None;
    let mut report = true;
    let mut input = None;
    let mut seen: Vec<&str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| at(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| at(line, format!("unknown key `{key}`")))?;
        if seen.contains(known) {
            return Err(at(line, format!("duplicate key `{key}`")));
        }
        seen.push(known);
        match key {
            "channel" => channel = Some(value.parse::<Channel>().map_err(|e| at(line, e))?),
            "N" => {
                for part in value.split(',') {
                    let v: usize = positive(line, key, part.trim())?;
                    if v < 2 {
                        return Err(at(line, "`N` must be at least 2"));
                    }
                    n.push(v);
                }
            }
            "M" => {
                let v: usize = positive(line, key, value)?;
                if !v.is_power_of_two() || v < 8 {
                    return Err(at(line, format!("`M` must be a power of two ≥ 8, got {v}")));
                }
                m = Some(v);
            }
            "T" => t_end = Some(positive_f64(line, key, value)?),
            "dt" => dt = Some(positive_f64(line, key, value)?),
            "epsilon" => {
                let v: f64 = value.parse().map_err(|_| at(line, format!("`epsilon` expects a number, got `{value}`")))?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(at(line, format!("`epsilon` must be nonnegative, got `{value}`")));
                }
                epsilon = Some(v);
            }
            "seed" => seed = value.parse().map_err(|_| at(line, format!("`seed` expects an unsigned integer, got `{value}`")))?,
            "runs" => runs = positive(line, key, value)?,
            "initial" => initial = Some(value.parse::<InitialDatum>().map_err(|e| at(line, e))?),
            "out" => out_dir = PathBuf::from(value),
            "record_every" => record_every = positive(line, key, value)?,
            "record_interval" => record_interval = positive_f64(line, key, value)?,
            "preset" => preset = value.parse().map_err(|e: String| at(line, e))?,
            "alpha" => {
                let v: f64 = value.parse().map_err(|_| at(line, format!("`alpha` expects a number, got `{value}`")))?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(at(line, "`alpha` must be nonnegative"));
                }
                alpha = Some(v);
            }
            "beta" => beta = Some(positive_f64(line, key, value)?),
            "report" => {
                report = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => return Err(at(line, format!("`report` expects true or false, got `{value}`"))),
                }
            }
            "input" => input = Some(PathBuf::from(value)),
            "cfl" => {
                let v = positive_f64(line, key, value)?;
                if v > 1.0 {
                    return Err(at(line, format!("`cfl` must not exceed 1, got {v}")));
                }
                cfl = Some(v);
            }
            _ => unreachable!("key list checked above"),
        }
    }

    let channel = match (channel, channel_arg) {
        (Some(c), Some(a)) if c != a => {
            return Err(ConfigError::Invalid(format!("config is for channel `{c}`, not `{a}`")));
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(ConfigError::Missing("channel")),
    };
    let needs_t = channel != Channel::Report;
    let t_end = match (t_end, needs_t) {
        (Some(t), _) => t,
        (None, true) => return Err(ConfigError::Missing("T")),
        (None, false) => 0.0,
    };
    match channel {
        Channel::Particles | Channel::Matrix => {
            if n.is_empty() {
                return Err(ConfigError::Missing("N"));
            }
            if n.len() > 1 {
                return Err(ConfigError::Invalid(format!("channel {channel} takes a single `N`")));
            }
        }
        Channel::Density | Channel::Primitive => {
            if m.is_none() {
                return Err(ConfigError::Missing("M"));
            }
        }
        Channel::Compare => {
            if n.is_empty() {
                return Err(ConfigError::Missing("N"));
            }
        }
        Channel::Report => {
            if input.is_none() {
                return Err(ConfigError::Missing("input"));
            }
        }
    }
    if alpha.is_some() != beta.is_some() {
        return Err(ConfigError::Invalid("`alpha` and `beta` must be given together".into()));
    }
    let initial = initial.unwrap_or(match channel {
        Channel::Particles | Channel::Matrix => InitialDatum::EquallySpaced,
        _ => InitialDatum::Cosine(1.0),
    });
    Ok(ExperimentConfig {
        channel,
        n,
        m,
        t_end,
        dt,
        epsilon,
        seed,
        runs,
        initial,
        out_dir,
        record_every,
        record_interval,
        preset,
        alpha,
        beta,
        report,
        input,
        cfl,
    })
}

impl ExperimentConfig {
    /// Canonical echo for the summary file.
    pub fn to_json(&self) -> Value {
        json!({
            "channel": self.channel.name(),
            "N": self.n,
            "M": self.m,
            "T": self.t_end,
            "dt": self.dt,
            "epsilon": self.epsilon,
            "seed": self.seed,
            "runs": self.runs,
            "initial": self.initial.describe(),
            "out": self.out_dir.display().to_string(),
            "record_every": self.record_every,
            "record_interval": self.record_interval,
            "preset": match self.preset { Preset::Dyson => "dyson", Preset::MatrixMatched => "matrix_matched" },
            "alpha": self.alpha,
            "beta": self.beta,
            "report": self.report,
            "input": self.input.as_ref().map(|p| p.display().to_string()),
            "cfl": self.cfl,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_density_config() {
        let c = parse_config("channel = density\nM = 256\nT = 1.0").unwrap();
        assert_eq!(c.channel, Channel::Density);
        assert_eq!(c.m, Some(256));
        assert_eq!(c.t_end, 1.0);
        assert_eq!(c.seed, 0);
        assert_eq!(c.initial, InitialDatum::Cosine(1.0));
    }

    #[test]
    fn unknown_channel() {
        let e = parse_config("channel = warp").unwrap_err();
        assert_eq!(e, ConfigError::Line { line: 1, message: "unknown channel `warp`".into() });
    }

    #[test]
    fn negative_count_reports_line() {
        let e = parse_config("channel = particles\n# comment\nN = -4\nT = 1").unwrap_err();
        assert!(matches!(e, ConfigError::Line { line: 3, .. }), "{e}");
    }

    #[test]
    fn unknown_key_and_missing_key() {
        assert!(matches!(parse_config("channel = density\nfoo = 1"), Err(ConfigError::Line { line: 2, .. })));
        assert_eq!(parse_config("channel = density\nT = 1"), Err(ConfigError::Missing("M")));
        assert_eq!(parse_config("M = 64"), Err(ConfigError::Missing("channel")));
        let c = parse_config_with("M = 64\nT = 1", Some(Channel::Density)).unwrap();
        assert_eq!(c.channel, Channel::Density);
        assert!(parse_config_with("channel = density\nM = 64\nT = 1", Some(Channel::Primitive)).is_err());
    }

    #[test]
    fn type_mismatch() {
        let e = parse_config("channel = density\nM = many").unwrap_err();
        assert!(e.to_string().contains("expects a number"), "{e}");
        assert!(parse_config("channel = density\nM = 100\nT = 1").is_err());
    }

    #[test]
    fn presets_and_lists() {
        let c = parse_config("channel = compare\nN = 64, 256\nT = 0.5\ninitial = cosine_bump(50) # narrow\nruns = 100").unwrap();
        assert_eq!(c.n, vec![64, 256]);
        assert_eq!(c.initial, InitialDatum::CosineBump(50.0));
        assert!(parse_config("channel = particles\nN = 4, 8\nT = 1").is_err());
        assert!(parse_config("channel = density\nM = 64\nT = 1\ninitial = cosine(2)").is_err());
        let c = parse_config("channel = density\nM = 64\nT = 1\ninitial = csv: data/mu.csv").unwrap();
        assert_eq!(c.initial, InitialDatum::Csv(PathBuf::from("data/mu.csv")));
    }
}
