//! Run configuration: a flat `key = value` grammar, flag overrides, and
//! validation into concrete simulation jobs.
//!
//! ```text
//! # breathing wall, frequency sweep
//! mode = moving
//! a = 10
//! b = 5
//! omega0 = 1
//! sweep = omega0=0.5,1,2
//! ```
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Keys are case-sensitive. Each key may appear once per source.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moving_wall::WallMotion;
use crate::schedule::{GridOptions, DEFAULT_ENERGY_FACTOR, DEFAULT_SAMPLES_PER_PERIOD};
use crate::spectrum::Window;
use crate::static_drive::{DriveParams, DEFAULT_BASIS};

pub const DEFAULT_HARMONICS: usize = 30;
pub const DEFAULT_PERIODS: usize = 20;

/// Every key the grammar accepts.
pub const KEYS: &[&str] = &[
    "mode", "L", "F", "a", "b", "omega0", "basis", "periods", "dt", "samples", "harmonics", "initial",
    "window", "sweep", "out", "format",
];

const STATIC_ONLY: &[&str] = &["L", "F"];
const MOVING_ONLY: &[&str] = &["a", "b"];
const SWEEPABLE: &[&str] = &["L", "F", "a", "b", "omega0", "basis", "periods", "initial"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Static,
    Moving,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Static => "static",
            Mode::Moving => "moving",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Mode::Static),
            "moving" => Ok(Mode::Moving),
            other => Err(Error::config("mode", format!("expected static or moving, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("expected csv or json, got {other:?}"))),
        }
    }
}

/// Unvalidated key/value assignments, in key order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parses config-file text. Rejects unknown keys, duplicates, and lines
    /// without `=`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got {content:?}"),
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            check_known(key)?;
            if value.is_empty() {
                return Err(Error::config(key, "missing value"));
            }
            if raw.entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(key, format!("assigned twice (line {})", lineno + 1)));
            }
        }
        Ok(raw)
    }

    /// Sets `key`, replacing any earlier value. Used for flag overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        check_known(key)?;
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn check_known(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::config(key, "unknown key"))
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a number, got {value:?}")))?;
    if !v.is_finite() {
        return Err(Error::config(key, format!("must be finite, got {value:?}")));
    }
    Ok(v)
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("expected a non-negative integer, got {value:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub key: String,
    pub values: Vec<f64>,
}

impl Sweep {
    /// Parses `KEY=v1,v2,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let (key, list) = text
            .split_once('=')
            .ok_or_else(|| Error::config("sweep", format!("expected KEY=v1,v2,..., got {text:?}")))?;
        let key = key.trim();
        if !SWEEPABLE.contains(&key) {
            return Err(Error::config("sweep", format!("`{key}` cannot be swept")));
        }
        let values = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_f64(&format!("sweep {key}"), s))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::config("sweep", format!("empty value list for `{key}`")));
        }
        Ok(Sweep { key: key.to_string(), values })
    }
}

/// Validated configuration for one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub length: Option<f64>,
    pub field_strength: Option<f64>,
    pub base: Option<f64>,
    pub amplitude: Option<f64>,
    pub drive_frequency: f64,
    pub basis: usize,
    pub periods: usize,
    pub initial_state: usize,
    pub dt: Option<f64>,
    pub samples_per_period: usize,
    pub harmonics: usize,
    pub window: Window,
    pub sweep: Option<Sweep>,
    pub out: PathBuf,
    pub format: OutputFormat,
}

/// One fully specified simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Job {
    Static(DriveParams),
    Moving(WallMotion),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    /// Value of the swept parameter, if any.
    pub sweep_value: Option<f64>,
    pub job: Job,
    pub grid: GridOptions,
    pub harmonics: usize,
    pub window: Window,
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let mode: Mode = raw.get("mode").ok_or_else(|| Error::config("mode", "required"))?.parse()?;
        let foreign = match mode {
            Mode::Static => MOVING_ONLY,
            Mode::Moving => STATIC_ONLY,
        };
        if let Some(key) = raw.keys().find(|k| foreign.contains(k)) {
            return Err(Error::config(key, format!("not a parameter of {} mode", mode.as_str())));
        }
        let num = |key: &str| raw.get(key).map(|v| parse_f64(key, v)).transpose();
        let int = |key: &str, default: usize| {
            raw.get(key).map(|v| parse_usize(key, v)).transpose().map(|v| v.unwrap_or(default))
        };
        let required = |key: &str| -> Result<f64> {
            num(key)?.ok_or_else(|| Error::config(key, format!("required in {} mode", mode.as_str())))
        };

        let sweep = raw.get("sweep").map(Sweep::parse).transpose()?;
        if let Some(s) = &sweep {
            if foreign.contains(&s.key.as_str()) {
                return Err(Error::config(
                    "sweep",
                    format!("`{}` is not a parameter of {} mode", s.key, mode.as_str()),
                ));
            }
        }
        let swept = |key: &str| sweep.as_ref().is_some_and(|s| s.key == key);
        // a swept parameter needs no base value
        let physics = |key: &str| -> Result<Option<f64>> {
            if swept(key) {
                num(key)
            } else {
                required(key).map(Some)
            }
        };

        let (length, field_strength, base, amplitude) = match mode {
            Mode::Static => (physics("L")?, physics("F")?, None, None),
            Mode::Moving => (None, None, physics("a")?, physics("b")?),
        };
        let drive_frequency = match (num("omega0")?, swept("omega0")) {
            (Some(w), _) => w,
            (None, true) => f64::NAN,
            (None, false) => return Err(Error::config("omega0", "required")),
        };

        let cfg = RunConfig {
            mode,
            length,
            field_strength,
            base,
            amplitude,
            drive_frequency,
            basis: int("basis", DEFAULT_BASIS)?,
            periods: int("periods", DEFAULT_PERIODS)?,
            initial_state: int("initial", 1)?,
            dt: num("dt")?,
            samples_per_period: int("samples", DEFAULT_SAMPLES_PER_PERIOD)?,
            harmonics: int("harmonics", DEFAULT_HARMONICS)?,
            window: raw.get("window").map(str::parse).transpose()?.unwrap_or_default(),
            sweep,
            out: raw.get("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            format: raw.get("format").map(str::parse).transpose()?.unwrap_or_default(),
        };
        cfg.members()?;
        Ok(cfg)
    }

    /// Parses file text and applies overrides in order.
    pub fn parse_with_overrides<'a>(
        text: Option<&str>,
        overrides: impl IntoIterator<Item = (&'a str, String)>,
    ) -> Result<Self> {
        let mut raw = match text {
            Some(t) => RawConfig::parse(t)?,
            None => RawConfig::default(),
        };
        for (key, value) in overrides {
            raw.set(key, value)?;
        }
        Self::from_raw(&raw)
    }

    fn job_with(&self, key: Option<&str>, value: f64) -> Result<Job> {
        let pick = |name: &str, base: Option<f64>| if key == Some(name) { Some(value) } else { base };
        let int_pick = |name: &str, base: usize| -> Result<usize> {
            if key != Some(name) {
                return Ok(base);
            }
            if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                return Err(Error::config(name, format!("sweep value {value} is not a valid count")));
            }
            Ok(value as usize)
        };
        let frequency = pick("omega0", Some(self.drive_frequency)).unwrap();
        let dimension = int_pick("basis", self.basis)?;
        let initial_state = int_pick("initial", self.initial_state)?;
        let periods = int_pick("periods", self.periods)?;
        let job = match self.mode {
            Mode::Static => {
                let p = DriveParams {
                    length: pick("L", self.length).unwrap(),
                    field_strength: pick("F", self.field_strength).unwrap(),
                    drive_frequency: frequency,
                    dimension,
                    initial_state,
                    periods,
                };
                p.validate()?;
                Job::Static(p)
            }
            Mode::Moving => {
                let m = WallMotion {
                    base: pick("a", self.base).unwrap(),
                    amplitude: pick("b", self.amplitude).unwrap(),
                    frequency,
                    dimension,
                    initial_state,
                    periods,
                };
                m.validate()?;
                Job::Moving(m)
            }
        };
        Ok(job)
    }

    pub fn grid_options(&self) -> GridOptions {
        GridOptions {
            dt: self.dt,
            energy_factor: DEFAULT_ENERGY_FACTOR,
            samples_per_period: self.samples_per_period,
        }
    }

    /// Expands the sweep and validates every member. Nothing runs here.
    pub fn members(&self) -> Result<Vec<Member>> {
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config("dt", format!("must be positive, got {dt}")));
            }
        }
        if self.samples_per_period < 2 {
            return Err(Error::config("samples", "must be at least 2"));
        }
        if self.harmonics == 0 {
            return Err(Error::config("harmonics", "must be at least 1"));
        }
        let make = |sweep_value: Option<f64>, job: Job| -> Result<Member> {
            let member = Member {
                sweep_value,
                job,
                grid: self.grid_options(),
                harmonics: self.harmonics,
                window: self.window,
            };
            member.check_nyquist()?;
            Ok(member)
        };
        match &self.sweep {
            None => Ok(vec![make(None, self.job_with(None, 0.0)?)?]),
            Some(sweep) => sweep
                .values
                .iter()
                .map(|&v| {
                    let job = self.job_with(Some(&sweep.key), v).map_err(|e| match e {
                        Error::Config { key, reason } => {
                            Error::config(key, format!("{reason} (sweep {} = {v})", sweep.key))
                        }
                        other => other,
                    })?;
                    make(Some(v), job)
                })
                .collect(),
        }
    }
}

impl Job {
    pub fn mode(&self) -> Mode {
        match self {
            Job::Static(_) => Mode::Static,
            Job::Moving(_) => Mode::Moving,
        }
    }

    pub fn drive_frequency(&self) -> f64 {
        match self {
            Job::Static(p) => p.drive_frequency,
            Job::Moving(m) => m.frequency,
        }
    }
}

impl Member {
    // Sampling is fixed per drive period, so the Nyquist order is known
    // before any propagation.
    fn check_nyquist(&self) -> Result<()> {
        let samples = self.grid.samples_per_period;
        let limit = samples.div_ceil(2);
        let coarse = self.grid.dt.is_some();
        if !coarse && self.harmonics >= limit {
            return Err(Error::config(
                "harmonics",
                format!("{} harmonics need more than {samples} samples per period", self.harmonics),
            ));
        }
        Ok(())
    }

    /// The member as a stand-alone config file: parsing it reproduces this run.
    pub fn to_config_text(&self, out: &str, format: OutputFormat) -> String {
        let mut s = String::new();
        let (periods, dim, initial) = match &self.job {
            Job::Static(p) => {
                writeln!(s, "mode = static").unwrap();
                writeln!(s, "L = {}", p.length).unwrap();
                writeln!(s, "F = {}", p.field_strength).unwrap();
                writeln!(s, "omega0 = {}", p.drive_frequency).unwrap();
                (p.periods, p.dimension, p.initial_state)
            }
            Job::Moving(m) => {
                writeln!(s, "mode = moving").unwrap();
                writeln!(s, "a = {}", m.base).unwrap();
                writeln!(s, "b = {}", m.amplitude).unwrap();
                writeln!(s, "omega0 = {}", m.frequency).unwrap();
                (m.periods, m.dimension, m.initial_state)
            }
        };
        writeln!(s, "basis = {dim}").unwrap();
        writeln!(s, "periods = {periods}").unwrap();
        writeln!(s, "initial = {initial}").unwrap();
        if let Some(dt) = self.grid.dt {
            writeln!(s, "dt = {dt}").unwrap();
        }
        writeln!(s, "samples = {}", self.grid.samples_per_period).unwrap();
        writeln!(s, "harmonics = {}", self.harmonics).unwrap();
        writeln!(s, "window = {}", self.window).unwrap();
        writeln!(s, "out = {out}").unwrap();
        writeln!(s, "format = {}", format.extension()).unwrap();
        s
    }
}
