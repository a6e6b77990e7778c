//! Executes a validated configuration: one simulation per sweep member, then
//! per-member output files and a sweep summary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Job, Member, Mode, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::io;
use crate::moving_wall::run_moving;
use crate::spectrum::{harmonic_spectrum, DipoleSeries, Spectrum, Window};
use crate::static_drive::run_static;

/// Highest order used for the summary slope.
pub const SUMMARY_MAX_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MemberOutcome {
    pub sweep_value: Option<f64>,
    pub slope: Option<f64>,
    pub max_norm_drift: f64,
    pub dipole_file: PathBuf,
    pub spectrum_file: PathBuf,
    pub metadata_file: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub members: Vec<MemberOutcome>,
    pub summary_file: PathBuf,
}

#[derive(Serialize)]
struct SweepPoint<'a> {
    key: &'a str,
    value: f64,
}

#[derive(Serialize)]
struct Numerics {
    dt: f64,
    steps: usize,
    dt_bound: Option<f64>,
    energy_factor: f64,
    samples_per_period: usize,
    harmonics: usize,
    window: Window,
}

#[derive(Serialize)]
struct Files<'a> {
    dipole: &'a str,
    spectrum: &'a str,
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    mode: Mode,
    sweep: Option<SweepPoint<'a>>,
    parameters: &'a Job,
    numerics: Numerics,
    max_norm_drift: f64,
    wall_clock_seconds: f64,
    files: Files<'a>,
    /// Config text that regenerates this run on its own.
    config: String,
}

/// Runs a single member in memory.
pub fn simulate(member: &Member) -> Result<(DipoleSeries, Spectrum)> {
    let series = match &member.job {
        Job::Static(p) => run_static(p, &member.grid)?,
        Job::Moving(m) => run_moving(m, &member.grid)?,
    };
    let spectrum = harmonic_spectrum(&series, member.harmonics, member.window)?;
    Ok((series, spectrum))
}

pub fn summary_slope(spectrum: &Spectrum) -> Option<f64> {
    let hi = SUMMARY_MAX_ORDER.min(spectrum.max_order());
    if hi < 2 {
        return None;
    }
    spectrum.envelope_slope(1..=hi).ok()
}

fn stem(mode: Mode, key: Option<&str>, value: Option<f64>) -> String {
    match (key, value) {
        (Some(k), Some(v)) => format!("{}_{k}{v}", mode.as_str()),
        _ => mode.as_str().to_string(),
    }
}

fn run_member(cfg: &RunConfig, member: &Member) -> Result<MemberOutcome> {
    let started = Instant::now();
    let (series, spectrum) = simulate(member)?;
    let elapsed = started.elapsed().as_secs_f64();

    let key = cfg.sweep.as_ref().map(|s| s.key.as_str());
    let base = stem(cfg.mode, key, member.sweep_value);
    let ext = cfg.format.extension();
    let dipole_name = format!("{base}_dipole.{ext}");
    let spectrum_name = format!("{base}_spectrum.{ext}");
    let meta_name = format!("{base}_meta.json");

    let (dipole_bytes, spectrum_bytes) = match cfg.format {
        OutputFormat::Csv => (io::dipole_csv(&series)?, io::spectrum_csv(&spectrum)?),
        OutputFormat::Json => (io::dipole_json(&series)?, io::spectrum_json(&spectrum)?),
    };
    let dipole_file = cfg.out.join(&dipole_name);
    let spectrum_file = cfg.out.join(&spectrum_name);
    let metadata_file = cfg.out.join(&meta_name);
    io::write_file(&dipole_file, &dipole_bytes)?;
    io::write_file(&spectrum_file, &spectrum_bytes)?;

    let diagnostics = series.diagnostics.expect("solvers attach diagnostics");
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        mode: cfg.mode,
        sweep: key.zip(member.sweep_value).map(|(key, value)| SweepPoint { key, value }),
        parameters: &member.job,
        numerics: Numerics {
            dt: diagnostics.dt,
            steps: diagnostics.steps,
            dt_bound: member.grid.dt,
            energy_factor: member.grid.energy_factor,
            samples_per_period: member.grid.samples_per_period,
            harmonics: member.harmonics,
            window: member.window,
        },
        max_norm_drift: diagnostics.max_norm_drift,
        wall_clock_seconds: elapsed,
        files: Files { dipole: &dipole_name, spectrum: &spectrum_name },
        config: member.to_config_text(&cfg.out.to_string_lossy(), cfg.format),
    };
    let meta_bytes = serde_json::to_vec_pretty(&meta).map_err(|e| Error::Data(e.to_string()))?;
    io::write_file(&metadata_file, &meta_bytes)?;

    Ok(MemberOutcome {
        sweep_value: member.sweep_value,
        slope: summary_slope(&spectrum),
        max_norm_drift: diagnostics.max_norm_drift,
        dipole_file,
        spectrum_file,
        metadata_file,
    })
}

fn summary_csv(outcomes: &[MemberOutcome]) -> Result<Vec<u8>> {
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "NaN".into());
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(io::SUMMARY_HEADER).map_err(err)?;
    for o in outcomes {
        w.write_record([fmt(o.sweep_value), fmt(o.slope), o.max_norm_drift.to_string()])
            .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Validates every member, then runs them concurrently and writes outputs.
pub fn execute(cfg: &RunConfig) -> Result<RunReport> {
    let members = cfg.members()?;
    create_dir(&cfg.out)?;
    let outcomes = members
        .par_iter()
        .map(|m| {
            run_member(cfg, m).map_err(|e| match (&cfg.sweep, m.sweep_value) {
                (Some(s), Some(value)) => Error::Member { key: s.key.clone(), value, source: Box::new(e) },
                _ => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary_file = cfg.out.join(format!("{}_summary.csv", cfg.mode.as_str()));
    io::write_file(&summary_file, &summary_csv(&outcomes)?)?;
    Ok(RunReport { members: outcomes, summary_file })
}
