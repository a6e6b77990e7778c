//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::basis::{BasisTables, BoxSpec};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io;
use crate::run::execute;

const CONFIG_HELP: &str = "\
Config files use one `key = value` assignment per line; `#` starts a comment.
Keys: mode, L, F, a, b, omega0, basis, periods, dt, samples, harmonics,
initial, window, sweep, out, format. Flags override file values.

Exit status: 0 success, 2 configuration error, 3 numerical instability,
4 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "boxhhg", version, about = "Harmonic generation in a driven or breathing hard-wall box")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one simulation or a parameter sweep and write dipole, spectrum,
    /// metadata, and summary files.
    #[command(after_help = CONFIG_HELP)]
    Simulate(Box<SimulateArgs>),
    /// Print the V, Y, and Q matrix-element tables as CSV.
    DumpTables(DumpArgs),
}

#[derive(Debug, Args, Default)]
pub struct SimulateArgs {
    /// static (dipole drive) or moving (breathing wall)
    #[arg(long)]
    pub mode: Option<String>,
    /// Flat key = value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Box length (static)
    #[arg(long = "L", allow_hyphen_values = true)]
    pub length: Option<String>,
    /// Field strength (static)
    #[arg(long = "F", allow_hyphen_values = true)]
    pub field: Option<String>,
    /// Mean wall position (moving)
    #[arg(long = "a", allow_hyphen_values = true)]
    pub base: Option<String>,
    /// Wall oscillation amplitude (moving)
    #[arg(long = "b", allow_hyphen_values = true)]
    pub amplitude: Option<String>,
    /// Drive frequency
    #[arg(long, allow_hyphen_values = true)]
    pub omega0: Option<String>,
    /// Number of basis states
    #[arg(long)]
    pub basis: Option<String>,
    /// Run length in drive periods
    #[arg(long)]
    pub periods: Option<String>,
    /// Upper bound on the time step
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    /// Dipole samples stored per drive period
    #[arg(long)]
    pub samples: Option<String>,
    /// Highest harmonic order in the spectrum
    #[arg(long)]
    pub harmonics: Option<String>,
    /// Initial basis state (1 = ground state)
    #[arg(long)]
    pub initial: Option<String>,
    /// full-record (default) or per-harmonic
    #[arg(long)]
    pub window: Option<String>,
    /// KEY=v1,v2,...
    #[arg(long)]
    pub sweep: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
}

impl SimulateArgs {
    fn overrides(&self) -> Vec<(&'static str, String)> {
        let pairs = [
            ("mode", &self.mode),
            ("L", &self.length),
            ("F", &self.field),
            ("a", &self.base),
            ("b", &self.amplitude),
            ("omega0", &self.omega0),
            ("basis", &self.basis),
            ("periods", &self.periods),
            ("dt", &self.dt),
            ("samples", &self.samples),
            ("harmonics", &self.harmonics),
            ("initial", &self.initial),
            ("window", &self.window),
            ("sweep", &self.sweep),
            ("out", &self.out),
            ("format", &self.format),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k, v))).collect()
    }

    pub fn to_config(&self) -> Result<RunConfig> {
        let text = match &self.config {
            Some(path) => {
                let bytes = io::read_file(path)?;
                Some(String::from_utf8(bytes).map_err(|_| Error::config("config", "file is not UTF-8"))?)
            }
            None => None,
        };
        RunConfig::parse_with_overrides(text.as_deref(), self.overrides())
    }
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[arg(long = "L", default_value_t = 1.0)]
    pub length: f64,
    #[arg(long, default_value_t = 8)]
    pub basis: usize,
}

/// CSV of `table,row,col,value` for V, Y, and Q.
pub fn dump_tables(length: f64, basis: usize) -> Result<String> {
    let spec = BoxSpec::new(length, basis).map_err(|e| Error::config("L", e.to_string()))?;
    let tables = BasisTables::new(spec);
    let mut out = String::from("table,row,col,value\n");
    for (name, m) in [
        ("V", tables.position()),
        ("Y", tables.unit_position()),
        ("Q", tables.unit_position_squared()),
    ] {
        for r in 1..=basis {
            for c in 1..=basis {
                out.push_str(&format!("{name},{r},{c},{}\n", m.entry(r, c)));
            }
        }
    }
    Ok(out)
}

/// Runs the parsed command and returns the process exit status.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Simulate(args) => args.to_config().and_then(|cfg| execute(&cfg)).map(|report| {
            for m in &report.members {
                eprintln!(
                    "{}: drift {:.3e}, slope {}",
                    m.spectrum_file.display(),
                    m.max_norm_drift,
                    m.slope.map(|s| format!("{s:.4}")).unwrap_or_else(|| "n/a".into())
                );
            }
            eprintln!("summary: {}", report.summary_file.display());
        }),
        Command::DumpTables(args) => dump_tables(args.length, args.basis).map(|csv| print!("{csv}")),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
