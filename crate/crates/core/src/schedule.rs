//! Time-step selection shared by both solvers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::PropagationGrid;

pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 400;

/// Largest `E_max · dt` the default step allows.
pub const DEFAULT_ENERGY_FACTOR: f64 = 0.02;

/// Numerical overrides for a run. `None` fields fall back to the defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    /// Upper bound on the step; the actual step divides the drive period evenly.
    pub dt: Option<f64>,
    /// Bound on `E_max · dt` when `dt` is not given.
    pub energy_factor: f64,
    pub samples_per_period: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            dt: None,
            energy_factor: DEFAULT_ENERGY_FACTOR,
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
        }
    }
}

/// `min(2π/(200 ω₀), energy_factor/E_max)`.
pub fn default_dt(drive_frequency: f64, max_energy: f64, energy_factor: f64) -> f64 {
    (2.0 * PI / (200.0 * drive_frequency)).min(energy_factor / max_energy)
}

/// Builds a grid of `periods` drive periods whose step is at most the
/// requested bound, with every period holding the same whole number of
/// samples.
pub fn plan_grid(
    drive_frequency: f64,
    periods: usize,
    max_energy: f64,
    opts: &GridOptions,
) -> Result<PropagationGrid> {
    if periods == 0 {
        return Err(Error::config("periods", "must be at least 1"));
    }
    if opts.samples_per_period < 2 {
        return Err(Error::config("samples_per_period", "must be at least 2"));
    }
    let dt_bound = match opts.dt {
        Some(dt) if !(dt.is_finite() && dt > 0.0) => {
            return Err(Error::config("dt", format!("must be positive, got {dt}")))
        }
        Some(dt) => dt,
        None if !(opts.energy_factor.is_finite() && opts.energy_factor > 0.0) => {
            return Err(Error::config("energy_factor", format!("must be positive, got {}", opts.energy_factor)))
        }
        None => default_dt(drive_frequency, max_energy, opts.energy_factor),
    };
    let period = 2.0 * PI / drive_frequency;
    let min_steps = ((period / dt_bound) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let samples = opts.samples_per_period.min(min_steps);
    let stride = min_steps.div_ceil(samples);
    let steps_per_period = stride * samples;
    PropagationGrid::with_steps(0.0, period * periods as f64, steps_per_period * periods, stride)
}
