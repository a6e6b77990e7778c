//! Static box driven by a monochromatic dipole field `−F x cos ω₀t`.
//!
//! Galerkin projection onto the box eigenbasis gives
//! `i dC_m/dt = E_m C_m − F cos(ω₀t) Σ_n V_mn C_n`, and the dipole moment is
//! `d(t) = −Σ_mn C_m* V_mn C_n`.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisTables, BoxSpec, RealMatrix, SplitComplex};
use crate::error::{Error, Result};
use crate::integrator::{propagate_observed, Rhs, StateVector};
use crate::schedule::{plan_grid, GridOptions};
use crate::spectrum::DipoleSeries;

pub const DEFAULT_BASIS: usize = 64;

/// Imaginary part tolerated in `C† X C` before the series is rejected.
pub const REALNESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    pub length: f64,
    pub dimension: usize,
    pub field_strength: f64,
    pub drive_frequency: f64,
    pub initial_state: usize,
    pub periods: usize,
}

impl DriveParams {
    pub fn new(length: f64, field_strength: f64, drive_frequency: f64) -> Self {
        DriveParams {
            length,
            dimension: DEFAULT_BASIS,
            field_strength,
            drive_frequency,
            initial_state: 1,
            periods: 20,
        }
    }

    pub fn validate(&self) -> Result<BoxSpec> {
        let spec = BoxSpec::new(self.length, self.dimension)
            .map_err(|e| Error::config("L", e.to_string()))?;
        if !self.field_strength.is_finite() {
            return Err(Error::config("F", "must be finite"));
        }
        if !(self.drive_frequency.is_finite() && self.drive_frequency > 0.0) {
            return Err(Error::config("omega0", format!("must be positive, got {}", self.drive_frequency)));
        }
        if self.periods == 0 {
            return Err(Error::config("periods", "must be at least 1"));
        }
        if self.initial_state == 0 || self.initial_state > self.dimension {
            return Err(Error::config(
                "initial",
                format!("must lie in 1..={}, got {}", self.dimension, self.initial_state),
            ));
        }
        Ok(spec)
    }
}

/// Right-hand side of the driven amplitude equations.
pub struct StaticRhs<'a> {
    tables: &'a BasisTables,
    field_strength: f64,
    drive_frequency: f64,
    split: RefCell<SplitComplex>,
}

impl<'a> StaticRhs<'a> {
    pub fn new(tables: &'a BasisTables, field_strength: f64, drive_frequency: f64) -> Self {
        StaticRhs { tables, field_strength, drive_frequency, split: RefCell::new(SplitComplex::new(tables.dimension())) }
    }
}

impl Rhs for StaticRhs<'_> {
    fn dim(&self) -> usize {
        self.tables.dimension()
    }

    fn eval(&self, t: f64, c: &[Complex64], out: &mut [Complex64]) {
        let drive = self.field_strength * (self.drive_frequency * t).cos();
        if drive != 0.0 {
            self.tables.position().apply_with(c, &mut self.split.borrow_mut(), out);
        }
        for ((o, ci), e) in out.iter_mut().zip(c).zip(self.tables.energies()) {
            let coupled = if drive != 0.0 { *o * drive } else { Complex64::new(0.0, 0.0) };
            let h = ci * *e - coupled;
            // −i h
            *o = Complex64::new(h.im, -h.re);
        }
    }
}

/// `dC/dt` at a single time, checked for dimension.
pub fn static_rhs(
    t: f64,
    c: &[Complex64],
    tables: &BasisTables,
    params: &DriveParams,
) -> Result<Vec<Complex64>> {
    if c.len() != tables.dimension() {
        return Err(Error::Dimension { expected: tables.dimension(), got: c.len() });
    }
    let rhs = StaticRhs::new(tables, params.field_strength, params.drive_frequency);
    let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
    rhs.eval(t, c, &mut out);
    Ok(out)
}

/// `C† X C` for a real symmetric `X`; returns (real part, |imaginary part|).
pub(crate) fn hermitian_form(x: &RealMatrix, c: &[Complex64], scratch: &mut [Complex64]) -> (f64, f64) {
    x.apply(c, scratch);
    let value: Complex64 = c.iter().zip(scratch.iter()).map(|(a, b)| a.conj() * b).sum();
    (value.re, value.im.abs())
}

/// Runs from basis state `params.initial_state`.
pub fn run_static(params: &DriveParams, opts: &GridOptions) -> Result<DipoleSeries> {
    let spec = params.validate()?;
    let initial = StateVector::basis_state(spec.dimension(), params.initial_state, 0.0)?;
    run_static_from(params, initial, opts)
}

/// Runs from an arbitrary initial amplitude vector at `t = 0`.
pub fn run_static_from(params: &DriveParams, initial: StateVector, opts: &GridOptions) -> Result<DipoleSeries> {
    let spec = params.validate()?;
    let tables = BasisTables::new(spec);
    if initial.dim() != tables.dimension() {
        return Err(Error::Dimension { expected: tables.dimension(), got: initial.dim() });
    }
    let max_energy = *tables.energies().last().unwrap();
    let grid = plan_grid(params.drive_frequency, params.periods, max_energy, opts)?;
    let rhs = StaticRhs::new(&tables, params.field_strength, params.drive_frequency);

    let mut times = Vec::with_capacity(grid.steps() / grid.sample_stride() + 1);
    let mut values = Vec::with_capacity(times.capacity());
    let mut scratch = vec![Complex64::new(0.0, 0.0); tables.dimension()];
    let mut worst_imag = 0.0f64;
    let (_, diagnostics) = propagate_observed(initial, &rhs, &grid, |s| {
        let (re, im) = hermitian_form(tables.position(), &s.amplitudes, &mut scratch);
        worst_imag = worst_imag.max(im);
        times.push(s.time);
        values.push(-re);
    })?;
    if worst_imag > REALNESS_TOLERANCE {
        return Err(Error::Data(format!("dipole has imaginary residue {worst_imag:e}")));
    }
    Ok(DipoleSeries::new(times, values, params.drive_frequency)?.with_diagnostics(diagnostics))
}
