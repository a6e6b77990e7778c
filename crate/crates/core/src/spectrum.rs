//! Harmonic spectra of dipole time series.
//!
//! The amplitude at order `k` is the projection
//! `(1/T) ∫₀ᵀ e^{−ikω₀t} d(t) dt`, evaluated with the composite trapezoidal
//! rule on the sample grid. By default `T` is the whole record, which is an
//! integer number of drive periods, so distinct harmonics are orthogonal.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Diagnostics;

/// Uniformly sampled real dipole moment together with its drive frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    drive_frequency: f64,
    pub diagnostics: Option<Diagnostics>,
}

impl DipoleSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, drive_frequency: f64) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Data(format!(
                "{} times but {} dipole values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::Data("a dipole series needs at least two samples".into()));
        }
        if !(drive_frequency.is_finite() && drive_frequency > 0.0) {
            return Err(Error::Data(format!("drive frequency must be positive, got {drive_frequency}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite dipole value at sample {i}")));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Data("non-finite sample time".into()));
        }
        let n = times.len() - 1;
        let span = times[n] - times[0];
        if span <= 0.0 {
            return Err(Error::Data("sample times must increase".into()));
        }
        let step = span / n as f64;
        let scale = times[0].abs().max(times[n].abs()).max(step);
        for (i, t) in times.iter().enumerate() {
            let expect = times[0] + step * i as f64;
            if (t - expect).abs() > 1e-12 * scale {
                return Err(Error::Data(format!("non-uniform time grid at sample {i}")));
            }
        }
        let period = 2.0 * PI / drive_frequency;
        let periods = span / period;
        if (periods - periods.round()).abs() * period > step || periods.round() < 1.0 {
            return Err(Error::Data(format!(
                "record spans {periods} drive periods; need a whole number of at least one"
            )));
        }
        Ok(DipoleSeries { times, values, drive_frequency, diagnostics: None })
    }

    pub fn with_diagnostics(mut self, diagnostics: Diagnostics) -> Self {
        self.diagnostics = Some(diagnostics);
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn drive_frequency(&self) -> f64 {
        self.drive_frequency
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample_interval(&self) -> f64 {
        (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }
}

/// Integration window for the harmonic projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    /// `T` is the full record length.
    #[default]
    FullRecord,
    /// `T = 2π/(kω₀)` for order `k ≥ 1`, and one drive period for `k = 0`,
    /// each measured from the first sample.
    PerHarmonic,
}

impl std::str::FromStr for Window {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-record" | "full" => Ok(Window::FullRecord),
            "per-harmonic" => Ok(Window::PerHarmonic),
            other => Err(Error::config("window", format!("expected full-record or per-harmonic, got {other:?}"))),
        }
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Window::FullRecord => "full-record",
            Window::PerHarmonic => "per-harmonic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub drive_frequency: f64,
    pub amplitudes: Vec<Complex64>,
}

impl Spectrum {
    pub fn max_order(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.amplitudes.len()
    }

    pub fn frequency(&self, order: usize) -> f64 {
        order as f64 * self.drive_frequency
    }

    pub fn intensity(&self, order: usize) -> f64 {
        self.amplitudes[order].norm_sqr()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Least-squares slope of `log₁₀ |d(kω₀)|²` against `k` over `orders`.
    pub fn envelope_slope(&self, orders: RangeInclusive<usize>) -> Result<f64> {
        let (lo, hi) = (*orders.start(), *orders.end());
        if hi > self.max_order() || hi <= lo {
            return Err(Error::config(
                "orders",
                format!("need at least two orders within 0..={}, got {lo}..={hi}", self.max_order()),
            ));
        }
        let mut points = Vec::with_capacity(hi - lo + 1);
        for k in orders {
            let intensity = self.intensity(k);
            if !(intensity > 0.0 && intensity.is_finite()) {
                return Err(Error::UndefinedSlope { order: k });
            }
            points.push((k as f64, intensity.log10()));
        }
        Ok(least_squares_slope(&points))
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(x, y) in points {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    sxy / sxx
}

/// Projects the series onto orders `0..=max_order`.
pub fn harmonic_spectrum(series: &DipoleSeries, max_order: usize, window: Window) -> Result<Spectrum> {
    if max_order == 0 {
        return Err(Error::config("harmonics", "must be at least 1"));
    }
    let omega = series.drive_frequency;
    let dt = series.sample_interval();
    let nyquist = PI / dt;
    if max_order as f64 * omega >= nyquist {
        return Err(Error::config(
            "harmonics",
            format!(
                "order {max_order} at ω₀ = {omega} exceeds the sampling Nyquist frequency {nyquist}"
            ),
        ));
    }
    let amplitudes = (0..=max_order)
        .map(|k| {
            let freq = k as f64 * omega;
            let window_length = match window {
                Window::FullRecord => series.duration(),
                Window::PerHarmonic if k == 0 => 2.0 * PI / omega,
                Window::PerHarmonic => 2.0 * PI / freq,
            };
            project(series, freq, window_length)
        })
        .collect();
    Ok(Spectrum { drive_frequency: omega, amplitudes })
}

// (1/W) ∫_{t0}^{t0+W} e^{−iωt} d(t) dt by the trapezoidal rule on the sample
// grid; a trailing partial interval uses linear interpolation.
fn project(series: &DipoleSeries, freq: f64, window: f64) -> Complex64 {
    let t0 = series.times[0];
    let dt = series.sample_interval();
    let sample = |i: usize| {
        let phase = -freq * (series.times[i] - t0);
        Complex64::from_polar(series.values[i], phase)
    };
    let full = ((window / dt) * (1.0 + 1e-12)).floor() as usize;
    let full = full.min(series.len() - 1);
    let mut sum = (sample(0) + sample(full)) * 0.5;
    for i in 1..full {
        sum += sample(i);
    }
    let mut integral = sum * dt;
    let covered = full as f64 * dt;
    let rest = window - covered;
    if rest > 1e-12 * window && full + 1 < series.len() {
        let frac = rest / dt;
        let d_end = series.values[full] * (1.0 - frac) + series.values[full + 1] * frac;
        let end = Complex64::from_polar(d_end, -freq * window);
        integral += (sample(full) + end) * (0.5 * rest);
    }
    integral / window
}
