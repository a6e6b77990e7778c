//! Reading and writing dipole series, spectra, and run metadata.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a file
//! read back reproduces every value bit for bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::{DipoleSeries, Spectrum};

pub const DIPOLE_HEADER: [&str; 2] = ["t", "dipole"];
pub const SPECTRUM_HEADER: [&str; 5] = ["order", "frequency", "re_amplitude", "im_amplitude", "intensity"];
pub const SUMMARY_HEADER: [&str; 3] = ["sweep_value", "slope", "max_norm_drift"];

fn csv_error(e: csv::Error) -> Error {
    Error::Data(format!("csv: {e}"))
}

pub fn dipole_csv(series: &DipoleSeries) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DIPOLE_HEADER).map_err(csv_error)?;
    for (t, d) in series.times().iter().zip(series.values()) {
        w.write_record([t.to_string(), d.to_string()]).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn spectrum_csv(spectrum: &Spectrum) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SPECTRUM_HEADER).map_err(csv_error)?;
    for k in spectrum.orders() {
        let a = spectrum.amplitudes[k];
        w.write_record([
            k.to_string(),
            spectrum.frequency(k).to_string(),
            a.re.to_string(),
            a.im.to_string(),
            spectrum.intensity(k).to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct DipoleJson {
    t: Vec<f64>,
    dipole: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumRow {
    order: usize,
    frequency: f64,
    re_amplitude: f64,
    im_amplitude: f64,
    intensity: f64,
}

pub fn dipole_json(series: &DipoleSeries) -> Result<Vec<u8>> {
    let doc = DipoleJson { t: series.times().to_vec(), dipole: series.values().to_vec() };
    serde_json::to_vec_pretty(&doc).map_err(|e| Error::Data(e.to_string()))
}

pub fn spectrum_json(spectrum: &Spectrum) -> Result<Vec<u8>> {
    let rows: Vec<SpectrumRow> = spectrum
        .orders()
        .map(|k| SpectrumRow {
            order: k,
            frequency: spectrum.frequency(k),
            re_amplitude: spectrum.amplitudes[k].re,
            im_amplitude: spectrum.amplitudes[k].im,
            intensity: spectrum.intensity(k),
        })
        .collect();
    serde_json::to_vec_pretty(&rows).map_err(|e| Error::Data(e.to_string()))
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if found.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Data(format!(
            "expected header {:?}, found {:?}",
            expected,
            found.iter().collect::<Vec<_>>()
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, name: &str, row: usize) -> Result<T> {
    let raw = record.get(i).ok_or_else(|| Error::Data(format!("row {row}: missing `{name}`")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Data(format!("row {row}: bad `{name}` value {raw:?}")))
}

/// Parses a dipole CSV into `(times, values)`.
pub fn parse_dipole_csv(bytes: &[u8]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    check_header(r.headers().map_err(csv_error)?, &DIPOLE_HEADER)?;
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != 2 {
            return Err(Error::Data(format!("row {}: expected 2 fields, got {}", row + 1, rec.len())));
        }
        let t: f64 = field(&rec, 0, "t", row + 1)?;
        let d: f64 = field(&rec, 1, "dipole", row + 1)?;
        if !(t.is_finite() && d.is_finite()) {
            return Err(Error::Data(format!("row {}: non-finite value", row + 1)));
        }
        times.push(t);
        values.push(d);
    }
    Ok((times, values))
}

/// Parses a spectrum CSV and checks its internal consistency: orders run
/// 0, 1, 2, ...; frequencies are `k ω₀` for one `ω₀`; intensities equal
/// `re² + im²`.
pub fn parse_spectrum_csv(bytes: &[u8]) -> Result<Spectrum> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    check_header(r.headers().map_err(csv_error)?, &SPECTRUM_HEADER)?;
    let mut amplitudes = Vec::new();
    let mut drive_frequency = None;
    for (row, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = row + 1;
        if rec.len() != 5 {
            return Err(Error::Data(format!("row {row}: expected 5 fields, got {}", rec.len())));
        }
        let order: usize = field(&rec, 0, "order", row)?;
        let frequency: f64 = field(&rec, 1, "frequency", row)?;
        let re: f64 = field(&rec, 2, "re_amplitude", row)?;
        let im: f64 = field(&rec, 3, "im_amplitude", row)?;
        let intensity: f64 = field(&rec, 4, "intensity", row)?;
        if order != amplitudes.len() {
            return Err(Error::Data(format!("row {row}: expected order {}, got {order}", amplitudes.len())));
        }
        if ![frequency, re, im, intensity].iter().all(|v| v.is_finite()) {
            return Err(Error::Data(format!("row {row}: non-finite value")));
        }
        if order == 1 {
            if frequency <= 0.0 {
                return Err(Error::Data(format!("row {row}: drive frequency must be positive")));
            }
            drive_frequency = Some(frequency);
        }
        let expected = match (order, drive_frequency) {
            (0, _) => 0.0,
            (_, Some(w)) => order as f64 * w,
            (_, None) => unreachable!("order 1 sets the frequency"),
        };
        if (frequency - expected).abs() > 1e-12 * expected.abs().max(1.0) {
            return Err(Error::Data(format!("row {row}: frequency {frequency} is not {order}·ω₀")));
        }
        let a = Complex64::new(re, im);
        if intensity < 0.0 || (intensity - a.norm_sqr()).abs() > 1e-12 * intensity.max(f64::MIN_POSITIVE) {
            return Err(Error::Data(format!("row {row}: intensity {intensity} is not |amplitude|²")));
        }
        amplitudes.push(a);
    }
    let drive_frequency = drive_frequency
        .ok_or_else(|| Error::Data("a spectrum needs at least orders 0 and 1".into()))?;
    Ok(Spectrum { drive_frequency, amplitudes })
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{harmonic_spectrum, Window};

    fn sample_series() -> DipoleSeries {
        let n = 64;
        let omega = 0.9;
        let span = 2.0 * std::f64::consts::PI / omega;
        let times: Vec<f64> = (0..=n).map(|i| span * i as f64 / n as f64).collect();
        let values = times.iter().map(|t| -1.0 / 3.0 + (omega * t).sin() * 0.1).collect();
        DipoleSeries::new(times, values, omega).unwrap()
    }

    #[test]
    fn spectrum_csv_round_trip_is_exact() {
        let s = harmonic_spectrum(&sample_series(), 8, Window::FullRecord).unwrap();
        let bytes = spectrum_csv(&s).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("order,frequency,re_amplitude,im_amplitude,intensity\n"));
        let back = parse_spectrum_csv(&bytes).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn dipole_csv_round_trip_is_exact() {
        let s = sample_series();
        let (t, d) = parse_dipole_csv(&dipole_csv(&s).unwrap()).unwrap();
        assert_eq!(t, s.times());
        assert_eq!(d, s.values());
    }

    #[test]
    fn json_outputs_parse() {
        let s = sample_series();
        let v: serde_json::Value = serde_json::from_slice(&dipole_json(&s).unwrap()).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), s.len());
        let spec = harmonic_spectrum(&s, 4, Window::FullRecord).unwrap();
        let rows: Vec<SpectrumRow> = serde_json::from_slice(&spectrum_json(&spec).unwrap()).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[3].re_amplitude, spec.amplitudes[3].re);
    }

    #[test]
    fn malformed_spectra_are_rejected() {
        let head = "order,frequency,re_amplitude,im_amplitude,intensity\n";
        let cases = [
            "order,freq\n0,0\n".to_string(),
            format!("{head}0,0,1,0,1\n"),
            format!("{head}0,0,1,0,1\n2,2,0,0,0\n"),
            format!("{head}0,0,1,0,1\n1,1,0.5,0,0.3\n"),
            format!("{head}0,0,1,0,1\n1,1,0.5,0,0.25\n2,2.5,0,0,0\n"),
            format!("{head}0,0,1,0,1\n1,1,NaN,0,0.25\n"),
            format!("{head}0,0,1,0\n"),
        ];
        for c in &cases {
            assert!(parse_spectrum_csv(c.as_bytes()).is_err(), "{c}");
        }
        assert!(parse_spectrum_csv(format!("{head}0,0,1,0,1\n1,1,0.5,0,0.25\n").as_bytes()).is_ok());
    }
}
