//! Sine eigenbasis of the hard-wall box and the matrix-element tables shared
//! by both solvers.
//!
//! Indices are 1-based in every public accessor (`n = 1` is the ground
//! state); storage is row-major and 0-based.
//!
//! Two normalisations appear. The physical box of length `L` uses the
//! orthonormal functions `sqrt(2/L) sin(nπx/L)`. The unit box of the
//! moving-wall frame uses the bare `sin(nπy)`, whose squared norm is 1/2;
//! the `Y` and `Q` tables are integrals against those bare functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Box length and basis truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    length: f64,
    dimension: usize,
}

impl BoxSpec {
    pub fn new(length: f64, dimension: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Geometry(format!("box length must be positive, got {length}")));
        }
        if dimension < 2 {
            return Err(Error::Geometry(format!(
                "basis dimension must be at least 2, got {dimension}"
            )));
        }
        Ok(BoxSpec { length, dimension })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Real and imaginary parts held in separate buffers.
#[derive(Debug, Clone, Default)]
pub struct SplitComplex {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SplitComplex {
    pub fn new(dim: usize) -> Self {
        SplitComplex { re: vec![0.0; dim], im: vec![0.0; dim] }
    }

    fn load(&mut self, c: &[Complex64]) {
        self.re.clear();
        self.im.clear();
        self.re.extend(c.iter().map(|z| z.re));
        self.im.extend(c.iter().map(|z| z.im));
    }
}

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for m in 1..=dim {
            for n in 1..=dim {
                data.push(f(m, n));
            }
        }
        RealMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `(m, n)` with 1-based indices.
    pub fn entry(&self, m: usize, n: usize) -> f64 {
        assert!(m >= 1 && n >= 1 && m <= self.dim && n <= self.dim, "index out of range");
        self.data[(m - 1) * self.dim + (n - 1)]
    }

    /// Row `m` (1-based) as a slice over columns `1..=dim`.
    pub fn row(&self, m: usize) -> &[f64] {
        let start = (m - 1) * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.dim).all(|m| (1..m).all(|n| self.entry(m, n) == self.entry(n, m)))
    }

    /// `out = M c` for a complex vector `c`.
    pub fn apply(&self, c: &[Complex64], out: &mut [Complex64]) {
        let mut split = SplitComplex::new(self.dim);
        self.apply_with(c, &mut split, out);
    }

    /// As [`apply`](Self::apply), reusing `split` as workspace.
    pub fn apply_with(&self, c: &[Complex64], split: &mut SplitComplex, out: &mut [Complex64]) {
        assert_eq!(c.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        split.load(c);
        for (row, o) in self.data.chunks_exact(self.dim).zip(out.iter_mut()) {
            *o = Complex64::new(dot(row, &split.re), dot(row, &split.im));
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RealMatrix { dim: self.dim, data: self.data.iter().map(|x| x * factor).collect() }
    }
}

const LANES: usize = 8;

// Fixed lane count so the summation order, and hence the result, does not
// depend on the vector width the compiler picks.
fn dot(row: &[f64], x: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let rows = row.chunks_exact(LANES);
    let xs = x.chunks_exact(LANES);
    let tail: f64 = rows.remainder().iter().zip(xs.remainder()).map(|(a, b)| a * b).sum();
    for (r, v) in rows.zip(xs) {
        for k in 0..LANES {
            acc[k] += r[k] * v[k];
        }
    }
    let pairs = [acc[0] + acc[4], acc[1] + acc[5], acc[2] + acc[6], acc[3] + acc[7]];
    ((pairs[0] + pairs[2]) + (pairs[1] + pairs[3])) + tail
}

/// Energy of level `n` in a box of length `l`, with kinetic operator −½ d²/dx².
pub fn eigen_energy(n: usize, l: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::BasisIndex(n));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Geometry(format!("box length must be positive, got {l}")));
    }
    let k = n as f64 * PI / l;
    Ok(0.5 * k * k)
}

/// Normalised eigenfunction `sqrt(2/L) sin(nπx/L)`.
pub fn eigenfunction(n: usize, l: f64, x: f64) -> f64 {
    (2.0 / l).sqrt() * (n as f64 * PI * x / l).sin()
}

// ∫₀¹ 2y sin(mπy) sin(nπy) dy for m ≠ n
fn odd_pair_position(m: usize, n: usize) -> f64 {
    if (m + n).is_multiple_of(2) {
        return 0.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    let diff = mf * mf - nf * nf;
    -8.0 * mf * nf / (PI * PI * diff * diff)
}

/// ⟨u_m| x |u_n⟩ in the orthonormal basis of a box of length `L`.
pub fn position_matrix(spec: &BoxSpec) -> RealMatrix {
    let l = spec.length;
    RealMatrix::from_fn(spec.dimension, |m, n| {
        if m == n {
            0.5 * l
        } else {
            l * odd_pair_position(m, n)
        }
    })
}

/// ∫₀¹ y sin(mπy) sin(nπy) dy.
pub fn unit_position_matrix(dim: usize) -> RealMatrix {
    RealMatrix::from_fn(dim, |m, n| if m == n { 0.25 } else { 0.5 * odd_pair_position(m, n) })
}

/// ∫₀¹ y² sin(mπy) sin(nπy) dy.
pub fn unit_position_squared_matrix(dim: usize) -> RealMatrix {
    RealMatrix::from_fn(dim, |m, n| {
        let (mf, nf) = (m as f64, n as f64);
        if m == n {
            1.0 / 6.0 - 1.0 / (4.0 * PI * PI * nf * nf)
        } else {
            let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            let diff = mf * mf - nf * nf;
            sign * 4.0 * mf * nf / (PI * PI * diff * diff)
        }
    })
}

/// Precomputed tables for one `(L, N)` pair. Immutable once built.
#[derive(Debug, Clone)]
pub struct BasisTables {
    spec: BoxSpec,
    position: RealMatrix,
    unit_position: RealMatrix,
    unit_position_squared: RealMatrix,
    energies: Vec<f64>,
    unit_energies: Vec<f64>,
}

impl BasisTables {
    pub fn new(spec: BoxSpec) -> Self {
        let n = spec.dimension;
        let energies = (1..=n).map(|k| eigen_energy(k, spec.length).unwrap()).collect();
        let unit_energies = (1..=n).map(|k| eigen_energy(k, 1.0).unwrap()).collect();
        BasisTables {
            spec,
            position: position_matrix(&spec),
            unit_position: unit_position_matrix(n),
            unit_position_squared: unit_position_squared_matrix(n),
            energies,
            unit_energies,
        }
    }

    pub fn spec(&self) -> &BoxSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.spec.dimension
    }

    /// `V`: position elements in the box of length `L`.
    pub fn position(&self) -> &RealMatrix {
        &self.position
    }

    /// `Y`: position elements in the unit box.
    pub fn unit_position(&self) -> &RealMatrix {
        &self.unit_position
    }

    /// `Q`: position-squared elements in the unit box.
    pub fn unit_position_squared(&self) -> &RealMatrix {
        &self.unit_position_squared
    }

    /// `E_n` for the box of length `L`, index 0 holding `n = 1`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `n²π²/2`, the unit-box energies.
    pub fn unit_energies(&self) -> &[f64] {
        &self.unit_energies
    }
}
