//! Box whose right wall follows `L(t) = a + b cos ω₀t`.
//!
//! With `y = x/L(t)`, the gauge factor `exp(i L L̇ y²/2)` and the clock
//! `τ = ∫ ds/L(s)²`, the wave function in the unit box obeys
//! `i ∂φ/∂τ = −½ ∂²φ/∂y² + ½ L³L̈ y² φ`. Expanding `φ = Σ C_n sin(nπy)` and
//! switching back to physical time with `dτ/dt = 1/L²` gives
//!
//! ```text
//! i dC_m/dt = (m²π²/2) C_m / L² + L L̈ Σ_n Q_mn C_n
//! ```
//!
//! which is integrated directly in `t`. The gauge factor has unit modulus
//! and drops out of the dipole `d(t) = −2L Σ_mn C_m* Y_mn C_n`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisTables, BoxSpec, SplitComplex};
use crate::error::{Error, Result};
use crate::integrator::{propagate_observed, Rhs, StateVector};
use crate::schedule::{plan_grid, GridOptions};
use crate::spectrum::DipoleSeries;
use crate::static_drive::{hermitian_form, DEFAULT_BASIS, REALNESS_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallMotion {
    pub base: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub dimension: usize,
    pub initial_state: usize,
    pub periods: usize,
}

impl WallMotion {
    pub fn new(base: f64, amplitude: f64, frequency: f64) -> Self {
        WallMotion {
            base,
            amplitude,
            frequency,
            dimension: DEFAULT_BASIS,
            initial_state: 1,
            periods: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::config("b", format!("must be non-negative, got {}", self.amplitude)));
        }
        if !(self.base.is_finite() && self.base > self.amplitude) {
            return Err(Error::config(
                "a",
                format!("need a > b so the wall stays positive, got a = {}, b = {}", self.base, self.amplitude),
            ));
        }
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return Err(Error::config("omega0", format!("must be positive, got {}", self.frequency)));
        }
        if self.dimension < 2 {
            return Err(Error::config("basis", "must be at least 2"));
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
        Ok(())
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.frequency
    }

    /// `L(t)`.
    pub fn position(&self, t: f64) -> f64 {
        self.base + self.amplitude * (self.frequency * t).cos()
    }

    /// `L̇(t)`.
    pub fn velocity(&self, t: f64) -> f64 {
        -self.amplitude * self.frequency * (self.frequency * t).sin()
    }

    /// `L̈(t)`.
    pub fn acceleration(&self, t: f64) -> f64 {
        -self.amplitude * self.frequency * self.frequency * (self.frequency * t).cos()
    }
}

pub fn wall_position(t: f64, motion: &WallMotion) -> f64 {
    motion.position(t)
}

/// `g(t) = L³ L̈`, from the direct product.
pub fn effective_coupling(t: f64, motion: &WallMotion) -> f64 {
    let l = motion.position(t);
    l * l * l * motion.acceleration(t)
}

/// Cosine-series coefficients of `L³L̈` for the breathing wall: constant
/// plus harmonics 1 through 4 of `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultichromaticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl MultichromaticCoefficients {
    pub fn evaluate(&self, t: f64, frequency: f64) -> f64 {
        let th = frequency * t;
        self.a + self.b * th.cos() + self.c * (2.0 * th).cos() + self.d * (3.0 * th).cos() + self.e * (4.0 * th).cos()
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }
}

/// Expands `−bω₀² cos θ (a + b cos θ)³` in `cos kθ`.
pub fn multichromatic_expansion(motion: &WallMotion) -> MultichromaticCoefficients {
    let (a, b, w2) = (motion.base, motion.amplitude, motion.frequency * motion.frequency);
    MultichromaticCoefficients {
        a: -3.0 * b * b * w2 / 8.0 * (4.0 * a * a + b * b),
        b: -a * b * w2 / 4.0 * (4.0 * a * a + 9.0 * b * b),
        c: -b * b * w2 / 2.0 * (3.0 * a * a + b * b),
        d: -3.0 * a * b * b * b * w2 / 4.0,
        e: -b * b * b * b * w2 / 8.0,
    }
}

/// The first-harmonic coefficient in the form `−(3abω₀²/4)(4a² + 9b²)`,
/// three times the value the expansion actually produces. Kept so audits can
/// show it does not reconstruct `L³L̈`.
pub fn tripled_first_harmonic(motion: &WallMotion) -> f64 {
    let (a, b, w2) = (motion.base, motion.amplitude, motion.frequency * motion.frequency);
    -3.0 * a * b * w2 / 4.0 * (4.0 * a * a + 9.0 * b * b)
}

/// `τ(t) = ∫₀ᵗ ds / L(s)²`, by adaptive Simpson quadrature to 1e-10 absolute.
pub fn tau_of_t(t: f64, motion: &WallMotion) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::config("t", format!("must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| {
        let l = motion.position(s);
        1.0 / (l * l)
    };
    // half-period panels keep each piece smooth and the recursion shallow
    let panels = ((t / (0.5 * motion.period())).ceil() as usize).max(1);
    let width = t / panels as f64;
    let tol = 1e-10 / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let (lo, hi) = (i as f64 * width, if i + 1 == panels { t } else { (i + 1) as f64 * width });
        total += adaptive_simpson(&f, lo, hi, tol);
    }
    Ok(total)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 40)
}

/// Right-hand side of the moving-wall amplitude equations in physical time.
pub struct MovingRhs<'a> {
    tables: &'a BasisTables,
    motion: WallMotion,
    split: RefCell<SplitComplex>,
}

impl<'a> MovingRhs<'a> {
    pub fn new(tables: &'a BasisTables, motion: WallMotion) -> Self {
        MovingRhs { tables, motion, split: RefCell::new(SplitComplex::new(tables.dimension())) }
    }
}

impl Rhs for MovingRhs<'_> {
    fn dim(&self) -> usize {
        self.tables.dimension()
    }

    fn eval(&self, t: f64, c: &[Complex64], out: &mut [Complex64]) {
        let l = self.motion.position(t);
        let inv_l2 = 1.0 / (l * l);
        let coupling = l * self.motion.acceleration(t);
        if coupling != 0.0 {
            self.tables.unit_position_squared().apply_with(c, &mut self.split.borrow_mut(), out);
        }
        for ((o, ci), e) in out.iter_mut().zip(c).zip(self.tables.unit_energies()) {
            let mixed = if coupling != 0.0 { *o * coupling } else { Complex64::new(0.0, 0.0) };
            let h = ci * (e * inv_l2) + mixed;
            *o = Complex64::new(h.im, -h.re);
        }
    }
}

pub fn moving_rhs(
    t: f64,
    c: &[Complex64],
    tables: &BasisTables,
    motion: &WallMotion,
) -> Result<Vec<Complex64>> {
    if c.len() != tables.dimension() {
        return Err(Error::Dimension { expected: tables.dimension(), got: c.len() });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); c.len()];
    MovingRhs::new(tables, *motion).eval(t, c, &mut out);
    Ok(out)
}

/// Tables for the unit box; the physical length slot holds the mean wall
/// position and is not used by the moving-wall equations.
pub fn moving_tables(motion: &WallMotion) -> Result<BasisTables> {
    Ok(BasisTables::new(BoxSpec::new(motion.base, motion.dimension)?))
}

/// Largest diagonal energy of the physical-time generator, reached when the
/// wall is closest.
pub fn max_frame_energy(motion: &WallMotion, tables: &BasisTables) -> f64 {
    let l_min = motion.base - motion.amplitude;
    tables.unit_energies().last().unwrap() / (l_min * l_min)
}

pub fn run_moving(motion: &WallMotion, opts: &GridOptions) -> Result<DipoleSeries> {
    motion.validate()?;
    let initial = StateVector::basis_state(motion.dimension, motion.initial_state, 0.0)?;
    run_moving_from(motion, initial, opts)
}

pub fn run_moving_from(motion: &WallMotion, initial: StateVector, opts: &GridOptions) -> Result<DipoleSeries> {
    motion.validate()?;
    let tables = moving_tables(motion)?;
    if initial.dim() != tables.dimension() {
        return Err(Error::Dimension { expected: tables.dimension(), got: initial.dim() });
    }
    let grid = plan_grid(motion.frequency, motion.periods, max_frame_energy(motion, &tables), opts)?;
    let rhs = MovingRhs::new(&tables, *motion);

    let mut times = Vec::with_capacity(grid.steps() / grid.sample_stride() + 1);
    let mut values = Vec::with_capacity(times.capacity());
    let mut scratch = vec![Complex64::new(0.0, 0.0); tables.dimension()];
    let mut worst_imag = 0.0f64;
    let (_, diagnostics) = propagate_observed(initial, &rhs, &grid, |s| {
        let (re, im) = hermitian_form(tables.unit_position(), &s.amplitudes, &mut scratch);
        worst_imag = worst_imag.max(im);
        times.push(s.time);
        values.push(-2.0 * motion.position(s.time) * re);
    })?;
    if worst_imag > REALNESS_TOLERANCE {
        return Err(Error::Data(format!("dipole has imaginary residue {worst_imag:e}")));
    }
    Ok(DipoleSeries::new(times, values, motion.frequency)?.with_diagnostics(diagnostics))
}
