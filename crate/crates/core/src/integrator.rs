//! Fixed-step classical Runge–Kutta propagation of complex amplitude vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Time-dependent linear right-hand side `dC/dt = f(t, C)`.
pub trait Rhs {
    fn dim(&self) -> usize;

    /// Writes `dC/dt` at time `t` into `out`. Both slices have length `dim()`.
    fn eval(&self, t: f64, c: &[Complex64], out: &mut [Complex64]);
}

/// Adapts a closure to [`Rhs`].
pub struct FnRhs<F> {
    dim: usize,
    f: F,
}

impl<F> FnRhs<F>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        FnRhs { dim, f }
    }
}

impl<F> Rhs for FnRhs<F>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, c: &[Complex64], out: &mut [Complex64]) {
        (self.f)(t, c, out)
    }
}

/// Uniform time grid for one propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationGrid {
    t_start: f64,
    t_end: f64,
    dt: f64,
    sample_stride: usize,
    steps: usize,
}

impl PropagationGrid {
    /// The span must be an integer multiple of `dt` to within 1e-9 steps.
    pub fn new(t_start: f64, t_end: f64, dt: f64, sample_stride: usize) -> Result<Self> {
        if !(t_start.is_finite() && t_end.is_finite() && t_end > t_start) {
            return Err(Error::config("grid", format!("need t_end > t_start, got [{t_start}, {t_end}]")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::config("dt", format!("must be positive, got {dt}")));
        }
        if sample_stride == 0 {
            return Err(Error::config("stride", "must be at least 1"));
        }
        let ratio = (t_end - t_start) / dt;
        let steps = ratio.round();
        if steps < 1.0 {
            return Err(Error::config("dt", format!("larger than the span {}", t_end - t_start)));
        }
        if (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(Error::config(
                "dt",
                format!("span {} is not an integer number of steps of {dt}", t_end - t_start),
            ));
        }
        Ok(PropagationGrid { t_start, t_end, dt, sample_stride, steps: steps as usize })
    }

    /// Grid with exactly `steps` steps over the span.
    pub fn with_steps(t_start: f64, t_end: f64, steps: usize, sample_stride: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        Self::new(t_start, t_end, (t_end - t_start) / steps as f64, sample_stride)
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn sample_stride(&self) -> usize {
        self.sample_stride
    }

    /// Time of step `i`. Computed from the index, not accumulated, and the last
    /// step lands on `t_end` exactly.
    pub fn time_at(&self, i: usize) -> f64 {
        if i == self.steps {
            self.t_end
        } else {
            self.t_start + (self.t_end - self.t_start) * (i as f64 / self.steps as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, time: f64) -> Self {
        StateVector { amplitudes, time }
    }

    /// Basis state `e_n` (1-based) in a space of dimension `dim`.
    pub fn basis_state(dim: usize, n: usize, time: f64) -> Result<Self> {
        if n == 0 || n > dim {
            return Err(Error::BasisIndex(n));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[n - 1] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amplitudes, time })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }
}

/// `Σ|C_n|²`.
pub fn norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|c| c.norm_sqr()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub steps: usize,
    pub dt: f64,
    /// `max |‖C(t)‖² − ‖C(0)‖²|` over every step.
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<StateVector>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn final_state(&self) -> &StateVector {
        self.samples.last().expect("trajectory always holds the initial sample")
    }
}

/// Propagates and keeps every sampled state.
pub fn propagate<R: Rhs + ?Sized>(
    state: StateVector,
    rhs: &R,
    grid: &PropagationGrid,
) -> Result<Trajectory> {
    let mut samples = Vec::with_capacity(grid.steps / grid.sample_stride + 2);
    let (_, diagnostics) = propagate_observed(state, rhs, grid, |s| samples.push(s.clone()))?;
    Ok(Trajectory { samples, diagnostics })
}

/// Propagates from `grid.t_start` to `grid.t_end`, handing each sampled state
/// to `observe` (step 0, every `sample_stride` steps, and always the final
/// step). Returns the final state.
pub fn propagate_observed<R, O>(
    state: StateVector,
    rhs: &R,
    grid: &PropagationGrid,
    mut observe: O,
) -> Result<(StateVector, Diagnostics)>
where
    R: Rhs + ?Sized,
    O: FnMut(&StateVector),
{
    let dim = rhs.dim();
    if state.dim() != dim {
        return Err(Error::Dimension { expected: dim, got: state.dim() });
    }
    if (state.time - grid.t_start).abs() > 1e-12 * grid.t_start.abs().max(1.0) {
        return Err(Error::config(
            "grid",
            format!("state time {} differs from grid start {}", state.time, grid.t_start),
        ));
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut k1 = vec![zero; dim];
    let mut k2 = vec![zero; dim];
    let mut k3 = vec![zero; dim];
    let mut k4 = vec![zero; dim];
    let mut tmp = vec![zero; dim];

    let mut current = state;
    let norm0 = current.norm();
    let mut max_drift = 0.0f64;
    observe(&current);

    for i in 0..grid.steps {
        let t = grid.time_at(i);
        let t_next = grid.time_at(i + 1);
        let h = t_next - t;
        let half = 0.5 * h;
        let y = &mut current.amplitudes;

        rhs.eval(t, y, &mut k1);
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(&k1) {
            *o = yi + ki * half;
        }
        rhs.eval(t + half, &tmp, &mut k2);
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(&k2) {
            *o = yi + ki * half;
        }
        rhs.eval(t + half, &tmp, &mut k3);
        for ((o, yi), ki) in tmp.iter_mut().zip(y.iter()).zip(&k3) {
            *o = yi + ki * h;
        }
        rhs.eval(t_next, &tmp, &mut k4);

        let sixth = h / 6.0;
        for j in 0..dim {
            y[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * sixth;
        }
        current.time = t_next;

        let n = norm(y);
        if !n.is_finite() {
            return Err(Error::Instability { step: i + 1, time: t_next });
        }
        max_drift = max_drift.max((n - norm0).abs());

        let step = i + 1;
        if step % grid.sample_stride == 0 || step == grid.steps {
            observe(&current);
        }
    }

    let diagnostics = Diagnostics { steps: grid.steps, dt: grid.dt, max_norm_drift: max_drift };
    Ok((current, diagnostics))
}
