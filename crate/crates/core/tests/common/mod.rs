//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new() -> Self {
        let (nodes, weights) = gauss_legendre(20);
        Quadrature { nodes, weights }
    }

    /// Returns the rule's estimate and the integral of `|f|` on the panel.
    fn panel(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut sum, mut abs) = (0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(mid + half * x);
            sum += v;
            abs += v.abs();
        }
        (sum * half, abs * half)
    }

    /// Adaptive bisection on 20-point Gauss–Legendre panels, starting from
    /// 32 equal pieces. Refinement stops once the panel agrees with its halves
    /// to `tol` or to round-off.
    pub fn integrate(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        let pieces = 32;
        let width = (b - a) / pieces as f64;
        (0..pieces)
            .map(|i| {
                let (lo, hi) = (a + i as f64 * width, if i + 1 == pieces { b } else { a + (i + 1) as f64 * width });
                let whole = self.panel(f, lo, hi).0;
                self.refine(f, lo, hi, whole, tol / pieces as f64, 20)
            })
            .sum()
    }

    fn refine(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let ((left, left_abs), (right, right_abs)) = (self.panel(f, a, m), self.panel(f, m, b));
        let floor = 64.0 * f64::EPSILON * (left_abs + right_abs);
        if depth == 0 || (left + right - whole).abs() <= tol.max(floor) {
            return left + right;
        }
        self.refine(f, a, m, left, 0.5 * tol, depth - 1) + self.refine(f, m, b, right, 0.5 * tol, depth - 1)
    }
}

/// Dense complex matrix–vector product.
pub fn dense_apply(h: &[Vec<Complex64>], c: &[Complex64]) -> Vec<Complex64> {
    h.iter().map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
}

/// Crank–Nicolson finite differences for `i ψ_t = −½ ψ_xx − F x cos(ωt) ψ`
/// on `(0, L)` with hard walls, starting from the ground state. Returns the
/// dipole `−⟨x⟩` after each multiple of `record_every` steps (including t=0).
pub fn crank_nicolson_static(
    length: f64,
    field: f64,
    omega: f64,
    interior: usize,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Vec<(f64, f64)> {
    let h = length / (interior + 1) as f64;
    let xs: Vec<f64> = (1..=interior).map(|j| j as f64 * h).collect();
    let mut psi: Vec<Complex64> = xs
        .iter()
        .map(|x| Complex64::new((2.0 / length).sqrt() * (PI * x / length).sin(), 0.0))
        .collect();
    let dipole = |psi: &[Complex64]| -> f64 {
        let norm: f64 = psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * h;
        -psi.iter().zip(&xs).map(|(p, x)| x * p.norm_sqr()).sum::<f64>() * h / norm
    };
    let mut out = vec![(0.0, dipole(&psi))];
    let kin = 1.0 / (2.0 * h * h);
    let i = Complex64::new(0.0, 1.0);
    let off = -kin; // off-diagonal of H
    let mut rhs = vec![Complex64::new(0.0, 0.0); interior];
    let mut cprime = vec![Complex64::new(0.0, 0.0); interior];
    let mut dprime = vec![Complex64::new(0.0, 0.0); interior];
    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let drive = field * (omega * t_mid).cos();
        let half = i * (0.5 * dt);
        // rhs = (1 − i dt/2 H) ψ
        for j in 0..interior {
            let diag = 2.0 * kin - drive * xs[j];
            let mut hpsi = psi[j] * diag;
            if j > 0 {
                hpsi += psi[j - 1] * off;
            }
            if j + 1 < interior {
                hpsi += psi[j + 1] * off;
            }
            rhs[j] = psi[j] - half * hpsi;
        }
        // (1 + i dt/2 H) ψ' = rhs, Thomas algorithm
        let a_off = half * off;
        for j in 0..interior {
            let diag = Complex64::new(1.0, 0.0) + half * (2.0 * kin - drive * xs[j]);
            if j == 0 {
                cprime[0] = a_off / diag;
                dprime[0] = rhs[0] / diag;
            } else {
                let denom = diag - a_off * cprime[j - 1];
                cprime[j] = a_off / denom;
                dprime[j] = (rhs[j] - a_off * dprime[j - 1]) / denom;
            }
        }
        psi[interior - 1] = dprime[interior - 1];
        for j in (0..interior - 1).rev() {
            psi[j] = dprime[j] - cprime[j] * psi[j + 1];
        }
        if (step + 1) % record_every == 0 {
            out.push(((step + 1) as f64 * dt, dipole(&psi)));
        }
    }
    out
}

/// Fourier cosine coefficient `(2/T) ∫₀ᵀ g(t) cos(kωt) dt` (or `1/T` for
/// k = 0), by the same adaptive quadrature.
pub fn cosine_coefficient(g: &dyn Fn(f64) -> f64, omega: f64, k: usize) -> f64 {
    let period = 2.0 * PI / omega;
    let q = Quadrature::new();
    let f = |t: f64| g(t) * (k as f64 * omega * t).cos();
    let scale = if k == 0 { 1.0 / period } else { 2.0 / period };
    scale * q.integrate(&f, 0.0, period, 1e-10)
}
