//! Acceptance suite: one line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::PI;
use std::time::Instant;

use boxhhg::basis::*;
use boxhhg::integrator::{propagate, FnRhs, PropagationGrid, Rhs, StateVector};
use boxhhg::moving_wall::*;
use boxhhg::schedule::{plan_grid, GridOptions};
use boxhhg::spectrum::{harmonic_spectrum, Window};
use boxhhg::static_drive::*;
use common::{cosine_coefficient, crank_nicolson_static, Quadrature};
use num_complex::Complex64;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn matrix_fidelity() -> Outcome {
    let q = Quadrature::new();
    let dim = 32;
    let l = 15.0;
    let tables = BasisTables::new(BoxSpec::new(l, dim).unwrap());
    let s = |n: usize, y: f64| (n as f64 * PI * y).sin();
    let mut worst = [0.0f64; 3];
    for m in 1..=dim {
        for n in 1..=dim {
            let v = q.integrate(&|x| x * eigenfunction(m, l, x) * eigenfunction(n, l, x), 0.0, l, 1e-14);
            let y = q.integrate(&|y| y * s(m, y) * s(n, y), 0.0, 1.0, 1e-15);
            let yy = q.integrate(&|y| y * y * s(m, y) * s(n, y), 0.0, 1.0, 1e-15);
            worst[0] = worst[0].max((v - tables.position().entry(m, n)).abs());
            worst[1] = worst[1].max((y - tables.unit_position().entry(m, n)).abs());
            worst[2] = worst[2].max((yy - tables.unit_position_squared().entry(m, n)).abs());
        }
    }
    check(worst.iter().all(|w| *w <= 1e-12), format!("max |error| V {:.1e}, Y {:.1e}, Q {:.1e}", worst[0], worst[1], worst[2]))
}

fn unitarity() -> Outcome {
    let opts = GridOptions::default();
    let t = Instant::now();
    let s = run_static(&DriveParams::new(15.0, 1.0, 1.0), &opts).map_err(|e| e.to_string())?;
    let static_time = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let m = run_moving(&WallMotion::new(10.0, 5.0, 1.0), &opts).map_err(|e| e.to_string())?;
    let moving_time = t.elapsed().as_secs_f64();
    let (ds, dm) = (s.diagnostics.unwrap().max_norm_drift, m.diagnostics.unwrap().max_norm_drift);
    check(
        ds <= 1e-8 && dm <= 1e-8,
        format!("static drift {ds:.2e} ({static_time:.1} s), moving drift {dm:.2e} ({moving_time:.1} s)"),
    )
}

fn grid_solver_cross_check() -> Outcome {
    let p = DriveParams { periods: 5, ..DriveParams::new(5.0, 0.5, 1.0) };
    let opts = GridOptions::default();
    let galerkin = run_static(&p, &opts).map_err(|e| e.to_string())?;
    let per_period = (galerkin.len() - 1) / 5;
    let substeps = 16;
    let dt = 2.0 * PI / (per_period * substeps) as f64;
    let fd = crank_nicolson_static(5.0, 0.5, 1.0, 3999, dt, 5 * per_period * substeps, substeps);
    if fd.len() != galerkin.len() {
        return Err(format!("sample count mismatch {} vs {}", fd.len(), galerkin.len()));
    }
    let sup = fd
        .iter()
        .zip(galerkin.times().iter().zip(galerkin.values()))
        .map(|((tf, df), (tg, dg))| {
            assert!((tf - tg).abs() < 1e-9);
            (df - dg).abs()
        })
        .fold(0.0, f64::max);
    check(sup <= 1e-3, format!("sup |Δd| = {sup:.2e} over {} samples", fd.len()))
}

fn static_limit() -> Outcome {
    let m = WallMotion::new(10.0, 0.0, 1.0);
    let p = DriveParams::new(10.0, 0.0, 1.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); m.dimension];
    amps[0] = Complex64::new(0.6, 0.0);
    amps[1] = Complex64::new(0.0, 0.8);
    let init = StateVector::new(amps, 0.0);
    let opts = GridOptions::default();
    let a = run_moving_from(&m, init.clone(), &opts).map_err(|e| e.to_string())?;
    let b = run_static_from(&p, init, &opts).map_err(|e| e.to_string())?;
    if a.times() != b.times() {
        return Err("sample times differ".into());
    }
    let sup = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    check(sup <= 1e-8, format!("sup |Δd| = {sup:.2e}"))
}

fn coefficient_audit() -> Outcome {
    let m = WallMotion::new(10.0, 5.0, 1.0);
    let g = |t: f64| effective_coupling(t, &m);
    let numeric: Vec<f64> = (0..=4).map(|k| cosine_coefficient(&g, 1.0, k)).collect();
    let expected = [-3984.375, -7812.5, -4062.5, -937.5, -78.125];
    let closed = multichromatic_expansion(&m).as_array();
    let mut worst = 0.0f64;
    for k in 0..5 {
        worst = worst.max((numeric[k] - expected[k]).abs() / expected[k].abs());
        worst = worst.max((closed[k] - expected[k]).abs() / expected[k].abs());
    }
    let tripled = tripled_first_harmonic(&m);
    let tripled_rel = (numeric[1] - tripled).abs() / tripled.abs();
    check(
        worst <= 1e-9 && tripled == -23437.5 && tripled_rel > 1e-9,
        format!("max rel error {worst:.1e}; tripled first harmonic {tripled} is off by {:.1}%", 100.0 * tripled_rel),
    )
}

fn static_slope(field: f64) -> Result<f64, String> {
    let p = DriveParams::new(15.0, field, 1.0);
    let series = run_static(&p, &GridOptions::default()).map_err(|e| e.to_string())?;
    let spec = harmonic_spectrum(&series, 10, Window::FullRecord).map_err(|e| e.to_string())?;
    spec.envelope_slope(1..=10).map_err(|e| e.to_string())
}

fn moving_slope(b: f64, omega: f64) -> Result<f64, String> {
    let m = WallMotion::new(10.0, b, omega);
    // Envelope slopes agree to five digits between energy factors 0.1 and 0.02.
    let opts = GridOptions { energy_factor: 0.1, ..GridOptions::default() };
    let series = run_moving(&m, &opts).map_err(|e| e.to_string())?;
    let spec = harmonic_spectrum(&series, 10, Window::FullRecord).map_err(|e| e.to_string())?;
    spec.envelope_slope(1..=10).map_err(|e| e.to_string())
}

fn field_trend() -> Outcome {
    let (weak, strong) = (static_slope(0.5)?, static_slope(2.0)?);
    check(strong > weak, format!("slope(F=0.5) = {weak:.4}, slope(F=2) = {strong:.4}"))
}

fn frequency_trend() -> Outcome {
    let (slow, fast) = (moving_slope(5.0, 0.5)?, moving_slope(5.0, 2.0)?);
    check(fast > slow, format!("slope(ω₀=0.5) = {slow:.4}, slope(ω₀=2) = {fast:.4}"))
}

fn amplitude_trend() -> Outcome {
    let (small, large) = (moving_slope(2.0, 1.0)?, moving_slope(8.0, 1.0)?);
    check(large > small, format!("slope(b=2) = {small:.4}, slope(b=8) = {large:.4}"))
}

fn integrator_order() -> Outcome {
    let (delta, g, w) = (2.0, 0.4, 1.7);
    let rhs = FnRhs::new(2, move |t: f64, c: &[Complex64], out: &mut [Complex64]| {
        let phase = Complex64::from_polar(1.0, w * t);
        let i = Complex64::new(0.0, 1.0);
        out[0] = -i * (c[0] * (-0.5 * delta) + c[1] * phase * g);
        out[1] = -i * (c[0] * phase.conj() * g + c[1] * (0.5 * delta));
    });
    let t_end = 20.0;
    let exact = {
        let det = delta - w;
        let rabi = (det * det + 4.0 * g * g).sqrt();
        let th = 0.5 * rabi * t_end;
        [
            Complex64::new(th.cos(), det / rabi * th.sin()) * Complex64::from_polar(1.0, 0.5 * w * t_end),
            Complex64::new(0.0, -2.0 * g / rabi * th.sin()) * Complex64::from_polar(1.0, -0.5 * w * t_end),
        ]
    };
    let error = |steps: usize| {
        let grid = PropagationGrid::with_steps(0.0, t_end, steps, steps).unwrap();
        let init = StateVector::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 0.0);
        let traj = propagate(init, &rhs, &grid).unwrap();
        let c = &traj.final_state().amplitudes;
        (c[0] - exact[0]).norm().max((c[1] - exact[1]).norm())
    };
    let ratio = error(400) / error(800);
    check((12.0..=20.0).contains(&ratio), format!("error ratio {ratio:.3}"))
}

fn perturbation_theory() -> Outcome {
    let l = 5.0;
    let tables = BasisTables::new(BoxSpec::new(l, DEFAULT_BASIS).unwrap());
    let e = tables.energies();
    let spacing = e[1] - e[0];
    let omega = spacing + 0.05;
    let field = 1e-3;
    let v21 = tables.position().entry(2, 1);
    let rhs = StaticRhs::new(&tables, field, omega);
    let grid = plan_grid(omega, 1, e[e.len() - 1], &GridOptions { energy_factor: 0.1, ..GridOptions::default() })
        .map_err(|e| e.to_string())?;
    let traj = propagate(StateVector::basis_state(DEFAULT_BASIS, 1, 0.0).unwrap(), &rhs, &grid).map_err(|e| e.to_string())?;
    assert_eq!(rhs.dim(), DEFAULT_BASIS);
    let i = Complex64::new(0.0, 1.0);
    // ∫₀ᵗ cos(ωs) e^{iΩs} ds in closed form
    let integral = |t: f64| {
        let term = |w: f64| ((i * w * t).exp() - 1.0) / (i * w);
        (term(spacing + omega) + term(spacing - omega)) * 0.5
    };
    let period = 2.0 * PI / omega;
    let mut worst = 0.0f64;
    for s in traj.samples.iter().filter(|s| s.time >= 0.1 * period) {
        let first_order = (i * field * v21 * integral(s.time)).norm_sqr();
        let numeric = s.amplitudes[1].norm_sqr();
        worst = worst.max((numeric - first_order).abs() / first_order);
    }
    check(worst <= 0.05, format!("max relative deviation {worst:.2e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("matrix-element fidelity", matrix_fidelity),
        ("unitarity", unitarity),
        ("grid-solver cross-check", grid_solver_cross_check),
        ("static-limit equivalence", static_limit),
        ("multichromatic coefficient audit", coefficient_audit),
        ("field-strength trend", field_trend),
        ("drive-frequency trend", frequency_trend),
        ("wall-amplitude trend", amplitude_trend),
        ("integrator order", integrator_order),
        ("perturbation-theory check", perturbation_theory),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let n = n + 1;
        if only.is_some_and(|k| k != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
