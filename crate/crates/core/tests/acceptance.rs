//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use qwalls::boundary::*;
use qwalls::carpet::{box_counting_dimension, plateau_variance_ratio, CarpetSeries};
use qwalls::forms::{form_descriptor, gamma_value, star};
use qwalls::linalg::{max_abs, Mat2, Vec2};
use qwalls::model::{Interval, PhysicalConfig, SpectralState};
use qwalls::movingwalls::*;
use qwalls::quadrature::gauss_legendre_on;
use qwalls::spectral::{lowest_modes, solve_airy_levels, SpectrumOptions};
use qwalls::trotter::{bump, convergence_report, TrotterProblem};
use rand::Rng;

type Outcome = (bool, String);

fn dirichlet_spectrum() -> Outcome {
    let start = Instant::now();
    let iv = Interval::new(0.0, 1.0).unwrap();
    let cfg = PhysicalConfig::default();
    let modes = lowest_modes(&make_dirichlet(), &iv, &cfg, 20, &SpectrumOptions::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let worst = modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let exact = cfg.kinetic_prefactor() * ((i + 1) as f64 * PI).powi(2);
            (m.energy - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    (worst < 1e-8 && secs < 1.0 && modes.len() == 20, format!("max rel err {worst:.2e}, {secs:.3} s"))
}

fn round_sig(x: f64, digits: i32) -> f64 {
    let p = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * p).round() / p
}

fn airy_table() -> Outcome {
    let start = Instant::now();
    let levels = solve_airy_levels(4).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let table = [9.86851, 39.4787, 88.8266, 157.914];
    let ok = levels.iter().zip(&table).all(|(a, b)| round_sig(*a, 5) == round_sig(*b, 5));
    (ok && secs < 1.0, format!("{levels:.6?}, {secs:.3} s"))
}

fn theta_quasi_periodicity() -> Outcome {
    let s = CarpetSeries::new(2048, 1.0).unwrap();
    let mut r = common::rng(3);
    let phase = Complex64::from_polar(1.0, -PI / 4.0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let xi = r.gen_range(-0.5..0.5);
        // dyadic τ keeps τ + 1 exactly representable; θ moves by ~n_max²·ulp otherwise
        let tau = r.gen_range(0u64..10 << 40) as f64 / (1u64 << 40) as f64;
        let gap = (s.theta(xi, tau + 1.0).unwrap() - phase * s.theta(xi, tau).unwrap()).norm();
        worst = worst.max(gap);
    }
    (worst < 1e-12, format!("max gap {worst:.2e}"))
}

fn revivals() -> Outcome {
    let s = CarpetSeries::new(2048, 1.0).unwrap();
    let worst = (1..=5).map(|t| (s.revival_fidelity(t as f64) - 1.0).abs()).fold(0.0, f64::max);
    (worst < 1e-12, format!("max |F − 1| {worst:.2e}"))
}

fn fractal_dimension() -> Outcome {
    let start = Instant::now();
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    let s = CarpetSeries::new(4096, 1.0).unwrap();
    let p = s.profile(1.0 / golden, 1 << 16).unwrap();
    let b = box_counting_dimension(&p, 4..=12).unwrap();
    let secs = start.elapsed().as_secs_f64();
    ((1.35..=1.65).contains(&b.dimension) && secs < 30.0, format!("D = {:.4}, {secs:.2} s", b.dimension))
}

fn plateaus() -> Outcome {
    let s = CarpetSeries::new(2048, 1.0).unwrap();
    let mut detail = Vec::new();
    let mut ok = true;
    for (tau, q) in [(0.5, 2), (2.0 / 3.0, 3)] {
        let ratio = plateau_variance_ratio(&s.profile(tau, 8193).unwrap(), q);
        ok &= ratio >= 10.0;
        detail.push(format!("τ={tau:.4}: {ratio:.1}"));
    }
    (ok, detail.join(", "))
}

fn breathing_state(m: usize) -> SpectralState {
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    c[0] = Complex64::new(1.0, 0.0);
    c[1] = Complex64::new(0.5, 0.0);
    c[2] = Complex64::new(0.0, 0.3);
    let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    SpectralState::new("sine", c.into_iter().map(|z| z / n).collect())
}

fn moving_unitarity() -> Outcome {
    let ops = build_galerkin(&PhysicalConfig::default(), 64).unwrap();
    let traj = WallTrajectory::breathing(1.0, 0.1, 1.0);
    let mut drift = 0.0f64;
    propagate(&ops, &traj, &breathing_state(64), 0.0, 1e-3, 10_000, |_, s| {
        drift = drift.max((s.norm() - 1.0).abs());
    })
    .unwrap();
    (drift < 1e-8, format!("max norm drift {drift:.2e} over 10^4 steps"))
}

fn energy_rate() -> Outcome {
    let ops = build_galerkin(&PhysicalConfig::default(), 64).unwrap();
    let traj = WallTrajectory::breathing(1.0, 0.1, 1.0);
    let opts = RateOptions::default();
    let mut s = breathing_state(64);
    let dt = 1e-3;
    let mut worst = 0.0f64;
    for k in 1..=100 {
        for j in 0..100 {
            s = step_crank_nicolson(&ops, &traj, &s, ((k - 1) * 100 + j) as f64 * dt, dt).unwrap();
        }
        let t = k as f64 * 0.1;
        let (lhs, rhs) = energy_rate_check(&ops, &traj, &s, t, &opts).unwrap();
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1e-6));
    }
    (worst < 1e-3, format!("max relative mismatch {worst:.2e} at 100 times"))
}

fn adiabatic() -> Outcome {
    let ops = build_galerkin(&PhysicalConfig::default(), 32).unwrap();
    let traj = WallTrajectory::linear_expansion(1.0, 1e-3);
    let mut c = vec![Complex64::new(0.0, 0.0); 32];
    c[0] = Complex64::new(1.0, 0.0);
    let s0 = SpectralState::new("sine", c);
    let inv0 = ops.energy(&s0.coeffs, 1.0);
    let mut worst = 0.0f64;
    propagate(&ops, &traj, &s0, 0.0, 0.01, 10_000, |t, s| {
        let l = traj.width(t);
        worst = worst.max((ops.energy(&s.coeffs, l) * l * l / inv0 - 1.0).abs());
    })
    .unwrap();
    (worst < 1e-2, format!("max relative drift of E·l² {worst:.2e}"))
}

fn star_product() -> Outcome {
    let mut r = common::rng(10);
    let mut comm = 0.0f64;
    let mut unit = 0.0f64;
    for _ in 0..500 {
        let u = common::random_unitary(&mut r);
        let v = common::random_unitary(&mut r);
        let uv = star(&u, &v, 1.0);
        comm = comm.max(max_abs(&(uv.matrix() - star(&v, &u, 1.0).matrix())));
        unit = unit.max(max_abs(&(uv.matrix().adjoint() * uv.matrix() - Mat2::identity())));
    }
    let attract = (0..50).all(|_| {
        let u = common::random_unitary(&mut r);
        classify_minus_one(&star(&make_dirichlet(), &u, 1.0), DEFAULT_MINUS_ONE_TOL).count == 2
    });
    let (a1, a2) = (PI / 3.0, PI / 2.0);
    let w = star(&make_robin(a1).unwrap(), &make_robin(a2).unwrap(), 1.0);
    let want = make_robin(2.0 * (((a1 / 2.0).tan() + (a2 / 2.0).tan()) / 2.0).atan()).unwrap();
    let robin = max_abs(&(w.matrix() - want.matrix()));
    let pp = star(&make_pseudo_periodic(0.0).unwrap(), &make_pseudo_periodic(PI / 2.0).unwrap(), 1.0);
    let pp_ok = classify_minus_one(&pp, DEFAULT_MINUS_ONE_TOL).count == 2;
    (
        comm < 1e-12 && unit < 1e-12 && attract && robin < 1e-12 && pp_ok,
        format!("commutator {comm:.1e}, unitarity {unit:.1e}, attractor {attract}, robin mean {robin:.1e}, pseudo-periodic → −I {pp_ok}"),
    )
}

fn trotter() -> Outcome {
    let iv = Interval::new(0.0, 1.0).unwrap();
    let cfg = PhysicalConfig::default();
    let start = Instant::now();
    let dn = TrotterProblem::new(&make_dirichlet(), &make_neumann(), iv, &cfg, 64, bump(&iv, 4)).unwrap();
    let rep = convergence_report(&dn, 0.1, &[8, 32, 128, 256]).unwrap();
    let dn_secs = start.elapsed().as_secs_f64();
    let e: Vec<f64> = rep.rows.iter().map(|r| r.error).collect();
    let shown: Vec<String> = e.iter().map(|v| format!("{v:.3e}")).collect();
    let decreasing = e.windows(2).all(|w| w[1] < w[0]);
    let dn_ok = decreasing && e[3] < 1e-2 && dn_secs < 60.0;

    let start = Instant::now();
    let u = make_robin(PI / 3.0).unwrap();
    let v = make_robin(PI / 2.0).unwrap();
    let rr = TrotterProblem::new(&u, &v, iv, &cfg, 64, bump(&iv, 4)).unwrap();
    let rr_err = convergence_report(&rr, 0.1, &[256]).unwrap().rows[0].error;
    let rr_secs = start.elapsed().as_secs_f64();
    let rr_ok = rr_err < 1e-2 && rr_secs < 60.0;
    (
        dn_ok && rr_ok,
        format!(
            "D/N errors [{}] (decreasing {decreasing}, N=256 < 1e-2 {}), {dn_secs:.2} s; Robin/Robin {rr_err:.2e}, {rr_secs:.2} s",
            shown.join(", "),
            e[3] < 1e-2
        ),
    )
}

fn reflection() -> Outcome {
    let mut ok = true;
    for k in [0.1, 1.0, 7.5, 300.0] {
        ok &= reflection_phase(PI, k, 1.0).unwrap() == PI;
        ok &= reflection_phase(0.0, k, 1.0).unwrap() == 0.0;
    }
    let half = reflection_phase(PI / 2.0, 1.0, 1.0).unwrap();
    let gap = (half - PI / 2.0).abs();
    (ok && gap < 1e-12, format!("exact endpoints {ok}, β(π/2, 1) − π/2 = {gap:.1e}"))
}

fn quadratic_form() -> Outcome {
    let mut r = common::rng(13);
    let (a, b, l0) = (0.0, 1.0, 1.0);
    let cfg = PhysicalConfig::default();
    let (x, w) = gauss_legendre_on(16, a, b);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = make_robin(r.gen_range(-PI + 0.05..PI - 0.05)).unwrap();
        let (p, psi) = common::conforming_polynomial(&mut r, &u, a, b, l0);
        let mut t = Complex64::new(0.0, 0.0);
        let mut grad = 0.0;
        for (x, w) in x.iter().zip(&w) {
            t += p.value(*x).conj() * (-p.d2(*x)) * (cfg.kinetic_prefactor() * w);
            grad += p.d1(*x).norm_sqr() * w;
        }
        let g = gamma_value(&form_descriptor(&u, l0), &Vec2::new(psi[0], psi[1]), 1e-9).unwrap();
        let form = cfg.kinetic_prefactor() * (grad + g);
        worst = worst.max((t - form).norm());
    }
    (worst < 1e-6, format!("max |⟨ψ|Tψ⟩ − form| {worst:.2e} over 20 Robin conditions"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("dirichlet spectrum", dirichlet_spectrum),
        ("airy table", airy_table),
        ("theta quasi-periodicity", theta_quasi_periodicity),
        ("revivals", revivals),
        ("fractal dimension", fractal_dimension),
        ("rational-time plateaus", plateaus),
        ("moving walls unitarity", moving_unitarity),
        ("energy rate", energy_rate),
        ("adiabatic invariant", adiabatic),
        ("star product", star_product),
        ("trotter convergence", trotter),
        ("reflection phase", reflection),
        ("quadratic-form identity", quadratic_form),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = match std::panic::catch_unwind(f) {
            Ok(o) => o,
            Err(_) => (false, "panicked".to_string()),
        };
        if !ok {
            failed += 1;
        }
        println!("{} [{:>2}] {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
