mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use qwalls::boundary::{bc_residual, make_dirichlet, make_robin};
use qwalls::model::{trapezoid_inner_product, Interval, PhysicalConfig};
use qwalls::spectral::{lowest_modes, scan_dispersion, solve_spectrum, Branch, SpectrumOptions};

#[test]
fn random_conditions_give_orthonormal_modes() {
    let mut r = common::rng(11);
    let iv = Interval::new(-0.4, 0.9).unwrap();
    let cfg = PhysicalConfig::new(1.0, 0.5, 0.8).unwrap();
    for _ in 0..40 {
        let u = common::random_unitary(&mut r);
        let modes = lowest_modes(&u, &iv, &cfg, 10, &SpectrumOptions::default()).unwrap();
        assert_eq!(modes.len(), 10);
        for (i, a) in modes.iter().enumerate() {
            assert!(bc_residual(&u, &a.trace(cfg.l0)) < 1e-8);
            assert!((a.norm - 1.0).abs() < 1e-10);
            for (j, b) in modes.iter().enumerate() {
                let g = a.overlap(b).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-8, "gram[{i}][{j}] = {g}");
            }
        }
    }
}

#[test]
fn closed_form_overlaps_match_trapezoid() {
    let mut r = common::rng(5);
    let iv = Interval::of_width(1.0).unwrap();
    let cfg = PhysicalConfig::default();
    let u = common::random_unitary(&mut r);
    let v = common::random_unitary(&mut r);
    let mu = lowest_modes(&u, &iv, &cfg, 5, &SpectrumOptions::default()).unwrap();
    let mv = lowest_modes(&v, &iv, &cfg, 5, &SpectrumOptions::default()).unwrap();
    for a in &mu {
        let ga = a.sample(20001).unwrap();
        for b in &mv {
            let gb = b.sample(20001).unwrap();
            let t = trapezoid_inner_product(&ga, &gb).unwrap();
            assert!((a.overlap(b).unwrap() - t).norm() < 1e-6);
        }
    }
}

#[test]
fn at_most_two_bound_states() {
    let mut r = common::rng(42);
    let iv = Interval::of_width(1.0).unwrap();
    let cfg = PhysicalConfig::default();
    for _ in 0..200 {
        let u = common::random_unitary(&mut r);
        let modes = solve_spectrum(&u, &iv, &cfg, 30.0, &SpectrumOptions::default()).unwrap();
        let neg = modes.iter().filter(|m| m.energy < 0.0).count();
        assert!(neg <= 2);
        for m in &modes {
            assert!(bc_residual(&u, &m.trace(cfg.l0)) < 1e-8);
            match m.branch {
                Branch::Oscillatory => assert!((m.energy - m.k_or_kappa.powi(2)).abs() <= 1e-12 * m.energy),
                Branch::Evanescent => assert!((m.energy + m.k_or_kappa.powi(2)).abs() <= 1e-12 * m.energy.abs()),
                Branch::Linear => assert_eq!(m.energy, 0.0),
            }
        }
    }
}

#[test]
fn robin_approaches_dirichlet() {
    let iv = Interval::of_width(1.0).unwrap();
    let cfg = PhysicalConfig::default();
    let u = make_robin(PI - 1e-3).unwrap();
    let modes = solve_spectrum(&u, &iv, &cfg, 100.0, &SpectrumOptions::default()).unwrap();
    let pos: Vec<_> = modes.iter().filter(|m| m.energy > 0.0).collect();
    for n in 1..=3 {
        let e = (n as f64 * PI).powi(2);
        assert!(((pos[n - 1].energy - e) / e).abs() < 1e-2);
    }
}

#[test]
fn phase_counting_agrees_with_determinant_scan() {
    let mut r = common::rng(7);
    let iv = Interval::of_width(1.3).unwrap();
    let cfg = PhysicalConfig::default();
    for _ in 0..30 {
        let u = common::random_unitary(&mut r);
        let kmax = 12.0 * PI / iv.width();
        let modes = solve_spectrum(&u, &iv, &cfg, kmax * kmax, &SpectrumOptions::default()).unwrap();
        let ks: Vec<f64> = modes.iter().filter(|m| m.branch == Branch::Oscillatory).map(|m| m.k_or_kappa).collect();
        let scan = scan_dispersion(&u, &iv, &cfg, kmax, PI / (16.0 * iv.width()));
        // the scan sees each distinct root once
        let mut distinct = ks.clone();
        distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-7);
        assert_eq!(scan.roots.len(), distinct.len(), "{:?} vs {:?}", scan.roots, distinct);
        for (a, b) in scan.roots.iter().zip(&distinct) {
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
    }
}

#[test]
fn dirichlet_twenty_levels() {
    let iv = Interval::of_width(1.0).unwrap();
    let cfg = PhysicalConfig::default();
    let emax = (20.5 * PI).powi(2);
    let modes = solve_spectrum(&make_dirichlet(), &iv, &cfg, emax, &SpectrumOptions::default()).unwrap();
    assert_eq!(modes.len(), 20);
    for (j, m) in modes.iter().enumerate() {
        let e = ((j + 1) as f64 * PI).powi(2);
        assert!(((m.energy - e) / e).abs() < 1e-8);
        let v = m.value(0.5 / (j + 1) as f64);
        assert!((v.norm() - 2f64.sqrt()).abs() < 1e-9);
        let _ = Complex64::new(0.0, 0.0);
    }
}
