//! Theta-series evolution of the flat initial state in a Dirichlet box:
//! revivals, rational-time plateaus and the fractal profile at irrational
//! times. Coordinates are ξ = x/l − 1/2 ∈ [−1/2, 1/2] and τ = t·4πħ/(2ml²)·…
//! normalized so the series reads Σ d_n e^{i2πξ(n+½) − iπτ(n+½)²}.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{GridState, Interval};

/// Coefficient of the flat state on the n-th Dirichlet mode.
pub fn expansion_coefficients_c(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("mode index starts at 1".into()));
    }
    Ok(if n % 2 == 1 { 2.0 * 2f64.sqrt() / (n as f64 * PI) } else { 0.0 })
}

/// ψ₁(x) for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / x;
    let r2 = r * r;
    acc + r + 0.5 * r2 + r * r2 * (1.0 / 6.0 - r2 * (1.0 / 30.0 - r2 * (1.0 / 42.0 - r2 * (1.0 / 30.0 - r2 * 5.0 / 66.0))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarpetSeries {
    n_max: usize,
    l: f64,
    d_coeffs: Vec<f64>,
}

pub const DEFAULT_N_MAX: usize = 2048;

impl CarpetSeries {
    pub fn new(n_max: usize, l: f64) -> Result<Self> {
        Self::with_tail_tolerance(n_max, l, 1e-2 / l)
    }

    /// Fails if the discarded weight Σ_{omitted}|d_n|² reaches `tol`.
    pub fn with_tail_tolerance(n_max: usize, l: f64, tol: f64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::Domain("n_max must be positive".into()));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::Domain(format!("box width must be positive, got {l}")));
        }
        let pre = 1.0 / (PI * l.sqrt());
        let d_coeffs = (0..2 * n_max)
            .map(|j| {
                let n = j as i64 - n_max as i64;
                let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                pre * sign / (n as f64 + 0.5)
            })
            .collect();
        let s = CarpetSeries { n_max, l, d_coeffs };
        let tail = s.tail_bound();
        if !(tail < tol) {
            return Err(Error::Domain(format!("truncation tail {tail:e} exceeds tolerance {tol:e}")));
        }
        Ok(s)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }
    pub fn width(&self) -> f64 {
        self.l
    }
    /// d_n for n = −n_max..n_max−1.
    pub fn d_coeffs(&self) -> &[f64] {
        &self.d_coeffs
    }
    pub fn index(&self, j: usize) -> i64 {
        j as i64 - self.n_max as i64
    }

    /// Σ over the omitted |n + ½| > n_max of |d_n|².
    pub fn tail_bound(&self) -> f64 {
        2.0 / (PI * PI * self.l) * trigamma(self.n_max as f64 + 0.5)
    }

    /// Sup of |ϑ_full − ϑ_truncated| at ξ by summation by parts.
    pub fn pointwise_tail_bound(&self, xi: f64) -> f64 {
        2.0 / (PI * self.l.sqrt() * (self.n_max as f64 + 0.5) * (PI * xi).cos().abs())
    }

    /// d_n e^{−iπτ(n+½)²}, with the τ-phase reduced exactly.
    pub fn timed_coeffs(&self, tau: f64) -> Vec<Complex64> {
        let whole = tau.floor();
        let f = tau - whole;
        let global = EIGHTH_ROOTS[(whole.rem_euclid(8.0)) as usize];
        let quarter = Complex64::from_polar(1.0, -0.25 * PI * f);
        self.d_coeffs
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let n = self.index(j) as f64;
                let m = 0.5 * n * (n + 1.0);
                let turns = frac_of_product(f, m);
                Complex64::from_polar(*d, -TAU * turns) * quarter * global
            })
            .collect()
    }

    fn sum_at(&self, coeffs: &[Complex64], xi: f64) -> Complex64 {
        let start = -(self.n_max as f64) + 0.5;
        let step = Complex64::from_polar(1.0, TAU * xi);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut w = Complex64::new(1.0, 0.0);
        for (j, c) in coeffs.iter().enumerate() {
            if j % 64 == 0 {
                w = Complex64::from_polar(1.0, TAU * frac_of_product(xi, start + j as f64));
            }
            acc += c * w;
            w *= step;
        }
        acc
    }

    pub fn theta(&self, xi: f64, tau: f64) -> Result<Complex64> {
        check_xi(xi)?;
        Ok(self.sum_at(&self.timed_coeffs(tau), xi))
    }

    /// ϑ at n uniform points of [−1/2, 1/2], endpoints included.
    pub fn theta_grid(&self, tau: f64, n_points: usize) -> Result<Vec<(f64, Complex64)>> {
        if n_points < 2 {
            return Err(Error::Domain("need at least two points".into()));
        }
        let grid = xi_interval();
        let coeffs = self.timed_coeffs(tau);
        Ok((0..n_points)
            .into_par_iter()
            .map(|i| {
                let xi = grid.node(i, n_points);
                (xi, self.sum_at(&coeffs, xi))
            })
            .collect())
    }

    /// |ϑ|² sampled on the ξ-grid.
    pub fn profile(&self, tau: f64, n_points: usize) -> Result<GridState> {
        if n_points < 16 {
            return Err(Error::Domain(format!("profile needs at least 16 points, got {n_points}")));
        }
        let vals = self.theta_grid(tau, n_points)?;
        GridState::new(xi_interval(), vals.iter().map(|(_, z)| Complex64::new(z.norm_sqr(), 0.0)).collect())
    }

    /// |⟨ϑ(0)|ϑ(τ)⟩|/‖ϑ(0)‖² in coefficient space.
    pub fn revival_fidelity(&self, tau: f64) -> f64 {
        let timed = self.timed_coeffs(tau);
        let mut overlap = Complex64::new(0.0, 0.0);
        let mut norm = 0.0;
        for (d, c) in self.d_coeffs.iter().zip(&timed) {
            overlap += c * *d;
            norm += d * d;
        }
        overlap.norm() / norm
    }
}

const EIGHTH_ROOTS: [Complex64; 8] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(0.0, -1.0),
    Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
    Complex64::new(-1.0, 0.0),
    Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    Complex64::new(0.0, 1.0),
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
];

/// Fractional part of a·b, carrying the rounding error of the product.
fn frac_of_product(a: f64, b: f64) -> f64 {
    let p = a * b;
    let e = a.mul_add(b, -p);
    let r = (p - p.floor()) + e;
    r - r.floor()
}

fn xi_interval() -> Interval {
    Interval::new(-0.5, 0.5).expect("fixed interval")
}

fn check_xi(xi: f64) -> Result<()> {
    if !(-0.5..=0.5).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [-1/2, 1/2]")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub dimension: f64,
    pub flat: bool,
    pub scales: Vec<u32>,
    pub counts: Vec<u64>,
}

/// Box-counting dimension of the graph of a real profile, after rescaling
/// the graph to the unit square. Column s at scale 2^k covers samples
/// between consecutive partition indices, endpoints shared.
pub fn box_counting_dimension(profile: &GridState, scales: std::ops::RangeInclusive<u32>) -> Result<BoxCount> {
    let (lo, hi) = (*scales.start(), *scales.end());
    if hi < lo + 4 {
        return Err(Error::Domain(format!("scales 2^{lo}..2^{hi} span fewer than 4 octaves")));
    }
    let n = profile.len();
    if n < (1usize << hi) {
        return Err(Error::Domain(format!("profile of {n} points is shorter than 2^{hi}")));
    }
    let y: Vec<f64> = profile.samples().iter().map(|z| z.re).collect();
    let (ymin, ymax) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let scales: Vec<u32> = (lo..=hi).collect();
    if !(ymax - ymin > 1e-12 * ymax.abs().max(1.0)) {
        return Ok(BoxCount { dimension: 1.0, flat: true, counts: scales.iter().map(|s| 1u64 << s).collect(), scales });
    }
    let y: Vec<f64> = y.iter().map(|v| (v - ymin) / (ymax - ymin)).collect();
    let counts: Vec<u64> = scales
        .iter()
        .map(|&s| {
            let nb = 1usize << s;
            let top = (nb - 1) as f64;
            let edge = |c: usize| ((c as f64) * (n - 1) as f64 / nb as f64).round() as usize;
            (0..nb)
                .map(|c| {
                    let seg = &y[edge(c)..=edge(c + 1)];
                    let (mn, mx) = seg.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
                    ((mx * nb as f64).floor().min(top) - (mn * nb as f64).floor().min(top)) as u64 + 1
                })
                .sum()
        })
        .collect();
    let xs: Vec<f64> = scales.iter().map(|s| *s as f64 * 2f64.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (*c as f64).ln()).collect();
    Ok(BoxCount { dimension: slope(&xs, &ys), flat: false, scales, counts })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Between-window over mean within-window variance of a profile split into
/// 4q equal ξ-windows.
pub fn plateau_variance_ratio(profile: &GridState, q: usize) -> f64 {
    let nw = 4 * q;
    let iv = profile.interval();
    let n = profile.len();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); nw];
    for (i, z) in profile.samples().iter().enumerate() {
        let x = (iv.node(i, n) - iv.a()) / iv.width();
        let k = ((x * nw as f64).floor() as usize).min(nw - 1);
        buckets[k].push(z.re);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / v.len() as f64
    };
    let means: Vec<f64> = buckets.iter().map(|b| mean(b)).collect();
    let within = buckets.iter().map(|b| var(b)).sum::<f64>() / nw as f64;
    var(&means) / within
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_function, trapezoid_inner_product};
    use proptest::prelude::*;

    #[test]
    fn flat_state_coefficients() {
        assert!((expansion_coefficients_c(1).unwrap() - 0.900316).abs() < 1e-6);
        assert_eq!(expansion_coefficients_c(2).unwrap(), 0.0);
        assert!(expansion_coefficients_c(0).is_err());
        let s: f64 = (1..=100_000u64).map(|n| expansion_coefficients_c(n).unwrap().powi(2)).sum();
        assert!((s - 1.0).abs() < 1e-4);
    }

    #[test]
    fn trigamma_values() {
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-13);
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn stored_weight_plus_tail_is_norm() {
        for l in [1.0, 2.5] {
            let s = CarpetSeries::new(300, l).unwrap();
            let w: f64 = s.d_coeffs().iter().map(|d| d * d).sum();
            assert!((w + s.tail_bound() - 1.0 / l).abs() < 1e-14);
        }
        assert!(CarpetSeries::with_tail_tolerance(10, 1.0, 1e-3).is_err());
    }

    #[test]
    fn initial_profile_is_flat() {
        let s = CarpetSeries::new(DEFAULT_N_MAX, 1.0).unwrap();
        let series = s.timed_coeffs(0.0);
        // composite Gauss-Legendre resolves the edge layer that trapezoid sums smear
        let panels = 128;
        let mut dist = 0.0;
        for p in 0..panels {
            let a = -0.5 + p as f64 / panels as f64;
            let (x, w) = crate::quadrature::gauss_legendre_on(120, a, a + 1.0 / panels as f64);
            for (x, w) in x.iter().zip(&w) {
                dist += w * (s.sum_at(&series, *x).norm() - 1.0).powi(2);
            }
        }
        assert!(dist.sqrt() <= s.tail_bound().sqrt());
        for (xi, z) in s.theta_grid(0.0, 4097).unwrap().iter().filter(|(x, _)| x.abs() <= 0.45) {
            let r = s.pointwise_tail_bound(*xi);
            assert!((z.norm_sqr() - 1.0).abs() <= 3.0 * (2.0 * r + r * r), "xi = {xi}");
        }
    }

    #[test]
    fn quasi_periodicity_at_dyadic_times() {
        let s = CarpetSeries::new(DEFAULT_N_MAX, 1.0).unwrap();
        let shift = Complex64::from_polar(1.0, -0.25 * PI);
        for (xi, tau) in [(0.1, 0.25), (-0.37, 3.0 / 1024.0), (0.5, 1234.0 / 4096.0)] {
            let a = s.theta(xi, tau).unwrap();
            let b = s.theta(xi, tau + 1.0).unwrap();
            assert!((b - shift * a).norm() < 1e-12);
        }
        assert!(s.theta(0.6, 0.0).is_err());
    }

    #[test]
    fn revivals() {
        let s = CarpetSeries::new(DEFAULT_N_MAX, 1.0).unwrap();
        for tau in [1.0, 2.0, 7.0] {
            assert!((s.revival_fidelity(tau) - 1.0).abs() < 1e-12);
        }
        assert!(s.revival_fidelity(0.5) < 1.0);
        let p0 = s.profile(0.0, 257).unwrap();
        let p1 = s.profile(1.0, 257).unwrap();
        for (a, b) in p0.samples().iter().zip(p1.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn half_time_fidelity_matches_direct_sum() {
        let s = CarpetSeries::new(64, 1.0).unwrap();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut nrm = 0.0;
        for (j, d) in s.d_coeffs().iter().enumerate() {
            let k = s.index(j) as f64 + 0.5;
            acc += Complex64::from_polar(d * d, -PI * 0.5 * k * k);
            nrm += d * d;
        }
        assert!((s.revival_fidelity(0.5) - acc.norm() / nrm).abs() < 1e-13);
    }

    #[test]
    fn box_counting_reference_graphs() {
        let iv = Interval::new(-0.5, 0.5).unwrap();
        let flat = sample_function(iv, 4097, |_| Complex64::new(1.0, 0.0)).unwrap();
        let b = box_counting_dimension(&flat, 4..=12).unwrap();
        assert!(b.flat);
        assert_eq!(b.dimension, 1.0);
        let line = sample_function(iv, 1 << 16, |x| Complex64::new(x, 0.0)).unwrap();
        let b = box_counting_dimension(&line, 4..=12).unwrap();
        assert!((b.dimension - 1.0).abs() < 0.05);
        assert!(box_counting_dimension(&line, 4..=7).is_err());
        assert!(box_counting_dimension(&flat, 4..=13).is_err());
    }

    #[test]
    fn rational_time_plateaus() {
        let s = CarpetSeries::new(DEFAULT_N_MAX, 1.0).unwrap();
        for (tau, q) in [(0.5, 2), (2.0 / 3.0, 3)] {
            let p = s.profile(tau, 8193).unwrap();
            assert!(plateau_variance_ratio(&p, q) >= 10.0);
        }
    }

    #[test]
    fn profile_weight_is_conserved() {
        let s = CarpetSeries::new(256, 1.0).unwrap();
        let p0 = s.theta_grid(0.0, 4097).unwrap();
        let p = s.theta_grid(0.3125, 4097).unwrap();
        let iv = Interval::new(-0.5, 0.5).unwrap();
        let g0 = GridState::new(iv, p0.iter().map(|v| v.1).collect()).unwrap();
        let g = GridState::new(iv, p.iter().map(|v| v.1).collect()).unwrap();
        let a = trapezoid_inner_product(&g0, &g0).unwrap().re;
        let b = trapezoid_inner_product(&g, &g).unwrap().re;
        assert!((a - b).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn per_term_quasi_periodicity(n in -100_000i64..100_000, k in 0u64..(1u64 << 32)) {
            let tau = k as f64 / 4294967296.0;
            let nf = n as f64;
            let m = 0.5 * nf * (nf + 1.0);
            let phase = |t: f64| {
                let whole = t.floor();
                let f = t - whole;
                EIGHTH_ROOTS[whole.rem_euclid(8.0) as usize]
                    * Complex64::from_polar(1.0, -TAU * frac_of_product(f, m) - 0.25 * PI * f)
            };
            prop_assert_eq!((n * (n + 1)).rem_euclid(2), 0);
            let lhs = phase(tau + 1.0);
            let rhs = Complex64::from_polar(1.0, -0.25 * PI) * phase(tau);
            prop_assert!((lhs - rhs).norm() < 1e-15);
            if n.abs() < 50 {
                let s = nf + 0.5;
                let direct = Complex64::from_polar(1.0, -PI * tau * s * s);
                prop_assert!((phase(tau) - direct).norm() < 1e-11);
            }
        }

        #[test]
        fn coefficient_norm_is_time_independent(tau in -20.0f64..20.0) {
            let s = CarpetSeries::new(128, 1.3).unwrap();
            let a: f64 = s.timed_coeffs(tau).iter().map(|c| c.norm_sqr()).sum();
            let b: f64 = s.d_coeffs().iter().map(|d| d * d).sum();
            prop_assert!((a - b).abs() < 1e-14);
        }

        #[test]
        fn fidelity_has_unit_period(k in 0u64..(1u64 << 40)) {
            let tau = k as f64 / (1u64 << 36) as f64;
            let s = CarpetSeries::new(512, 1.0).unwrap();
            prop_assert!((s.revival_fidelity(tau) - s.revival_fidelity(tau + 1.0)).abs() < 1e-12);
        }

        #[test]
        fn profile_is_even(xi in 0.0f64..0.5, k in 0u64..(1u64 << 20)) {
            let tau = k as f64 / (1u64 << 20) as f64 * 3.0;
            let s = CarpetSeries::new(512, 1.0).unwrap();
            let a = s.theta(xi, tau).unwrap().norm();
            let b = s.theta(-xi, tau).unwrap().norm();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
