//! Free eigenproblem −(ħ²/2m)u″ = E u on an interval under an arbitrary
//! boundary unitary, plus the Airy problem of a box in a uniform field.

pub mod airy;
mod local;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::{bc_residual, BoundaryTrace, BoundaryUnitary};
use crate::error::{Error, Result};
use crate::forms::form_descriptor;
use crate::linalg::{self, Mat2, Vec2, I};
use crate::model::{sample_function, GridState, Interval, PhysicalConfig};
use crate::quadrature::gauss_legendre_on;

pub use airy::{airy_ai, airy_bi, airy_quantization, solve_airy_levels, solve_airy_levels_with, AiryScan};
use local::LocalPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Oscillatory,
    Linear,
    Evanescent,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Oscillatory => "oscillatory",
            Branch::Linear => "linear",
            Branch::Evanescent => "evanescent",
        }
    }
}

/// Normalized eigenfunction.
///
/// `c1`, `c2` are the coefficients of e^{ikx}, e^{−ikx} (oscillatory),
/// of cosh κ(x−x̄), sinh κ(x−x̄) about the midpoint x̄ (evanescent), or of
/// 1, x (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    pub branch: Branch,
    pub k_or_kappa: f64,
    pub energy: f64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub norm: f64,
    interval: Interval,
    pair: LocalPair,
    alpha: Complex64,
    beta: Complex64,
}

impl EigenMode {
    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Signed wavenumber: k for E > 0, −κ for E < 0.
    pub fn signed_wavenumber(&self) -> f64 {
        self.pair.q
    }

    pub fn value(&self, x: f64) -> Complex64 {
        let v = self.pair.eval(x - self.interval.center());
        self.alpha * v[0] + self.beta * v[1]
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        let v = self.pair.eval(x - self.interval.center());
        self.alpha * v[2] + self.beta * v[3]
    }

    pub fn trace(&self, l0: f64) -> BoundaryTrace {
        let (a, b) = (self.interval.a(), self.interval.b());
        BoundaryTrace {
            psi: Vec2::new(self.value(a), self.value(b)),
            dpsi: Vec2::new(-self.derivative(a) * l0, self.derivative(b) * l0),
        }
    }

    pub fn sample(&self, n: usize) -> Result<GridState> {
        sample_function(self.interval, n, |x| self.value(x))
    }

    /// ⟨self|other⟩ in closed form.
    pub fn overlap(&self, other: &EigenMode) -> Result<Complex64> {
        if self.interval != other.interval {
            return Err(Error::GridMismatch("modes live on different intervals".into()));
        }
        let (lu, lv) = (self.pair.lambda(), other.pair.lambda());
        let h = self.pair.h;
        let scale = lu.abs() + lv.abs() + 1.0 / (h * h);
        if (lu - lv).abs() > 1e-6 * scale {
            // Green's identity: (λ_u − λ_v)⟨u|v⟩ = [ū v′ − ū′ v]_a^b
            let (a, b) = (self.interval.a(), self.interval.b());
            let w = |x: f64| self.value(x).conj() * other.derivative(x) - self.derivative(x).conj() * other.value(x);
            return Ok((w(b) - w(a)) / (lu - lv));
        }
        if self.pair.q == other.pair.q {
            let (nf, ng) = self.pair.norms();
            return Ok(self.alpha.conj() * other.alpha * nf + self.beta.conj() * other.beta * ng);
        }
        let n = (2.0 * self.pair.q.abs().max(other.pair.q.abs()) * h) as usize + 60;
        let (x, w) = gauss_legendre_on(n, self.interval.a(), self.interval.b());
        Ok(x.iter().zip(&w).map(|(x, w)| self.value(*x).conj() * other.value(*x) * *w).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    /// Coarse scan step in units of π/l.
    pub step_fraction: f64,
    /// Tolerance for the boundary-condition check of each mode.
    pub bc_tol: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { step_fraction: 1.0 / 16.0, bc_tol: 1e-8 }
    }
}

/// Boundary data of the even/odd solution pair at signed wavenumber q,
/// as columns: P maps coefficients to Ψ, Q to Ψ′.
fn trace_matrices(pair: &LocalPair, l0: f64) -> (Mat2, Mat2) {
    let lo = pair.eval(-pair.h);
    let hi = pair.eval(pair.h);
    let c = |x: f64| Complex64::new(x, 0.0);
    let p = Mat2::new(c(lo[0]), c(lo[1]), c(hi[0]), c(hi[1]));
    let q = Mat2::new(c(-lo[2] * l0), c(-lo[3] * l0), c(hi[2] * l0), c(hi[3] * l0));
    (p, q)
}

fn system_matrix(u: &Mat2, p: &Mat2, q: &Mat2) -> Mat2 {
    let id = linalg::identity();
    (id + u) * q * I - (id - u) * p
}

/// Determinant of the homogeneous system for the plane-wave (or exponential,
/// or affine) ansatz at wavenumber `k`; vanishes exactly at eigen-wavenumbers.
pub fn dispersion_determinant(
    u: &BoundaryUnitary,
    interval: &Interval,
    config: &PhysicalConfig,
    branch: Branch,
    k: f64,
) -> Complex64 {
    let (a, b, l0) = (interval.a(), interval.b(), config.l0);
    let h = 0.5 * interval.width();
    let (p, q) = match branch {
        Branch::Oscillatory => {
            let e = |x: f64| Complex64::from_polar(1.0, k * x);
            let (ea, eb) = (e(a), e(b));
            let p = Mat2::new(ea, ea.inv(), eb, eb.inv());
            let ik = I * k * l0;
            let q = Mat2::new(-ik * ea, ik * ea.inv(), ik * eb, -ik * eb.inv());
            (p, q)
        }
        Branch::Evanescent => {
            let (ep, em) = ((k * h).exp(), (-k * h).exp());
            let c = |x: f64| Complex64::new(x, 0.0);
            let kl = k * l0;
            let p = Mat2::new(c(em), c(ep), c(ep), c(em));
            let q = Mat2::new(c(-kl * em), c(kl * ep), c(kl * ep), c(-kl * em));
            (p, q)
        }
        Branch::Linear => {
            let c = |x: f64| Complex64::new(x, 0.0);
            (Mat2::new(c(1.0), c(a), c(1.0), c(b)), Mat2::new(c(0.0), c(-l0), c(0.0), c(l0)))
        }
    };
    linalg::det(&system_matrix(u.matrix(), &p, &q))
}

/// Grid samples of the determinant with refined roots.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionScan {
    pub k_grid: Vec<f64>,
    pub det_values: Vec<Complex64>,
    pub roots: Vec<f64>,
    pub tolerance: f64,
}

/// Scans |det| for oscillatory roots in (0, k_max], refining each local
/// minimum by golden section and keeping those that reach the tolerance.
pub fn scan_dispersion(
    u: &BoundaryUnitary,
    interval: &Interval,
    config: &PhysicalConfig,
    k_max: f64,
    step: f64,
) -> DispersionScan {
    let n = (k_max / step).ceil() as usize + 1;
    let k_grid: Vec<f64> = (1..=n).map(|j| j as f64 * step).collect();
    let d = |k: f64| dispersion_determinant(u, interval, config, Branch::Oscillatory, k);
    let det_values: Vec<Complex64> = k_grid.iter().map(|&k| d(k)).collect();
    let mut mags: Vec<f64> = det_values.iter().map(|z| z.norm()).collect();
    let abs = mags.clone();
    mags.sort_by(|a, b| a.total_cmp(b));
    let median = mags[mags.len() / 2];
    let tolerance = 1e-8 * median.max(f64::MIN_POSITIVE);
    let mut roots: Vec<f64> = Vec::new();
    for j in 0..n {
        let left = if j == 0 { f64::INFINITY } else { abs[j - 1] };
        let right = if j + 1 == n { f64::INFINITY } else { abs[j + 1] };
        if abs[j] <= left && abs[j] <= right {
            let lo = if j == 0 { 0.5 * k_grid[0] } else { k_grid[j - 1] };
            let hi = if j + 1 == n { k_grid[j] + step } else { k_grid[j + 1] };
            let r = golden_section(|k| d(k).norm(), lo, hi);
            if d(r).norm() <= tolerance && r <= k_max && roots.last().is_none_or(|&p| (r - p).abs() > 1e-9 * r) {
                roots.push(r);
            }
        }
    }
    DispersionScan { k_grid, det_values, roots, tolerance }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// Eigenphase data of the mismatch unitary U†S(q); an eigenvalue exists at
/// q exactly when an eigenphase of the mismatch crosses 0 mod 2π.
#[derive(Debug, Clone, Copy)]
struct PhaseSample {
    q: f64,
    phase_sum: f64,
    det: Complex64,
}

struct Problem<'a> {
    u: &'a BoundaryUnitary,
    interval: Interval,
    config: PhysicalConfig,
    h: f64,
    bc_tol: f64,
}

impl Problem<'_> {
    fn pair(&self, q: f64) -> LocalPair {
        LocalPair { q, h: self.h }
    }

    fn sample(&self, q: f64) -> PhaseSample {
        let (p, qm) = trace_matrices(&self.pair(q), self.config.l0);
        let s = (p - qm * I) * linalg::inverse(&(p + qm * I)).expect("P + iQ is invertible for real q");
        let v = self.u.matrix().adjoint() * s;
        let ph = linalg::unitary_phases_positive(&v);
        PhaseSample { q, phase_sum: ph[0] + ph[1], det: linalg::det(&v) }
    }

    /// Number of eigenphase wraps through 0 between two samples, or None if
    /// the samples are too far apart to tell.
    fn wraps(a: &PhaseSample, b: &PhaseSample) -> Option<i64> {
        let advance = (b.det / a.det).arg();
        if advance.abs() > 0.5 * PI {
            return None;
        }
        let w = (advance - (b.phase_sum - a.phase_sum)) / TAU;
        let r = w.round();
        if (w - r).abs() > 0.1 {
            return None;
        }
        Some(r as i64)
    }

    fn width_floor(&self, q: f64) -> f64 {
        1e-13 * q.abs().max(1.0 / self.h)
    }

    fn roots_in(&self, a: PhaseSample, b: PhaseSample, depth: usize, out: &mut Vec<(f64, usize)>) -> Result<()> {
        let w = Self::wraps(&a, &b);
        if w == Some(0) {
            return Ok(());
        }
        if w == Some(1) {
            out.push((self.bisect(a, b)?, 1));
            return Ok(());
        }
        if b.q - a.q <= self.width_floor(a.q) || depth > 200 {
            match w {
                Some(m) if m > 0 => out.push((0.5 * (a.q + b.q), m as usize)),
                Some(_) => {}
                None => return Err(Error::RootNotConverged { lo: a.q, hi: b.q }),
            }
            return Ok(());
        }
        let mid = self.sample(0.5 * (a.q + b.q));
        self.roots_in(a, mid, depth + 1, out)?;
        self.roots_in(mid, b, depth + 1, out)
    }

    fn bisect(&self, mut a: PhaseSample, mut b: PhaseSample) -> Result<f64> {
        for _ in 0..400 {
            let qm = 0.5 * (a.q + b.q);
            if b.q - a.q <= 4.0 * f64::EPSILON * qm.abs().max(1e-3 / self.h) || qm <= a.q || qm >= b.q {
                return Ok(qm);
            }
            let m = self.sample(qm);
            match Self::wraps(&a, &m) {
                Some(1) => b = m,
                Some(0) => a = m,
                _ => return Err(Error::RootNotConverged { lo: a.q, hi: b.q }),
            }
        }
        Err(Error::RootNotConverged { lo: a.q, hi: b.q })
    }

    fn scan(&self, lo: f64, hi: f64, step: f64, out: &mut Vec<(f64, usize)>) -> Result<()> {
        if hi <= lo {
            return Ok(());
        }
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let mut prev = self.sample(lo);
        for j in 1..=n {
            let q = if j == n { hi } else { lo + (hi - lo) * j as f64 / n as f64 };
            let next = self.sample(q);
            self.roots_in(prev, next, 0, out)?;
            prev = next;
        }
        Ok(())
    }

    fn build_modes(&self, q: f64, mult: usize) -> Result<Vec<EigenMode>> {
        let pair = self.pair(q);
        let (p, qm) = trace_matrices(&pair, self.config.l0);
        let sys = system_matrix(self.u.matrix(), &p, &qm);
        let vs = linalg::right_singular_vectors(&sys);
        let (nf, ng) = pair.norms();
        let metric_norm = |c: &Vec2| (c[0].norm_sqr() * nf + c[1].norm_sqr() * ng).sqrt();
        let first = vs[0];
        let mut coeffs = vec![first];
        if mult >= 2 {
            coeffs.push(Vec2::new(first[1].conj() * ng, -first[0].conj() * nf));
        }
        let mut modes = Vec::new();
        for c in coeffs {
            let c = c / Complex64::new(metric_norm(&c), 0.0);
            let (alpha, beta) = fix_phase(c[0], c[1], nf, ng);
            let mode = self.assemble(pair, alpha, beta);
            let residual = bc_residual(self.u, &mode.trace(self.config.l0));
            if !(residual <= self.bc_tol) {
                return Err(Error::BoundaryViolation { k: q, residual });
            }
            modes.push(mode);
        }
        Ok(modes)
    }

    fn assemble(&self, pair: LocalPair, alpha: Complex64, beta: Complex64) -> EigenMode {
        let q = pair.q;
        let kin = self.config.kinetic_prefactor();
        let xc = self.interval.center();
        let (branch, kk, energy, c1, c2) = if q > 0.0 {
            let ph = Complex64::from_polar(1.0, -q * xc);
            let ik2 = I * (2.0 * q);
            (
                Branch::Oscillatory,
                q,
                kin * q * q,
                (alpha * 0.5 + beta / ik2) * ph,
                (alpha * 0.5 - beta / ik2) * ph.inv(),
            )
        } else if q < 0.0 {
            let k = -q;
            let scale = (-k * self.h).exp();
            (Branch::Evanescent, k, -kin * k * k, alpha * scale, beta * scale / k)
        } else {
            (Branch::Linear, 0.0, 0.0, alpha - beta * xc, beta)
        };
        let (nf, ng) = pair.norms();
        let norm = (alpha.norm_sqr() * nf + beta.norm_sqr() * ng).sqrt();
        EigenMode { branch, k_or_kappa: kk, energy, c1, c2, norm, interval: self.interval, pair, alpha, beta }
    }
}

/// Rotates the global phase so the component of larger weight is real positive.
fn fix_phase(alpha: Complex64, beta: Complex64, nf: f64, ng: f64) -> (Complex64, Complex64) {
    let lead = if alpha.norm_sqr() * nf >= beta.norm_sqr() * ng { alpha } else { beta };
    if lead.norm() == 0.0 {
        return (alpha, beta);
    }
    let r = lead.conj() / lead.norm();
    (alpha * r, beta * r)
}

/// Largest κ at which a bound state could sit: the lowest Dirichlet-to-
/// Neumann eigenvalue l0·κ·tanh(κl/2) must not exceed the boundary stiffness.
fn kappa_bound(u: &BoundaryUnitary, config: &PhysicalConfig, h: f64) -> Option<f64> {
    let stiffness = form_descriptor(u, config.l0).max_boundary_stiffness()?;
    if !(stiffness > 0.0) {
        return None;
    }
    let g = |k: f64| config.l0 * k * (k * h).tanh() - stiffness;
    let mut hi = (stiffness / config.l0).max((stiffness / (config.l0 * h)).sqrt()) * 2.0 + 1e-300;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// All eigenmodes with energy ≤ `e_max`, sorted by energy.
pub fn solve_spectrum(
    u: &BoundaryUnitary,
    interval: &Interval,
    config: &PhysicalConfig,
    e_max: f64,
    options: &SpectrumOptions,
) -> Result<Vec<EigenMode>> {
    if !(e_max.is_finite() && e_max > 0.0) {
        return Err(Error::Domain(format!("energy cutoff must be positive, got {e_max}")));
    }
    let l = interval.width();
    let h = 0.5 * l;
    let problem = Problem { u, interval: *interval, config: *config, h, bc_tol: options.bc_tol };
    let step = options.step_fraction * PI / l;
    let delta = 1e-6 / l;
    let q_max = (e_max / config.kinetic_prefactor()).sqrt();

    let mut roots = Vec::new();
    if let Some(kappa) = kappa_bound(u, config, h) {
        problem.scan(-(1.05 * kappa + step), -delta, step, &mut roots)?;
    }
    let mut zero = Vec::new();
    problem.roots_in(problem.sample(-delta), problem.sample(delta), 0, &mut zero)?;
    let zero_count: usize = zero.iter().map(|r| r.1).sum();
    problem.scan(delta, q_max * (1.0 + 1e-9) + step, step, &mut roots)?;

    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for (q, m) in roots {
        match clusters.last_mut() {
            Some(last) if (q - last.0).abs() <= 1e-9 * q.abs().max(1.0 / l) => {
                last.0 = (last.0 * last.1 as f64 + q * m as f64) / (last.1 + m) as f64;
                last.1 += m;
            }
            _ => clusters.push((q, m)),
        }
    }
    if zero_count > 0 {
        clusters.push((0.0, zero_count));
    }
    let mut modes = Vec::new();
    for (q, m) in clusters {
        let e = config.kinetic_prefactor() * q * q.abs();
        if e <= e_max * (1.0 + 1e-12) {
            modes.extend(problem.build_modes(q, m)?);
        }
    }
    modes.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(modes)
}

/// The lowest `count` modes, growing the energy cutoff as needed.
pub fn lowest_modes(
    u: &BoundaryUnitary,
    interval: &Interval,
    config: &PhysicalConfig,
    count: usize,
    options: &SpectrumOptions,
) -> Result<Vec<EigenMode>> {
    let l = interval.width();
    let mut e_max = config.kinetic_prefactor() * ((count as f64 + 2.0) * PI / l).powi(2);
    for _ in 0..8 {
        let mut modes = solve_spectrum(u, interval, config, e_max, options)?;
        if modes.len() >= count {
            modes.truncate(count);
            return Ok(modes);
        }
        e_max *= 2.0;
    }
    Err(Error::InsufficientModes { found: 0, wanted: count })
}

/// Spectrum export rows: index, branch, k_or_kappa, energy, re/im of c1, c2.
pub fn spectrum_csv_rows(modes: &[EigenMode]) -> Vec<[String; 8]> {
    modes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            [
                i.to_string(),
                m.branch.as_str().to_string(),
                m.k_or_kappa.to_string(),
                m.energy.to_string(),
                m.c1.re.to_string(),
                m.c1.im.to_string(),
                m.c2.re.to_string(),
                m.c2.im.to_string(),
            ]
        })
        .collect()
}
