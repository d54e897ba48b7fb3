//! Box with moving walls, solved in the fixed reference frame: the interval
//! [d − l/2, d + l/2] is mapped onto [−l0/2, l0/2] and the state is expanded
//! in the Dirichlet sine basis there.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GridState, Interval, PhysicalConfig, SpectralState};

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Width l(t) and centre d(t) of the moving box.
#[derive(Clone)]
pub struct WallTrajectory {
    width: Curve,
    center: Curve,
    width_rate: Option<Curve>,
    center_rate: Option<Curve>,
    pub fd_step: f64,
    pub l_min: f64,
}

impl std::fmt::Debug for WallTrajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WallTrajectory")
            .field("analytic_rates", &(self.width_rate.is_some(), self.center_rate.is_some()))
            .field("fd_step", &self.fd_step)
            .field("l_min", &self.l_min)
            .finish()
    }
}

impl WallTrajectory {
    /// Rates default to central differences with step `fd_step`.
    pub fn new<L, D>(width: L, center: D) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WallTrajectory {
            width: Arc::new(width),
            center: Arc::new(center),
            width_rate: None,
            center_rate: None,
            fd_step: 1e-5,
            l_min: 1e-6,
        }
    }

    pub fn with_rates<L, D>(mut self, width_rate: L, center_rate: D) -> Self
    where
        L: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.width_rate = Some(Arc::new(width_rate));
        self.center_rate = Some(Arc::new(center_rate));
        self
    }

    pub fn with_min_width(mut self, l_min: f64) -> Self {
        self.l_min = l_min;
        self
    }

    pub fn fixed(l: f64, d: f64) -> Self {
        Self::new(move |_| l, move |_| d).with_rates(|_| 0.0, |_| 0.0)
    }

    /// l(t) = l0(1 + a sin ωt), d = 0.
    pub fn breathing(l0: f64, amplitude: f64, omega: f64) -> Self {
        Self::new(move |t| l0 * (1.0 + amplitude * (omega * t).sin()), |_| 0.0)
            .with_rates(move |t| l0 * amplitude * omega * (omega * t).cos(), |_| 0.0)
    }

    /// l(t) = l0(1 + εt), d = 0.
    pub fn linear_expansion(l0: f64, eps: f64) -> Self {
        Self::new(move |t| l0 * (1.0 + eps * t), |_| 0.0).with_rates(move |_| l0 * eps, |_| 0.0)
    }

    /// Rigid motion d(t) = d0 + vt at fixed width.
    pub fn translation(l: f64, d0: f64, v: f64) -> Self {
        Self::new(move |_| l, move |t| d0 + v * t).with_rates(|_| 0.0, move |_| v)
    }

    pub fn width(&self, t: f64) -> f64 {
        (self.width)(t)
    }
    pub fn center(&self, t: f64) -> f64 {
        (self.center)(t)
    }

    fn central(&self, f: &Curve, t: f64) -> f64 {
        let h = self.fd_step;
        (f(t + h) - f(t - h)) / (2.0 * h)
    }

    pub fn width_rate(&self, t: f64) -> f64 {
        match &self.width_rate {
            Some(r) => r(t),
            None => self.central(&self.width, t),
        }
    }

    pub fn center_rate(&self, t: f64) -> f64 {
        match &self.center_rate {
            Some(r) => r(t),
            None => self.central(&self.center, t),
        }
    }

    /// Checks the width bound and, for analytic rates, agreement with central
    /// differences at `n` points of [t0, t1].
    pub fn validate(&self, t0: f64, t1: f64, n: usize, rate_tol: f64) -> Result<()> {
        for i in 0..=n {
            let t = t0 + (t1 - t0) * i as f64 / n.max(1) as f64;
            let w = self.width(t);
            if !(w.is_finite() && self.center(t).is_finite()) {
                return Err(Error::NumericDomain(format!("trajectory at t = {t}")));
            }
            if w < self.l_min {
                return Err(Error::WidthTooSmall { t, width: w, min: self.l_min });
            }
            for (rate, curve) in [(&self.width_rate, &self.width), (&self.center_rate, &self.center)] {
                if let Some(r) = rate {
                    let a = r(t);
                    let gap = (a - self.central(curve, t)).abs();
                    if gap > rate_tol * (1.0 + a.abs()) {
                        return Err(Error::DerivativeMismatch { t, gap });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Matrices in the sine basis φ_n(ξ) = √(2/l0)·sin(nπ(ξ/l0 + 1/2)), n = 1..M.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinOperators {
    pub n_modes: usize,
    pub config: PhysicalConfig,
    /// p²/2m, diagonal.
    pub kin: DMatrix<Complex64>,
    /// p = −iħ∂
    pub mom: DMatrix<Complex64>,
    /// (xp + px)/2
    pub virial: DMatrix<Complex64>,
}

pub fn build_galerkin(config: &PhysicalConfig, n_modes: usize) -> Result<GalerkinOperators> {
    if n_modes < 2 {
        return Err(Error::Domain(format!("need at least 2 modes, got {n_modes}")));
    }
    let l0 = config.l0;
    let hbar = config.hbar;
    let m = n_modes;
    let mut kin = DMatrix::zeros(m, m);
    let mut mom = DMatrix::zeros(m, m);
    let mut virial = DMatrix::zeros(m, m);
    for i in 0..m {
        let a = (i + 1) as f64;
        kin[(i, i)] = Complex64::new(config.kinetic_prefactor() * (a * PI / l0).powi(2), 0.0);
        for j in 0..m {
            if i == j {
                continue;
            }
            let b = (j + 1) as f64;
            let den = a * a - b * b;
            if (i + j) % 2 == 1 {
                // ⟨φ_a|∂φ_b⟩ for opposite parity
                mom[(i, j)] = Complex64::new(0.0, -hbar * 4.0 * a * b / (l0 * den));
            } else {
                // ⟨φ_a|(ξ∂ + 1/2)φ_b⟩ for equal parity
                virial[(i, j)] = Complex64::new(0.0, -hbar * (-2.0 * a * b / den));
            }
        }
    }
    Ok(GalerkinOperators { n_modes, config: *config, kin, mom, virial })
}

impl GalerkinOperators {
    /// H(l) + K(l, d) = (l0/l)² kin − (l̇/l) virial − (l0 ḋ/l) mom.
    ///
    /// The kinetic prefactor carries l0 explicitly; with l0 = 1 it is the bare 1/l².
    pub fn hamiltonian(&self, l: f64, ldot: f64, ddot: f64) -> DMatrix<Complex64> {
        let l0 = self.config.l0;
        let s = Complex64::new((l0 / l).powi(2), 0.0);
        &self.kin * s - &self.virial * Complex64::new(ldot / l, 0.0) - &self.mom * Complex64::new(l0 * ddot / l, 0.0)
    }

    /// ⟨H(l)⟩ = (l0/l)² Σ kin_n |c_n|².
    pub fn energy(&self, coeffs: &[Complex64], l: f64) -> f64 {
        let s = (self.config.l0 / l).powi(2);
        coeffs.iter().enumerate().map(|(n, c)| s * self.kin[(n, n)].re * c.norm_sqr()).sum()
    }

    /// φ′ at ξ = −l0/2 and ξ = +l0/2.
    pub fn wall_derivatives(&self, coeffs: &[Complex64]) -> (Complex64, Complex64) {
        let l0 = self.config.l0;
        let amp = (2.0 / l0).sqrt();
        let mut lo = Complex64::new(0.0, 0.0);
        let mut hi = Complex64::new(0.0, 0.0);
        for (i, c) in coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            let k = amp * n * PI / l0;
            lo += c * k;
            hi += c * if i % 2 == 0 { -k } else { k };
        }
        (lo, hi)
    }

    /// Largest time step with ‖H‖·dt/ħ ≤ `phase` at the given geometry.
    pub fn suggested_dt(&self, l_min: f64, ldot_max: f64, ddot_max: f64, phase: f64) -> f64 {
        let h = self.hamiltonian(l_min, ldot_max, ddot_max);
        let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        phase * self.config.hbar / norm
    }
}

fn cn_step(ops: &GalerkinOperators, h: &DMatrix<Complex64>, c: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
    let m = ops.n_modes;
    let a = Complex64::new(0.0, 0.5 * dt / ops.config.hbar);
    let id = DMatrix::<Complex64>::identity(m, m);
    let lhs = &id + h * a;
    let rhs = (&id - h * a) * DVector::from_column_slice(c);
    let lu = lhs.lu();
    let diag: Vec<f64> = lu.u().diagonal().iter().map(|z| z.norm()).collect();
    let (dmin, dmax) = diag.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let pivot_ratio = dmin / dmax;
    match lu.solve(&rhs) {
        Some(x) if pivot_ratio > 1e-14 && x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
            Ok(x.iter().copied().collect())
        }
        _ => Err(Error::LinearSolve { pivot_ratio }),
    }
}

fn midpoint_hamiltonian(ops: &GalerkinOperators, traj: &WallTrajectory, t: f64, dt: f64) -> Result<DMatrix<Complex64>> {
    let tm = t + 0.5 * dt;
    let l = traj.width(tm);
    if !(l >= traj.l_min) {
        return Err(Error::WidthTooSmall { t: tm, width: l, min: traj.l_min });
    }
    Ok(ops.hamiltonian(l, traj.width_rate(tm), traj.center_rate(tm)))
}

fn signed_step(ops: &GalerkinOperators, traj: &WallTrajectory, c: &[Complex64], t: f64, dt: f64) -> Result<Vec<Complex64>> {
    let h = midpoint_hamiltonian(ops, traj, t, dt)?;
    cn_step(ops, &h, c, dt)
}

/// One midpoint Crank–Nicolson step from t to t + dt.
pub fn step_crank_nicolson(
    ops: &GalerkinOperators,
    traj: &WallTrajectory,
    state: &SpectralState,
    t: f64,
    dt: f64,
) -> Result<SpectralState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    check_size(ops, state)?;
    Ok(SpectralState::new(state.basis_tag.clone(), signed_step(ops, traj, &state.coeffs, t, dt)?))
}

fn check_size(ops: &GalerkinOperators, state: &SpectralState) -> Result<()> {
    if state.coeffs.len() != ops.n_modes {
        return Err(Error::GridMismatch(format!("{} coefficients for {} modes", state.coeffs.len(), ops.n_modes)));
    }
    Ok(())
}

/// Propagates with `steps` equal signed steps over [t, t + span].
fn propagate_signed(
    ops: &GalerkinOperators,
    traj: &WallTrajectory,
    c: &[Complex64],
    t: f64,
    span: f64,
    steps: usize,
) -> Result<Vec<Complex64>> {
    let dt = span / steps as f64;
    let mut c = c.to_vec();
    for k in 0..steps {
        c = signed_step(ops, traj, &c, t + k as f64 * dt, dt)?;
    }
    Ok(c)
}

/// Sequence of states at t0 + k·dt, k = 0..=n.
pub fn propagate(
    ops: &GalerkinOperators,
    traj: &WallTrajectory,
    state: &SpectralState,
    t0: f64,
    dt: f64,
    n: usize,
    mut observe: impl FnMut(f64, &SpectralState),
) -> Result<SpectralState> {
    let mut s = state.clone();
    observe(t0, &s);
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        s = step_crank_nicolson(ops, traj, &s, t, dt)?;
        observe(t0 + (k + 1) as f64 * dt, &s);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOptions {
    /// Finite-difference half-width.
    pub h: f64,
    /// Crank–Nicolson steps per half-width.
    pub substeps: usize,
}

impl Default for RateOptions {
    fn default() -> Self {
        RateOptions { h: 1e-4, substeps: 4 }
    }
}

/// Numerical d⟨H(l)⟩/dt against the wall-flux expression
/// −(ħ²/2m)(l0/l)³[(l̇ξ/l0 + ḋ)|φ′(ξ)|²] between ξ = −l0/2 and +l0/2.
pub fn energy_rate_check(
    ops: &GalerkinOperators,
    traj: &WallTrajectory,
    state: &SpectralState,
    t: f64,
    options: &RateOptions,
) -> Result<(f64, f64)> {
    check_size(ops, state)?;
    let c = &state.coeffs;
    let diff = |h: f64| -> Result<f64> {
        let fwd = propagate_signed(ops, traj, c, t, h, options.substeps)?;
        let bwd = propagate_signed(ops, traj, c, t, -h, options.substeps)?;
        Ok((ops.energy(&fwd, traj.width(t + h)) - ops.energy(&bwd, traj.width(t - h))) / (2.0 * h))
    };
    let coarse = diff(options.h)?;
    let fine = diff(0.5 * options.h)?;
    let lhs = (4.0 * fine - coarse) / 3.0;

    let l = traj.width(t);
    let ldot = traj.width_rate(t);
    let ddot = traj.center_rate(t);
    let l0 = ops.config.l0;
    let (lo, hi) = ops.wall_derivatives(c);
    let flux = (0.5 * ldot + ddot) * hi.norm_sqr() - (-0.5 * ldot + ddot) * lo.norm_sqr();
    let rhs = -ops.config.kinetic_prefactor() * (l0 / l).powi(3) * flux;
    Ok((lhs, rhs))
}

/// Direction of the frame change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Moving box → reference interval.
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMap {
    pub l: f64,
    pub d: f64,
    pub l0: f64,
    pub direction: Direction,
}

impl FrameMap {
    pub fn moving_interval(&self) -> Result<Interval> {
        Interval::new(self.d - 0.5 * self.l, self.d + 0.5 * self.l)
    }
    pub fn reference_interval(&self) -> Result<Interval> {
        Interval::new(-0.5 * self.l0, 0.5 * self.l0)
    }
}

/// (Uψ)(ξ) = √(l/l0)·ψ((l/l0)ξ + d), or its inverse, by linear interpolation.
pub fn frame_map_apply(map: &FrameMap, state: &GridState) -> Result<GridState> {
    let moving = map.moving_interval()?;
    let reference = map.reference_interval()?;
    let (source, target, scale) = match map.direction {
        Direction::Forward => (moving, reference, (map.l / map.l0).sqrt()),
        Direction::Inverse => (reference, moving, (map.l0 / map.l).sqrt()),
    };
    let si = state.interval();
    let tol = 1e-12 * source.width().max(1.0);
    if (si.a() - source.a()).abs() > tol || (si.b() - source.b()).abs() > tol {
        return Err(Error::Support(format!(
            "state lives on [{}, {}], expected [{}, {}]",
            si.a(),
            si.b(),
            source.a(),
            source.b()
        )));
    }
    let n = state.len();
    let s = state.samples();
    let samples = (0..n)
        .map(|i| {
            let x = target.node(i, n);
            let u = (x - target.a()) / target.width() * (n - 1) as f64;
            let j = (u.floor() as usize).min(n - 2);
            let w = u - j as f64;
            (s[j] * (1.0 - w) + s[j + 1] * w) * scale
        })
        .collect();
    GridState::new(target, samples)
}

/// Multiplies by exp(±(i/ħ)(m g ξ t − m g² t³/6)), the gauge removing a
/// uniform acceleration g of the box.
pub fn gauge_transform(
    state: &GridState,
    t: f64,
    g: f64,
    config: &PhysicalConfig,
    direction: Direction,
) -> Result<GridState> {
    let sign = match direction {
        Direction::Forward => 1.0,
        Direction::Inverse => -1.0,
    };
    let iv = state.interval();
    let n = state.len();
    let m = config.mass;
    let samples = state
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let xi = iv.node(i, n);
            let phase = sign * (m * g * xi * t - m * g * g * t * t * t / 6.0) / config.hbar;
            z * Complex64::from_polar(1.0, phase)
        })
        .collect();
    GridState::new(iv, samples)
}

/// Energy unit m·g·l_g and gravitational length l_g = (ħ²/(2m²g))^{1/3} of a
/// box in a uniform field; the dimensionless Airy levels ε_n refer to a box
/// of width l_g.
pub fn gravitational_scales(config: &PhysicalConfig, g: f64) -> Result<(f64, f64)> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::Domain(format!("field strength must be positive, got {g}")));
    }
    let lg = (config.hbar * config.hbar / (2.0 * config.mass * config.mass * g)).cbrt();
    Ok((lg, config.mass * g * lg))
}
