//! Products of free evolutions with two different boundary conditions,
//! compared against the free evolution with the composed condition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryUnitary;
use crate::error::{Error, Result};
use crate::forms::star;
use crate::model::{Interval, PhysicalConfig};
use crate::quadrature::gauss_legendre_on;
use crate::spectral::{lowest_modes, EigenMode, SpectrumOptions};

/// Orthonormal Legendre polynomials on [a, b] with a Gauss–Legendre rule
/// fine enough to integrate them against the captured eigenmodes.
#[derive(Debug, Clone)]
pub struct ReferenceBasis {
    interval: Interval,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// values[(q, k)] = p_k(x_q)
    values: DMatrix<f64>,
}

impl ReferenceBasis {
    pub fn new(interval: Interval, size: usize, quadrature_nodes: usize) -> Result<Self> {
        if size == 0 || quadrature_nodes < size {
            return Err(Error::Domain(format!("reference of size {size} with {quadrature_nodes} nodes")));
        }
        let (nodes, weights) = gauss_legendre_on(quadrature_nodes, interval.a(), interval.b());
        let w = interval.width();
        let mut values = DMatrix::zeros(quadrature_nodes, size);
        for (q, x) in nodes.iter().enumerate() {
            let s = (2.0 * x - interval.a() - interval.b()) / w;
            let (mut p0, mut p1) = (1.0, s);
            for k in 0..size {
                let p = if k == 0 {
                    1.0
                } else if k == 1 {
                    s
                } else {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * s * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                    p2
                };
                values[(q, k)] = p * ((2.0 * k as f64 + 1.0) / w).sqrt();
            }
        }
        Ok(ReferenceBasis { interval, nodes, weights, values })
    }

    /// Size adequate for the lowest `modes` eigenfunctions on the interval.
    pub fn for_modes(interval: Interval, modes: usize) -> Result<Self> {
        let half_wave = (modes as f64 * PI / 2.0).ceil() as usize;
        let size = (1.6 * half_wave as f64).ceil() as usize + 40;
        Self::new(interval, size, size + half_wave + 60)
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn size(&self) -> usize {
        self.values.ncols()
    }

    pub fn project(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let fw: Vec<Complex64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| f(*x) * *w).collect();
        (0..self.size())
            .map(|k| fw.iter().enumerate().map(|(q, v)| v * self.values[(q, k)]).sum())
            .collect()
    }

    /// Value of the expansion at x.
    pub fn evaluate(&self, coeffs: &[Complex64], x: f64) -> Complex64 {
        let w = self.interval.width();
        let s = (2.0 * x - self.interval.a() - self.interval.b()) / w;
        let (mut p0, mut p1) = (1.0, s);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in coeffs.iter().enumerate().take(self.size()) {
            let p = match k {
                0 => 1.0,
                1 => s,
                _ => {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * s * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            acc += c * p * ((2.0 * k as f64 + 1.0) / w).sqrt();
        }
        acc
    }
}

/// Eigen-expansion of the free evolution for one boundary condition.
#[derive(Debug, Clone)]
pub struct PropagatorBundle {
    pub bc: BoundaryUnitary,
    pub modes: Vec<EigenMode>,
    /// overlap[(k, n)] = ⟨p_k|u_n⟩
    pub overlap: DMatrix<Complex64>,
    /// ‖O†O − I‖ in max norm
    pub isometry_defect: f64,
    hbar: f64,
}

pub const ISOMETRY_TOL: f64 = 1e-6;

impl PropagatorBundle {
    pub fn new(bc: &BoundaryUnitary, reference: &ReferenceBasis, config: &PhysicalConfig, modes: usize) -> Result<Self> {
        let list = lowest_modes(bc, &reference.interval, config, modes, &SpectrumOptions::default())?;
        let nq = reference.nodes.len();
        let mut weighted = DMatrix::<Complex64>::zeros(nq, list.len());
        for (n, mode) in list.iter().enumerate() {
            for q in 0..nq {
                weighted[(q, n)] = mode.value(reference.nodes[q]) * reference.weights[q];
            }
        }
        let p = reference.values.map(|v| Complex64::new(v, 0.0));
        let overlap = p.transpose() * weighted;
        let gram = overlap.adjoint() * &overlap;
        let defect = (gram - DMatrix::<Complex64>::identity(list.len(), list.len()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > ISOMETRY_TOL {
            return Err(Error::ReferenceTooSmall { defect });
        }
        Ok(PropagatorBundle { bc: bc.clone(), modes: list, overlap, isometry_defect: defect, hbar: config.hbar })
    }

    pub fn energies(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.energy).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub coeffs: Vec<Complex64>,
    /// ‖in‖² − ‖out‖², the part of the input outside the captured modes.
    pub norm_deficit: f64,
}

/// O·e^{−iEτ/ħ}·O†c.
pub fn apply_evolution(bundle: &PropagatorBundle, state: &[Complex64], tau: f64) -> Result<Evolved> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("evolution time must be non-negative, got {tau}")));
    }
    if state.len() != bundle.overlap.nrows() {
        return Err(Error::GridMismatch(format!("{} coefficients for a reference of {}", state.len(), bundle.overlap.nrows())));
    }
    let c = DVector::from_column_slice(state);
    let mut d = bundle.overlap.adjoint() * &c;
    for (n, m) in bundle.modes.iter().enumerate() {
        d[n] *= Complex64::from_polar(1.0, -m.energy * tau / bundle.hbar);
    }
    let out = &bundle.overlap * d;
    let norm_deficit = c.norm_squared() - out.norm_squared();
    Ok(Evolved { coeffs: out.iter().copied().collect(), norm_deficit })
}

/// N pairs e^{−iτT_U/ħ}e^{−iτT_V/ħ} with τ = t_total/N; the V factor acts first.
pub fn alternating_run(
    u: &PropagatorBundle,
    v: &PropagatorBundle,
    t_total: f64,
    n: usize,
    state: &[Complex64],
) -> Result<Evolved> {
    if n == 0 {
        return Err(Error::Domain("need at least one switching pair".into()));
    }
    let tau = t_total / n as f64;
    let mut c = state.to_vec();
    let mut deficit = 0.0;
    for _ in 0..n {
        for b in [v, u] {
            let e = apply_evolution(b, &c, tau)?;
            deficit += e.norm_deficit;
            c = e.coeffs;
        }
    }
    Ok(Evolved { coeffs: c, norm_deficit: deficit })
}

/// ‖(I − P_to)P_from‖², the largest norm fraction a state in the span of
/// `from` loses when projected onto the span of `to`.
pub fn projection_deficit(from: &PropagatorBundle, to: &PropagatorBundle) -> f64 {
    let cross = to.overlap.adjoint() * &from.overlap;
    let smin = cross.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    (1.0 - smin * smin).max(0.0)
}

/// Shared reference basis, the two alternating conditions and their composition.
#[derive(Debug, Clone)]
pub struct TrotterProblem {
    pub reference: ReferenceBasis,
    pub u: PropagatorBundle,
    pub v: PropagatorBundle,
    pub w: PropagatorBundle,
    pub initial: Vec<Complex64>,
}

impl TrotterProblem {
    pub fn new(
        u: &BoundaryUnitary,
        v: &BoundaryUnitary,
        interval: Interval,
        config: &PhysicalConfig,
        modes: usize,
        initial: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let reference = ReferenceBasis::for_modes(interval, modes)?;
        let w = star(u, v, config.l0);
        let mut c = reference.project(initial);
        let n = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NumericDomain("initial state has no norm".into()));
        }
        c.iter_mut().for_each(|z| *z /= n);
        Ok(TrotterProblem {
            u: PropagatorBundle::new(u, &reference, config, modes)?,
            v: PropagatorBundle::new(v, &reference, config, modes)?,
            w: PropagatorBundle::new(&w, &reference, config, modes)?,
            reference,
            initial: c,
        })
    }
}

/// ((x − a)(b − x)/w²)^p, vanishing to order p at both ends.
pub fn bump(interval: &Interval, power: i32) -> impl Fn(f64) -> Complex64 {
    let (a, b, w) = (interval.a(), interval.b(), interval.width());
    move |x| Complex64::new((((x - a) * (b - x)) / (w * w)).max(0.0).powi(power), 0.0)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
    pub norm_deficit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub composed: BoundaryUnitary,
    pub t_total: f64,
    pub modes: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of −log error against log N.
    pub fitted_order: Option<f64>,
}

/// L² distance between the alternating product and e^{−2itT_W/ħ} for each N.
pub fn convergence_report(problem: &TrotterProblem, t_total: f64, n_list: &[usize]) -> Result<ConvergenceReport> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("N list must be increasing".into()));
    }
    let reference = apply_evolution(&problem.w, &problem.initial, 2.0 * t_total)?;
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let run = alternating_run(&problem.u, &problem.v, t_total, n, &problem.initial)?;
            let error = run
                .coeffs
                .iter()
                .zip(&reference.coeffs)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(ConvergenceRow { n, error, norm_deficit: run.norm_deficit })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        composed: problem.w.bc.clone(),
        t_total,
        modes: problem.w.modes.len(),
        fitted_order: fitted_order(&rows),
        rows,
    })
}

fn fitted_order(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.error > 0.0)
        .map(|r| ((r.n as f64).ln(), -r.error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
