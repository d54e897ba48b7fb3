//! Physical constants, interval geometry and sampled/spectral state containers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants fixing the unit system. Defaults are ħ = 1, m = 1/2, l0 = 1,
/// so that ħ²/2m = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub hbar: f64,
    pub mass: f64,
    pub l0: f64,
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        PhysicalConfig { hbar: 1.0, mass: 0.5, l0: 1.0 }
    }
}

impl PhysicalConfig {
    pub fn new(hbar: f64, mass: f64, l0: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("l0", l0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(PhysicalConfig { hbar, mass, l0 })
    }

    /// ħ²/(2m), the factor converting squared wavenumber to energy.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::Domain(format!("interval needs finite a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    /// `[0, l]`.
    pub fn of_width(l: f64) -> Result<Self> {
        Self::new(0.0, l)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn width(&self) -> f64 {
        self.b - self.a
    }
    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    /// i-th of n uniform points, endpoints included.
    pub fn node(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.b
        } else {
            self.a + self.width() * i as f64 / (n - 1) as f64
        }
    }
}

/// Uniform samples of a wavefunction with both endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    interval: Interval,
    samples: Vec<Complex64>,
}

impl GridState {
    pub fn new(interval: Interval, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::GridMismatch(format!("need at least 3 samples, got {}", samples.len())));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NumericDomain("grid samples".into()));
        }
        Ok(GridState { interval, samples })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
    pub fn step(&self) -> f64 {
        self.interval.width() / (self.samples.len() - 1) as f64
    }

    pub fn norm_sqr(&self) -> f64 {
        trapezoid_inner_product(self, self).map(|z| z.re).unwrap_or(f64::NAN)
    }
}

/// ⟨f|g⟩ by the trapezoid rule, antilinear in `f`.
pub fn trapezoid_inner_product(f: &GridState, g: &GridState) -> Result<Complex64> {
    if f.interval != g.interval || f.len() != g.len() {
        return Err(Error::GridMismatch(format!(
            "[{}, {}] with {} points vs [{}, {}] with {} points",
            f.interval.a,
            f.interval.b,
            f.len(),
            g.interval.a,
            g.interval.b,
            g.len()
        )));
    }
    let n = f.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (x, y)) in f.samples.iter().zip(&g.samples).enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += x.conj() * y * w;
    }
    Ok(acc * f.step())
}

/// Samples `rule` at n uniform points of `interval`.
pub fn sample_function<F>(interval: Interval, n: usize, rule: F) -> Result<GridState>
where
    F: Fn(f64) -> Complex64,
{
    if n < 3 {
        return Err(Error::GridMismatch(format!("need at least 3 samples, got {n}")));
    }
    let samples: Vec<Complex64> = (0..n).map(|i| rule(interval.node(i, n))).collect();
    GridState::new(interval, samples)
}

/// Coefficients in the orthonormal eigenbasis attached to `basis_tag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralState {
    pub basis_tag: String,
    pub coeffs: Vec<Complex64>,
}

impl SpectralState {
    pub fn new(basis_tag: impl Into<String>, coeffs: Vec<Complex64>) -> Self {
        SpectralState { basis_tag: basis_tag.into(), coeffs }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}
