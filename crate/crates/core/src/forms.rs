//! Boundary quadratic forms of the kinetic energy and the composition law
//! of boundary unitaries under alternating evolutions.

use num_complex::Complex64;
use serde::Serialize;

use crate::boundary::{self, classify_minus_one, BoundaryUnitary, DEFAULT_MINUS_ONE_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Vec2, I, ONE};

/// Generator (I−U)(I+U)⁻¹ restricted to the unconstrained boundary values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Full(Mat2),
    /// `value` acting on the span of the unit vector `basis`.
    Scalar { basis: Vec2, value: Complex64 },
    Empty,
}

impl Generator {
    pub fn dim(&self) -> usize {
        match self {
            Generator::Full(_) => 2,
            Generator::Scalar { .. } => 1,
            Generator::Empty => 0,
        }
    }

    /// The generator extended by zero to a 2×2 matrix.
    pub fn embedded(&self) -> Mat2 {
        match self {
            Generator::Full(a) => *a,
            Generator::Scalar { basis, value } => linalg::outer(basis, basis) * *value,
            Generator::Empty => Mat2::zeros(),
        }
    }

    /// ⟨v|A v⟩ for a unit vector v.
    pub fn compressed_on(&self, v: &Vec2) -> Complex64 {
        linalg::dot(v, &(self.embedded() * v))
    }

    pub fn anti_hermitian_defect(&self) -> f64 {
        let a = self.embedded();
        linalg::max_abs(&(a + a.adjoint()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormDescriptor {
    pub constraint_dim: usize,
    pub constraint_vectors: Vec<Vec2>,
    pub gamma_generator: Generator,
    pub l0: f64,
}

impl FormDescriptor {
    /// Largest eigenvalue of −iA on the free subspace; the boundary term is
    /// bounded below by −(this)/l0 · ‖Ψ‖².
    pub fn max_boundary_stiffness(&self) -> Option<f64> {
        match &self.gamma_generator {
            Generator::Full(a) => {
                let b = a * (-I);
                let h = (b + b.adjoint()) * Complex64::new(0.5, 0.0);
                Some(linalg::hermitian_eigen(&h).0[1])
            }
            Generator::Scalar { value, .. } => Some(value.im),
            Generator::Empty => None,
        }
    }
}

/// Cayley generator (I−U)(I+U)⁻¹, if I+U is invertible.
pub fn cayley_generator(u: &Mat2) -> Option<Mat2> {
    let id = linalg::identity();
    linalg::inverse(&(id + u)).map(|inv| (id - u) * inv)
}

/// Inverse Cayley map (I−M)(I+M)⁻¹ for anti-Hermitian M.
pub fn cayley_unitary(m: &Mat2) -> Mat2 {
    let id = linalg::identity();
    (id - m) * linalg::inverse(&(id + m)).expect("I + M is invertible for anti-Hermitian M")
}

pub fn form_descriptor(u: &BoundaryUnitary, l0: f64) -> FormDescriptor {
    form_descriptor_with_tol(u, l0, DEFAULT_MINUS_ONE_TOL)
}

pub fn form_descriptor_with_tol(u: &BoundaryUnitary, l0: f64, tol: f64) -> FormDescriptor {
    let s = classify_minus_one(u, tol);
    match s.count {
        0 => {
            let a = cayley_generator(u.matrix()).expect("no eigenvalue at -1");
            // remove the rounding-level Hermitian part
            let a = (a - a.adjoint()) * Complex64::new(0.5, 0.0);
            FormDescriptor { constraint_dim: 0, constraint_vectors: vec![], gamma_generator: Generator::Full(a), l0 }
        }
        1 => {
            let u2 = s.u2.unwrap();
            let value = Complex64::new(0.0, ((ONE - u2) / (ONE + u2)).im);
            FormDescriptor {
                constraint_dim: 1,
                constraint_vectors: vec![s.xi.unwrap()],
                gamma_generator: Generator::Scalar { basis: s.xi_perp.unwrap(), value },
                l0,
            }
        }
        _ => FormDescriptor {
            constraint_dim: 2,
            constraint_vectors: vec![Vec2::new(ONE, linalg::ZERO), Vec2::new(linalg::ZERO, ONE)],
            gamma_generator: Generator::Empty,
            l0,
        },
    }
}

/// Value of (i/l0)⟨Ψ|AΨ⟩ for boundary data inside the form domain.
pub fn gamma_value(desc: &FormDescriptor, psi: &Vec2, tol: f64) -> Result<f64> {
    let scale = 1.0 + linalg::norm(psi);
    for xi in &desc.constraint_vectors {
        let r = linalg::dot(xi, psi).norm();
        if r > tol * scale {
            return Err(Error::Domain(format!("boundary vector violates a constraint by {r:e}")));
        }
    }
    let a = desc.gamma_generator.embedded();
    Ok((I * linalg::dot(psi, &(a * psi))).re / desc.l0)
}

/// Case data reported alongside a composition.
#[derive(Debug, Clone, Serialize)]
pub struct CompositionCase {
    pub constraint_dim: usize,
    pub constraint_vectors: Vec<[f64; 4]>,
    /// Row-major re/im entries of the embedded generator.
    pub generator: [f64; 8],
}

impl From<&FormDescriptor> for CompositionCase {
    fn from(d: &FormDescriptor) -> Self {
        let g = d.gamma_generator.embedded();
        let mut generator = [0.0; 8];
        for (k, z) in [g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]].iter().enumerate() {
            generator[2 * k] = z.re;
            generator[2 * k + 1] = z.im;
        }
        CompositionCase {
            constraint_dim: d.constraint_dim,
            constraint_vectors: d.constraint_vectors.iter().map(|v| [v[0].re, v[0].im, v[1].re, v[1].im]).collect(),
            generator,
        }
    }
}

/// Boundary condition generated by rapidly alternating the evolutions of
/// `u` and `v`.
pub fn star(u: &BoundaryUnitary, v: &BoundaryUnitary, l0: f64) -> BoundaryUnitary {
    star_with_tol(u, v, l0, DEFAULT_MINUS_ONE_TOL)
}

pub fn star_with_tol(u: &BoundaryUnitary, v: &BoundaryUnitary, l0: f64, tol: f64) -> BoundaryUnitary {
    let du = form_descriptor_with_tol(u, l0, tol);
    let dv = form_descriptor_with_tol(v, l0, tol);
    if du.constraint_dim == 2 || dv.constraint_dim == 2 {
        return boundary::make_dirichlet();
    }
    let zeta = match (du.constraint_vectors.first(), dv.constraint_vectors.first()) {
        (None, None) => None,
        (Some(z), None) | (None, Some(z)) => Some(*z),
        (Some(z1), Some(z2)) => {
            if linalg::dot(&linalg::perp(z1), z2).norm() > tol {
                return boundary::make_dirichlet();
            }
            Some(*z1)
        }
    };
    let w = match zeta {
        None => {
            let m = (du.gamma_generator.embedded() + dv.gamma_generator.embedded()) * Complex64::new(0.5, 0.0);
            let m = (m - m.adjoint()) * Complex64::new(0.5, 0.0);
            cayley_unitary(&m)
        }
        Some(z) => {
            let zp = linalg::perp(&z);
            let m = 0.5 * (du.gamma_generator.compressed_on(&zp).im + dv.gamma_generator.compressed_on(&zp).im);
            let m = Complex64::new(0.0, m);
            let w2 = (ONE - m) / (ONE + m);
            let w2 = w2 / w2.norm();
            linalg::outer(&zp, &zp) * w2 - linalg::outer(&z, &z)
        }
    };
    BoundaryUnitary::with_tolerance(w, 1e-9).expect("composition of unitaries is unitary")
}
