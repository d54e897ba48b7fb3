//! Small dense kernels on 2×2 complex matrices.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;
pub type Vec2 = Vector2<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    Mat2::identity()
}

pub fn det(m: &Mat2) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

pub fn inverse(m: &Mat2) -> Option<Mat2> {
    let d = det(m);
    let scale = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if d.norm() <= 1e-300 || d.norm() <= 1e-15 * scale {
        return None;
    }
    Some(Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / d)
}

/// Conjugate inner product ⟨u|v⟩.
pub fn dot(u: &Vec2, v: &Vec2) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// Unit vector orthogonal to a unit vector `v`.
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v[1].conj(), v[0].conj())
}

/// |u⟩⟨v|
pub fn outer(u: &Vec2, v: &Vec2) -> Mat2 {
    Mat2::new(
        u[0] * v[0].conj(),
        u[0] * v[1].conj(),
        u[1] * v[0].conj(),
        u[1] * v[1].conj(),
    )
}

/// Largest entry modulus.
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending and
/// orthonormal eigenvectors.
pub fn hermitian_eigen(h: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let p = h[(0, 0)].re;
    let r = h[(1, 1)].re;
    let z = 0.5 * (h[(0, 1)] + h[(1, 0)].conj());
    let m = 0.5 * (p + r);
    let d = 0.5 * (p - r);
    let s = d.hypot(z.norm());
    if s == 0.0 {
        return ([m, m], [Vec2::new(ONE, ZERO), Vec2::new(ZERO, ONE)]);
    }
    let top = if d >= 0.0 {
        Vec2::new(Complex64::new(s + d, 0.0), z.conj())
    } else {
        Vec2::new(z, Complex64::new(s - d, 0.0))
    };
    let top = top / Complex64::new(norm(&top), 0.0);
    ([m - s, m + s], [perp(&top), top])
}

/// Eigenphases (θ₊, θ₋) of a unitary matrix, with θ₊ − θ₋ = 2γ, γ ∈ [0, π],
/// and the matching eigenvectors. Stable for nearly scalar input.
pub fn unitary_eigen(u: &Mat2) -> ([f64; 2], [Vec2; 2]) {
    let d = det(u);
    let half = 0.5 * d.arg();
    let w = u * Complex64::from_polar(1.0, -half);
    let alpha = 0.5 * (w[(0, 0)] + w[(1, 1)].conj());
    let beta = 0.5 * (w[(0, 1)] - w[(1, 0)].conj());
    let gamma = (alpha.im.hypot(beta.norm())).atan2(alpha.re);
    // (W − W†)/2i has eigenvalues ±sin γ on the same eigenvectors.
    let k = (w - w.adjoint()) * Complex64::new(0.0, -0.5);
    let (_, vecs) = hermitian_eigen(&k);
    ([half + gamma, half - gamma], [vecs[1], vecs[0]])
}

/// Eigenphases reduced to [0, 2π).
pub fn unitary_phases_positive(u: &Mat2) -> [f64; 2] {
    let (ph, _) = unitary_eigen(u);
    ph.map(|p| p.rem_euclid(std::f64::consts::TAU))
}

/// Singular values, descending.
pub fn singular_values(m: &Mat2) -> [f64; 2] {
    let fro2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let d = det(m).norm();
    let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
    let smax = (0.5 * (fro2 + disc)).sqrt();
    let smin = if smax > 0.0 { d / smax } else { 0.0 };
    [smax, smin]
}

/// Right singular vectors ordered by ascending singular value.
pub fn right_singular_vectors(m: &Mat2) -> [Vec2; 2] {
    let (_, v) = hermitian_eigen(&(m.adjoint() * m));
    v
}

/// Vector spanning the kernel of an (approximately) rank-one matrix.
pub fn null_vector(m: &Mat2) -> Vec2 {
    let r0 = (m[(0, 0)].norm_sqr() + m[(0, 1)].norm_sqr()).sqrt();
    let r1 = (m[(1, 0)].norm_sqr() + m[(1, 1)].norm_sqr()).sqrt();
    let row = if r0 >= r1 { 0 } else { 1 };
    let rn = r0.max(r1);
    if rn == 0.0 {
        return Vec2::new(ONE, ZERO);
    }
    Vec2::new(-m[(row, 1)], m[(row, 0)]) / Complex64::new(rn, 0.0)
}
