#![allow(dead_code)]

use num_complex::Complex64;
use qwalls::boundary::BoundaryUnitary;
use qwalls::linalg::Vec2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unitary with uniform eigenphases and a uniformly random eigenbasis.
pub fn random_unitary<R: Rng>(r: &mut R) -> BoundaryUnitary {
    let t1 = r.gen_range(-PI..PI);
    let t2 = r.gen_range(-PI..PI);
    let th = r.gen_range(0.0f64..1.0).sqrt().asin();
    let ph = r.gen_range(-PI..PI);
    let v = Vec2::new(Complex64::new(th.cos(), 0.0), Complex64::from_polar(th.sin(), ph));
    BoundaryUnitary::from_spectral(t1, t2, v).unwrap()
}

/// Complex polynomial in t = (x − a)/w on [a, b].
pub struct Poly {
    pub a: f64,
    pub w: f64,
    pub c: Vec<Complex64>,
}

impl Poly {
    fn horner(c: &[Complex64], t: f64) -> Complex64 {
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, v| acc * t + v)
    }
    fn derived(c: &[Complex64]) -> Vec<Complex64> {
        c.iter().enumerate().skip(1).map(|(k, v)| v * k as f64).collect()
    }
    pub fn value(&self, x: f64) -> Complex64 {
        Self::horner(&self.c, (x - self.a) / self.w)
    }
    pub fn d1(&self, x: f64) -> Complex64 {
        Self::horner(&Self::derived(&self.c), (x - self.a) / self.w) / self.w
    }
    pub fn d2(&self, x: f64) -> Complex64 {
        Self::horner(&Self::derived(&Self::derived(&self.c)), (x - self.a) / self.w) / (self.w * self.w)
    }
}

fn cplx<R: Rng>(r: &mut R) -> Complex64 {
    Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Degree-7 polynomial with endpoint values Ψ and derivatives fixed by Ψ′ = −iAΨ,
/// A the generator of `u` (which must have no −1 eigenvalue).
pub fn conforming_polynomial<R: Rng>(r: &mut R, u: &BoundaryUnitary, a: f64, b: f64, l0: f64) -> (Poly, Vec2) {
    let gen = qwalls::forms::cayley_generator(u.matrix()).expect("no -1 eigenvalue");
    let psi = Vec2::new(cplx(r), cplx(r));
    let dpsi = -(gen * psi) * Complex64::new(0.0, 1.0);
    let w = b - a;
    let (va, vb) = (psi[0], psi[1]);
    let (da, db) = (-dpsi[0] / l0, dpsi[1] / l0);
    // cubic Hermite part in t
    let mut c = vec![Complex64::new(0.0, 0.0); 8];
    c[0] = va;
    c[1] = da * w;
    c[2] = -va * 3.0 - da * w * 2.0 + vb * 3.0 - db * w;
    c[3] = va * 2.0 + da * w - vb * 2.0 + db * w;
    // t²(1−t)²·(q0 + q1 t + q2 t² + q3 t³), zero value and slope at both ends
    let q: Vec<Complex64> = (0..4).map(|_| cplx(r)).collect();
    let base = [1.0, -2.0, 1.0];
    for (i, qi) in q.iter().enumerate() {
        for (j, bj) in base.iter().enumerate() {
            c[2 + i + j] += qi * *bj;
        }
    }
    (Poly { a, w, c }, psi)
}
