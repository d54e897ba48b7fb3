//! Airy functions on the real line and the quantization condition of a box
//! in a uniform field.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_2;
const DAI0: f64 = 0.258_819_403_792_806_8;
const SQRT3: f64 = 1.732_050_807_568_877_2;

const SERIES_LOW: f64 = -7.0;
const AI_SERIES_HIGH: f64 = 1.0;
const BI_SERIES_HIGH: f64 = 8.0;

/// The two Maclaurin solutions f = 1 + z³/3! + …, g = z + 2z⁴/4! + …
fn maclaurin(z: f64) -> (f64, f64) {
    let z3 = z * z * z;
    let (mut f, mut g) = (1.0, z);
    let (mut tf, mut tg) = (1.0, z);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= z3 / ((k3 - 1.0) * k3);
        tg *= z3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() <= 1e-17 * f.abs().max(1e-300) && tg.abs() <= 1e-17 * g.abs().max(1e-300) {
            break;
        }
    }
    (f, g)
}

/// Sums of the Debye-type coefficients u_k/ζ^k truncated at the smallest term,
/// returned split by parity with alternating signs (P, Q) and plain (S).
fn asymptotic_sums(zeta: f64) -> (f64, f64, f64) {
    let (mut p, mut q, mut s) = (1.0, 0.0, 1.0);
    let mut u = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let t = u / zeta.powi(k);
        if t >= last {
            break;
        }
        last = t;
        s += t;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * t;
        } else {
            q += sign * t;
        }
        if t < 1e-17 {
            break;
        }
    }
    (p, q, s)
}

fn oscillatory(x: f64) -> (f64, f64) {
    // x > 0, argument −x
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let (p, q, _) = asymptotic_sums(zeta);
    let pre = 1.0 / (PI.sqrt() * x.powf(0.25));
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    (pre * (c * p + s * q), pre * (-s * p + c * q))
}

/// K_{1/3}(ζ)·e^{ζ} by the trapezoid rule on ∫ e^{−ζ(cosh t − 1)} cosh(t/3) dt.
fn scaled_k13(zeta: f64) -> f64 {
    let top = (1.0 + 42.0 / zeta).acosh();
    let n = 400;
    let h = top / n as f64;
    let mut acc = 0.5;
    for j in 1..=n {
        let t = j as f64 * h;
        acc += (-zeta * (t.cosh() - 1.0)).exp() * (t / 3.0).cosh();
    }
    acc * h
}

pub fn airy_ai(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < SERIES_LOW {
        oscillatory(-z).0
    } else if z <= AI_SERIES_HIGH {
        let (f, g) = maclaurin(z);
        AI0 * f - DAI0 * g
    } else {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        (z / 3.0).sqrt() / PI * scaled_k13(zeta) * (-zeta).exp()
    }
}

pub fn airy_bi(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < SERIES_LOW {
        oscillatory(-z).1
    } else if z <= BI_SERIES_HIGH {
        let (f, g) = maclaurin(z);
        SQRT3 * (AI0 * f + DAI0 * g)
    } else {
        let zeta = 2.0 / 3.0 * z * z.sqrt();
        let (_, _, s) = asymptotic_sums(zeta);
        zeta.exp() / (PI.sqrt() * z.powf(0.25)) * s
    }
}

/// Determinant of the Airy solutions at the walls x = ±1/2 for the
/// dimensionless energy ε; zero exactly at the levels.
pub fn airy_quantization(epsilon: f64) -> f64 {
    airy_ai(-0.5 - epsilon) * airy_bi(0.5 - epsilon) - airy_ai(0.5 - epsilon) * airy_bi(-0.5 - epsilon)
}

#[derive(Debug, Clone, Copy)]
pub struct AiryScan {
    pub start: f64,
    pub step: f64,
    pub limit: f64,
}

impl Default for AiryScan {
    fn default() -> Self {
        AiryScan { start: -1.0, step: 0.25, limit: 1e5 }
    }
}

pub fn solve_airy_levels(n_levels: usize) -> Result<Vec<f64>> {
    solve_airy_levels_with(n_levels, AiryScan::default())
}

pub fn solve_airy_levels_with(n_levels: usize, scan: AiryScan) -> Result<Vec<f64>> {
    if n_levels == 0 {
        return Err(Error::Domain("need at least one level".into()));
    }
    let mut roots = Vec::with_capacity(n_levels);
    let mut lo = scan.start;
    let mut f_lo = airy_quantization(lo);
    while roots.len() < n_levels {
        let hi = lo + scan.step;
        if hi > scan.limit {
            return Err(Error::Domain(format!(
                "found {} of {} levels while scanning [{}, {}]",
                roots.len(),
                n_levels,
                scan.start,
                scan.limit
            )));
        }
        let f_hi = airy_quantization(hi);
        if f_lo == 0.0 {
            roots.push(lo);
        } else if f_lo * f_hi < 0.0 {
            roots.push(bisect(lo, hi, f_lo)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    roots.truncate(n_levels);
    Ok(roots)
}

fn bisect(mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = airy_quantization(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootNotConverged { lo, hi })
}
