//! Even/odd solution pair of u″ = −λu about the interval midpoint.

/// With y = x − x̄ and half-width h:
/// q > 0: cos qy, sin(qy)/q; q < 0 (κ = −q): e^{−κh}cosh κy, e^{−κh}sinh(κy)/κ;
/// q = 0: 1, y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LocalPair {
    pub q: f64,
    pub h: f64,
}

impl LocalPair {
    /// λ = sign(q)·q², the energy in units of ħ²/2m.
    pub fn lambda(&self) -> f64 {
        self.q * self.q.abs()
    }

    /// [f, g, f′, g′] at y.
    pub fn eval(&self, y: f64) -> [f64; 4] {
        let q = self.q;
        if q > 0.0 {
            let (s, c) = (q * y).sin_cos();
            [c, s / q, -q * s, c]
        } else if q < 0.0 {
            let k = -q;
            let (ch, sh) = if k * self.h < 20.0 {
                let e = (-k * self.h).exp();
                ((k * y).cosh() * e, (k * y).sinh() * e)
            } else {
                let ep = (k * (y - self.h)).exp();
                let em = (-k * (y + self.h)).exp();
                (0.5 * (ep + em), 0.5 * (ep - em))
            };
            [ch, sh / k, k * sh, ch]
        } else {
            [1.0, y, 0.0, 1.0]
        }
    }

    /// (∫f², ∫g²) over [−h, h]; the cross term vanishes by parity.
    pub fn norms(&self) -> (f64, f64) {
        let h = self.h;
        let q = self.q;
        if q == 0.0 {
            return (2.0 * h, 2.0 * h * h * h / 3.0);
        }
        let x = 2.0 * q.abs() * h;
        if q > 0.0 {
            (h * (1.0 + sinc(x)), 4.0 * h * h * h * one_minus_sinc_over_sq(x))
        } else {
            let e = (-x).exp();
            let shc = if x < 1.0 { sinhc(x) * e } else { (1.0 - (-2.0 * x).exp()) / (2.0 * x) };
            (h * (e + shc), 4.0 * h * h * h * scaled_sinhc_minus_one_over_sq(x))
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// (1 − sin x / x)/x²
fn one_minus_sinc_over_sq(x: f64) -> f64 {
    if x.abs() < 1.0 {
        series_over_sq(x, -1.0)
    } else {
        (1.0 - x.sin() / x) / (x * x)
    }
}

/// e^{−x}(sinh x / x − 1)/x²
fn scaled_sinhc_minus_one_over_sq(x: f64) -> f64 {
    if x < 1.0 {
        series_over_sq(x, 1.0) * (-x).exp()
    } else {
        ((1.0 - (-2.0 * x).exp()) / (2.0 * x) - (-x).exp()) / (x * x)
    }
}

/// Σ_{n≥1} s^{n+1} x^{2n−2}/(2n+1)! with s = ±1 (negated for s = −1).
fn series_over_sq(x: f64, s: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0 / 6.0;
    let mut acc = term;
    for n in 2..30 {
        let nf = n as f64;
        term *= s * x2 / ((2.0 * nf) * (2.0 * nf + 1.0));
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            break;
        }
    }
    acc
}
