//! Self-adjoint boundary conditions of the free particle on an interval,
//! parametrized by 2×2 unitaries acting on endpoint traces.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Vec2, I, ONE, ZERO};

pub const DEFAULT_UNITARY_TOL: f64 = 1e-10;
pub const DEFAULT_MINUS_ONE_TOL: f64 = 1e-9;

/// Named family a unitary was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BcFamily {
    Dirichlet,
    Neumann,
    Robin { alpha: f64 },
    PseudoPeriodic { alpha: f64 },
    Local { alpha1: f64, alpha2: f64 },
}

impl fmt::Display for BcFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BcFamily::Dirichlet => write!(f, "dirichlet"),
            BcFamily::Neumann => write!(f, "neumann"),
            BcFamily::Robin { alpha } => write!(f, "robin:{alpha}"),
            BcFamily::PseudoPeriodic { alpha } => write!(f, "periodic:{alpha}"),
            BcFamily::Local { alpha1, alpha2 } => write!(f, "local:{alpha1},{alpha2}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryUnitary {
    u: Mat2,
    tol_unitary: f64,
    family: Option<BcFamily>,
}

impl BoundaryUnitary {
    pub fn new(u: Mat2) -> Result<Self> {
        Self::with_tolerance(u, DEFAULT_UNITARY_TOL)
    }

    pub fn with_tolerance(u: Mat2, tol_unitary: f64) -> Result<Self> {
        if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NumericDomain("boundary unitary".into()));
        }
        let deviation = linalg::max_abs(&(u.adjoint() * u - linalg::identity()));
        if deviation > tol_unitary {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(BoundaryUnitary { u, tol_unitary, family: None })
    }

    /// `e^{iθ₁}|v⟩⟨v| + e^{iθ₂}|v⊥⟩⟨v⊥|` for a nonzero `v`.
    pub fn from_spectral(theta1: f64, theta2: f64, v: Vec2) -> Result<Self> {
        let n = linalg::norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain("eigenvector must be nonzero".into()));
        }
        let v = v / Complex64::new(n, 0.0);
        let w = linalg::perp(&v);
        let u = linalg::outer(&v, &v) * Complex64::from_polar(1.0, theta1)
            + linalg::outer(&w, &w) * Complex64::from_polar(1.0, theta2);
        Self::new(u)
    }

    /// Row-major (re, im) pairs.
    pub fn from_re_im(parts: &[f64; 8]) -> Result<Self> {
        let z = |k: usize| Complex64::new(parts[2 * k], parts[2 * k + 1]);
        Self::new(Mat2::new(z(0), z(1), z(2), z(3)))
    }

    pub fn to_re_im(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        let entries = [self.u[(0, 0)], self.u[(0, 1)], self.u[(1, 0)], self.u[(1, 1)]];
        for (k, z) in entries.iter().enumerate() {
            out[2 * k] = z.re;
            out[2 * k + 1] = z.im;
        }
        out
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.u
    }
    pub fn tol_unitary(&self) -> f64 {
        self.tol_unitary
    }
    pub fn family(&self) -> Option<BcFamily> {
        self.family
    }

    fn tagged(mut self, family: BcFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn with_family(self, family: BcFamily) -> Self {
        self.tagged(family)
    }

    /// Short identifier used to label eigenbases.
    pub fn label(&self) -> String {
        match self.family {
            Some(f) => f.to_string(),
            None => {
                let p = self.to_re_im();
                format!(
                    "u[{}]",
                    p.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",")
                )
            }
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::max_abs(&(self.u.adjoint() * self.u - linalg::identity()))
    }
}

impl Serialize for BoundaryUnitary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BcJson { u: self.to_re_im(), tag: self.family }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BoundaryUnitary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = BcJson::deserialize(d)?;
        let mut bc = BoundaryUnitary::from_re_im(&raw.u).map_err(serde::de::Error::custom)?;
        bc.family = raw.tag;
        Ok(bc)
    }
}

#[derive(Serialize, Deserialize)]
struct BcJson {
    u: [f64; 8],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tag: Option<BcFamily>,
}

/// Raw endpoint values and ordinary derivatives of a function on [a, b].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointData {
    pub value_a: Complex64,
    pub value_b: Complex64,
    pub deriv_a: Complex64,
    pub deriv_b: Complex64,
}

/// Boundary data in the scaled convention Ψ = (ψ(a), ψ(b)),
/// Ψ′ = l0·(−ψ′(a), ψ′(b)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTrace {
    pub psi: Vec2,
    pub dpsi: Vec2,
}

impl BoundaryTrace {
    pub fn new(psi: Vec2, dpsi: Vec2) -> Result<Self> {
        if psi.iter().chain(dpsi.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NumericDomain("boundary trace".into()));
        }
        Ok(BoundaryTrace { psi, dpsi })
    }

    pub fn from_endpoints(e: &EndpointData, l0: f64) -> Result<Self> {
        Self::new(
            Vec2::new(e.value_a, e.value_b),
            Vec2::new(-e.deriv_a * l0, e.deriv_b * l0),
        )
    }

    pub fn to_endpoints(&self, l0: f64) -> EndpointData {
        EndpointData {
            value_a: self.psi[0],
            value_b: self.psi[1],
            deriv_a: -self.dpsi[0] / l0,
            deriv_b: self.dpsi[1] / l0,
        }
    }
}

/// Λ(ψ, φ) = ψ̄′φ|_a^b − ψ̄φ′|_a^b; its vanishing on a domain is the
/// symmetry condition for the Laplacian.
pub fn boundary_form(psi: &EndpointData, phi: &EndpointData) -> Result<Complex64> {
    let all = [
        psi.value_a, psi.value_b, psi.deriv_a, psi.deriv_b, phi.value_a, phi.value_b, phi.deriv_a,
        phi.deriv_b,
    ];
    if all.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NumericDomain("boundary form arguments".into()));
    }
    Ok(psi.deriv_b.conj() * phi.value_b - psi.deriv_a.conj() * phi.value_a
        - psi.value_b.conj() * phi.deriv_b
        + psi.value_a.conj() * phi.deriv_a)
}

/// Λ written in scaled traces: (⟨Ψ′|Φ⟩ − ⟨Ψ|Φ′⟩)/l0.
pub fn boundary_form_traces(psi: &BoundaryTrace, phi: &BoundaryTrace, l0: f64) -> Complex64 {
    (linalg::dot(&psi.dpsi, &phi.psi) - linalg::dot(&psi.psi, &phi.dpsi)) / l0
}

/// Residual ‖i(I+U)Ψ′ − (I−U)Ψ‖ relative to 1 + ‖Ψ‖ + ‖Ψ′‖.
pub fn bc_residual(u: &BoundaryUnitary, trace: &BoundaryTrace) -> f64 {
    let id = linalg::identity();
    let r = (id + u.u) * trace.dpsi * I - (id - u.u) * trace.psi;
    linalg::norm(&r) / (1.0 + linalg::norm(&trace.psi) + linalg::norm(&trace.dpsi))
}

pub fn satisfies_bc(u: &BoundaryUnitary, trace: &BoundaryTrace, tol: f64) -> bool {
    bc_residual(u, trace) <= tol
}

fn check_angle(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > -PI && alpha <= PI) {
        return Err(Error::Domain(format!("angle {alpha} outside (-pi, pi]")));
    }
    Ok(())
}

/// e^{iα}, exact at the quarter turns.
pub fn unit_phase(alpha: f64) -> Complex64 {
    if alpha == 0.0 {
        ONE
    } else if alpha == PI || alpha == -PI {
        -ONE
    } else if alpha == FRAC_PI_2 {
        I
    } else if alpha == -FRAC_PI_2 {
        -I
    } else {
        Complex64::from_polar(1.0, alpha)
    }
}

/// ψ′(a) = −(tan(α/2)/l0)ψ(a), ψ′(b) = (tan(α/2)/l0)ψ(b), i.e. U = e^{−iα}I.
pub fn make_robin(alpha: f64) -> Result<BoundaryUnitary> {
    check_angle(alpha)?;
    let p = unit_phase(-alpha);
    Ok(BoundaryUnitary::new(Mat2::new(p, ZERO, ZERO, p))?.tagged(BcFamily::Robin { alpha }))
}

pub fn make_dirichlet() -> BoundaryUnitary {
    BoundaryUnitary { u: -linalg::identity(), tol_unitary: DEFAULT_UNITARY_TOL, family: Some(BcFamily::Dirichlet) }
}

pub fn make_neumann() -> BoundaryUnitary {
    BoundaryUnitary { u: linalg::identity(), tol_unitary: DEFAULT_UNITARY_TOL, family: Some(BcFamily::Neumann) }
}

/// ψ(b) = e^{iα}ψ(a), ψ′(b) = e^{iα}ψ′(a).
pub fn make_pseudo_periodic(alpha: f64) -> Result<BoundaryUnitary> {
    check_angle(alpha)?;
    let u = Mat2::new(ZERO, unit_phase(-alpha), unit_phase(alpha), ZERO);
    Ok(BoundaryUnitary::new(u)?.tagged(BcFamily::PseudoPeriodic { alpha }))
}

/// Independent Robin-type conditions at each wall.
pub fn make_local(alpha1: f64, alpha2: f64) -> Result<BoundaryUnitary> {
    check_angle(alpha1)?;
    check_angle(alpha2)?;
    let u = Mat2::new(unit_phase(-alpha1), ZERO, ZERO, unit_phase(-alpha2));
    Ok(BoundaryUnitary::new(u)?.tagged(BcFamily::Local { alpha1, alpha2 }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinusOneStructure {
    pub count: usize,
    pub xi: Option<Vec2>,
    pub xi_perp: Option<Vec2>,
    pub u2: Option<Complex64>,
    /// Both eigenvalues, in the order of the eigen-analysis.
    pub eigenvalues: [Complex64; 2],
}

pub fn classify_minus_one(u: &BoundaryUnitary, tol: f64) -> MinusOneStructure {
    let (phases, vecs) = linalg::unitary_eigen(&u.u);
    let eig = phases.map(|p| Complex64::from_polar(1.0, p));
    let near: Vec<usize> = (0..2).filter(|&j| (eig[j] + ONE).norm() <= tol).collect();
    match near.len() {
        1 => {
            let j = near[0];
            let xi = vecs[j];
            MinusOneStructure {
                count: 1,
                xi: Some(xi),
                xi_perp: Some(linalg::perp(&xi)),
                u2: Some(eig[1 - j]),
                eigenvalues: eig,
            }
        }
        n => MinusOneStructure { count: n, xi: None, xi_perp: None, u2: None, eigenvalues: eig },
    }
}

/// Phase of the wall reflection coefficient for a plane wave of wavenumber
/// `k` hitting a Robin wall, tan(β/2) = tan(α/2)/(k·l0).
pub fn reflection_phase(alpha: f64, k: f64, l0: f64) -> Result<f64> {
    check_angle(alpha)?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    if !(l0.is_finite() && l0 > 0.0) {
        return Err(Error::Domain(format!("l0 must be positive, got {l0}")));
    }
    if alpha == PI {
        return Ok(PI);
    }
    let half = 0.5 * alpha;
    Ok(2.0 * half.sin().atan2(half.cos() * k * l0))
}
