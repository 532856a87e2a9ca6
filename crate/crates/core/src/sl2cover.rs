//! The universal cover of `SL(2,R)` as `R × C`.
//!
//! A point `(c, w)` projects to the `SU(1,1)` matrix
//! `[[e^{ic} sqrt(1+|w|²), w], [conj(w), e^{-ic} sqrt(1+|w|²)]]`. Tangent
//! vectors at the identity are pairs `(ξ, ζ) ∈ R × C`, identified with the
//! matrices `[[iξ, ζ], [conj(ζ), -iξ]]` of `su(1,1)`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CoverError {
    #[error("tangent vector (ξ = {xi}, |ζ| = {zeta_abs}) is outside the cone ξ² ≥ (η+1)|ζ|², ξ > 0")]
    OutsideCone { xi: f64, zeta_abs: f64 },
    #[error("eta must be positive, got {0}")]
    Eta(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverElement {
    pub c: f64,
    pub w: Complex64,
}

impl CoverElement {
    pub const IDENTITY: CoverElement = CoverElement { c: 0.0, w: Complex64 { re: 0.0, im: 0.0 } };

    pub fn new(c: f64, w: Complex64) -> Self {
        Self { c, w }
    }

    fn radius(&self) -> f64 {
        (1.0 + self.w.norm_sqr()).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentVector {
    pub xi: f64,
    pub zeta: Complex64,
}

impl TangentVector {
    pub fn new(xi: f64, zeta: Complex64) -> Self {
        Self { xi, zeta }
    }

    /// Flat Euclidean norm on `R × C ≅ R³`.
    pub fn norm(&self) -> f64 {
        (self.xi * self.xi + self.zeta.norm_sqr()).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { xi: s * self.xi, zeta: s * self.zeta }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { xi: self.xi + o.xi, zeta: self.zeta + o.zeta }
    }
}

pub fn multiply(g1: &CoverElement, g2: &CoverElement) -> CoverElement {
    let (r1, r2) = (g1.radius(), g2.radius());
    let cross = g1.w * g2.w.conj() * Complex64::from_polar(1.0, -(g1.c + g2.c));
    let den = r1 * r2 + cross.re;
    // r1 r2 - |w1||w2| ≥ 1/(r1 r2) > 0.
    assert!(den > 0.0, "arctangent denominator must be positive, got {den}");
    let c = g1.c + g2.c + (cross.im / den).atan();
    let w = g2.w * r1 * Complex64::from_polar(1.0, g1.c) + g1.w * r2 * Complex64::from_polar(1.0, -g2.c);
    CoverElement { c, w }
}

pub fn inverse(g: &CoverElement) -> CoverElement {
    CoverElement { c: -g.c, w: -g.w }
}

pub fn project(g: &CoverElement) -> Matrix2<Complex64> {
    let z = Complex64::from_polar(g.radius(), g.c);
    Matrix2::new(z, g.w, g.w.conj(), z.conj())
}

/// Differential of the left shift by `base` applied to `v ∈ g`.
pub fn push_forward(base: &CoverElement, v: &TangentVector) -> TangentVector {
    let r = base.radius();
    let rot = Complex64::from_polar(1.0, base.c);
    let xi = v.xi + (base.w * v.zeta.conj() * rot.conj()).im / r;
    let zeta = v.zeta * r * rot - I * base.w * v.xi;
    TangentVector { xi, zeta }
}

/// The form `τ = dc` on a tangent vector at any base point.
pub fn time_form(_base: &CoverElement, v: &TangentVector) -> f64 {
    v.xi
}

/// Membership in `C+_η = {ξ ≥ 0, ξ² ≥ (η+1)|ζ|²}` minus the origin.
pub fn in_eta_cone(u: &TangentVector, eta: f64) -> bool {
    u.xi > 0.0 && u.xi * u.xi >= (eta + 1.0) * u.zeta.norm_sqr()
}

/// Uniform constants of the sublinear growth estimate for a given `η > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthConstants {
    pub eta: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub b: f64,
}

impl GrowthConstants {
    pub fn new(eta: f64) -> Result<Self, CoverError> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(CoverError::Eta(eta));
        }
        let s = 1.0 / (eta + 1.0).sqrt();
        let c1 = 1.0 - s;
        let c2 = 1.0 + s;
        Ok(Self { eta, c1, c2, a: (s + c2) / c1, b: (s + 1.0) / c1 })
    }

    pub fn bound(&self, w_abs: f64) -> f64 {
        self.a + self.b * w_abs
    }
}

/// `|v| / τ(v)` for `v` the left shift of `u ∈ C+_η \ 0` to `base`.
pub fn growth_ratio(base: &CoverElement, u: &TangentVector, eta: f64) -> Result<f64, CoverError> {
    GrowthConstants::new(eta)?;
    let tol = 1e-12 * u.norm();
    if !(u.xi > 0.0 && u.xi * u.xi >= (eta + 1.0) * u.zeta.norm_sqr() - tol * u.xi) {
        return Err(CoverError::OutsideCone { xi: u.xi, zeta_abs: u.zeta.norm() });
    }
    let v = push_forward(base, u);
    Ok(v.norm() / time_form(base, &v))
}

/// The `su(1,1)` matrix of a tangent vector at the identity.
pub fn algebra_matrix(u: &TangentVector) -> Matrix2<Complex64> {
    Matrix2::new(I * u.xi, u.zeta, u.zeta.conj(), -I * u.xi)
}

/// Bracket of `su(1,1)`, read back into `(ξ, ζ)` coordinates.
pub fn algebra_bracket(u: &TangentVector, v: &TangentVector) -> TangentVector {
    let (a, b) = (algebra_matrix(u), algebra_matrix(v));
    let m = a * b - b * a;
    TangentVector { xi: m[(0, 0)].im, zeta: m[(0, 1)] }
}

/// One classical Runge–Kutta step of `ẋ = L_{x*} u` over time `h`.
pub fn rk4_step(x: &CoverElement, u: &TangentVector, h: f64) -> CoverElement {
    let f = |p: &CoverElement| push_forward(p, u);
    let shift = |p: &CoverElement, k: &TangentVector, s: f64| CoverElement {
        c: p.c + s * k.xi,
        w: p.w + s * k.zeta,
    };
    let k1 = f(x);
    let k2 = f(&shift(x, &k1, h / 2.0));
    let k3 = f(&shift(x, &k2, h / 2.0));
    let k4 = f(&shift(x, &k3, h));
    let inc = k1.add(&k2.scale(2.0)).add(&k3.scale(2.0)).add(&k4).scale(h / 6.0);
    shift(x, &inc, 1.0)
}

/// `x · exp(t u)` approximated by `steps` Runge–Kutta steps.
pub fn flow(x: &CoverElement, u: &TangentVector, t: f64, steps: usize) -> CoverElement {
    let h = t / steps.max(1) as f64;
    (0..steps.max(1)).fold(*x, |p, _| rk4_step(&p, u, h))
}
