//! Closed convex cones of future-directed velocities in R³ and the dual
//! and intersection tests the existence criteria need.
//!
//! Two families are supported. A *segment* cone is the conic hull of the
//! segment `{u1 + s u2 : |s| ≤ 1}` and lives in a plane (the contact
//! distribution for the default cone `u1 = X1, u2 = X2`). A *circular* cone
//! with axis `a` and aperture parameter `η ≥ 0` is
//! `{v : v·â ≥ sqrt(η+1) |v - (v·â) â|}`.

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, RANK_TOL};

/// Absolute tolerance of the containment and intersection tests.
pub const ZERO_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConeError {
    #[error("cone generators are degenerate: {0}")]
    Degenerate(String),
    #[error("cone contains a line, the dual has empty interior")]
    NotAcute,
    #[error("subspace basis is linearly dependent")]
    DependentBasis,
}

/// A linear functional on R³, stored by its coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Covector(pub Vector3<f64>);

impl Covector {
    pub fn apply(&self, v: &Vector3<f64>) -> f64 {
        self.0.dot(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "ConeRepr")]
pub enum SolidCone {
    Segment { u1: Vector3<f64>, u2: Vector3<f64> },
    Circular { axis: Vector3<f64>, eta: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ConeRepr {
    Segment { u1: Vector3<f64>, u2: Vector3<f64> },
    Circular { axis: Vector3<f64>, eta: f64 },
}

impl TryFrom<ConeRepr> for SolidCone {
    type Error = ConeError;

    fn try_from(r: ConeRepr) -> Result<Self, Self::Error> {
        match r {
            ConeRepr::Segment { u1, u2 } => SolidCone::segment(u1, u2),
            ConeRepr::Circular { axis, eta } => SolidCone::circular(axis, eta),
        }
    }
}

impl Default for SolidCone {
    /// `{x1 X1 + x2 X2 : x1 ≥ |x2|}`.
    fn default() -> Self {
        SolidCone::Segment { u1: Vector3::x(), u2: Vector3::y() }
    }
}

impl SolidCone {
    pub fn segment(u1: Vector3<f64>, u2: Vector3<f64>) -> Result<Self, ConeError> {
        if !u1.iter().chain(u2.iter()).all(|x| x.is_finite()) {
            return Err(ConeError::Degenerate("non-finite generator".into()));
        }
        if linalg::rank(&[u1, u2]) < 2 {
            return Err(ConeError::Degenerate("u1 and u2 must be linearly independent".into()));
        }
        Ok(SolidCone::Segment { u1, u2 })
    }

    pub fn circular(axis: Vector3<f64>, eta: f64) -> Result<Self, ConeError> {
        if !axis.iter().all(|x| x.is_finite()) || axis.norm() <= RANK_TOL {
            return Err(ConeError::Degenerate("axis must be a finite nonzero vector".into()));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(ConeError::Degenerate(format!("eta = {eta} must be finite and nonnegative")));
        }
        Ok(SolidCone::Circular { axis, eta })
    }

    /// A direction in the relative interior: `u1`, or the axis.
    pub fn center(&self) -> Vector3<f64> {
        match self {
            SolidCone::Segment { u1, .. } => *u1,
            SolidCone::Circular { axis, .. } => *axis,
        }
    }

    /// Extreme rays `u1 + u2` and `u1 - u2` of a segment cone.
    pub fn extreme_rays(&self) -> Option<(Vector3<f64>, Vector3<f64>)> {
        match self {
            SolidCone::Segment { u1, u2 } => Some((u1 + u2, u1 - u2)),
            SolidCone::Circular { .. } => None,
        }
    }

    /// Point of the compact cross-section at parameter `s ∈ [-1, 1]`
    /// (segment), or at angle `s·π` on the unit-height circle (circular).
    pub fn cross_section(&self, s: f64) -> Vector3<f64> {
        match self {
            SolidCone::Segment { u1, u2 } => u1 + s * u2,
            SolidCone::Circular { axis, eta } => {
                let a = axis.normalize();
                let e1 = linalg::any_orthogonal(&a);
                let e2 = a.cross(&e1);
                let r = 1.0 / (eta + 1.0).sqrt();
                let phi = s * std::f64::consts::PI;
                a + r * (phi.cos() * e1 + phi.sin() * e2)
            }
        }
    }

    /// Coordinates `(a, b)` with `v = a u1 + b u2` (segment), or
    /// `(ξ, |ζ|)` with `ξ` the axial and `|ζ|` the radial component
    /// (circular), together with the distance of `v` from the carrier.
    pub fn relative_coords(&self, v: &Vector3<f64>) -> (f64, f64, f64) {
        match self {
            SolidCone::Segment { u1, u2 } => {
                let g11 = u1.dot(u1);
                let g12 = u1.dot(u2);
                let g22 = u2.dot(u2);
                let det = g11 * g22 - g12 * g12;
                let r1 = u1.dot(v);
                let r2 = u2.dot(v);
                let a = (g22 * r1 - g12 * r2) / det;
                let b = (g11 * r2 - g12 * r1) / det;
                let off = (v - a * u1 - b * u2).norm();
                (a, b, off)
            }
            SolidCone::Circular { axis, .. } => {
                let a = axis.normalize();
                let xi = v.dot(&a);
                (xi, (v - xi * a).norm(), 0.0)
            }
        }
    }

    /// Membership test; `strict` asks for the relative interior.
    pub fn contains(&self, v: &Vector3<f64>, strict: bool) -> bool {
        let scale = v.norm().max(1.0);
        let tol = ZERO_TOL * scale;
        match self {
            SolidCone::Segment { .. } => {
                let (a, b, off) = self.relative_coords(v);
                if off > 1e3 * tol {
                    return false;
                }
                if strict {
                    a > tol && b.abs() < a - tol
                } else {
                    b.abs() <= a + tol
                }
            }
            SolidCone::Circular { eta, .. } => {
                let (xi, rho, _) = self.relative_coords(v);
                let k = (eta + 1.0).sqrt();
                if strict {
                    xi > k * rho + tol
                } else {
                    xi >= k * rho - tol
                }
            }
        }
    }

    /// Whether the cone contains no line.
    pub fn is_acute(&self) -> bool {
        match self {
            SolidCone::Segment { u1, u2 } => {
                let (p, m) = (u1 + u2, u1 - u2);
                let np = p.norm();
                let nm = m.norm();
                if np <= RANK_TOL || nm <= RANK_TOL {
                    return u1.norm() > RANK_TOL;
                }
                let antiparallel = p.cross(&m).norm() <= RANK_TOL * np * nm && p.dot(&m) < 0.0;
                !antiparallel
            }
            SolidCone::Circular { eta, .. } => *eta > -1.0,
        }
    }

    /// Whether `p` is nonnegative (positive with `strict`, the dual
    /// interior) on the cone minus the origin.
    pub fn dual_contains(&self, p: &Covector, strict: bool) -> Result<bool, ConeError> {
        if !self.is_acute() {
            return Err(ConeError::NotAcute);
        }
        let scale = p.0.norm().max(1.0);
        let tol = ZERO_TOL * scale;
        Ok(match self {
            SolidCone::Segment { u1, u2 } => {
                let lo = p.apply(u1) - p.apply(u2).abs();
                if strict { lo > tol } else { lo >= -tol }
            }
            SolidCone::Circular { axis, eta } => {
                let a = axis.normalize();
                let along = p.apply(&a);
                let across = (p.0 - along * a).norm();
                let lo = along - across / (eta + 1.0).sqrt();
                if strict { lo > tol } else { lo >= -tol }
            }
        })
    }

    /// Minimum of `p` on the compact cross-section.
    pub fn dual_margin(&self, p: &Covector) -> f64 {
        match self {
            SolidCone::Segment { u1, u2 } => p.apply(u1) - p.apply(u2).abs(),
            SolidCone::Circular { axis, eta } => {
                let a = axis.normalize();
                let along = p.apply(&a);
                along - (p.0 - along * a).norm() / (eta + 1.0).sqrt()
            }
        }
    }

    /// Whether `C ∩ U = {0}` for the subspace spanned by `basis`.
    pub fn cone_subspace_trivial(&self, basis: &[Vector3<f64>]) -> Result<bool, ConeError> {
        let u = checked_basis(basis)?;
        match self {
            SolidCone::Segment { u1, u2 } => {
                // Intersect U with the carrier plane, then test the directions.
                let plane = linalg::span(&[u1 + u2, u1 - u2]);
                let w = intersect_with_plane(&u, &plane);
                Ok(match w.len() {
                    0 => true,
                    1 => !(self.contains(&w[0], false) || self.contains(&(-w[0]), false)),
                    _ => false,
                })
            }
            SolidCone::Circular { axis, eta } => {
                let a = axis.normalize();
                let cos_edge = 1.0 / (eta + 2.0).sqrt();
                Ok(match u.len() {
                    0 => true,
                    1 => !(self.contains(&u[0], false) || self.contains(&(-u[0]), false)),
                    2 => {
                        let n = u[0].cross(&u[1]).normalize();
                        a.dot(&n).abs() > cos_edge + ZERO_TOL
                    }
                    _ => false,
                })
            }
        }
    }

    /// An interior point of the dual cone that annihilates `U`, if any.
    ///
    /// For a segment cone the witness is the minimum-norm solution of
    /// `p|U = 0, p(u1) = 1, p(u2) = 0` when that system is consistent;
    /// otherwise `p(u2)` is forced to a constant `s` on the affine set
    /// `p|U = 0, p(u1) = 1` and a witness exists iff `|s| < 1`.
    pub fn find_interior_dual_in_annihilator(
        &self,
        basis: &[Vector3<f64>],
    ) -> Result<Option<Covector>, ConeError> {
        if !self.is_acute() {
            return Err(ConeError::NotAcute);
        }
        let u = checked_basis(basis)?;
        let candidate = match self {
            SolidCone::Segment { u1, u2 } => {
                let mut rows: Vec<Vector3<f64>> = u.clone();
                let mut rhs: Vec<f64> = vec![0.0; u.len()];
                rows.push(*u1);
                rhs.push(1.0);
                rows.push(*u2);
                rhs.push(0.0);
                match consistent_min_norm(&rows, &rhs) {
                    Some(p) => Some(p),
                    None => {
                        rows.pop();
                        rhs.pop();
                        consistent_min_norm(&rows, &rhs)
                    }
                }
            }
            SolidCone::Circular { axis, .. } => {
                let comp = linalg::orthogonal_complement(&u);
                let a = axis.normalize();
                let p: Vector3<f64> = comp.iter().map(|c| c.dot(&a) * c).sum();
                let scale = p.dot(&a);
                (scale > ZERO_TOL).then(|| p / scale)
            }
        };
        let Some(mut p) = candidate else { return Ok(None) };
        // Remove the residual U-component left by the least-squares solve,
        // normalize to p(center) = 1 and drop rounding-level entries.
        for b in &u {
            p -= p.dot(b) * b;
        }
        let at_center = p.dot(&self.center());
        if at_center > 0.0 {
            p /= at_center;
        }
        let cut = 1e-14 * p.amax();
        p.apply(|x| {
            if x.abs() <= cut {
                *x = 0.0
            }
        });
        let p = Covector(p);
        Ok(self.dual_contains(&p, true)?.then_some(p))
    }
}

fn checked_basis(basis: &[Vector3<f64>]) -> Result<Vec<Vector3<f64>>, ConeError> {
    let u = linalg::span(basis);
    if u.len() != basis.len() {
        return Err(ConeError::DependentBasis);
    }
    Ok(u)
}

/// Orthonormal basis of `U ∩ P` for orthonormal bases of `U` and `P`.
fn intersect_with_plane(u: &[Vector3<f64>], plane: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let k = plane.len();
    if k == 0 || u.is_empty() {
        return Vec::new();
    }
    // Components of the plane basis orthogonal to U; their kernel is U ∩ P.
    let residual: Vec<Vector3<f64>> = plane
        .iter()
        .map(|b| b - u.iter().map(|e| e.dot(b) * e).sum::<Vector3<f64>>())
        .collect();
    let m = DMatrix::from_fn(3, k, |i, j| residual[j][i]);
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut out = Vec::new();
    for (idx, sv) in svd.singular_values.iter().enumerate() {
        if *sv <= RANK_TOL {
            let w: Vector3<f64> = (0..k).map(|j| vt[(idx, j)] * plane[j]).sum();
            out.push(w.normalize());
        }
    }
    // SVD of a 3×k matrix returns min(3,k) = k values; all of P lies in U
    // when every one vanishes.
    out
}

/// Minimum-norm solution of `rows · p = rhs`, if the system is consistent.
fn consistent_min_norm(rows: &[Vector3<f64>], rhs: &[f64]) -> Option<Vector3<f64>> {
    let m = DMatrix::from_fn(rows.len(), 3, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let svd = m.clone().svd(true, true);
    let x = svd.solve(&b, RANK_TOL).ok()?;
    let resid = (&m * &x - &b).amax();
    let scale = rows.iter().map(|r| r.amax()).fold(1.0, f64::max);
    (resid <= 1e-10 * scale).then(|| Vector3::new(x[0], x[1], x[2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_cone() -> SolidCone {
        SolidCone::default()
    }

    #[test]
    fn default_cone_membership() {
        let c = default_cone();
        assert!(c.contains(&Vector3::new(1.0, 0.5, 0.0), true));
        assert!(c.contains(&Vector3::new(1.0, 1.0, 0.0), false));
        assert!(!c.contains(&Vector3::new(1.0, 1.0, 0.0), true));
        assert!(!c.contains(&Vector3::new(1.0, 0.0, 0.1), false));
        assert!(!c.contains(&Vector3::new(-1.0, 0.0, 0.0), false));
    }

    #[test]
    fn dual_witness_heisenberg() {
        // U = [g,g] = span(X3).
        let p = default_cone().find_interior_dual_in_annihilator(&[Vector3::z()]).unwrap().unwrap();
        assert!((p.0 - Vector3::x()).norm() < 1e-12);
    }

    #[test]
    fn dual_witness_case_2star() {
        let tau = 0.7;
        let u = [Vector3::new(tau, 0.0, 1.0)];
        let p = default_cone().find_interior_dual_in_annihilator(&u).unwrap().unwrap();
        assert!((p.0 - Vector3::new(1.0, 0.0, -tau)).norm() < 1e-12);
    }

    #[test]
    fn no_witness_when_plane_contains_ray() {
        let u = [Vector3::new(1.0, 1.0, 0.0), Vector3::z()];
        assert!(default_cone().find_interior_dual_in_annihilator(&u).unwrap().is_none());
        assert!(!default_cone().cone_subspace_trivial(&u).unwrap());
    }

    #[test]
    fn circular_plane_test() {
        let c = SolidCone::circular(Vector3::z(), 0.0).unwrap();
        // Horizontal plane: trivial intersection.
        assert!(c.cone_subspace_trivial(&[Vector3::x(), Vector3::y()]).unwrap());
        // Vertical plane: contains the axis.
        assert!(!c.cone_subspace_trivial(&[Vector3::x(), Vector3::z()]).unwrap());
    }

    #[test]
    fn dependent_basis_rejected() {
        let u = [Vector3::x(), 2.0 * Vector3::x()];
        assert_eq!(default_cone().cone_subspace_trivial(&u), Err(ConeError::DependentBasis));
    }

    #[test]
    fn json_roundtrip() {
        let c = default_cone();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"kind":"segment","u1":[1.0,0.0,0.0],"u2":[0.0,1.0,0.0]}"#);
        let back: SolidCone = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<SolidCone>(r#"{"kind":"circular","axis":[0,0,1],"eta":-1}"#).is_err());
        assert!(serde_json::from_str::<SolidCone>(r#"{"kind":"segment","u1":[1,0,0],"u2":[2,0,0]}"#).is_err());
    }
}
