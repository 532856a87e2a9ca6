//! Simply connected groups of the classification rows, realized concretely.
//!
//! * Solvable algebras become `R ⋉ R²`: a two-dimensional abelian ideal `n`
//!   containing `[g,g]` and a complementary direction `e` acting on `n` by
//!   `D = ad_e|n`. Elements are pairs `(t, v)` with
//!   `(t1, v1)(t2, v2) = (t1 + t2, v1 + e^{t1 D} v2)`.
//! * `su2` becomes the unit quaternions.
//! * `sl2(R)` becomes the universal cover `R × C` of [`crate::sl2cover`].

use nalgebra::{Cholesky, Matrix2, Matrix3, UnitQuaternion, Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::liealg3::{AlgebraKind, LieAlgebra3};
use crate::linalg;
use crate::sl2cover::{self, CoverElement, TangentVector};

use super::LongArcError;

/// Residual allowed when verifying that a model reproduces the brackets.
const MODEL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupElement {
    Semidirect { t: f64, v: Vector2<f64> },
    Quaternion(UnitQuaternion<f64>),
    Cover(CoverElement),
}

#[derive(Clone, Debug)]
pub struct SemidirectModel {
    e: Vector3<f64>,
    n: [Vector3<f64>; 2],
    d: Matrix2<f64>,
}

impl SemidirectModel {
    fn build(alg: &LieAlgebra3) -> Result<Self, LongArcError> {
        let derived = alg.derived_subalgebra();
        let n = match derived.len() {
            2 => [derived[0], derived[1]],
            1 => {
                let d0 = derived[0];
                let y = linalg::kernel(&alg.ad(&d0))
                    .into_iter()
                    .map(|k| k - k.dot(&d0) * d0)
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .filter(|y| y.norm() > 0.5)
                    .ok_or_else(|| LongArcError::Model("centralizer of [g,g] is one-dimensional".into()))?;
                [d0, y.normalize()]
            }
            0 => [Vector3::y(), Vector3::z()],
            k => return Err(LongArcError::Model(format!("derived subalgebra has dimension {k}"))),
        };
        if alg.bracket(&n[0], &n[1]).norm() > MODEL_TOL {
            return Err(LongArcError::Model("no abelian ideal containing [g,g]".into()));
        }
        let e = n[0].cross(&n[1]).normalize();
        let mut d = Matrix2::zeros();
        for j in 0..2 {
            let b = alg.bracket(&e, &n[j]);
            d[(0, j)] = b.dot(&n[0]);
            d[(1, j)] = b.dot(&n[1]);
            let rest = b - d[(0, j)] * n[0] - d[(1, j)] * n[1];
            if rest.norm() > MODEL_TOL {
                return Err(LongArcError::Model("ideal is not invariant under ad_e".into()));
            }
        }
        Ok(Self { e, n, d })
    }

    fn split(&self, u: &Vector3<f64>) -> (f64, Vector2<f64>) {
        (u.dot(&self.e), Vector2::new(u.dot(&self.n[0]), u.dot(&self.n[1])))
    }

    fn exp(&self, u: &Vector3<f64>) -> (f64, Vector2<f64>) {
        let (a, b) = self.split(u);
        let ad = self.d * a;
        let m = Matrix3::new(ad[(0, 0)], ad[(0, 1)], b[0], ad[(1, 0)], ad[(1, 1)], b[1], 0.0, 0.0, 0.0);
        let x = m.exp();
        (a, Vector2::new(x[(0, 2)], x[(1, 2)]))
    }

    fn mul(&self, (t1, v1): (f64, Vector2<f64>), (t2, v2): (f64, Vector2<f64>)) -> (f64, Vector2<f64>) {
        (t1 + t2, v1 + (self.d * t1).exp() * v2)
    }

    /// Lie algebra coordinates `t e + v1 n1 + v2 n2` of the split coordinates.
    pub fn unsplit(&self, t: f64, v: &Vector2<f64>) -> Vector3<f64> {
        t * self.e + v[0] * self.n[0] + v[1] * self.n[1]
    }
}

#[derive(Clone, Debug)]
pub struct Su2Model {
    to_y: Matrix3<f64>,
}

impl Su2Model {
    fn build(alg: &LieAlgebra3) -> Result<Self, LongArcError> {
        let b = -alg.killing_form() / 2.0;
        let chol = Cholesky::new(b).ok_or_else(|| LongArcError::Model("Killing form not negative definite".into()))?;
        let mut to_y = chol.l().transpose();
        let from_y = to_y.try_inverse().expect("Cholesky factor is invertible");
        let f = |i: usize| from_y.column(i).into_owned();
        let b12 = to_y * alg.bracket(&f(0), &f(1));
        if b12[2] < 0.0 {
            to_y.row_mut(2).neg_mut();
        }
        let model = Self { to_y };
        model.verify(alg)?;
        Ok(model)
    }

    fn verify(&self, alg: &LieAlgebra3) -> Result<(), LongArcError> {
        let from_y = self.to_y.try_inverse().expect("invertible");
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let (a, b) = (from_y.column(i).into_owned(), from_y.column(j).into_owned());
            let lhs = self.to_y * alg.bracket(&a, &b);
            let rhs = (self.to_y * a).cross(&(self.to_y * b));
            if (lhs - rhs).norm() > MODEL_TOL {
                return Err(LongArcError::Model("su2 frame does not reproduce the brackets".into()));
            }
        }
        Ok(())
    }

    fn exp(&self, u: &Vector3<f64>) -> UnitQuaternion<f64> {
        UnitQuaternion::from_scaled_axis(self.to_y * u)
    }
}

#[derive(Clone, Debug)]
pub struct CoverModel {
    to_cover: Matrix3<f64>,
}

impl CoverModel {
    fn build(alg: &LieAlgebra3, timelike: &Vector3<f64>) -> Result<Self, LongArcError> {
        let eig = alg.killing_form().symmetric_eigen();
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let col = |i: usize| -> Vector3<f64> {
            let lam = eig.eigenvalues[order[i]];
            eig.eigenvectors.column(order[i]).into_owned() * (8.0 / lam.abs()).sqrt()
        };
        // K-orthonormal frame with K = diag(-8, 8, 8), matching su(1,1).
        let mut f = [col(0), col(1), col(2)];
        let target = |x: f64, y: f64, z: f64| TangentVector::new(x, Complex64::new(y, z));
        let frame_of = |f: &[Vector3<f64>; 3]| Matrix3::from_columns(f);
        let m = frame_of(&f).try_inverse().ok_or_else(|| LongArcError::Model("degenerate Killing form".into()))?;
        let c01 = m * alg.bracket(&f[0], &f[1]);
        if c01[2] < 0.0 {
            f[2] = -f[2];
        }
        if (frame_of(&f).try_inverse().expect("invertible") * timelike)[0] < 0.0 {
            f[0] = -f[0];
            f[2] = -f[2];
        }
        let to_cover = frame_of(&f).try_inverse().expect("invertible");
        let model = Self { to_cover };
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let lhs = model.tangent(&alg.bracket(&f[i], &f[j]));
            let basis = [target(1.0, 0.0, 0.0), target(0.0, 1.0, 0.0), target(0.0, 0.0, 1.0)];
            let rhs = sl2cover::algebra_bracket(&basis[i], &basis[j]);
            if (lhs.xi - rhs.xi).abs() + (lhs.zeta - rhs.zeta).norm() > MODEL_TOL * 8.0 {
                return Err(LongArcError::Model("sl2 frame does not reproduce the brackets".into()));
            }
        }
        Ok(model)
    }

    /// Coordinates `(ξ, ζ)` of an algebra vector.
    pub fn tangent(&self, u: &Vector3<f64>) -> TangentVector {
        let a = self.to_cover * u;
        TangentVector::new(a[0], Complex64::new(a[1], a[2]))
    }

    /// The row vector `u ↦ ξ(u)`.
    pub fn xi_row(&self) -> Vector3<f64> {
        self.to_cover.row(0).transpose()
    }
}

#[derive(Clone, Debug)]
pub enum GroupModel {
    Semidirect(SemidirectModel),
    Su2(Su2Model),
    Cover(CoverModel),
}

/// Runge–Kutta steps per unit of `|φ(u)|` used for exponentials on the cover.
const COVER_EXP_STEPS: f64 = 256.0;

impl GroupModel {
    /// Builds the model; `timelike` fixes the time orientation on the cover.
    pub fn build(alg: &LieAlgebra3, timelike: &Vector3<f64>) -> Result<Self, LongArcError> {
        Ok(match alg.kind() {
            AlgebraKind::Solvable => GroupModel::Semidirect(SemidirectModel::build(alg)?),
            AlgebraKind::CompactSimple => GroupModel::Su2(Su2Model::build(alg)?),
            AlgebraKind::SplitSimple => GroupModel::Cover(CoverModel::build(alg, timelike)?),
        })
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupModel::Semidirect(_) => GroupElement::Semidirect { t: 0.0, v: Vector2::zeros() },
            GroupModel::Su2(_) => GroupElement::Quaternion(UnitQuaternion::identity()),
            GroupModel::Cover(_) => GroupElement::Cover(CoverElement::IDENTITY),
        }
    }

    pub fn exp(&self, u: &Vector3<f64>) -> GroupElement {
        match self {
            GroupModel::Semidirect(m) => {
                let (t, v) = m.exp(u);
                GroupElement::Semidirect { t, v }
            }
            GroupModel::Su2(m) => GroupElement::Quaternion(m.exp(u)),
            GroupModel::Cover(m) => {
                let tv = m.tangent(u);
                let steps = (COVER_EXP_STEPS * tv.norm()).ceil().max(COVER_EXP_STEPS) as usize;
                GroupElement::Cover(sl2cover::flow(&CoverElement::IDENTITY, &tv, 1.0, steps))
            }
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (
                GroupModel::Semidirect(m),
                GroupElement::Semidirect { t: t1, v: v1 },
                GroupElement::Semidirect { t: t2, v: v2 },
            ) => {
                let (t, v) = m.mul((*t1, *v1), (*t2, *v2));
                GroupElement::Semidirect { t, v }
            }
            (GroupModel::Su2(_), GroupElement::Quaternion(p), GroupElement::Quaternion(q)) => {
                GroupElement::Quaternion(p * q)
            }
            (GroupModel::Cover(_), GroupElement::Cover(p), GroupElement::Cover(q)) => {
                GroupElement::Cover(sl2cover::multiply(p, q))
            }
            _ => panic!("group element does not belong to this model"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (GroupModel::Semidirect(m), GroupElement::Semidirect { t, v }) => {
                GroupElement::Semidirect { t: -t, v: -((m.d * -t).exp() * v) }
            }
            (GroupModel::Su2(_), GroupElement::Quaternion(q)) => GroupElement::Quaternion(q.inverse()),
            (GroupModel::Cover(_), GroupElement::Cover(p)) => GroupElement::Cover(sl2cover::inverse(p)),
            _ => panic!("group element does not belong to this model"),
        }
    }

    /// Whether a step is an exact group exponential, so that an endpoint
    /// factors as a product of per-step elements.
    pub fn exact_steps(&self) -> bool {
        !matches!(self, GroupModel::Cover(_))
    }

    /// `x · exp(dt u)`, with `substeps` Runge–Kutta steps on the cover.
    pub fn step(&self, x: &GroupElement, u: &Vector3<f64>, dt: f64, substeps: usize) -> GroupElement {
        match (self, x) {
            (GroupModel::Cover(m), GroupElement::Cover(p)) => {
                GroupElement::Cover(sl2cover::flow(p, &m.tangent(u), dt, substeps))
            }
            _ => self.mul(x, &self.exp(&(dt * u))),
        }
    }

    /// `exp(a X1) exp(b X2) exp(c X3)`.
    pub fn from_second_kind(&self, abc: &Vector3<f64>) -> GroupElement {
        let f = |i: usize| self.exp(&(abc[i] * Vector3::ith(i, 1.0)));
        self.mul(&self.mul(&f(0), &f(1)), &f(2))
    }

    /// Coordinate difference used as the endpoint residual.
    pub fn residual(&self, x: &GroupElement, target: &GroupElement) -> Vector3<f64> {
        match (x, target) {
            (GroupElement::Semidirect { t: t1, v: v1 }, GroupElement::Semidirect { t: t2, v: v2 }) => {
                Vector3::new(t1 - t2, v1[0] - v2[0], v1[1] - v2[1])
            }
            (GroupElement::Quaternion(p), GroupElement::Quaternion(q)) => {
                // Logarithm on SU(2): q and -q are different points here.
                let d = (q.inverse() * p).into_inner();
                let v = d.imag();
                let n = v.norm();
                if n == 0.0 {
                    Vector3::zeros()
                } else {
                    2.0 * n.atan2(d.w) / n * v
                }
            }
            (GroupElement::Cover(p), GroupElement::Cover(q)) => {
                Vector3::new(p.c - q.c, p.w.re - q.w.re, p.w.im - q.w.im)
            }
            _ => panic!("group elements from different models"),
        }
    }

    pub fn distance(&self, x: &GroupElement, target: &GroupElement) -> f64 {
        self.residual(x, target).norm()
    }

    /// Whether an element belongs to this model.
    pub fn owns(&self, x: &GroupElement) -> bool {
        matches!(
            (self, x),
            (GroupModel::Semidirect(_), GroupElement::Semidirect { .. })
                | (GroupModel::Su2(_), GroupElement::Quaternion(_))
                | (GroupModel::Cover(_), GroupElement::Cover(_))
        )
    }
}
