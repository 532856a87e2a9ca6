//! Three-dimensional real Lie algebras given by structure constants over an
//! ordered basis `(X1, X2, X3)`.
//!
//! Only the brackets of the basis pairs `(1,2)`, `(1,3)` and `(2,3)` are
//! stored; antisymmetry is implicit. The module also builds the algebras of
//! the left-invariant contact sub-Lorentzian classification (see
//! [`crate::cases`]) and the Bianchi list used to label them.

use std::fmt;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::linalg::{self, RANK_TOL};

/// Jacobi defect allowed for a constructed algebra (order-1 constants).
pub const JACOBI_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AlgebraError {
    #[error("Jacobi identity violated: defect {0:e} exceeds {JACOBI_TOL:e}")]
    Jacobi(f64),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("algebra is not in contact normal form: {0}")]
    NotNormalForm(String),
    #[error("malformed algebra description: {0}")]
    Malformed(String),
}

/// A three-dimensional real Lie algebra.
///
/// `brackets[0] = [X1,X2]`, `brackets[1] = [X1,X3]`, `brackets[2] = [X2,X3]`,
/// each as coordinates in the basis `(X1, X2, X3)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra3 {
    brackets: [Vector3<f64>; 3],
    label: Option<String>,
}

impl LieAlgebra3 {
    /// Builds an algebra from `[X1,X2]`, `[X1,X3]`, `[X2,X3]`, rejecting
    /// constants that fail the Jacobi identity.
    pub fn from_brackets(
        b12: Vector3<f64>,
        b13: Vector3<f64>,
        b23: Vector3<f64>,
    ) -> Result<Self, AlgebraError> {
        if !(b12.iter().chain(b13.iter()).chain(b23.iter())).all(|x| x.is_finite()) {
            return Err(AlgebraError::Malformed("non-finite structure constant".into()));
        }
        let alg = Self { brackets: [b12, b13, b23], label: None };
        let scale = alg.brackets.iter().map(|b| b.amax()).fold(1.0_f64, f64::max);
        let defect = alg.jacobi_defect();
        if defect > JACOBI_TOL * scale * scale {
            return Err(AlgebraError::Jacobi(defect));
        }
        Ok(alg)
    }

    /// Algebra in contact normal form:
    /// `[X1,X3] = c X1 + c13 X2`, `[X2,X3] = c23 X1 - c X2`,
    /// `[X1,X2] = c12_1 X1 + c12_2 X2 + X3`.
    pub fn contact_normal_form(
        c: f64,
        c13: f64,
        c23: f64,
        c12_1: f64,
        c12_2: f64,
    ) -> Result<Self, AlgebraError> {
        Self::from_brackets(
            Vector3::new(c12_1, c12_2, 1.0),
            Vector3::new(c, c13, 0.0),
            Vector3::new(c23, -c, 0.0),
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// Bracket of two basis vectors, `i, j ∈ {0, 1, 2}`.
    pub fn basis_bracket(&self, i: usize, j: usize) -> Vector3<f64> {
        match (i, j) {
            (0, 1) => self.brackets[0],
            (0, 2) => self.brackets[1],
            (1, 2) => self.brackets[2],
            (1, 0) => -self.brackets[0],
            (2, 0) => -self.brackets[1],
            (2, 1) => -self.brackets[2],
            _ => Vector3::zeros(),
        }
    }

    /// Lie bracket of arbitrary vectors.
    pub fn bracket(&self, v: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
        self.brackets[0] * (v[0] * w[1] - v[1] * w[0])
            + self.brackets[1] * (v[0] * w[2] - v[2] * w[0])
            + self.brackets[2] * (v[1] * w[2] - v[2] * w[1])
    }

    /// Max-norm of `[[X1,X2],X3] + [[X2,X3],X1] + [[X3,X1],X2]`.
    pub fn jacobi_defect(&self) -> f64 {
        let e = |i: usize| Vector3::ith(i, 1.0);
        let sum = self.bracket(&self.basis_bracket(0, 1), &e(2))
            + self.bracket(&self.basis_bracket(1, 2), &e(0))
            + self.bracket(&self.basis_bracket(2, 0), &e(1));
        sum.amax()
    }

    /// Matrix of `ad_v` acting on column vectors.
    pub fn ad(&self, v: &Vector3<f64>) -> Matrix3<f64> {
        let cols: Vec<Vector3<f64>> =
            (0..3).map(|j| self.bracket(v, &Vector3::ith(j, 1.0))).collect();
        Matrix3::from_columns(&cols)
    }

    /// Killing form `K(v, w) = tr(ad v · ad w)` as a symmetric matrix.
    pub fn killing_form(&self) -> Matrix3<f64> {
        let ads: Vec<Matrix3<f64>> = (0..3).map(|i| self.ad(&Vector3::ith(i, 1.0))).collect();
        let mut k = Matrix3::zeros();
        for i in 0..3 {
            for j in i..3 {
                let v = (ads[i] * ads[j]).trace();
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    /// Orthonormal basis of the derived subalgebra `[g, g]`.
    pub fn derived_subalgebra(&self) -> Vec<Vector3<f64>> {
        let m = Matrix3::from_columns(&self.brackets);
        linalg::column_space(&m, RANK_TOL)
    }

    /// Orthonormal basis of the annihilator `[g, g]^0`, in dual coordinates.
    pub fn derived_annihilator(&self) -> Vec<Vector3<f64>> {
        linalg::orthogonal_complement(&self.derived_subalgebra())
    }

    /// The matrix of structure constants with rows `[X1,X3]`, `[X2,X3]`,
    /// `[X1,X2]`. Its kernel is `[g, g]^0`.
    ///
    /// Requires contact normal form: `[X1,X2]` has `X3`-coefficient 1,
    /// `[X1,X3]` and `[X2,X3]` have none, and the `X1` coefficient of
    /// `[X1,X3]` equals minus the `X2` coefficient of `[X2,X3]`.
    pub fn structure_matrix(&self) -> Result<Matrix3<f64>, AlgebraError> {
        let [b12, b13, b23] = &self.brackets;
        let tol = 1e-12;
        if (b12[2] - 1.0).abs() > tol {
            return Err(AlgebraError::NotNormalForm(format!(
                "X3-coefficient of [X1,X2] is {} (expected 1)",
                b12[2]
            )));
        }
        if b13[2].abs() > tol || b23[2].abs() > tol {
            return Err(AlgebraError::NotNormalForm(
                "[X1,X3] and [X2,X3] must lie in span{X1, X2}".into(),
            ));
        }
        if (b13[0] + b23[1]).abs() > tol {
            return Err(AlgebraError::NotNormalForm(
                "X1-coefficient of [X1,X3] must equal minus X2-coefficient of [X2,X3]".into(),
            ));
        }
        Ok(Matrix3::from_rows(&[b13.transpose(), b23.transpose(), b12.transpose()]))
    }

    /// Number of positive, negative and (numerically) zero Killing eigenvalues.
    pub fn killing_signature(&self) -> (usize, usize, usize) {
        let eig = self.killing_form().symmetric_eigenvalues();
        let tol = RANK_TOL * eig.amax().max(1.0);
        let pos = eig.iter().filter(|&&l| l > tol).count();
        let neg = eig.iter().filter(|&&l| l < -tol).count();
        (pos, neg, 3 - pos - neg)
    }

    pub fn kind(&self) -> AlgebraKind {
        match self.killing_signature() {
            (0, 3, 0) => AlgebraKind::CompactSimple,
            (2, 1, 0) => AlgebraKind::SplitSimple,
            _ => AlgebraKind::Solvable,
        }
    }

    /// Raw constants in the order `[X1,X2]`, `[X1,X3]`, `[X2,X3]`.
    pub fn brackets(&self) -> &[Vector3<f64>; 3] {
        &self.brackets
    }
}

/// Coarse type of a 3D real Lie algebra read off its Killing form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraKind {
    /// Degenerate Killing form (every non-simple 3D algebra is solvable).
    Solvable,
    /// Indefinite nondegenerate Killing form: `sl2(R)`.
    SplitSimple,
    /// Negative definite Killing form: `su2`.
    CompactSimple,
}

/// Entries of the Bianchi list with their commutation relations over
/// `(E1, E2, E3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bianchi {
    /// `L(3,0) = R^3`.
    Abelian,
    /// `L(3,1)`, the Heisenberg algebra.
    Heisenberg,
    /// `L(3,-1) = A+(R) ⊕ R`.
    AffineLine,
    /// `L(3,2,η)`, `0 < |η| ≤ 1`.
    Diagonal(f64),
    /// `L(3,3)`.
    Jordan,
    /// `L(3,4,η)`, `η ≥ 0`.
    Rotational(f64),
    /// `L(3,5) = sl2(R)`.
    Sl2,
    /// `L(3,6) = su2`.
    Su2,
}

impl Bianchi {
    pub fn name(&self) -> String {
        match self {
            Bianchi::Abelian => "L(3,0)".into(),
            Bianchi::Heisenberg => "L(3,1)".into(),
            Bianchi::AffineLine => "L(3,-1)".into(),
            Bianchi::Diagonal(eta) => format!("L(3,2,{eta})"),
            Bianchi::Jordan => "L(3,3)".into(),
            Bianchi::Rotational(eta) => format!("L(3,4,{eta})"),
            Bianchi::Sl2 => "L(3,5)".into(),
            Bianchi::Su2 => "L(3,6)".into(),
        }
    }
}

impl fmt::Display for Bianchi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Builds the Bianchi algebra with exactly the listed commutators.
pub fn from_bianchi(kind: Bianchi) -> Result<LieAlgebra3, AlgebraError> {
    let v = Vector3::new;
    let z = Vector3::zeros();
    let (b12, b13, b23) = match kind {
        Bianchi::Abelian => (z, z, z),
        Bianchi::Heisenberg => (v(0.0, 0.0, 1.0), z, z),
        Bianchi::AffineLine => (v(1.0, 0.0, 0.0), z, z),
        Bianchi::Diagonal(eta) => {
            if !(eta.is_finite() && eta != 0.0 && eta.abs() <= 1.0) {
                return Err(AlgebraError::Parameter(format!(
                    "L(3,2,η) needs 0 < |η| ≤ 1, got η = {eta}"
                )));
            }
            (z, v(1.0, 0.0, 0.0), v(0.0, eta, 0.0))
        }
        Bianchi::Jordan => (z, v(1.0, 0.0, 0.0), v(1.0, 1.0, 0.0)),
        Bianchi::Rotational(eta) => {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(AlgebraError::Parameter(format!(
                    "L(3,4,η) needs η ≥ 0, got η = {eta}"
                )));
            }
            (z, v(eta, -1.0, 0.0), v(1.0, eta, 0.0))
        }
        Bianchi::Sl2 => (v(1.0, 0.0, 0.0), v(0.0, -2.0, 0.0), v(0.0, 0.0, 1.0)),
        Bianchi::Su2 => (v(0.0, 0.0, 1.0), v(0.0, -1.0, 0.0), v(1.0, 0.0, 0.0)),
    };
    Ok(LieAlgebra3::from_brackets(b12, b13, b23)?.with_label(kind.name()))
}

/// JSON shape: `{"basis": ["X1","X2","X3"], "brackets": {"12": [..], "13": [..], "23": [..]}, "label": ".."}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraRepr {
    basis: [String; 3],
    brackets: BracketTable,
    #[serde(default)]
    label: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketTable {
    #[serde(rename = "12")]
    b12: [f64; 3],
    #[serde(rename = "13")]
    b13: [f64; 3],
    #[serde(rename = "23")]
    b23: [f64; 3],
}

impl Serialize for LieAlgebra3 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let arr = |v: &Vector3<f64>| [v[0], v[1], v[2]];
        AlgebraRepr {
            basis: ["X1".into(), "X2".into(), "X3".into()],
            brackets: BracketTable {
                b12: arr(&self.brackets[0]),
                b13: arr(&self.brackets[1]),
                b23: arr(&self.brackets[2]),
            },
            label: self.label.clone().unwrap_or_default(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LieAlgebra3 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = AlgebraRepr::deserialize(deserializer)?;
        let b = &repr.brackets;
        let alg = LieAlgebra3::from_brackets(
            Vector3::from(b.b12),
            Vector3::from(b.b13),
            Vector3::from(b.b23),
        )
        .map_err(serde::de::Error::custom)?;
        Ok(if repr.label.is_empty() { alg } else { alg.with_label(repr.label) })
    }
}
