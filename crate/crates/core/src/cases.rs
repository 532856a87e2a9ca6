//! Rows of the classification of left-invariant three-dimensional contact
//! sub-Lorentzian structures, and the structure constants realizing each row.
//!
//! Every row is mapped to the contact normal form
//! `[X1,X3] = c X1 + c13 X2`, `[X2,X3] = c23 X1 - c X2`,
//! `[X1,X2] = c12_1 X1 + c12_2 X2 + X3`, so the matrix of structure
//! constants has rows `(c, c13, 0)`, `(c23, -c, 0)`, `(c12_1, c12_2, 1)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::liealg3::{AlgebraError, LieAlgebra3};

/// Absolute tolerance for the equality side conditions (`κ = 0`, `χ = ±κ`, ...).
pub const EQ_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    R1,
    R2,
    R2Star,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
    R17,
    R18,
    R19,
}

impl CaseId {
    pub const ALL: [CaseId; 20] = [
        CaseId::R1,
        CaseId::R2,
        CaseId::R2Star,
        CaseId::R3,
        CaseId::R4,
        CaseId::R5,
        CaseId::R6,
        CaseId::R7,
        CaseId::R8,
        CaseId::R9,
        CaseId::R10,
        CaseId::R11,
        CaseId::R12,
        CaseId::R13,
        CaseId::R14,
        CaseId::R15,
        CaseId::R16,
        CaseId::R17,
        CaseId::R18,
        CaseId::R19,
    ];

    pub fn as_str(&self) -> &'static str {
        use CaseId::*;
        match self {
            R1 => "1",
            R2 => "2",
            R2Star => "2*",
            R3 => "3",
            R4 => "4",
            R5 => "5",
            R6 => "6",
            R7 => "7",
            R8 => "8",
            R9 => "9",
            R10 => "10",
            R11 => "11",
            R12 => "12",
            R13 => "13",
            R14 => "14",
            R15 => "15",
            R16 => "16",
            R17 => "17",
            R18 => "18",
            R19 => "19",
        }
    }

    /// Lie algebra column of the classification table, as printed there.
    pub fn algebra_label(&self) -> &'static str {
        use CaseId::*;
        match self {
            R1 => "L(3,1) = h3",
            R2 | R6 | R8 | R10 | R19 => "L(3,5) = sl2(R)",
            R2Star => "L(3,-1) = A+(R) x R",
            R3 | R13 | R16 => "L(3,3)",
            R4 => "L(3,2,(-t-sqrt(t^2-4))/(-t+sqrt(t^2-4)))",
            R5 => "L(3,4,|t|/sqrt(4-t^2))",
            R7 => "L(3,2,(t-sqrt(t^2+4))/(t+sqrt(t^2+4)))",
            R9 => "L(3,6) = su2",
            R11 => "L(3,2,-1) = sh2",
            R12 => "L(3,4,0) = se2",
            R14 => "L(3,2,(sqrt|x-k|-sqrt(7x+k))/(sqrt|x-k|+sqrt(7x+k)))",
            R15 => "L(3,4,sqrt|k-x|/sqrt(-7x-k))",
            R17 => "L(3,2,(sqrt|x+k|-sqrt(7x-k))/(sqrt|x+k|+sqrt(7x-k)))",
            R18 => "L(3,4,sqrt|k+x|/sqrt(-7x+k))",
        }
    }

    /// Parameter side conditions of the row, as text.
    pub fn condition(&self) -> &'static str {
        use CaseId::*;
        match self {
            R1 => "h = 0, κ = 0",
            R2 | R2Star => "h = 0, κ ≠ 0",
            R3 => "κ = 0, τ = 2",
            R4 => "κ = 0, |τ| > 2",
            R5 => "κ = 0, |τ| < 2",
            R6 | R8 => "κ ≠ 0",
            R7 => "κ = 0, τ ∈ R",
            R9 => "χ ≠ 0, |κ| < -χ",
            R10 => "χ ≠ 0, |κ| > -χ, χ ≠ ±κ",
            R11 => "χ = ±κ > 0",
            R12 => "χ = ±κ < 0",
            R13 => "χ ≠ 0, κ = -7χ",
            R14 => "χ ≠ 0, κ < -7χ",
            R15 => "χ ≠ 0, κ > -7χ",
            R16 => "χ ≠ 0, κ = 7χ",
            R17 => "χ ≠ 0, κ > 7χ",
            R18 => "χ ≠ 0, κ < 7χ",
            R19 => "χ ≠ 0, κ ∈ R",
        }
    }

    /// Rows listing two canonical `h` matrices.
    pub fn has_two_patterns(&self) -> bool {
        matches!(self, CaseId::R3 | CaseId::R4 | CaseId::R5 | CaseId::R6 | CaseId::R7 | CaseId::R8)
    }

    /// Rows whose structure constants involve a square root of an invariant.
    pub fn has_root_choice(&self) -> bool {
        use CaseId::*;
        matches!(self, R2Star | R13 | R14 | R15 | R16 | R17 | R18)
    }

    fn uses_tau(&self) -> bool {
        matches!(self, CaseId::R2Star | CaseId::R3 | CaseId::R4 | CaseId::R5 | CaseId::R7)
    }

    fn uses_chi(&self) -> bool {
        *self >= CaseId::R9
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = CaseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| CaseError::UnknownCase(s.to_string()))
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CaseId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CaseError {
    #[error("unknown case `{0}` (expected 1, 2, 2*, 3, ..., 19)")]
    UnknownCase(String),
    #[error("case {case}: parameters violate `{condition}`: {detail}")]
    Constraint { case: CaseId, condition: &'static str, detail: String },
    #[error("case {case}: missing parameter {param}")]
    Missing { case: CaseId, param: &'static str },
    #[error("case {case}: parameter {param} is not used by this row")]
    Unexpected { case: CaseId, param: &'static str },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which of the two canonical `h` matrices of rows 3–8 is meant.
///
/// `Second` is realized as the image of `First` under the space reflection
/// `X2 ↦ -X2, X3 ↦ -X3`, which preserves the cone `{x1 ≥ |x2|, x3 = 0}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HPattern {
    #[default]
    First,
    Second,
}

/// Sign of the square root in rows whose constants are fixed only up to a square.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSign {
    #[default]
    Positive,
    Negative,
}

impl RootSign {
    fn sign(self) -> f64 {
        match self {
            RootSign::Positive => 1.0,
            RootSign::Negative => -1.0,
        }
    }
}

/// Parameters of a row, as they appear in verdict JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseParams {
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub pattern: HPattern,
    #[serde(default, skip_serializing_if = "is_default")]
    pub root: RootSign,
}

fn is_default<T: Default + PartialEq>(t: &T) -> bool {
    *t == T::default()
}

/// A validated row of the classification with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SubLorentzCase {
    id: CaseId,
    params: CaseParams,
    constants: NormalForm,
}

/// Constants `(c, c13, c23, c12_1, c12_2)` of the contact normal form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalForm {
    pub c: f64,
    pub c13: f64,
    pub c23: f64,
    pub c12_1: f64,
    pub c12_2: f64,
}

impl NormalForm {
    fn reflected(self) -> Self {
        Self { c: -self.c, c12_1: -self.c12_1, ..self }
    }
}

/// Whether `χ = κ` or `χ = -κ` in rows 11 and 12.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiBranch {
    Equal,
    Opposite,
}

impl SubLorentzCase {
    pub fn new(
        id: CaseId,
        kappa: f64,
        tau: Option<f64>,
        chi: Option<f64>,
    ) -> Result<Self, CaseError> {
        Self::from_params(
            id,
            CaseParams { kappa, tau, chi, pattern: HPattern::First, root: RootSign::Positive },
        )
    }

    pub fn from_params(id: CaseId, params: CaseParams) -> Result<Self, CaseError> {
        let constants = normal_form(id, &params)?;
        Ok(Self { id, params, constants })
    }

    pub fn with_pattern(self, pattern: HPattern) -> Result<Self, CaseError> {
        Self::from_params(self.id, CaseParams { pattern, ..self.params })
    }

    pub fn with_root(self, root: RootSign) -> Result<Self, CaseError> {
        Self::from_params(self.id, CaseParams { root, ..self.params })
    }

    pub fn id(&self) -> CaseId {
        self.id
    }

    pub fn params(&self) -> &CaseParams {
        &self.params
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    pub fn chi(&self) -> Option<f64> {
        self.params.chi
    }

    pub fn normal_form(&self) -> NormalForm {
        self.constants
    }

    /// Canonical `h` matrix of the row.
    pub fn h(&self) -> Matrix2<f64> {
        use CaseId::*;
        let chi = self.params.chi.unwrap_or(0.0);
        let second = self.params.pattern == HPattern::Second;
        match self.id {
            R1 | R2 | R2Star => Matrix2::zeros(),
            R3 | R4 | R5 | R6 if !second => Matrix2::new(1.0, -1.0, 1.0, -1.0),
            R3 | R4 | R5 | R6 => Matrix2::new(-1.0, -1.0, 1.0, 1.0),
            R7 | R8 if !second => Matrix2::new(1.0, 1.0, -1.0, -1.0),
            R7 | R8 => Matrix2::new(-1.0, 1.0, -1.0, 1.0),
            R19 => Matrix2::new(chi, 0.0, 0.0, -chi),
            _ => Matrix2::new(0.0, -chi, chi, 0.0),
        }
    }

    /// For rows 11 and 12: which of `χ = ±κ` holds.
    pub fn chi_branch(&self) -> Option<ChiBranch> {
        match self.id {
            CaseId::R11 | CaseId::R12 => {
                let chi = self.params.chi?;
                Some(if approx_eq(chi, self.params.kappa) {
                    ChiBranch::Equal
                } else {
                    ChiBranch::Opposite
                })
            }
            _ => None,
        }
    }

    /// The Lie algebra of the row in contact normal form.
    pub fn algebra(&self) -> LieAlgebra3 {
        let NormalForm { c, c13, c23, c12_1, c12_2 } = self.constants;
        LieAlgebra3::contact_normal_form(c, c13, c23, c12_1, c12_2)
            .expect("row constants satisfy the Jacobi identity")
            .with_label(format!("case {}", self.id))
    }

    /// Existence column of the classification table for these parameters.
    pub fn tabulated(&self) -> Tabulated {
        use CaseId::*;
        match self.id {
            R1 | R2Star | R13 | R14 | R15 => Tabulated::Yes,
            R9 => Tabulated::No,
            R10 => {
                let chi = self.params.chi.unwrap_or(0.0);
                if self.params.kappa < chi && chi < 0.0 {
                    Tabulated::Yes
                } else {
                    Tabulated::Blank
                }
            }
            R11 | R12 => match self.chi_branch() {
                Some(ChiBranch::Equal) => Tabulated::Yes,
                _ => Tabulated::Blank,
            },
            _ => Tabulated::Blank,
        }
    }
}

/// Builds the algebra of a row.
pub fn from_case(case: &SubLorentzCase) -> LieAlgebra3 {
    case.algebra()
}

/// Existence column of the classification table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tabulated {
    /// Longest arcs exist on the attainable set.
    Yes,
    /// The distance to every attainable point is infinite.
    No,
    /// Not covered by the sufficient conditions.
    Blank,
}

/// The table's entry text for a row.
pub fn table_entry(id: CaseId) -> &'static str {
    use CaseId::*;
    match id {
        R1 | R2Star | R13 | R14 | R15 => "Yes",
        R9 => "No",
        R10 => "Yes, if κ < χ < 0",
        R11 | R12 => "Yes, if χ = κ",
        _ => "",
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ_TOL * a.abs().max(b.abs()).max(1.0)
}

fn normal_form(id: CaseId, p: &CaseParams) -> Result<NormalForm, CaseError> {
    use CaseId::*;
    let kappa = p.kappa;
    let fail = |detail: String| CaseError::Constraint { case: id, condition: id.condition(), detail };

    if !kappa.is_finite() || p.tau.is_some_and(|t| !t.is_finite()) || p.chi.is_some_and(|x| !x.is_finite()) {
        return Err(fail("parameters must be finite".into()));
    }
    if p.tau.is_some() && !id.uses_tau() {
        return Err(CaseError::Unexpected { case: id, param: "tau" });
    }
    if p.chi.is_some() && !id.uses_chi() {
        return Err(CaseError::Unexpected { case: id, param: "chi" });
    }
    if p.pattern == HPattern::Second && !id.has_two_patterns() {
        return Err(fail("this row has a single canonical h".into()));
    }
    if p.root == RootSign::Negative && !id.has_root_choice() {
        return Err(fail("this row has no square-root sign choice".into()));
    }
    let tau = || p.tau.ok_or(CaseError::Missing { case: id, param: "tau" });
    let chi = || {
        let chi = p.chi.ok_or(CaseError::Missing { case: id, param: "chi" })?;
        if chi == 0.0 {
            return Err(fail("χ must be nonzero".into()));
        }
        Ok(chi)
    };
    let kappa_zero = || {
        if approx_eq(kappa, 0.0) {
            Ok(())
        } else {
            Err(fail(format!("κ = {kappa} but the row requires κ = 0")))
        }
    };
    let kappa_nonzero = || {
        if approx_eq(kappa, 0.0) {
            Err(fail("κ must be nonzero".into()))
        } else {
            Ok(())
        }
    };
    let sign = p.root.sign();
    let nf = |c, c13, c23, c12_1, c12_2| NormalForm { c, c13, c23, c12_1, c12_2 };

    let base = match id {
        R1 => {
            kappa_zero()?;
            nf(0.0, 0.0, 0.0, 0.0, 0.0)
        }
        R2 => {
            kappa_nonzero()?;
            nf(0.0, kappa, kappa, 0.0, 0.0)
        }
        R2Star => {
            kappa_nonzero()?;
            // κ = (c12_2)² - (c12_1)² with τ = c12_1.
            let t = p.tau.unwrap_or(if kappa > 0.0 { 0.0 } else { (-kappa).sqrt() });
            let sq = kappa + t * t;
            if sq < -EQ_TOL {
                return Err(fail(format!("κ + τ² = {sq} must be nonnegative")));
            }
            nf(0.0, 0.0, 0.0, t, sign * sq.max(0.0).sqrt())
        }
        R3 | R4 | R5 => {
            kappa_zero()?;
            let t = tau()?;
            let ok = match id {
                R3 => approx_eq(t, 2.0),
                R4 => t.abs() > 2.0,
                _ => t.abs() < 2.0,
            };
            if !ok {
                return Err(fail(format!("τ = {t}")));
            }
            nf(1.0, -1.0, 1.0, t, -t)
        }
        R6 => {
            kappa_nonzero()?;
            nf(1.0, kappa - 1.0, kappa + 1.0, 0.0, 0.0)
        }
        R7 => {
            kappa_zero()?;
            let t = tau()?;
            nf(1.0, 1.0, -1.0, t, t)
        }
        R8 => {
            kappa_nonzero()?;
            nf(1.0, kappa + 1.0, kappa - 1.0, 0.0, 0.0)
        }
        R9 => {
            let x = chi()?;
            if !(kappa.abs() < -x) {
                return Err(fail(format!("|κ| = {} is not < -χ = {}", kappa.abs(), -x)));
            }
            nf(0.0, kappa + x, kappa - x, 0.0, 0.0)
        }
        R10 => {
            let x = chi()?;
            if !(kappa.abs() > -x) {
                return Err(fail(format!("|κ| = {} is not > -χ = {}", kappa.abs(), -x)));
            }
            if approx_eq(x, kappa) || approx_eq(x, -kappa) {
                return Err(fail("χ = ±κ is excluded".into()));
            }
            nf(0.0, kappa + x, kappa - x, 0.0, 0.0)
        }
        R11 | R12 => {
            let x = chi()?;
            if id == R11 && x <= 0.0 {
                return Err(fail("χ must be positive".into()));
            }
            if id == R12 && x >= 0.0 {
                return Err(fail("χ must be negative".into()));
            }
            if approx_eq(x, kappa) {
                nf(0.0, 2.0 * x, 0.0, 0.0, 0.0)
            } else if approx_eq(x, -kappa) {
                nf(0.0, 0.0, -2.0 * x, 0.0, 0.0)
            } else {
                return Err(fail(format!("χ = {x} is neither κ nor -κ (κ = {kappa})")));
            }
        }
        R13 | R14 | R15 => {
            let x = chi()?;
            let ok = match id {
                R13 => approx_eq(kappa, -7.0 * x),
                R14 => kappa < -7.0 * x,
                _ => kappa > -7.0 * x,
            };
            if !ok {
                return Err(fail(format!("κ = {kappa}, χ = {x}")));
            }
            // (c12_2)² = κ - χ must be realizable.
            let sq = kappa - x;
            if sq < -EQ_TOL {
                return Err(fail(format!("κ - χ = {sq} must be nonnegative for real constants")));
            }
            nf(0.0, 2.0 * x, 0.0, 0.0, sign * sq.max(0.0).sqrt())
        }
        R16 | R17 | R18 => {
            let x = chi()?;
            let ok = match id {
                R16 => approx_eq(kappa, 7.0 * x),
                R17 => kappa > 7.0 * x,
                _ => kappa < 7.0 * x,
            };
            if !ok {
                return Err(fail(format!("κ = {kappa}, χ = {x}")));
            }
            // (c12_1)² = -κ - χ must be realizable.
            let sq = -kappa - x;
            if sq < -EQ_TOL {
                return Err(fail(format!("-κ - χ = {sq} must be nonnegative for real constants")));
            }
            nf(0.0, 0.0, -2.0 * x, sign * sq.max(0.0).sqrt(), 0.0)
        }
        R19 => {
            let x = chi()?;
            nf(x, kappa, kappa, 0.0, 0.0)
        }
    };
    Ok(match p.pattern {
        HPattern::First => base,
        HPattern::Second => base.reflected(),
    })
}

/// Draws admissible parameters for a row from a bounded box.
///
/// `branch` alternates the conditional rows between their two regimes:
/// row 10 between `κ < χ < 0` (even) and the rest (odd), rows 11–12
/// between `χ = κ` (even) and `χ = -κ` (odd). Pattern and root sign are
/// drawn at random where the row offers a choice.
pub fn sample_case<R: Rng + ?Sized>(id: CaseId, branch: usize, rng: &mut R) -> SubLorentzCase {
    use CaseId::*;
    let mag = |rng: &mut R| rng.gen_range(0.2..3.0);
    let signed = |rng: &mut R| {
        let m: f64 = rng.gen_range(0.2..3.0);
        if rng.gen_bool(0.5) { m } else { -m }
    };
    let (kappa, tau, chi) = match id {
        R1 => (0.0, None, None),
        R2 | R6 | R8 => (signed(rng), None, None),
        R2Star => {
            let k = signed(rng);
            let t = if k > 0.0 {
                rng.gen_range(-2.0..2.0)
            } else {
                let t: f64 = (-k).sqrt() + rng.gen_range(0.0..2.0);
                if rng.gen_bool(0.5) { t } else { -t }
            };
            (k, Some(t), None)
        }
        R3 => (0.0, Some(2.0), None),
        R4 => {
            let t: f64 = rng.gen_range(2.1..5.0);
            (0.0, Some(if rng.gen_bool(0.5) { t } else { -t }), None)
        }
        R5 => (0.0, Some(rng.gen_range(-1.9..1.9)), None),
        R7 => (0.0, Some(rng.gen_range(-3.0..3.0)), None),
        R9 => {
            let x = -mag(rng);
            (rng.gen_range(0.95 * x..-0.95 * x), None, Some(x))
        }
        R10 => {
            if branch % 2 == 0 {
                let x = -mag(rng);
                (x - rng.gen_range(0.1..3.0), None, Some(x))
            } else {
                let x = signed(rng);
                let k = if x > 0.0 {
                    // |κ| > -χ always; avoid κ = ±χ.
                    let k = rng.gen_range(0.1..3.0) + if rng.gen_bool(0.5) { x } else { 0.0 };
                    let k = if (k - x).abs() < 0.05 { k + 0.1 } else { k };
                    if rng.gen_bool(0.5) { k } else { -k }
                } else {
                    -x + rng.gen_range(0.1..3.0)
                };
                (k, None, Some(x))
            }
        }
        R11 | R12 => {
            let x = if id == R11 { mag(rng) } else { -mag(rng) };
            (if branch % 2 == 0 { x } else { -x }, None, Some(x))
        }
        R13 => {
            let x = -mag(rng);
            (-7.0 * x, None, Some(x))
        }
        R14 => {
            let x = -mag(rng);
            (rng.gen_range(x..-7.0 * x), None, Some(x))
        }
        R15 => {
            let x = signed(rng);
            let lo = (-7.0 * x).max(x);
            (lo + rng.gen_range(0.1..3.0), None, Some(x))
        }
        R16 => {
            let x = -mag(rng);
            (7.0 * x, None, Some(x))
        }
        R17 => {
            let x = -mag(rng);
            (rng.gen_range(7.0 * x + 0.05..-x), None, Some(x))
        }
        R18 => {
            let x = signed(rng);
            let hi = (7.0 * x).min(-x);
            (hi - rng.gen_range(0.1..3.0), None, Some(x))
        }
        R19 => (rng.gen_range(-3.0..3.0), None, Some(signed(rng))),
    };
    let pattern = if id.has_two_patterns() && rng.gen_bool(0.5) {
        HPattern::Second
    } else {
        HPattern::First
    };
    let root = if id.has_root_choice() && rng.gen_bool(0.5) {
        RootSign::Negative
    } else {
        RootSign::Positive
    };
    SubLorentzCase::from_params(id, CaseParams { kappa, tau, chi, pattern, root })
        .expect("sampler stays inside the admissible box")
}
