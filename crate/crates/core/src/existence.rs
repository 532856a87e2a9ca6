//! Decision procedure for the existence of longest arcs.
//!
//! Three sufficient mechanisms are implemented:
//!
//! * solvable algebras: a covector in the annihilator of `[g,g]` that is
//!   strictly positive on the punctured cone is a closed left-invariant
//!   time-orientation form;
//! * `sl2(R)`: the cone lies strictly inside the negative cone of the
//!   Killing form, which makes `τ = dc` on the universal cover work;
//! * `su2`: the one-parameter subgroup through a timelike direction is a
//!   closed timelike loop, so every attainable point is at infinite distance.
//!
//! Whatever none of them decides is reported as inconclusive, never as
//! nonexistence.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::cases::{CaseId, CaseParams, SubLorentzCase};
use crate::conegeom::{ConeError, Covector, SolidCone};
use crate::liealg3::{AlgebraKind, LieAlgebra3};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExistenceError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("Killing form test needs an sl2-type algebra, got signature {0:?}")]
    NotSplitSimple((usize, usize, usize)),
    #[error("Killing containment is only implemented for segment cones")]
    UnsupportedCone,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Exists,
    InfiniteDistance,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rationale {
    /// Interior dual covector annihilating the derived subalgebra.
    AnnihilatorWitness,
    /// Cone strictly inside the Killing-negative cone.
    KillingContainment,
    /// Closed timelike one-parameter subgroup.
    ClosedTimelikeLoop,
    NotApplicable,
}

/// The loop `t ↦ exp(t·generator)`, closed at `t = period`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoop {
    pub generator: Vector3<f64>,
    pub period: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Covector>,
    /// Maximum of the Killing form on the cone cross-section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub killing_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_loop: Option<ClosedLoop>,
    pub rationale: Rationale,
}

impl Verdict {
    fn inconclusive() -> Self {
        Verdict {
            outcome: Outcome::Inconclusive,
            witness: None,
            killing_margin: None,
            closed_loop: None,
            rationale: Rationale::NotApplicable,
        }
    }
}

/// A verdict tagged with the row it was computed for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseVerdict {
    pub case: CaseId,
    pub params: CaseParams,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Existence through a closed time-orientation form on a solvable group.
pub fn check_solvable(alg: &LieAlgebra3, cone: &SolidCone) -> Result<Verdict, ExistenceError> {
    let derived = alg.derived_subalgebra();
    match cone.find_interior_dual_in_annihilator(&derived)? {
        Some(p) => Ok(Verdict {
            outcome: Outcome::Exists,
            witness: Some(p),
            rationale: Rationale::AnnihilatorWitness,
            ..Verdict::inconclusive()
        }),
        None => Ok(Verdict::inconclusive()),
    }
}

/// Maximum of `K(v, v)` over the cross-section `{u1 + s u2 : |s| ≤ 1}`.
pub fn killing_margin(alg: &LieAlgebra3, cone: &SolidCone) -> Result<f64, ExistenceError> {
    let SolidCone::Segment { u1, u2 } = cone else {
        return Err(ExistenceError::UnsupportedCone);
    };
    let k = alg.killing_form();
    // K(u1 + s u2) = a s² + b s + c.
    let a = (u2.transpose() * k * u2)[0];
    let b = 2.0 * (u1.transpose() * k * u2)[0];
    let c = (u1.transpose() * k * u1)[0];
    let q = |s: f64| (a * s + b) * s + c;
    let mut best = q(-1.0).max(q(1.0));
    if a < 0.0 {
        let s = -b / (2.0 * a);
        if s.abs() <= 1.0 {
            best = best.max(q(s));
        }
    }
    Ok(best)
}

/// Whether the punctured cone lies in the open negative cone of the Killing form.
pub fn killing_containment(alg: &LieAlgebra3, cone: &SolidCone) -> Result<bool, ExistenceError> {
    let sig = alg.killing_signature();
    if alg.kind() != AlgebraKind::SplitSimple {
        return Err(ExistenceError::NotSplitSimple(sig));
    }
    let margin = killing_margin(alg, cone)?;
    Ok(margin < -killing_tol(alg, cone))
}

fn killing_tol(alg: &LieAlgebra3, cone: &SolidCone) -> f64 {
    let k = alg.killing_form().amax().max(1.0);
    let u = cone.center().norm().max(1.0);
    1e-12 * k * u * u
}

/// The closed loop through the identity along the cone's center direction.
pub fn closed_timelike_loop(alg: &LieAlgebra3, cone: &SolidCone) -> ClosedLoop {
    let u = cone.center();
    // With B = -K/2 the brackets become the cross product, where the
    // one-parameter subgroup of a vector of B-length r closes after 4π/r.
    let r = (-(u.transpose() * alg.killing_form() * u)[0] / 2.0).sqrt();
    ClosedLoop { generator: u, period: 4.0 * PI / r }
}

/// Verdict for an arbitrary algebra, dispatching on its Killing signature.
pub fn check_structure(alg: &LieAlgebra3, cone: &SolidCone) -> Result<Verdict, ExistenceError> {
    if !cone.is_acute() {
        return Err(ConeError::NotAcute.into());
    }
    match alg.kind() {
        AlgebraKind::Solvable => check_solvable(alg, cone),
        AlgebraKind::CompactSimple => Ok(Verdict {
            outcome: Outcome::InfiniteDistance,
            closed_loop: Some(closed_timelike_loop(alg, cone)),
            rationale: Rationale::ClosedTimelikeLoop,
            ..Verdict::inconclusive()
        }),
        AlgebraKind::SplitSimple => {
            let margin = killing_margin(alg, cone)?;
            if margin < -killing_tol(alg, cone) {
                Ok(Verdict {
                    outcome: Outcome::Exists,
                    killing_margin: Some(margin),
                    rationale: Rationale::KillingContainment,
                    ..Verdict::inconclusive()
                })
            } else {
                Ok(Verdict { killing_margin: Some(margin), ..Verdict::inconclusive() })
            }
        }
    }
}

pub fn check_case(case: &SubLorentzCase, cone: &SolidCone) -> Result<CaseVerdict, ExistenceError> {
    let verdict = check_structure(&case.algebra(), cone)?;
    Ok(CaseVerdict { case: case.id(), params: case.params().clone(), verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::CaseId::*;

    fn verdict(id: CaseId, kappa: f64, tau: Option<f64>, chi: Option<f64>) -> Verdict {
        let c = SubLorentzCase::new(id, kappa, tau, chi).unwrap();
        check_case(&c, &SolidCone::default()).unwrap().verdict
    }

    #[test]
    fn heisenberg_witness() {
        let v = verdict(R1, 0.0, None, None);
        assert_eq!(v.outcome, Outcome::Exists);
        assert!((v.witness.unwrap().0 - Vector3::x()).norm() < 1e-12);
        assert_eq!(v.rationale, Rationale::AnnihilatorWitness);
    }

    #[test]
    fn rows_3_to_7_inconclusive() {
        assert_eq!(verdict(R3, 0.0, Some(2.0), None).outcome, Outcome::Inconclusive);
        assert_eq!(verdict(R4, 0.0, Some(-3.0), None).outcome, Outcome::Inconclusive);
        assert_eq!(verdict(R5, 0.0, Some(0.5), None).outcome, Outcome::Inconclusive);
        assert_eq!(verdict(R7, 0.0, Some(1.0), None).outcome, Outcome::Inconclusive);
    }

    #[test]
    fn case10_killing() {
        let c = SubLorentzCase::new(R10, -2.0, None, Some(-1.0)).unwrap();
        let alg = c.algebra();
        let cone = SolidCone::default();
        assert!(killing_containment(&alg, &cone).unwrap());
        // K|_I(x2) = 2 x2² - 6, maximal at the endpoints.
        assert!((killing_margin(&alg, &cone).unwrap() + 4.0).abs() < 1e-12);
        let c = SubLorentzCase::new(R10, 2.0, None, Some(-1.0)).unwrap();
        assert!(!killing_containment(&c.algebra(), &cone).unwrap());
    }

    #[test]
    fn case2_vanishes_at_segment_ends() {
        let cone = SolidCone::default();
        for kappa in [1.5, -1.5] {
            let alg = SubLorentzCase::new(R2, kappa, None, None).unwrap().algebra();
            let k = alg.killing_form();
            for s in [-1.0, 1.0] {
                let v = Vector3::new(1.0, s, 0.0);
                assert!((v.transpose() * k * v)[0].abs() < 1e-12);
            }
            assert!(killing_margin(&alg, &cone).unwrap() >= -1e-12);
            assert!(!killing_containment(&alg, &cone).unwrap());
        }
    }

    #[test]
    fn su2_infinite() {
        let v = verdict(R9, 0.3, None, Some(-1.0));
        assert_eq!(v.outcome, Outcome::InfiniteDistance);
        assert!(v.closed_loop.unwrap().period > 0.0);
    }

    #[test]
    fn killing_rejects_solvable() {
        let alg = SubLorentzCase::new(R1, 0.0, None, None).unwrap().algebra();
        assert!(matches!(
            killing_containment(&alg, &SolidCone::default()),
            Err(ExistenceError::NotSplitSimple(_))
        ));
    }

    #[test]
    fn verdict_json_shape() {
        let c = SubLorentzCase::new(R1, 0.0, None, None).unwrap();
        let v = check_case(&c, &SolidCone::default()).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"case":"1","params":{"kappa":0.0},"outcome":"Exists","witness":[1.0,0.0,0.0],"rationale":"annihilator-witness"}"#
        );
        let back: CaseVerdict = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
