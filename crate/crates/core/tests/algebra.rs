use nalgebra::{Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sublorentz::cases::{sample_case, CaseId, CaseError, SubLorentzCase};
use sublorentz::conegeom::SolidCone;
use sublorentz::existence::{check_case, killing_containment, killing_margin, Outcome, Rationale};
use sublorentz::liealg3::{from_bianchi, AlgebraKind, Bianchi, LieAlgebra3};
use sublorentz::linalg;

fn case(id: CaseId, kappa: f64, tau: Option<f64>, chi: Option<f64>) -> SubLorentzCase {
    SubLorentzCase::new(id, kappa, tau, chi).unwrap()
}

/// `tr(ad x ad y)` from brackets of basis vectors, without `ad` matrices.
fn killing_by_traces(alg: &LieAlgebra3) -> Matrix3<f64> {
    let e = |i| Vector3::ith(i, 1.0);
    Matrix3::from_fn(|i, j| (0..3).map(|k| alg.bracket(&e(i), &alg.bracket(&e(j), &e(k)))[k]).sum())
}

#[test]
fn structure_matrices_of_examples() {
    let a1 = case(CaseId::R1, 0.0, None, None).algebra().structure_matrix().unwrap();
    assert_eq!(a1, Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0));
    let a10 = case(CaseId::R10, -2.0, None, Some(-1.0)).algebra().structure_matrix().unwrap();
    assert_eq!(a10, Matrix3::new(0.0, -3.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0));
    let a11 = case(CaseId::R11, 1.0, None, Some(1.0)).algebra().structure_matrix().unwrap();
    assert_eq!(a11, Matrix3::new(0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0));
    for (kappa, chi) in [(3.5, -0.5), (0.0, -1.0), (2.5, -0.3)] {
        for id in [CaseId::R13, CaseId::R14, CaseId::R15] {
            let Ok(c) = SubLorentzCase::new(id, kappa, None, Some(chi)) else { continue };
            let a = c.algebra().structure_matrix().unwrap();
            assert_eq!(a[(0, 1)], 2.0 * chi);
            assert!((a[(2, 1)].powi(2) - (kappa - chi)).abs() < 1e-12);
        }
    }
}

#[test]
fn case10_bracket_x1_x3() {
    let alg = case(CaseId::R10, -2.0, None, Some(-1.0)).algebra();
    assert_eq!(alg.bracket(&Vector3::x(), &Vector3::z()), Vector3::new(0.0, -3.0, 0.0));
    let v = Vector3::new(0.3, -1.2, 2.0);
    assert_eq!(alg.bracket(&v, &v), Vector3::zeros());
}

#[test]
fn bianchi_examples() {
    let su2 = from_bianchi(Bianchi::Su2).unwrap();
    assert_eq!(su2.bracket(&Vector3::x(), &Vector3::z()), -Vector3::y());
    assert_eq!(su2.bracket(&Vector3::y(), &Vector3::z()), Vector3::x());
    assert!((su2.killing_form() + 2.0 * Matrix3::<f64>::identity()).amax() < 1e-15);
    let d = from_bianchi(Bianchi::Diagonal(0.5)).unwrap();
    assert_eq!(d.bracket(&Vector3::y(), &Vector3::z()), Vector3::new(0.0, 0.5, 0.0));
    assert_eq!(d.bracket(&Vector3::x(), &Vector3::y()), Vector3::zeros());
    let ab = from_bianchi(Bianchi::Abelian).unwrap();
    assert_eq!(ab.killing_form(), Matrix3::zeros());
    assert!(ab.derived_subalgebra().is_empty());
    assert_eq!(from_bianchi(Bianchi::Sl2).unwrap().derived_subalgebra().len(), 3);
}

#[test]
fn killing_form_matches_trace_oracle_on_every_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in CaseId::ALL {
        for k in 0..20 {
            let alg = sample_case(id, k, &mut rng).algebra();
            let oracle = killing_by_traces(&alg);
            assert!((alg.killing_form() - oracle).amax() <= 1e-12 * oracle.amax().max(1.0), "row {}", id.as_str());
        }
    }
}

#[test]
fn kernel_annihilates_derived_subalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for id in CaseId::ALL {
        let alg = sample_case(id, 0, &mut rng).algebra();
        let derived = alg.derived_subalgebra();
        let kernel = linalg::kernel(&alg.structure_matrix().unwrap());
        assert_eq!(kernel.len() + derived.len(), 3, "row {}", id.as_str());
        for p in &kernel {
            for d in &derived {
                assert!(p.dot(d).abs() <= 1e-10, "row {}", id.as_str());
            }
        }
    }
}

#[test]
fn algebra_kind_per_row() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for id in CaseId::ALL {
        for k in 0..10 {
            let kind = sample_case(id, k, &mut rng).algebra().kind();
            let expected = match id {
                CaseId::R9 => AlgebraKind::CompactSimple,
                CaseId::R2 | CaseId::R6 | CaseId::R8 | CaseId::R10 | CaseId::R19 => AlgebraKind::SplitSimple,
                _ => AlgebraKind::Solvable,
            };
            assert_eq!(kind, expected, "row {}", id.as_str());
        }
    }
}

#[test]
fn verdict_examples() {
    let cone = SolidCone::default();
    let v = check_case(&case(CaseId::R1, 0.0, None, None), &cone).unwrap().verdict;
    assert_eq!(v.witness.unwrap().0, Vector3::x());
    for tau in [0.5, -1.3] {
        let v = check_case(&case(CaseId::R2Star, 1.0, Some(tau), None), &cone).unwrap().verdict;
        let p = v.witness.unwrap().0;
        assert!((p - Vector3::new(1.0, 0.0, -tau)).norm() < 1e-12, "{p:?}");
    }
    let v = check_case(&case(CaseId::R11, -1.0, None, Some(1.0)), &cone).unwrap().verdict;
    assert_eq!(v.outcome, Outcome::Inconclusive);
    let v = check_case(&case(CaseId::R14, 0.0, None, Some(-1.0)), &cone).unwrap().verdict;
    assert_eq!((v.outcome, v.rationale), (Outcome::Exists, Rationale::AnnihilatorWitness));
    let v = check_case(&case(CaseId::R9, 0.5, None, Some(-2.0)), &cone).unwrap().verdict;
    assert_eq!(v.outcome, Outcome::InfiniteDistance);
}

#[test]
fn case19_never_inside_killing_cone() {
    let cone = SolidCone::default();
    for chi in [-2.0, -0.1, 0.1, 3.0] {
        for kappa in [-1.0, 0.0, 2.0] {
            let alg = case(CaseId::R19, kappa, None, Some(chi)).algebra();
            // K at the segment ends is ±4χ.
            let k = alg.killing_form();
            let end = |s: f64| {
                let v = Vector3::new(1.0, s, 0.0);
                (v.transpose() * k * v)[0]
            };
            assert!((end(-1.0) - 4.0 * chi).abs() < 1e-12);
            assert!((end(1.0) + 4.0 * chi).abs() < 1e-12);
            assert!(killing_margin(&alg, &cone).unwrap() >= 4.0 * chi.abs() - 1e-12);
            assert!(!killing_containment(&alg, &cone).unwrap());
        }
    }
}

#[test]
fn row10_split_matches_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let cone = SolidCone::default();
    for k in 0..200 {
        let c = sample_case(CaseId::R10, k, &mut rng);
        let chi = c.chi().unwrap();
        let exists = check_case(&c, &cone).unwrap().verdict.outcome == Outcome::Exists;
        assert_eq!(exists, c.kappa() < chi && chi < 0.0, "κ={} χ={chi}", c.kappa());
    }
}

#[test]
fn constraint_errors_name_condition() {
    let err = SubLorentzCase::new(CaseId::R9, 3.0, None, Some(-1.0)).unwrap_err();
    assert!(matches!(err, CaseError::Constraint { .. }));
    assert!(err.to_string().contains("|κ| < -χ"), "{err}");
    assert!(SubLorentzCase::new(CaseId::R3, 0.0, Some(1.0), None).is_err());
    assert!(SubLorentzCase::new(CaseId::R13, 1.0, None, None).is_err());
    assert!("20".parse::<CaseId>().is_err());
    assert_eq!("2*".parse::<CaseId>().unwrap(), CaseId::R2Star);
}
