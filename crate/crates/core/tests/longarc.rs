use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sublorentz::cases::{CaseId, SubLorentzCase};
use sublorentz::conegeom::{Covector, SolidCone};
use sublorentz::existence::{self, Outcome};
use sublorentz::longarc::{
    self, integrate, integrate_with, length, potential_along, AntiNorm, ControlCurve, GroupElement, GroupModel,
    LongArcError, SolveOptions, Structure, TargetSpec,
};

fn structure(id: CaseId, kappa: f64, tau: Option<f64>, chi: Option<f64>) -> Structure {
    let c = SubLorentzCase::new(id, kappa, tau, chi).unwrap();
    Structure::from_case(&c, SolidCone::default(), AntiNorm::Lorentzian).unwrap()
}

fn heisenberg() -> Structure {
    structure(CaseId::R1, 0.0, None, None)
}

/// Rows with one representative parameter set each, covering every model.
fn representatives() -> Vec<Structure> {
    vec![
        heisenberg(),
        structure(CaseId::R2Star, -0.5, Some(1.2), None),
        structure(CaseId::R3, 0.0, Some(2.0), None),
        structure(CaseId::R4, 0.0, Some(-3.0), None),
        structure(CaseId::R5, 0.0, Some(0.7), None),
        structure(CaseId::R7, 0.0, Some(1.5), None),
        structure(CaseId::R11, 0.7, None, Some(0.7)),
        structure(CaseId::R12, -1.3, None, Some(-1.3)),
        structure(CaseId::R13, 3.5, None, Some(-0.5)),
        structure(CaseId::R14, 0.0, None, Some(-1.0)),
        structure(CaseId::R16, -3.5, None, Some(-0.5)),
        structure(CaseId::R9, 0.3, None, Some(-1.0)),
        structure(CaseId::R10, -2.0, None, Some(-1.0)),
        structure(CaseId::R6, 1.5, None, None),
    ]
}

fn random_admissible(rng: &mut ChaCha8Rng, steps: usize, dt: f64) -> ControlCurve {
    let controls = (0..steps)
        .map(|_| rng.gen_range(0.2..2.0) * Vector3::new(1.0, rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    ControlCurve::new(dt, controls).unwrap()
}

// x y x⁻¹ y⁻¹ = exp(s²[A,B]) + O(s³) for x = exp(sA), y = exp(sB): the
// model's group law reproduces the algebra's brackets.
#[test]
fn group_commutators_match_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for s in representatives() {
        let m = &s.model;
        for _ in 0..5 {
            let a = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let b = Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let err = |h: f64| {
                let (x, y) = (m.exp(&(h * a)), m.exp(&(h * b)));
                let comm = m.mul(&m.mul(&x, &y), &m.mul(&m.inverse(&x), &m.inverse(&y)));
                let lin = m.exp(&(h * h * s.algebra.bracket(&a, &b)));
                m.distance(&comm, &lin)
            };
            let (e1, e2) = (err(0.02), err(0.01));
            assert!(e1 < 1e-4, "{:?}: {e1}", s.algebra.label());
            // Third order: halving h divides the defect by about 8.
            assert!(e2 < e1 / 5.0 || e1 < 1e-11, "{:?}: {e1} -> {e2}", s.algebra.label());
        }
    }
}

#[test]
fn constant_control_on_heisenberg() {
    let s = heisenberg();
    let curve = ControlCurve::constant(Vector3::x(), 2.5, 10).unwrap();
    let end = integrate(&s, &curve).unwrap().endpoint().clone();
    assert!(s.model.distance(&end, &s.model.from_second_kind(&Vector3::new(2.5, 0.0, 0.0))) < 1e-12);
    assert!((length(&curve, &s.anti_norm, &s.cone) - 2.5).abs() < 1e-12);
    let null = ControlCurve::new(0.1, vec![Vector3::new(1.0, 1.0, 0.0), Vector3::new(2.0, -2.0, 0.0)]).unwrap();
    assert_eq!(length(&null, &s.anti_norm, &s.cone), 0.0);
}

#[test]
fn su2_loop_closes() {
    let s = structure(CaseId::R9, 0.3, None, Some(-1.0));
    let lp = existence::closed_timelike_loop(&s.algebra, &s.cone);
    let curve = ControlCurve::constant(lp.generator, lp.period, 200).unwrap();
    let end = integrate(&s, &curve).unwrap().endpoint().clone();
    assert!(s.model.distance(&end, &s.model.identity()) < 1e-12);
    let half = ControlCurve::constant(lp.generator, lp.period / 2.0, 100).unwrap();
    assert!(s.model.distance(integrate(&s, &half).unwrap().endpoint(), &s.model.identity()) > 1.0);
}

#[test]
fn cover_integrator_is_fourth_order() {
    let s = structure(CaseId::R10, -2.0, None, Some(-1.0));
    let controls = (0..20)
        .map(|k| {
            let t = k as f64 / 20.0;
            Vector3::new(1.0 + 0.3 * t, 0.6 * (3.0 * t).sin(), 0.0)
        })
        .collect();
    let curve = ControlCurve::new(0.1, controls).unwrap();
    let end = |n| integrate_with(&s, &curve, n).unwrap().endpoint().clone();
    let (x1, x2, x4) = (end(1), end(2), end(4));
    let (e1, e2) = (s.model.distance(&x1, &x2), s.model.distance(&x2, &x4));
    assert!(e1 / e2 >= 12.0, "{e1} / {e2}");
}

#[test]
fn reparametrization_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for s in representatives() {
        let curve = random_admissible(&mut rng, 12, 0.05);
        let a = integrate(&s, &curve).unwrap().endpoint().clone();
        let l = length(&curve, &s.anti_norm, &s.cone);
        for lambda in [0.25, 3.0] {
            let r = curve.reparametrized(lambda);
            let b = integrate(&s, &r).unwrap().endpoint().clone();
            assert!(s.model.distance(&a, &b) < 1e-10);
            assert!((length(&r, &s.anti_norm, &s.cone) - l).abs() < 1e-10);
        }
    }
}

#[test]
fn heisenberg_bound_examples() {
    let s = heisenberg();
    let p = Covector(Vector3::x());
    assert!((s.anti_norm.sup_ratio(&s.cone, &p) - 1.0).abs() < 1e-15);
    for t in [0.5, 1.0, 4.0] {
        let target = s.model.exp(&(t * Vector3::x()));
        assert!((longarc::distance_upper_bound(&s, &target, &p).unwrap() - t).abs() < 1e-12);
    }
    let target = s.model.exp(&Vector3::x());
    assert!(matches!(
        longarc::distance_upper_bound(&s, &target, &Covector(Vector3::new(1.0, 1.0, 0.0))),
        Err(LongArcError::NotStrictDual(_))
    ));
    assert!(matches!(
        longarc::distance_upper_bound(&s, &target, &Covector(Vector3::new(1.0, 0.0, 1.0))),
        Err(LongArcError::NotClosed(_))
    ));
}

// Three different admissible paths to exp(aP + bM), P = X1 + X2, M = X1 - X2:
// the straight line and two zero-area zigzags.
#[test]
fn potential_is_path_independent() {
    let s = heisenberg();
    let p = Covector(Vector3::x());
    let (a, b) = (0.8, 0.5);
    let pp = Vector3::new(1.0, 1.0, 0.0);
    let mm = Vector3::new(1.0, -1.0, 0.0);
    let paths = [
        ControlCurve::new(1.0, vec![a * pp + b * mm]).unwrap(),
        ControlCurve::new(1.0, vec![0.5 * a * pp, b * mm, 0.5 * a * pp]).unwrap(),
        ControlCurve::new(1.0, vec![0.5 * b * mm, a * pp, 0.5 * b * mm]).unwrap(),
    ];
    let ends: Vec<GroupElement> = paths.iter().map(|c| integrate(&s, c).unwrap().endpoint().clone()).collect();
    let f: Vec<f64> = paths.iter().map(|c| potential_along(c, &p)).collect();
    for k in 1..3 {
        assert!(s.model.distance(&ends[0], &ends[k]) < 1e-12);
        assert!((f[0] - f[k]).abs() < 1e-8);
    }
    assert!((longarc::time_potential(&s, &p, &ends[0]).unwrap() - f[0]).abs() < 1e-8);

    // On other solvable rows: the integral of the witness along random
    // curves equals the potential of the endpoint.
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for s in representatives() {
        let v = existence::check_structure(&s.algebra, &s.cone).unwrap();
        let Some(p) = v.witness else { continue };
        for _ in 0..3 {
            let c = random_admissible(&mut rng, 10, 0.1);
            let end = integrate(&s, &c).unwrap().endpoint().clone();
            assert!((longarc::time_potential(&s, &p, &end).unwrap() - potential_along(&c, &p)).abs() < 1e-8);
        }
    }
}

// Every random admissible curve is no longer than the bound at its endpoint.
#[test]
fn bound_is_sound_on_random_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for s in representatives() {
        let verdict = existence::check_structure(&s.algebra, &s.cone).unwrap();
        if verdict.outcome != Outcome::Exists {
            continue;
        }
        for _ in 0..50 {
            let dt = rng.gen_range(0.01..0.5);
            let c = random_admissible(&mut rng, 8, dt);
            let end = integrate_with(&s, &c, 4).unwrap().endpoint().clone();
            let bound = longarc::upper_bound(&s, &end).unwrap().expect("a bound").value;
            let l = length(&c, &s.anti_norm, &s.cone);
            assert!(l <= bound + 1e-9, "{:?}: {l} > {bound}", s.algebra.label());
        }
    }
}

#[test]
fn no_bound_without_verdict() {
    let s = structure(CaseId::R3, 0.0, Some(2.0), None);
    assert!(longarc::upper_bound(&s, &s.model.exp(&Vector3::x())).unwrap().is_none());
}

#[test]
fn solver_null_target() {
    let s = heisenberg();
    let target = s.model.exp(&Vector3::new(1.0, 1.0, 0.0));
    let r = longarc::maximize(&s, &target, &SolveOptions { budget: 2000, ..Default::default() }).unwrap();
    assert!(r.found);
    assert!(r.length.unwrap() <= 0.02);
    assert!(r.upper_bound.unwrap().value <= 0.02);
}

#[test]
fn solver_is_monotone_and_deterministic() {
    let s = structure(CaseId::R14, 0.0, None, Some(-1.0));
    let probe = ControlCurve::new(0.25, vec![
        Vector3::new(1.0, 0.4, 0.0),
        Vector3::new(1.0, -0.6, 0.0),
        Vector3::new(1.0, 0.1, 0.0),
        Vector3::new(1.0, 0.0, 0.0),
    ])
    .unwrap();
    let target = TargetSpec::Probe { probe }.resolve(&s).unwrap();
    let mut last = f64::NEG_INFINITY;
    for budget in [20, 100, 400, 1600] {
        let opts = SolveOptions { steps: 16, budget, ..Default::default() };
        let r = longarc::maximize(&s, &target, &opts).unwrap();
        let l = r.length.unwrap_or(f64::NEG_INFINITY);
        assert!(l >= last, "budget {budget}: {l} < {last}");
        last = l;
        assert_eq!(r, longarc::maximize(&s, &target, &opts).unwrap());
    }
}

#[test]
fn solver_recovers_cover_probe() {
    let s = structure(CaseId::R10, -2.0, None, Some(-1.0));
    let probe = ControlCurve::constant(Vector3::new(1.0, 0.5, 0.0), 1.0, 8).unwrap();
    let target = TargetSpec::Probe { probe: probe.clone() }.resolve(&s).unwrap();
    assert!(matches!(target, GroupElement::Cover(_)));
    let r = longarc::maximize(&s, &target, &SolveOptions { steps: 16, budget: 1500, ..Default::default() }).unwrap();
    let probe_len = length(&probe, &s.anti_norm, &s.cone);
    assert!(r.length.unwrap() >= 0.98 * probe_len);
    assert!(r.length.unwrap() <= r.upper_bound.unwrap().value + 1e-6);
}

#[test]
fn solver_refuses_su2() {
    let s = structure(CaseId::R9, 0.3, None, Some(-1.0));
    assert!(matches!(s.model, GroupModel::Su2(_)));
    let target = s.model.exp(&Vector3::x());
    assert!(matches!(longarc::maximize(&s, &target, &SolveOptions::default()), Err(LongArcError::InfiniteDistance)));
}

#[test]
fn su2_witness_at_identity() {
    let s = structure(CaseId::R9, 0.3, None, Some(-1.0));
    let empty = ControlCurve { dt: 1.0, controls: Vec::new() };
    let lp = existence::closed_timelike_loop(&s.algebra, &s.cone);
    let loop_len = lp.period * s.anti_norm.eval(&s.cone, &lp.generator);
    let c = longarc::su2_unbounded_witness(&s, &empty, 10.0).unwrap();
    let l = length(&c, &s.anti_norm, &s.cone);
    assert!(l >= 10.0 && l < 10.0 + loop_len + 1e-9);
    assert!(s.model.distance(integrate(&s, &c).unwrap().endpoint(), &s.model.identity()) < 1e-8);
    assert!(longarc::su2_unbounded_witness(&s, &empty, 0.0).is_err());
    let h = heisenberg();
    assert!(matches!(longarc::su2_unbounded_witness(&h, &empty, 1.0), Err(LongArcError::Unsupported(_))));
}

#[test]
fn curve_json_shape() {
    let c = ControlCurve::new(0.5, vec![Vector3::new(1.0, 0.0, 0.0)]).unwrap();
    assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"dt":0.5,"controls":[[1.0,0.0,0.0]]}"#);
    assert!(serde_json::from_str::<ControlCurve>(r#"{"dt":0.5,"controls":[],"x":1}"#).is_err());
}
