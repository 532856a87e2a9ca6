use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sublorentz::cases::{CaseId, SubLorentzCase};
use sublorentz::conegeom::{Covector, SolidCone};

fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
    Vector3::new(x, y, z)
}

#[test]
fn membership_examples() {
    let c = SolidCone::default();
    assert!(c.contains(&v(1.0, 0.5, 0.0), true));
    assert!(c.contains(&v(1.0, 1.0, 0.0), false));
    assert!(!c.contains(&v(1.0, 1.0, 0.0), true));
    assert!(!c.contains(&v(1.0, 0.0, 0.1), false));
    assert!(c.is_acute());
    for eta in [0.0, 0.5, 3.0] {
        assert!(SolidCone::circular(v(0.0, 0.0, 1.0), eta).unwrap().is_acute());
    }
}

#[test]
fn dual_examples() {
    let c = SolidCone::default();
    assert!(c.dual_contains(&Covector(v(1.0, 0.0, 0.0)), true).unwrap());
    assert!(c.dual_contains(&Covector(v(1.0, 0.0, 5.0)), true).unwrap());
    assert!(c.dual_contains(&Covector(v(1.0, 1.0, 0.0)), false).unwrap());
    assert!(!c.dual_contains(&Covector(v(1.0, 1.0, 0.0)), true).unwrap());
}

#[test]
fn subspace_examples() {
    let c = SolidCone::default();
    assert!(c.cone_subspace_trivial(&[v(0.0, 0.0, 1.0)]).unwrap());
    assert!(!c.cone_subspace_trivial(&[v(1.0, -1.0, 0.0)]).unwrap());
    assert!(c.cone_subspace_trivial(&[v(0.0, 1.0, 0.0)]).unwrap());
    assert!(c.cone_subspace_trivial(&[]).unwrap());
    let w = c.find_interior_dual_in_annihilator(&[v(0.0, 0.0, 1.0)]).unwrap().unwrap();
    assert!((w.0 - v(1.0, 0.0, 0.0)).norm() < 1e-12);
    // U^0 = span{(1,0,0)}, which is strictly dual.
    let w = c.find_interior_dual_in_annihilator(&[v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)]).unwrap().unwrap();
    assert!((w.0 - v(1.0, 0.0, 0.0)).norm() < 1e-12);
    // [g,g] of rows 16-18 is span{X1, X3}; its annihilator (0,1,0) is not.
    let derived = SubLorentzCase::new(CaseId::R17, 1.0, None, Some(-1.0)).unwrap().algebra().derived_subalgebra();
    assert_eq!(derived.len(), 2);
    assert!(!c.cone_subspace_trivial(&derived).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&derived).unwrap().is_none());
    let w = c.find_interior_dual_in_annihilator(&[]).unwrap().unwrap();
    assert!(c.dual_contains(&w, true).unwrap());
}

// Configurations where U touches the cone boundary.
#[test]
fn boundary_configurations() {
    let c = SolidCone::default();
    // Plane through the extreme ray (1,1,0).
    let u = [v(1.0, 1.0, 0.0), v(0.0, 0.0, 1.0)];
    assert!(!c.cone_subspace_trivial(&u).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&u).unwrap().is_none());
    // The carrier plane itself.
    let u = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0)];
    assert!(!c.cone_subspace_trivial(&u).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&u).unwrap().is_none());
    // Whole space.
    let u = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(0.0, 0.0, 1.0)];
    assert!(!c.cone_subspace_trivial(&u).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&u).unwrap().is_none());
    // Just off the boundary on either side.
    for (s, trivial) in [(1.0 + 1e-6, true), (1.0 - 1e-6, false)] {
        let u = [v(1.0, s, 0.0), v(0.0, 0.0, 1.0)];
        assert_eq!(c.cone_subspace_trivial(&u).unwrap(), trivial, "s = {s}");
        assert_eq!(c.find_interior_dual_in_annihilator(&u).unwrap().is_some(), trivial, "s = {s}");
    }
}

#[test]
fn circular_cone_duality() {
    let c = SolidCone::circular(v(0.0, 0.0, 1.0), 1.0).unwrap();
    // Edge half-angle: tan = 1/√2.
    let steep = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.5)];
    let shallow = [v(1.0, 0.0, 0.0), v(0.0, 1.0, 2.0)];
    assert!(c.cone_subspace_trivial(&steep).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&steep).unwrap().is_some());
    assert!(!c.cone_subspace_trivial(&shallow).unwrap());
    assert!(c.find_interior_dual_in_annihilator(&shallow).unwrap().is_none());
}

// When C ∩ U = 0, projecting along U keeps the cone acute: no two
// generators map to opposite directions.
#[test]
fn projection_along_u_stays_acute() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 200 {
        let r = |rng: &mut ChaCha8Rng| Vector3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let (u1, u2, d) = (r(&mut rng), r(&mut rng), r(&mut rng));
        let Ok(c) = SolidCone::segment(u1, u2) else { continue };
        if !c.cone_subspace_trivial(&[d]).unwrap() {
            continue;
        }
        let dn = d.normalize();
        let proj = |x: Vector3<f64>| x - x.dot(&dn) * dn;
        let gens: Vec<Vector3<f64>> = (0..=40).map(|k| proj(u1 + (-1.0 + k as f64 / 20.0) * u2).normalize()).collect();
        for a in &gens {
            for b in &gens {
                assert!(a.dot(b) > -1.0 + 1e-9);
            }
        }
        checked += 1;
    }
}

#[test]
fn json_rejects_unknown_fields() {
    let ok: SolidCone = serde_json::from_str(r#"{"kind":"circular","axis":[0,0,1],"eta":0.5}"#).unwrap();
    assert!(matches!(ok, SolidCone::Circular { .. }));
    assert!(serde_json::from_str::<SolidCone>(r#"{"kind":"segment","u1":[1,0,0],"u2":[0,1,0],"extra":0}"#).is_err());
    assert!(serde_json::from_str::<SolidCone>(r#"{"kind":"segment","u1":[1,0,0],"u2":[2,0,0]}"#).is_err());
}
