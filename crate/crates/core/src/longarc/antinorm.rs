//! Anti-norms: nonnegative, concave, positively homogeneous functions on
//! the cone that replace `sqrt|q(v,v)|` in the length functional.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use rand::Rng;

use crate::conegeom::{Covector, SolidCone};

type Evaluator = Arc<dyn Fn(&Vector3<f64>) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum AntiNorm {
    /// `sqrt(a² - b²)` for `v = a u1 + b u2`; `sqrt|-x1² + x2²|` on the default cone.
    Lorentzian,
    /// `a - |b|`; `x1 - |x2|` on the default cone.
    Polyhedral,
    /// A caller-supplied anti-norm, evaluated on cone vectors only.
    Custom { name: String, eval: Evaluator },
}

impl fmt::Debug for AntiNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl AntiNorm {
    pub fn custom(name: impl Into<String>, eval: impl Fn(&Vector3<f64>) -> f64 + Send + Sync + 'static) -> Self {
        AntiNorm::Custom { name: name.into(), eval: Arc::new(eval) }
    }

    pub fn name(&self) -> &str {
        match self {
            AntiNorm::Lorentzian => "lorentzian",
            AntiNorm::Polyhedral => "polyhedral",
            AntiNorm::Custom { name, .. } => name,
        }
    }

    /// Value on a cone vector.
    pub fn eval(&self, cone: &SolidCone, v: &Vector3<f64>) -> f64 {
        match self {
            AntiNorm::Custom { eval, .. } => eval(v),
            _ => {
                let (a, b, _) = cone.relative_coords(v);
                let k = match cone {
                    SolidCone::Segment { .. } => 1.0,
                    SolidCone::Circular { eta, .. } => (eta + 1.0).sqrt(),
                };
                match self {
                    AntiNorm::Lorentzian => (a * a - k * k * b * b).max(0.0).sqrt(),
                    _ => (a - k * b.abs()).max(0.0),
                }
            }
        }
    }

    /// `sup ν(v) / p(v)` over the punctured cone, for `p` in the dual interior.
    ///
    /// Closed forms are used for the built-in anti-norms on segment cones;
    /// other combinations are maximized numerically over the cross-section.
    pub fn sup_ratio(&self, cone: &SolidCone, p: &Covector) -> f64 {
        if let SolidCone::Segment { u1, u2 } = cone {
            let (p1, p2) = (p.apply(u1), p.apply(u2));
            match self {
                AntiNorm::Lorentzian => return 1.0 / (p1 * p1 - p2 * p2).sqrt(),
                AntiNorm::Polyhedral => return 1.0 / p1,
                AntiNorm::Custom { .. } => {}
            }
            let f = |s: f64| self.eval(cone, &(u1 + s * u2)) / (p1 + p2 * s);
            return maximize_on_interval(f, -1.0, 1.0);
        }
        let SolidCone::Circular { axis, eta } = cone else { unreachable!() };
        let a = axis.normalize();
        let e1 = crate::linalg::any_orthogonal(&a);
        let e2 = a.cross(&e1);
        let rmax = 1.0 / (eta + 1.0).sqrt();
        let mut best = 0.0_f64;
        const ANGLES: usize = 256;
        for k in 0..ANGLES {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / ANGLES as f64;
            let dir = phi.cos() * e1 + phi.sin() * e2;
            let f = |r: f64| {
                let v = a + r * dir;
                self.eval(cone, &v) / p.apply(&v)
            };
            best = best.max(maximize_on_interval(f, 0.0, rmax));
        }
        best
    }

    /// Spot-checks homogeneity, nonnegativity and superadditivity on random
    /// cone samples; returns the first violation found.
    pub fn check_axioms<R: Rng + ?Sized>(&self, cone: &SolidCone, rng: &mut R, samples: usize) -> Result<(), String> {
        // Points well inside the cone: near the boundary the square root
        // amplifies rounding to ~1e-8.
        let draw = |rng: &mut R| {
            let c = cone.center();
            let edge = cone.cross_section(rng.gen_range(-1.0..=1.0));
            (c + rng.gen_range(0.0..0.95) * (edge - c)) * rng.gen_range(0.1..10.0)
        };
        for _ in 0..samples {
            let v = draw(rng);
            let w = draw(rng);
            let lam: f64 = rng.gen_range(0.01..100.0);
            let (nv, nw) = (self.eval(cone, &v), self.eval(cone, &w));
            if nv < 0.0 {
                return Err(format!("negative value {nv} at {v:?}"));
            }
            let scaled = self.eval(cone, &(lam * v));
            if (scaled - lam * nv).abs() > 1e-10 * (1.0 + lam * nv) {
                return Err(format!("not homogeneous at {v:?}: ν(λv) = {scaled}, λν(v) = {}", lam * nv));
            }
            let sum = self.eval(cone, &(v + w));
            if sum < nv + nw - 1e-10 * (1.0 + sum) {
                return Err(format!("not superadditive at {v:?}, {w:?}"));
            }
        }
        Ok(())
    }
}

/// Maximum of a quasi-concave function on `[lo, hi]`: grid scan, then golden
/// section inside the bracketing cell.
fn maximize_on_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const GRID: usize = 400;
    let h = (hi - lo) / GRID as f64;
    let (mut best_i, mut best) = (0, f(lo));
    for i in 1..=GRID {
        let v = f(lo + i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let (mut a, mut b) = (lo + (best_i.max(1) - 1) as f64 * h, (lo + (best_i + 1) as f64 * h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    best.max(f1).max(f2)
}
