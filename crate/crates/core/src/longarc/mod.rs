//! Numerical evidence for longest arcs: admissible curves with piecewise
//! constant controls, their sub-Lorentzian length, upper bounds on the
//! distance from closed time-orientation forms, a search for long arcs, and
//! the closed timelike loops of `SU(2)`.

mod antinorm;
mod groups;
mod solver;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::cases::SubLorentzCase;
use crate::conegeom::{Covector, SolidCone};
use crate::existence::{self, Outcome};
use crate::liealg3::{AlgebraKind, LieAlgebra3};
use crate::linalg;
use crate::sl2cover::{CoverElement, GrowthConstants};

pub use antinorm::AntiNorm;
pub use groups::{GroupElement, GroupModel};
pub use solver::{maximize, SolveOptions, SolveReport, COVER_SUBSTEPS, DEFAULT_SEED, ENDPOINT_TOL};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LongArcError {
    #[error("group model: {0}")]
    Model(String),
    #[error("control {index} = {control:?} is not a nonzero vector of the cone")]
    ControlOutsideCone { index: usize, control: Vector3<f64> },
    #[error("invalid curve: {0}")]
    Curve(String),
    #[error("covector {0:?} is not in the interior of the dual cone")]
    NotStrictDual(Vector3<f64>),
    #[error("covector {0:?} does not annihilate the derived subalgebra")]
    NotClosed(Vector3<f64>),
    #[error("no time-orientation bound is available for this structure: {0}")]
    NoBound(String),
    #[error("target is not attainable: time potential {0} is negative")]
    Unattainable(f64),
    #[error("the distance to every attainable point is infinite (closed timelike loops); use the SU(2) loop witness instead")]
    InfiniteDistance,
    #[error("{0}")]
    Unsupported(String),
}

/// Algebra, cone and anti-norm of a left-invariant structure, with the
/// concrete group realizing it.
#[derive(Clone, Debug)]
pub struct Structure {
    pub algebra: LieAlgebra3,
    pub cone: SolidCone,
    pub anti_norm: AntiNorm,
    pub model: GroupModel,
}

impl Structure {
    pub fn new(algebra: LieAlgebra3, cone: SolidCone, anti_norm: AntiNorm) -> Result<Self, LongArcError> {
        let model = GroupModel::build(&algebra, &cone.center())?;
        Ok(Self { algebra, cone, anti_norm, model })
    }

    pub fn from_case(case: &SubLorentzCase, cone: SolidCone, anti_norm: AntiNorm) -> Result<Self, LongArcError> {
        Self::new(case.algebra(), cone, anti_norm)
    }
}

/// Piecewise constant controls `u_k` held for `dt` each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlCurve {
    pub dt: f64,
    pub controls: Vec<Vector3<f64>>,
}

impl ControlCurve {
    pub fn new(dt: f64, controls: Vec<Vector3<f64>>) -> Result<Self, LongArcError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(LongArcError::Curve(format!("dt = {dt} must be positive")));
        }
        Ok(Self { dt, controls })
    }

    /// `steps` copies of `u` over total time `time`.
    pub fn constant(u: Vector3<f64>, time: f64, steps: usize) -> Result<Self, LongArcError> {
        Self::new(time / steps as f64, vec![u; steps])
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.controls.len() as f64
    }

    /// `(λ u_k, dt/λ)`: the same trajectory traversed at speed `λ`.
    pub fn reparametrized(&self, lambda: f64) -> Self {
        Self { dt: self.dt / lambda, controls: self.controls.iter().map(|u| lambda * u).collect() }
    }

    pub fn validate(&self, cone: &SolidCone) -> Result<(), LongArcError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(LongArcError::Curve(format!("dt = {} must be positive", self.dt)));
        }
        for (index, u) in self.controls.iter().enumerate() {
            if u.norm() == 0.0 || !cone.contains(u, false) {
                return Err(LongArcError::ControlOutsideCone { index, control: *u });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `x_0 = id, x_1, ..., x_N`.
    pub points: Vec<GroupElement>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &GroupElement {
        self.points.last().expect("trajectory starts at the identity")
    }
}

/// Runge–Kutta substeps per control step on the cover in [`integrate`].
pub const DEFAULT_SUBSTEPS: usize = 1;

pub fn integrate(structure: &Structure, curve: &ControlCurve) -> Result<Trajectory, LongArcError> {
    integrate_with(structure, curve, DEFAULT_SUBSTEPS)
}

/// Integrates from the identity; `substeps` only matters on the cover.
pub fn integrate_with(structure: &Structure, curve: &ControlCurve, substeps: usize) -> Result<Trajectory, LongArcError> {
    curve.validate(&structure.cone)?;
    let model = &structure.model;
    let mut points = Vec::with_capacity(curve.controls.len() + 1);
    points.push(model.identity());
    for u in &curve.controls {
        let x = model.step(points.last().expect("nonempty"), u, curve.dt, substeps);
        points.push(x);
    }
    Ok(Trajectory { points })
}

/// `Σ ν(u_k) dt`.
pub fn length(curve: &ControlCurve, nu: &AntiNorm, cone: &SolidCone) -> f64 {
    curve.controls.iter().map(|u| nu.eval(cone, u)).sum::<f64>() * curve.dt
}

/// `∫ p(ẋ) dt` along the curve: the primitive of the left-invariant form `p`
/// at the endpoint when `p` is closed.
pub fn potential_along(curve: &ControlCurve, p: &Covector) -> f64 {
    curve.controls.iter().map(|u| p.apply(u)).sum::<f64>() * curve.dt
}

fn check_closed(algebra: &LieAlgebra3, p: &Covector) -> Result<(), LongArcError> {
    let scale = p.0.norm().max(1.0);
    if algebra.derived_subalgebra().iter().any(|d| p.apply(d).abs() > 1e-12 * scale) {
        return Err(LongArcError::NotClosed(p.0));
    }
    Ok(())
}

/// Value at `x` of the homomorphism `F: G → R` with `dF = p`, for a closed `p`.
pub fn time_potential(structure: &Structure, p: &Covector, x: &GroupElement) -> Result<f64, LongArcError> {
    check_closed(&structure.algebra, p)?;
    match (&structure.model, x) {
        (GroupModel::Semidirect(m), GroupElement::Semidirect { t, v }) => Ok(p.apply(&m.unsplit(*t, v))),
        _ => Err(LongArcError::NoBound("closed left-invariant forms vanish on a simple algebra".into())),
    }
}

/// `c_max · F(target)` with `c_max = sup ν/p` on the cone.
pub fn distance_upper_bound(structure: &Structure, target: &GroupElement, p: &Covector) -> Result<f64, LongArcError> {
    check_closed(&structure.algebra, p)?;
    if !structure.cone.dual_contains(p, true).unwrap_or(false) {
        return Err(LongArcError::NotStrictDual(p.0));
    }
    let f = time_potential(structure, p, target)?;
    if f < -1e-12 {
        return Err(LongArcError::Unattainable(f));
    }
    Ok(structure.anti_norm.sup_ratio(&structure.cone, p) * f.max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: f64,
    /// The closed left-invariant form used, on solvable groups.
    pub witness: Option<Covector>,
    /// `η` of the circular cone containing the cone, on the cover.
    pub eta: Option<f64>,
}

/// Smallest [`distance_upper_bound`] over closed interior-dual covectors,
/// searched along a line through `p0` inside the annihilator.
pub fn refined_upper_bound(structure: &Structure, target: &GroupElement, p0: &Covector) -> Result<UpperBound, LongArcError> {
    let base = distance_upper_bound(structure, target, p0)?;
    let mut best = UpperBound { value: base, witness: Some(*p0), eta: None };
    let ann = structure.algebra.derived_annihilator();
    if ann.len() != 2 {
        return Ok(best);
    }
    let p0n = p0.0.normalize();
    let dir = ann
        .iter()
        .map(|a| a - a.dot(&p0n) * p0n)
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("two annihilator vectors")
        .normalize()
        * p0.0.norm();
    let cone = &structure.cone;
    let at = |t: f64| Covector(p0.0 + t * dir);
    let edge = |sign: f64| {
        let (mut lo, mut hi) = (0.0, 1.0);
        while cone.dual_margin(&at(sign * hi)) > 0.0 {
            if hi > 1e6 {
                return 1e6;
            }
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cone.dual_margin(&at(sign * mid)) > 0.0 { lo = mid } else { hi = mid }
        }
        sign * lo
    };
    let (lo, hi) = (edge(-1.0), edge(1.0));
    let value = |t: f64| {
        let p = at(t);
        if !cone.dual_contains(&p, true).unwrap_or(false) {
            return f64::INFINITY;
        }
        distance_upper_bound(structure, target, &p).unwrap_or(f64::INFINITY)
    };
    // Cosine spacing resolves the ends of the interval, where the bound
    // may degenerate to zero.
    const GRID: usize = 400;
    let ts: Vec<f64> = (1..GRID)
        .map(|k| lo + (hi - lo) * 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / GRID as f64).cos()))
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| value(t)).collect();
    let (k, _) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("nonempty grid");
    let (mut a, mut b) = (if k == 0 { lo } else { ts[k - 1] }, if k + 1 == ts.len() { hi } else { ts[k + 1] });
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if value(x1) < value(x2) { b = x2 } else { a = x1 }
    }
    for t in [ts[k], 0.5 * (a + b)] {
        let v = value(t);
        if v < best.value {
            best = UpperBound { value: v, witness: Some(at(t)), eta: None };
        }
    }
    Ok(best)
}

/// Bound from `τ = dc` on the universal cover of `SL(2,R)`:
/// `length ≤ sup(ν/ξ) · Δc / C1`, where `C1 = 1 - (η+1)^{-1/2}` and the
/// cone lies in `C+_η`.
pub fn cover_upper_bound(structure: &Structure, target: &CoverElement) -> Result<UpperBound, LongArcError> {
    let GroupModel::Cover(model) = &structure.model else {
        return Err(LongArcError::NoBound("not an sl2 structure".into()));
    };
    let SolidCone::Segment { u1, u2 } = &structure.cone else {
        return Err(LongArcError::Unsupported("cover bound needs a segment cone".into()));
    };
    if !existence::killing_containment(&structure.algebra, &structure.cone).unwrap_or(false) {
        return Err(LongArcError::NoBound("cone is not inside the Killing cone".into()));
    }
    // ξ/|ζ| is quasi-concave on the segment, so its minimum is at an end.
    let ratio = |v: &Vector3<f64>| {
        let t = model.tangent(v);
        t.xi * t.xi / t.zeta.norm_sqr()
    };
    let eta = ratio(&(u1 + u2)).min(ratio(&(u1 - u2))) - 1.0;
    let growth = GrowthConstants::new(eta).map_err(|e| LongArcError::NoBound(e.to_string()))?;
    let xi = Covector(model.xi_row());
    if target.c < -1e-12 {
        return Err(LongArcError::Unattainable(target.c));
    }
    let value = structure.anti_norm.sup_ratio(&structure.cone, &xi) * target.c.max(0.0) / growth.c1;
    Ok(UpperBound { value, witness: None, eta: Some(eta) })
}

/// The best available upper bound on the distance from the identity to
/// `target`, or `None` when no time-orientation argument applies.
pub fn upper_bound(structure: &Structure, target: &GroupElement) -> Result<Option<UpperBound>, LongArcError> {
    let verdict = existence::check_structure(&structure.algebra, &structure.cone)
        .map_err(|e| LongArcError::Unsupported(e.to_string()))?;
    if verdict.outcome != Outcome::Exists {
        return Ok(None);
    }
    match (&structure.model, target, verdict.witness) {
        (GroupModel::Semidirect(_), _, Some(p)) => refined_upper_bound(structure, target, &p).map(Some),
        (GroupModel::Cover(_), GroupElement::Cover(t), _) => cover_upper_bound(structure, t).map(Some),
        _ => Ok(None),
    }
}

/// An admissible curve to the endpoint of `base` with length at least
/// `demanded`, obtained by first running around the closed timelike loop
/// `t ↦ exp(t u1)` as often as needed.
pub fn su2_unbounded_witness(structure: &Structure, base: &ControlCurve, demanded: f64) -> Result<ControlCurve, LongArcError> {
    if !(demanded > 0.0) {
        return Err(LongArcError::Curve(format!("demanded length {demanded} must be positive")));
    }
    if structure.algebra.kind() != AlgebraKind::CompactSimple {
        return Err(LongArcError::Unsupported("closed timelike loops need the su2 algebra".into()));
    }
    base.validate(&structure.cone)?;
    let lp = existence::closed_timelike_loop(&structure.algebra, &structure.cone);
    let loop_length = lp.period * structure.anti_norm.eval(&structure.cone, &lp.generator);
    if !(loop_length > 0.0) {
        return Err(LongArcError::Unsupported("loop generator has zero length".into()));
    }
    let base_length = length(base, &structure.anti_norm, &structure.cone);
    let loops = ((demanded - base_length) / loop_length).ceil().max(0.0) as usize;
    let dt = if base.controls.is_empty() { lp.period / 64.0 } else { base.dt };
    let per_loop = (lp.period / dt).ceil() as usize;
    // Speed up the generator so one loop is an integer number of steps.
    let speed = lp.period / (per_loop as f64 * dt);
    let mut controls = vec![speed * lp.generator; loops * per_loop];
    controls.extend_from_slice(&base.controls);
    ControlCurve::new(dt, controls)
}

/// How a solver target is specified on the command line and in files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TargetSpec {
    /// `exp(a X1) exp(b X2) exp(c X3)`.
    SecondKind { second_kind: Vector3<f64> },
    /// A point of the universal cover of `SL(2,R)`.
    Cover(CoverElement),
    /// The endpoint of a given admissible curve.
    Probe { probe: ControlCurve },
}

impl TargetSpec {
    pub fn resolve(&self, structure: &Structure) -> Result<GroupElement, LongArcError> {
        match self {
            TargetSpec::SecondKind { second_kind } => Ok(structure.model.from_second_kind(second_kind)),
            TargetSpec::Cover(c) => match structure.model {
                GroupModel::Cover(_) => Ok(GroupElement::Cover(*c)),
                _ => Err(LongArcError::Unsupported("(c, w) targets need an sl2 structure".into())),
            },
            TargetSpec::Probe { probe } => {
                Ok(integrate_with(structure, probe, solver::COVER_SUBSTEPS)?.endpoint().clone())
            }
        }
    }
}

/// Independent extreme rays `u1 ± u2` of a segment cone.
pub(crate) fn null_rays(cone: &SolidCone) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let (p, m) = cone.extreme_rays()?;
    (linalg::rank(&[p, m]) == 2).then_some((p, m))
}
