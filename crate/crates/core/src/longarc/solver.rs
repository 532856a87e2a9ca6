//! Search for long admissible curves to a fixed endpoint.
//!
//! Controls are written in null coordinates `u_k = α_k (u1 + u2) + β_k (u1 - u2)`
//! with `0 ≤ α_k, β_k ≤ z_max`, which turns the cone constraint into a box.
//! Each restart draws a point of the box, restores the endpoint constraint by
//! bounded Gauss–Newton steps, and then climbs the length along the
//! constraint manifold with projected-gradient steps, restoring feasibility
//! after each one. The result is only ever a lower bound on the distance.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    integrate_with, null_rays, upper_bound, ControlCurve, GroupElement, GroupModel, LongArcError, Structure,
    UpperBound,
};
use crate::existence;

/// Runge–Kutta substeps per control step used by the solver on the cover.
pub const COVER_SUBSTEPS: usize = 4;
/// Endpoint error (coordinate norm) under which a curve counts as reaching the target.
pub const ENDPOINT_TOL: f64 = 1e-4;
/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_1a57;

const FEAS_TOL: f64 = 1e-10;
const FD_STEP: f64 = 1e-7;
/// Restarts in a row without improvement after which the search stops.
const STALL_RESTARTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveOptions {
    /// Number of control steps `N`.
    pub steps: usize,
    /// Iteration budget; one iteration is one restart or one ascent step.
    pub budget: usize,
    pub seed: u64,
    /// Total time of the curve; lengths do not depend on it.
    pub horizon: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { steps: 32, budget: 2000, seed: DEFAULT_SEED, horizon: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub found: bool,
    pub length: Option<f64>,
    pub endpoint_error: Option<f64>,
    pub upper_bound: Option<UpperBound>,
    pub gap: Option<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub curve: Option<ControlCurve>,
    pub trajectory: Vec<GroupElement>,
}

struct Problem<'a> {
    s: &'a Structure,
    target: GroupElement,
    n: usize,
    dt: f64,
    rays: [Vector3<f64>; 2],
    substeps: usize,
    zmax: f64,
}

impl Problem<'_> {
    fn control(&self, z: &[f64], k: usize) -> Vector3<f64> {
        z[2 * k] * self.rays[0] + z[2 * k + 1] * self.rays[1]
    }

    fn curve(&self, z: &[f64]) -> ControlCurve {
        ControlCurve { dt: self.dt, controls: (0..self.n).map(|k| self.control(z, k)).collect() }
    }

    fn step(&self, x: &GroupElement, u: &Vector3<f64>) -> GroupElement {
        self.s.model.step(x, u, self.dt, self.substeps)
    }

    fn endpoint(&self, z: &[f64]) -> GroupElement {
        (0..self.n).fold(self.s.model.identity(), |x, k| self.step(&x, &self.control(z, k)))
    }

    fn residual(&self, z: &[f64]) -> Vector3<f64> {
        self.s.model.residual(&self.endpoint(z), &self.target)
    }

    fn objective(&self, z: &[f64]) -> f64 {
        (0..self.n).map(|k| self.s.anti_norm.eval(&self.s.cone, &self.control(z, k))).sum::<f64>() * self.dt
    }

    fn gradient(&self, z: &[f64]) -> DVector<f64> {
        let (nu, cone) = (&self.s.anti_norm, &self.s.cone);
        let mut g = DVector::zeros(2 * self.n);
        for k in 0..self.n {
            let u = self.control(z, k);
            let base = nu.eval(cone, &u);
            for j in 0..2 {
                // Forward differences keep the probe inside the cone.
                let h = 1e-8 * (z[2 * k] + z[2 * k + 1]).max(1e-3);
                g[2 * k + j] = (nu.eval(cone, &(u + h * self.rays[j])) - base) / h * self.dt;
            }
        }
        g
    }

    /// Residual and its Jacobian with respect to `z`.
    fn jacobian(&self, z: &[f64]) -> (Vector3<f64>, DMatrix<f64>) {
        let model = &self.s.model;
        let controls: Vec<Vector3<f64>> = (0..self.n).map(|k| self.control(z, k)).collect();
        let mut jac = DMatrix::zeros(3, 2 * self.n);
        if model.exact_steps() {
            let steps: Vec<GroupElement> = controls.iter().map(|u| model.exp(&(self.dt * u))).collect();
            let mut prefix = vec![model.identity()];
            for e in &steps {
                prefix.push(model.mul(prefix.last().expect("nonempty"), e));
            }
            let mut suffix = vec![model.identity(); self.n + 1];
            for k in (0..self.n).rev() {
                suffix[k] = model.mul(&steps[k], &suffix[k + 1]);
            }
            let r0 = model.residual(&prefix[self.n], &self.target);
            for k in 0..self.n {
                for j in 0..2 {
                    let e = model.exp(&(self.dt * (controls[k] + FD_STEP * self.rays[j])));
                    let x = model.mul(&model.mul(&prefix[k], &e), &suffix[k + 1]);
                    let col = (model.residual(&x, &self.target) - r0) / FD_STEP;
                    jac.set_column(2 * k + j, &col);
                }
            }
            (r0, jac)
        } else {
            let mut states = vec![model.identity()];
            for u in &controls {
                states.push(self.step(states.last().expect("nonempty"), u));
            }
            let r0 = model.residual(&states[self.n], &self.target);
            for k in 0..self.n {
                for j in 0..2 {
                    let mut x = self.step(&states[k], &(controls[k] + FD_STEP * self.rays[j]));
                    for u in &controls[k + 1..] {
                        x = self.step(&x, u);
                    }
                    let col = (model.residual(&x, &self.target) - r0) / FD_STEP;
                    jac.set_column(2 * k + j, &col);
                }
            }
            (r0, jac)
        }
    }

    fn clip(&self, z: &mut [f64]) {
        for v in z.iter_mut() {
            *v = v.clamp(0.0, self.zmax);
        }
    }

    /// `d - J_Fᵀ (J_F J_Fᵀ)⁺ J_F d` restricted to the free coordinates.
    fn project_free(jac: &DMatrix<f64>, d: &DVector<f64>, free: &[bool]) -> DVector<f64> {
        let mut jf = jac.clone();
        let mut df = d.clone();
        for (i, f) in free.iter().enumerate() {
            if !f {
                jf.column_mut(i).fill(0.0);
                df[i] = 0.0;
            }
        }
        let gram: Matrix3<f64> = (&jf * jf.transpose()).fixed_view::<3, 3>(0, 0).into_owned();
        let tol = 1e-12 * gram.amax().max(1e-300);
        let pinv = gram.pseudo_inverse(tol).unwrap_or_else(|_| Matrix3::zeros());
        let jd = Vector3::from_iterator((&jf * &df).iter().copied());
        let corr = jf.transpose() * DVector::from_iterator(3, (pinv * jd).iter().copied());
        df - corr
    }

    /// Least-norm correction `-J_Fᵀ (J_F J_Fᵀ)⁺ r`.
    fn newton_step(jac: &DMatrix<f64>, r: &Vector3<f64>, free: &[bool]) -> DVector<f64> {
        let mut jf = jac.clone();
        for (i, f) in free.iter().enumerate() {
            if !f {
                jf.column_mut(i).fill(0.0);
            }
        }
        let gram: Matrix3<f64> = (&jf * jf.transpose()).fixed_view::<3, 3>(0, 0).into_owned();
        let tol = 1e-14 * gram.amax().max(1e-300);
        let pinv = gram.pseudo_inverse(tol).unwrap_or_else(|_| Matrix3::zeros());
        -(jf.transpose() * DVector::from_iterator(3, (pinv * r).iter().copied()))
    }

    fn blocked(&self, z: &[f64], d: &DVector<f64>, free: &mut [bool]) -> bool {
        let mut changed = false;
        for i in 0..z.len() {
            if free[i] && ((z[i] <= 0.0 && d[i] < 0.0) || (z[i] >= self.zmax && d[i] > 0.0)) {
                free[i] = false;
                changed = true;
            }
        }
        changed
    }

    /// Moves `z` onto the endpoint constraint; returns whether it succeeded.
    fn repair(&self, z: &mut Vec<f64>) -> bool {
        for _ in 0..40 {
            let (r, jac) = self.jacobian(z);
            let rn = r.norm();
            if rn <= FEAS_TOL {
                return true;
            }
            let mut free = vec![true; z.len()];
            let mut d = Self::newton_step(&jac, &r, &free);
            while self.blocked(z, &d, &mut free) {
                d = Self::newton_step(&jac, &r, &free);
            }
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha > 1e-6 {
                let mut trial: Vec<f64> = z.iter().zip(d.iter()).map(|(a, b)| a + alpha * b).collect();
                self.clip(&mut trial);
                if self.residual(&trial).norm() < (1.0 - 1e-4 * alpha) * rn {
                    *z = trial;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !accepted {
                return false;
            }
        }
        self.residual(z).norm() <= FEAS_TOL
    }

    /// Projected-gradient direction of the length along the constraint.
    fn ascent_direction(&self, z: &[f64]) -> DVector<f64> {
        let g = self.gradient(z);
        let (_, jac) = self.jacobian(z);
        let mut free = vec![true; z.len()];
        let mut d = Self::project_free(&jac, &g, &free);
        while self.blocked(z, &d, &mut free) {
            d = Self::project_free(&jac, &g, &free);
        }
        d
    }
}

/// Best curve found from the identity to `target` within the budget.
///
/// Deterministic for a fixed seed, and the reported length is
/// nondecreasing in the budget.
pub fn maximize(structure: &Structure, target: &GroupElement, opts: &SolveOptions) -> Result<SolveReport, LongArcError> {
    if matches!(structure.model, GroupModel::Su2(_)) {
        return Err(LongArcError::InfiniteDistance);
    }
    if !structure.model.owns(target) {
        return Err(LongArcError::Unsupported("target is not an element of this group model".into()));
    }
    if opts.steps == 0 || !(opts.horizon > 0.0) {
        return Err(LongArcError::Curve("steps and horizon must be positive".into()));
    }
    let (rp, rm) = null_rays(&structure.cone)
        .ok_or_else(|| LongArcError::Unsupported("the solver needs a segment cone".into()))?;
    let substeps = if structure.model.exact_steps() { 1 } else { COVER_SUBSTEPS };
    let s0 = initial_scale(structure, target, opts.horizon);
    let problem = Problem {
        s: structure,
        target: target.clone(),
        n: opts.steps,
        dt: opts.horizon / opts.steps as f64,
        rays: [rp, rm],
        substeps,
        zmax: (50.0 * s0).max(1.0),
    };
    let dim = 2 * problem.n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut iterations = 0;
    let mut restarts = 0;
    let mut stall = 0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let h_scale = s0 * (dim as f64).sqrt();

    while iterations < opts.budget && stall < STALL_RESTARTS {
        let draw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..2.0 * s0)).collect();
        let mut z = if restarts == 0 { vec![s0; dim] } else { draw };
        restarts += 1;
        iterations += 1;
        let before = best.as_ref().map(|b| b.0);
        if problem.repair(&mut z) {
            let mut value = problem.objective(&z);
            record(&mut best, value, &z);
            let mut h = 0.1 * h_scale;
            while iterations < opts.budget && h > 1e-10 * h_scale {
                let d = problem.ascent_direction(&z);
                let dn = d.norm();
                if !(dn > 1e-14) {
                    break;
                }
                iterations += 1;
                let mut trial: Vec<f64> = z.iter().zip(d.iter()).map(|(a, b)| a + h * b / dn).collect();
                problem.clip(&mut trial);
                if problem.repair(&mut trial) {
                    let v = problem.objective(&trial);
                    if v > value + 1e-15 {
                        z = trial;
                        value = v;
                        record(&mut best, value, &z);
                        h = (2.0 * h).min(h_scale);
                        continue;
                    }
                }
                h *= 0.25;
            }
        }
        let after = best.as_ref().map(|b| b.0);
        match (before, after) {
            (Some(b), Some(a)) if a > b + 1e-9 * b.abs().max(1.0) => stall = 0,
            (None, Some(_)) => stall = 0,
            _ => stall += 1,
        }
    }

    let bound = upper_bound(structure, target).ok().flatten();
    let Some((value, z)) = best else {
        return Ok(SolveReport {
            found: false,
            length: None,
            endpoint_error: None,
            upper_bound: bound,
            gap: None,
            iterations,
            restarts,
            curve: None,
            trajectory: Vec::new(),
        });
    };
    let curve = problem.curve(&z);
    let trajectory = integrate_with(structure, &curve, substeps)?.points;
    let err = structure.model.distance(trajectory.last().expect("nonempty"), target);
    let found = err <= ENDPOINT_TOL;
    Ok(SolveReport {
        found,
        length: Some(value),
        endpoint_error: Some(err),
        gap: bound.as_ref().map(|b| b.value - value),
        upper_bound: bound,
        iterations,
        restarts,
        curve: Some(curve),
        trajectory,
    })
}

fn record(best: &mut Option<(f64, Vec<f64>)>, value: f64, z: &[f64]) {
    if best.as_ref().is_none_or(|b| value > b.0) {
        *best = Some((value, z.to_vec()));
    }
}

/// Typical size of `α, β` for a curve reaching the target over `horizon`:
/// the constant control `2 s u1` accumulates the target's time potential.
fn initial_scale(structure: &Structure, target: &GroupElement, horizon: f64) -> f64 {
    let u1 = structure.cone.center();
    let s = match (&structure.model, target) {
        (GroupModel::Semidirect(_), _) => existence::check_solvable(&structure.algebra, &structure.cone)
            .ok()
            .and_then(|v| v.witness)
            .and_then(|p| super::time_potential(structure, &p, target).ok().map(|f| f / (2.0 * horizon * p.apply(&u1)))),
        (GroupModel::Cover(m), GroupElement::Cover(t)) => Some(t.c / (2.0 * horizon * m.tangent(&u1).xi)),
        _ => None,
    };
    let fallback = structure.model.distance(&structure.model.identity(), target) / (2.0 * horizon * u1.norm());
    match s {
        Some(s) if s.is_finite() && s > 1e-3 => s,
        _ => fallback.max(1e-3),
    }
}
