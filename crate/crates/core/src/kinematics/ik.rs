//! Damped-least-squares inverse kinematics with multi-start.
//!
//! Each iteration solves `(J^T W_e J + W_n) dq = J^T W_e e` with the
//! error-proportional damping `W_n = (e^T W_e e + lambda_bias) I`, clamps the
//! position error to a maximum norm per step and clamps the joint angles to
//! their limits after every update.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{forward_kinematics, gravity_torque_from_frames, jacobian_from_frames, rotation_log, Frames, Pose};
use crate::design_space::KinematicModel;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IkOptions {
    /// Position tolerance, meters.
    pub tol: f64,
    /// Orientation tolerance, radians.
    pub rot_tol: f64,
    pub max_iter: usize,
    /// Number of initial poses tried; the first is always the zero pose.
    pub restarts: usize,
    pub lambda_bias: f64,
    /// Per-step clamp on the position error norm, meters.
    pub max_step_error: f64,
    /// Weight of radians relative to meters in the error metric.
    pub rot_weight: f64,
    /// Mass held at the tip, kg.
    pub payload: f64,
    pub seed: u64,
}

impl Default for IkOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            rot_tol: 1e-2,
            max_iter: 200,
            restarts: 10,
            lambda_bias: 1e-3,
            max_step_error: 0.1,
            rot_weight: 0.5,
            payload: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkResult {
    pub angles: Vec<f64>,
    pub achieved: Pose,
    pub position_error: f64,
    pub orientation_error: Option<f64>,
    pub torque: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

struct Residual {
    position: Vector3<f64>,
    rotation: Option<Vector3<f64>>,
}

impl Residual {
    fn of(frames: &Frames, target: &Pose) -> Self {
        Self {
            position: target.position - frames.tip,
            rotation: target
                .orientation
                .map(|r| rotation_log(&(r * frames.tip_rotation().transpose()))),
        }
    }

    fn weighted(&self, rot_weight: f64) -> f64 {
        self.position.norm_squared()
            + self.rotation.map_or(0.0, |r| rot_weight * r.norm_squared())
    }

    fn converged(&self, opts: &IkOptions) -> bool {
        self.position.norm() < opts.tol && self.rotation.is_none_or(|r| r.norm() < opts.rot_tol)
    }
}

/// Outcome of one start: best iterate and its weighted squared error.
struct Attempt {
    angles: Vec<f64>,
    error: f64,
    converged: bool,
    iterations: usize,
}

fn descend(model: &KinematicModel, target: &Pose, start: Vec<f64>, opts: &IkOptions) -> Attempt {
    let n = model.n_joint();
    let rows = if target.orientation.is_some() { 6 } else { 3 };
    let mut weights = DVector::from_element(rows, 1.0);
    for r in 3..rows {
        weights[r] = opts.rot_weight;
    }
    let mut angles = start;
    let mut best = Attempt {
        angles: angles.clone(),
        error: f64::INFINITY,
        converged: false,
        iterations: 0,
    };
    let mut stale = 0;
    for it in 0..=opts.max_iter {
        let frames = forward_kinematics(model, &angles).expect("angle count matches model");
        let residual = Residual::of(&frames, target);
        let error = residual.weighted(opts.rot_weight);
        if error < best.error {
            if error < best.error * (1.0 - 1e-9) {
                stale = 0;
            } else {
                stale += 1;
            }
            best.angles.clone_from(&angles);
            best.error = error;
        } else {
            stale += 1;
        }
        best.iterations = it;
        if residual.converged(opts) {
            best.converged = true;
            break;
        }
        if it == opts.max_iter || stale >= 10 {
            break;
        }

        let mut e = DVector::zeros(rows);
        let mut p = residual.position;
        if p.norm() > opts.max_step_error {
            p *= opts.max_step_error / p.norm();
        }
        e.rows_mut(0, 3).copy_from(&p);
        if let Some(r) = residual.rotation {
            e.rows_mut(3, 3).copy_from(&r);
        }
        let j = jacobian_from_frames(&frames, &frames.tip).rows(0, rows).into_owned();
        let we = e.component_mul(&weights);
        let damping = e.dot(&we) + opts.lambda_bias;
        let jt_w: DMatrix<f64> = j.transpose() * DMatrix::from_diagonal(&weights);
        let mut normal = &jt_w * &j;
        for d in 0..n {
            normal[(d, d)] += damping;
        }
        let rhs = &jt_w * &e;
        let Some(chol) = normal.cholesky() else {
            break;
        };
        let step = chol.solve(&rhs);
        let mut moved = 0.0f64;
        for (k, joint) in model.joints.iter().enumerate() {
            let next = joint.clamp(angles[k] + step[k]);
            moved = moved.max((next - angles[k]).abs());
            angles[k] = next;
        }
        if moved < 1e-12 {
            break;
        }
    }
    best
}

/// Solves for joint angles placing the tip at `target`.
///
/// Tries up to `opts.restarts` initial poses (the zero pose first, then poses
/// drawn uniformly within the limits from `opts.seed`), stops at the first
/// converged one and otherwise returns the lowest weighted error found.
/// Never fails: an unreachable or singular target yields a non-converged
/// best-effort result.
pub fn solve_ik(model: &KinematicModel, target: &Pose, opts: &IkOptions) -> IkResult {
    let n = model.n_joint();
    let mut rng = seed::rng(opts.seed);
    let mut best: Option<Attempt> = None;
    let mut iterations = 0;
    for attempt in 0..opts.restarts.max(1) {
        let start = if attempt == 0 {
            model.joints.iter().map(|j| j.clamp(0.0)).collect()
        } else {
            model
                .joints
                .iter()
                .map(|j| {
                    let u: f64 = rng.random();
                    j.lower + (j.upper - j.lower) * u
                })
                .collect()
        };
        let result = descend(model, target, start, opts);
        iterations += result.iterations;
        let done = result.converged;
        if best.as_ref().is_none_or(|b| result.error < b.error) {
            best = Some(result);
        }
        if done {
            break;
        }
    }
    let best = best.unwrap_or(Attempt {
        angles: vec![0.0; n],
        error: f64::INFINITY,
        converged: false,
        iterations: 0,
    });
    let frames = forward_kinematics(model, &best.angles).expect("angle count matches model");
    let residual = Residual::of(&frames, target);
    IkResult {
        torque: gravity_torque_from_frames(model, &frames, opts.payload),
        position_error: residual.position.norm(),
        orientation_error: residual.rotation.map(|r| r.norm()),
        converged: residual.converged(opts),
        achieved: Pose {
            position: frames.tip,
            orientation: target.orientation.map(|_| frames.tip_rotation()),
        },
        angles: best.angles,
        iterations,
    }
}
