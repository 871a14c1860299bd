//! Serial-chain kinematics and statics.

mod ik;
mod statics;

use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::design_space::KinematicModel;
use crate::{Error, Result};

pub use ik::{solve_ik, IkOptions, IkResult};
pub use statics::{gravity_torque, gravity_torque_from_frames, GRAVITY};

/// Rotations are re-projected onto SO(3) after this many compositions.
const REORTHONORMALIZE_EVERY: usize = 100;

/// A target or achieved end-effector pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vector3<f64>,
    pub orientation: Option<Matrix3<f64>>,
}

impl Pose {
    pub fn position(position: Vector3<f64>) -> Self {
        Self {
            position,
            orientation: None,
        }
    }
}

/// World frames of a chain at one joint configuration.
#[derive(Debug, Clone)]
pub struct Frames {
    /// Joint origins.
    pub origins: Vec<Vector3<f64>>,
    /// World rotation axes.
    pub axes: Vec<Vector3<f64>>,
    /// Moving frame of each joint (after its own rotation).
    pub rotations: Vec<Matrix3<f64>>,
    pub tip: Vector3<f64>,
}

impl Frames {
    pub fn tip_rotation(&self) -> Matrix3<f64> {
        self.rotations
            .last()
            .copied()
            .unwrap_or_else(Matrix3::identity)
    }

    pub fn tip_pose(&self) -> Pose {
        Pose {
            position: self.tip,
            orientation: Some(self.tip_rotation()),
        }
    }

    /// World centers of mass of every link.
    pub fn link_coms(&self, model: &KinematicModel) -> Vec<Vector3<f64>> {
        model
            .links
            .iter()
            .enumerate()
            .map(|(i, l)| self.origins[i] + self.rotations[i] * l.com)
            .collect()
    }
}

pub(crate) fn check_len(model: &KinematicModel, angles: &[f64]) -> Result<()> {
    if angles.len() != model.n_joint() {
        return Err(Error::JointCountMismatch {
            expected: model.n_joint(),
            got: angles.len(),
        });
    }
    Ok(())
}

/// Rotation by `angle` about unit `axis`.
pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_unchecked(*axis), angle).into_inner()
}

/// Nearest rotation matrix (polar projection).
pub fn reorthonormalize(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let mut r = u * v_t;
    if r.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * v_t;
    }
    r
}

/// Composes the chain root-to-tip.
pub fn forward_kinematics(model: &KinematicModel, angles: &[f64]) -> Result<Frames> {
    check_len(model, angles)?;
    let n = model.n_joint();
    let mut frames = Frames {
        origins: Vec::with_capacity(n),
        axes: Vec::with_capacity(n),
        rotations: Vec::with_capacity(n),
        tip: Vector3::zeros(),
    };
    let mut position = Vector3::zeros();
    let mut rotation = Matrix3::identity();
    for (i, (joint, &angle)) in model.joints.iter().zip(angles).enumerate() {
        position += rotation * joint.translation;
        let mut fixed = rotation * joint.rotation;
        if (2 * i + 1) % REORTHONORMALIZE_EVERY == 0 {
            fixed = reorthonormalize(&fixed);
        }
        frames.origins.push(position);
        frames.axes.push(fixed * joint.axis);
        rotation = fixed * axis_angle(&joint.axis, angle);
        if (2 * i + 2) % REORTHONORMALIZE_EVERY == 0 {
            rotation = reorthonormalize(&rotation);
        }
        frames.rotations.push(rotation);
    }
    frames.tip = match model.links.last() {
        Some(link) => position + rotation * link.tip(),
        None => position,
    };
    Ok(frames)
}

/// Geometric Jacobian at `point` from precomputed frames: linear rows, then angular rows.
pub fn jacobian_from_frames(frames: &Frames, point: &Vector3<f64>) -> DMatrix<f64> {
    let n = frames.axes.len();
    let mut j = DMatrix::zeros(6, n);
    for (c, (w, p)) in frames.axes.iter().zip(&frames.origins).enumerate() {
        let v = w.cross(&(point - p));
        for r in 0..3 {
            j[(r, c)] = v[r];
            j[(r + 3, c)] = w[r];
        }
    }
    j
}

/// 6 x n geometric Jacobian of `point` (world coordinates, rigidly attached to the tip).
pub fn jacobian(model: &KinematicModel, angles: &[f64], point: &Vector3<f64>) -> Result<DMatrix<f64>> {
    let frames = forward_kinematics(model, angles)?;
    Ok(jacobian_from_frames(&frames, point))
}

/// Rotation vector (axis times angle) of `r`.
pub fn rotation_log(r: &Matrix3<f64>) -> Vector3<f64> {
    Rotation3::from_matrix_unchecked(*r).scaled_axis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_space::{decode, orientation, Genotype, JointGene, SearchSpace};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn single(orientation: usize, direction: usize, length: f64, base: [f64; 3]) -> KinematicModel {
        let g = Genotype {
            base_offset: base,
            joints: vec![JointGene::General {
                orientation,
                direction,
                length,
            }],
        };
        decode(&SearchSpace::general(1), &g).unwrap()
    }

    #[test]
    fn straight_single_link_tip() {
        let m = single(orientation::IDENTITY_ORIENTATION, 4, 0.3, [0.0; 3]);
        let f = forward_kinematics(&m, &[0.0]).unwrap();
        assert_eq!(f.tip, Vector3::new(0.0, 0.0, 0.3));
    }

    #[test]
    fn pitch_quarter_turn_points_down() {
        let a = [0.1, -0.2, 0.3];
        let m = single(orientation::IDENTITY_ORIENTATION, 0, 0.5, a);
        let f = forward_kinematics(&m, &[FRAC_PI_2]).unwrap();
        assert_relative_eq!(f.tip, Vector3::new(0.1, -0.2, 0.3 - 0.5), epsilon = 1e-15);
    }

    #[test]
    fn zero_pose_sum_of_links() {
        let space = SearchSpace::general(3);
        let g = Genotype {
            base_offset: [0.5, 0.0, -0.1],
            joints: [(0, 0.2), (4, 0.3), (3, 0.4)]
                .iter()
                .map(|&(d, l)| JointGene::General {
                    orientation: orientation::IDENTITY_ORIENTATION,
                    direction: d,
                    length: l,
                })
                .collect(),
        };
        let m = decode(&space, &g).unwrap();
        let f = forward_kinematics(&m, &[0.0; 3]).unwrap();
        assert_relative_eq!(f.tip, Vector3::new(0.7, -0.4, 0.2), epsilon = 1e-15);
    }

    #[test]
    fn length_mismatch_is_error() {
        let m = single(0, 0, 0.3, [0.0; 3]);
        assert!(matches!(
            forward_kinematics(&m, &[0.0, 0.0]),
            Err(Error::JointCountMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn yaw_joint_jacobian_column() {
        // orientation 8 maps the joint axis onto +z
        let r = 0.4;
        let m = single(8, 0, r, [0.0; 3]);
        let f = forward_kinematics(&m, &[0.0]).unwrap();
        assert_eq!(f.axes[0], Vector3::z());
        let j = jacobian_from_frames(&f, &f.tip);
        let tip = f.tip;
        assert_relative_eq!(tip.norm(), r, epsilon = 1e-15);
        // linear column is z x tip
        let expected = Vector3::z().cross(&tip);
        for k in 0..3 {
            assert_relative_eq!(j[(k, 0)], expected[k], epsilon = 1e-15);
        }
        assert_eq!((j[(3, 0)], j[(4, 0)], j[(5, 0)]), (0.0, 0.0, 1.0));
    }

    #[test]
    fn degenerate_point_gives_zero_linear_rows() {
        let m = single(0, 0, 0.3, [0.0; 3]);
        let f = forward_kinematics(&m, &[0.7]).unwrap();
        let j = jacobian_from_frames(&f, &f.origins[0]);
        assert!(j.rows(0, 3).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn reorthonormalize_restores_rotation() {
        let r = axis_angle(&Vector3::new(1.0, 2.0, 3.0).normalize(), 0.7);
        let noisy = r + Matrix3::from_element(1e-6);
        let fixed = reorthonormalize(&noisy);
        assert!((fixed.transpose() * fixed - Matrix3::identity()).norm() < 1e-12);
        assert!((fixed - r).norm() < 1e-5);
    }
}
