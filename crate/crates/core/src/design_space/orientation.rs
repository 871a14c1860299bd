//! Discrete joint orientations and link directions of the general configuration.
//!
//! Every joint rotates about its local +y axis. An orientation re-maps that
//! axis onto one of the parent frame's x, y or z axes and spins the joint by a
//! multiple of 90 degrees about it, giving 3 x 4 = 12 proper rotations. All
//! entries are exactly -1, 0 or 1.

use nalgebra::{Matrix3, Vector3};

pub const ORIENTATION_COUNT: usize = 12;
pub const DIRECTION_COUNT: usize = 6;

/// Index of the identity orientation (axis stays on +y, no spin).
pub const IDENTITY_ORIENTATION: usize = 4;

/// Local rotation axis of every revolute joint.
pub fn joint_axis() -> Vector3<f64> {
    Vector3::y()
}

const COS: [f64; 4] = [1.0, 0.0, -1.0, 0.0];
const SIN: [f64; 4] = [0.0, 1.0, 0.0, -1.0];

/// Rotation by `quarter_turns` x 90 degrees about world axis `axis` (0 = x, 1 = y, 2 = z).
pub fn quarter_turn(axis: usize, quarter_turns: usize) -> Matrix3<f64> {
    let (c, s) = (COS[quarter_turns % 4], SIN[quarter_turns % 4]);
    match axis {
        0 => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        1 => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        _ => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    }
}

/// Rotation carrying local +y onto parent axis `axis`.
fn axis_mapping(axis: usize) -> Matrix3<f64> {
    match axis {
        0 => quarter_turn(2, 3),
        1 => Matrix3::identity(),
        _ => quarter_turn(0, 1),
    }
}

/// Orientation `index` (0..12): `index / 4` selects the axis, `index % 4` the spin.
pub fn orientation(index: usize) -> Option<Matrix3<f64>> {
    if index >= ORIENTATION_COUNT {
        return None;
    }
    let axis = index / 4;
    Some(quarter_turn(axis, index % 4) * axis_mapping(axis))
}

/// All 12 orientation matrices in index order.
pub fn enumerate_orientations() -> Vec<Matrix3<f64>> {
    (0..ORIENTATION_COUNT)
        .map(|i| orientation(i).expect("index in range"))
        .collect()
}

/// Link direction `index` (0..6): +x, -x, +y, -y, +z, -z.
pub fn direction(index: usize) -> Option<Vector3<f64>> {
    let sign = if index % 2 == 0 { 1.0 } else { -1.0 };
    match index / 2 {
        0 => Some(Vector3::new(sign, 0.0, 0.0)),
        1 => Some(Vector3::new(0.0, sign, 0.0)),
        2 => Some(Vector3::new(0.0, 0.0, sign)),
        _ => None,
    }
}
