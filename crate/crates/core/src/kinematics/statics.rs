use nalgebra::Vector3;

use super::{forward_kinematics, Frames};
use crate::design_space::KinematicModel;
use crate::Result;

/// Gravitational acceleration, m/s^2, along world -z.
pub const GRAVITY: f64 = 9.81;

pub fn gravity_vector() -> Vector3<f64> {
    Vector3::new(0.0, 0.0, -GRAVITY)
}

/// Joint torques exerted by gravity on the links (and a tip payload) at
/// `angles`: `tau_j = w_j . sum_{k >= j} (c_k - p_j) x m_k g`.
///
/// Equals the negative gradient of the potential energy. Joints whose axis is
/// parallel to gravity carry exactly zero torque.
pub fn gravity_torque(model: &KinematicModel, angles: &[f64], payload: f64) -> Result<Vec<f64>> {
    let frames = forward_kinematics(model, angles)?;
    Ok(gravity_torque_from_frames(model, &frames, payload))
}

pub fn gravity_torque_from_frames(model: &KinematicModel, frames: &Frames, payload: f64) -> Vec<f64> {
    let g = gravity_vector();
    let coms = frames.link_coms(model);
    (0..model.n_joint())
        .map(|j| {
            let p = frames.origins[j];
            let mut moment = Vector3::zeros();
            for (c, link) in coms.iter().zip(&model.links).skip(j) {
                moment += (c - p).cross(&(g * link.mass));
            }
            if payload != 0.0 {
                moment += (frames.tip - p).cross(&(g * payload));
            }
            frames.axes[j].dot(&moment)
        })
        .collect()
}
