use nalgebra::{Matrix3, Vector3};

/// A revolute joint placed relative to its parent's moving frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    /// Fixed rotation from the parent frame (the world for the first joint).
    pub rotation: Matrix3<f64>,
    /// Fixed translation in the parent frame; the base offset `a` for the first joint.
    pub translation: Vector3<f64>,
    /// Unit rotation axis in the joint's own frame.
    pub axis: Vector3<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl Joint {
    pub fn clamp(&self, angle: f64) -> f64 {
        angle.clamp(self.lower, self.upper)
    }
}

/// A rectangular link rigidly attached to a joint's moving frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub length: f64,
    /// Unit direction in the joint frame.
    pub direction: Vector3<f64>,
    /// Full box extents along the joint frame's x, y and z axes.
    pub dims: Vector3<f64>,
    pub mass: f64,
    /// Center of mass in the joint frame.
    pub com: Vector3<f64>,
    /// Principal moments about the COM along the joint frame axes (solid cuboid).
    pub inertia: Vector3<f64>,
}

impl Link {
    /// A `width x width x length` cuboid starting at the joint origin and
    /// extending along an axis-aligned `direction`.
    pub fn cuboid(direction: Vector3<f64>, length: f64, width: f64, density: f64) -> Self {
        let dims = direction.map(|c| if c != 0.0 { length } else { width });
        let mass = density * dims.x * dims.y * dims.z;
        Self {
            length,
            direction,
            dims,
            mass,
            com: direction * (length / 2.0),
            inertia: cuboid_inertia(mass, &dims),
        }
    }

    /// End of the link in the joint frame.
    pub fn tip(&self) -> Vector3<f64> {
        self.direction * self.length
    }
}

pub fn cuboid_inertia(mass: f64, dims: &Vector3<f64>) -> Vector3<f64> {
    let sq = dims.component_mul(dims);
    Vector3::new(sq.y + sq.z, sq.x + sq.z, sq.x + sq.y) * (mass / 12.0)
}

/// A decoded serial chain: `joints[i]` carries `links[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicModel {
    pub joints: Vec<Joint>,
    pub links: Vec<Link>,
}

impl KinematicModel {
    pub fn new(joints: Vec<Joint>, links: Vec<Link>) -> Self {
        assert_eq!(joints.len(), links.len(), "one link per joint");
        Self { joints, links }
    }

    pub fn n_joint(&self) -> usize {
        self.joints.len()
    }

    pub fn base_offset(&self) -> Vector3<f64> {
        self.joints
            .first()
            .map(|j| j.translation)
            .unwrap_or_else(Vector3::zeros)
    }

    /// Sum of link lengths: an upper bound on the tip's distance from the first joint.
    pub fn reach(&self) -> f64 {
        self.links.iter().map(|l| l.length).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.links.iter().map(|l| l.mass).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuboid_inertia_matches_formula() {
        let link = Link::cuboid(Vector3::z(), 0.4, 0.15, 1000.0);
        assert!((link.mass - 9.0).abs() < 1e-12);
        let expected = 9.0 / 12.0 * (0.15f64.powi(2) + 0.4f64.powi(2));
        assert!((link.inertia.x - expected).abs() < 1e-12);
        assert!((link.inertia.x - 0.136875).abs() < 1e-12);
        assert!((link.inertia.z - 9.0 / 12.0 * 2.0 * 0.0225).abs() < 1e-12);
    }
}
