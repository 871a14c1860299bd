//! Oriented boxes and separating-axis intersection with penetration depth.

use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone, PartialEq)]
pub struct OrientedBox {
    pub center: Vector3<f64>,
    /// Columns are the box's unit axes in world coordinates.
    pub axes: Matrix3<f64>,
    pub half_extents: Vector3<f64>,
}

impl OrientedBox {
    pub fn new(center: Vector3<f64>, axes: Matrix3<f64>, half_extents: Vector3<f64>) -> Self {
        Self {
            center,
            axes,
            half_extents,
        }
    }

    /// Half-length of the box's projection onto unit axis `l`.
    fn projected_radius(&self, l: &Vector3<f64>) -> f64 {
        (0..3)
            .map(|i| self.half_extents[i] * self.axes.column(i).dot(l).abs())
            .sum()
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        let local = self.axes.transpose() * (p - self.center);
        (0..3).all(|i| local[i].abs() <= self.half_extents[i])
    }

    pub fn is_empty(&self) -> bool {
        self.half_extents.iter().any(|h| *h <= 0.0)
    }

    /// Penetration depth along the minimum-overlap separating axis, or `None`
    /// if some axis separates the boxes. Touching boxes report `Some(0.0)`.
    pub fn penetration(&self, other: &OrientedBox) -> Option<f64> {
        if self.is_empty() || other.is_empty() {
            return None;
        }
        let t = other.center - self.center;
        let mut depth = f64::INFINITY;
        let mut test = |axis: Vector3<f64>| -> bool {
            let n = axis.norm();
            if n < 1e-9 {
                return true;
            }
            let l = axis / n;
            let overlap =
                self.projected_radius(&l) + other.projected_radius(&l) - t.dot(&l).abs();
            if overlap < 0.0 {
                return false;
            }
            depth = depth.min(overlap);
            true
        };
        for i in 0..3 {
            if !test(self.axes.column(i).into_owned()) || !test(other.axes.column(i).into_owned())
            {
                return None;
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                if !test(self.axes.column(i).cross(&other.axes.column(j))) {
                    return None;
                }
            }
        }
        Some(depth)
    }
}

/// Right-handed orthonormal basis whose first column is `u`.
pub fn basis_from(u: &Vector3<f64>) -> Matrix3<f64> {
    let helper = if u.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let v = u.cross(&helper).normalize();
    let w = u.cross(&v);
    Matrix3::from_columns(&[*u, v, w])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aabb(c: [f64; 3], h: [f64; 3]) -> OrientedBox {
        OrientedBox::new(c.into(), Matrix3::identity(), h.into())
    }

    #[test]
    fn separated_and_overlapping() {
        let a = aabb([0.0; 3], [1.0; 3]);
        assert_eq!(a.penetration(&aabb([3.0, 0.0, 0.0], [1.0; 3])), None);
        let d = a.penetration(&aabb([1.5, 0.0, 0.0], [1.0; 3])).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let touch = a.penetration(&aabb([2.0, 0.0, 0.0], [1.0; 3])).unwrap();
        assert!(touch.abs() < 1e-12);
    }

    #[test]
    fn rotated_box_corner_gap() {
        // A cube rotated 45 degrees about z, placed so its corner just misses.
        let r = nalgebra::Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_4);
        let b = OrientedBox::new(
            Vector3::new(1.0 + 2f64.sqrt() + 0.01, 0.0, 0.0),
            *r.matrix(),
            Vector3::repeat(1.0),
        );
        assert_eq!(aabb([0.0; 3], [1.0; 3]).penetration(&b), None);
    }

    #[test]
    fn basis_is_proper() {
        for u in [Vector3::x(), Vector3::new(0.3, -0.4, 0.5).normalize()] {
            let m = basis_from(&u);
            assert!((m.transpose() * m - Matrix3::identity()).norm() < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }
}
