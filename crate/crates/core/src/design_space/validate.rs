//! Design validity: parameter ranges and zero-pose link overlap.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::obb::{basis_from, OrientedBox};
use super::{decode, ConfigKind, Genotype, JointGene, SearchSpace, CONTACT_TOLERANCE};
use crate::kinematics::forward_kinematics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Overlap,
    OutOfRange,
}

/// One violated constraint. Link indices count the base mount as link 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub links: (usize, usize),
    /// Penetration depth in meters; zero for range violations.
    pub depth: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn overlaps(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.kind == ViolationKind::Overlap)
    }
}

/// A link volume at the zero pose, as a segment with a square cross-section.
#[derive(Debug, Clone)]
pub struct LinkSegment {
    pub origin: Vector3<f64>,
    /// World axes of the box; column `long_axis` points along the link.
    pub axes: Matrix3<f64>,
    pub long_axis: usize,
    pub length: f64,
    pub width: f64,
}

impl LinkSegment {
    /// The box covering `[start, end]` along the link.
    pub fn slab(&self, start: f64, end: f64) -> OrientedBox {
        let u = self.axes.column(self.long_axis).into_owned();
        let mut half = Vector3::repeat(self.width / 2.0);
        half[self.long_axis] = (end - start) / 2.0;
        OrientedBox::new(self.origin + u * ((start + end) / 2.0), self.axes, half)
    }
}

/// Zero-pose link segments, starting with the base mount from the world
/// origin to `a` when `a` is not degenerate.
pub fn zero_pose_segments(space: &SearchSpace, genotype: &Genotype) -> crate::Result<Vec<(usize, LinkSegment)>> {
    let model = decode(space, genotype)?;
    let frames = forward_kinematics(&model, &vec![0.0; model.n_joint()])?;
    let width = space.cross_section();
    let mut out = Vec::with_capacity(model.n_joint() + 1);
    let a = genotype.base();
    if a.norm() > 1e-9 {
        out.push((
            0,
            LinkSegment {
                origin: Vector3::zeros(),
                axes: basis_from(&a.normalize()),
                long_axis: 0,
                length: a.norm(),
                width,
            },
        ));
    }
    for (i, link) in model.links.iter().enumerate() {
        let long_axis = link.direction.iamax();
        let mut axes = frames.rotations[i];
        if link.direction[long_axis] < 0.0 {
            // keep the long axis pointing along the link; flip a second axis to stay proper
            let next = (long_axis + 1) % 3;
            axes.set_column(long_axis, &(-axes.column(long_axis)));
            axes.set_column(next, &(-axes.column(next)));
        }
        out.push((
            i + 1,
            LinkSegment {
                origin: frames.origins[i],
                axes,
                long_axis,
                length: link.length,
                width,
            },
        ));
    }
    Ok(out)
}

fn range_violations(space: &SearchSpace, genotype: &Genotype) -> Vec<Violation> {
    let out_of_range = |joint: usize| Violation {
        kind: ViolationKind::OutOfRange,
        links: (joint, joint),
        depth: 0.0,
    };
    let mut v = Vec::new();
    if !space.base_range.contains(&genotype.base_offset)
        || genotype.base_offset.iter().any(|c| !c.is_finite())
    {
        v.push(out_of_range(0));
    }
    if genotype.joints.len() != space.n_joint {
        v.push(out_of_range(0));
    }
    for (i, gene) in genotype.joints.iter().enumerate() {
        let ok = match (space.kind, *gene) {
            (
                ConfigKind::General,
                JointGene::General {
                    orientation,
                    direction,
                    length,
                },
            ) => {
                orientation < super::ORIENTATION_COUNT
                    && direction < super::DIRECTION_COUNT
                    && space.link_length.contains(length)
            }
            (ConfigKind::ActuatorModule, JointGene::Module { connection }) => {
                connection < space.patterns.len()
            }
            _ => false,
        };
        if !ok {
            v.push(out_of_range(i + 1));
        }
    }
    v
}

/// Checks parameter ranges and zero-pose link overlap.
///
/// Every pair of link boxes is tested, including the base mount. Adjacent
/// links share a joint, so each gives up a cube of half the cross-section
/// around it before testing; any remaining penetration deeper than
/// [`CONTACT_TOLERANCE`] is a violation.
pub fn validate_genotype(space: &SearchSpace, genotype: &Genotype) -> ValidationReport {
    let mut violations = range_violations(space, genotype);
    let Ok(segments) = zero_pose_segments(space, genotype) else {
        return ValidationReport { violations };
    };
    for (a, (ia, sa)) in segments.iter().enumerate() {
        for (ib, sb) in segments.iter().skip(a + 1) {
            let (box_a, box_b) = if *ib == ia + 1 {
                let h = sa.width.max(sb.width) / 2.0;
                (sa.slab(0.0, sa.length - h), sb.slab(h, sb.length))
            } else {
                (sa.slab(0.0, sa.length), sb.slab(0.0, sb.length))
            };
            if let Some(depth) = box_a.penetration(&box_b) {
                if depth > CONTACT_TOLERANCE {
                    violations.push(Violation {
                        kind: ViolationKind::Overlap,
                        links: (*ia, *ib),
                        depth,
                    });
                }
            }
        }
    }
    ValidationReport { violations }
}
