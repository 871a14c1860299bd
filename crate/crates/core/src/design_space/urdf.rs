//! URDF export and import of serial chains.
//!
//! Exported documents contain `base_link` at the world origin, then one
//! revolute joint and one box link per model joint. Joint 1's origin is the
//! base offset. Each link's visual, collision and inertial origins sit at its
//! center of mass, which is half-way along the link, so reading a document back
//! recovers link direction and length exactly.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};

use super::model::{Joint, KinematicModel, Link};
use crate::{Error, Result};

const EFFORT_LIMIT: f64 = 1000.0;
const VELOCITY_LIMIT: f64 = 1.0;

fn fmt3(v: &Vector3<f64>) -> String {
    // adding 0.0 turns -0 into 0
    format!("{} {} {}", v.x + 0.0, v.y + 0.0, v.z + 0.0)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// Roll-pitch-yaw angles with `R = Rz(yaw) Ry(pitch) Rx(roll)`.
pub fn rpy_from_matrix(r: &Matrix3<f64>) -> Vector3<f64> {
    let sp = (-r[(2, 0)]).clamp(-1.0, 1.0);
    if sp.abs() < 1.0 - 1e-12 {
        Vector3::new(
            r[(2, 1)].atan2(r[(2, 2)]),
            sp.asin(),
            r[(1, 0)].atan2(r[(0, 0)]),
        )
    } else {
        // gimbal lock: fold yaw into roll
        let pitch = sp.signum() * std::f64::consts::FRAC_PI_2;
        let roll = (sp.signum() * r[(0, 1)]).atan2(r[(1, 1)]);
        Vector3::new(roll, pitch, 0.0)
    }
}

/// Inverse of [`rpy_from_matrix`]. A result within 1e-9 of a signed
/// permutation matrix is snapped onto it, so axis-aligned orientations read
/// back exactly.
pub fn matrix_from_rpy(rpy: &Vector3<f64>) -> Matrix3<f64> {
    let (sr, cr) = rpy.x.sin_cos();
    let (sp, cp) = rpy.y.sin_cos();
    let (sy, cy) = rpy.z.sin_cos();
    let m = Matrix3::new(
        cy * cp,
        cy * sp * sr - sy * cr,
        cy * sp * cr + sy * sr,
        sy * cp,
        sy * sp * sr + cy * cr,
        sy * sp * cr - cy * sr,
        -sp,
        cp * sr,
        cp * cr,
    );
    let snapped = m.map(|v| v.round());
    if (m - snapped).abs().max() < 1e-9 {
        snapped
    } else {
        m
    }
}

/// Writes `model` as a URDF document with 2-space indentation.
pub fn export_urdf(model: &KinematicModel, name: &str) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(w, "<robot name=\"{}\">", escape(name));
    let _ = writeln!(w, "  <link name=\"base_link\"/>");
    for (i, (joint, link)) in model.joints.iter().zip(&model.links).enumerate() {
        let parent = if i == 0 {
            "base_link".to_string()
        } else {
            format!("link{i}")
        };
        let child = format!("link{}", i + 1);
        let _ = writeln!(w, "  <joint name=\"joint{}\" type=\"revolute\">", i + 1);
        let _ = writeln!(w, "    <parent link=\"{parent}\"/>");
        let _ = writeln!(w, "    <child link=\"{child}\"/>");
        let _ = writeln!(
            w,
            "    <origin xyz=\"{}\" rpy=\"{}\"/>",
            fmt3(&joint.translation),
            fmt3(&rpy_from_matrix(&joint.rotation))
        );
        let _ = writeln!(w, "    <axis xyz=\"{}\"/>", fmt3(&joint.axis));
        let _ = writeln!(
            w,
            "    <limit lower=\"{}\" upper=\"{}\" effort=\"{EFFORT_LIMIT}\" velocity=\"{VELOCITY_LIMIT}\"/>",
            joint.lower, joint.upper
        );
        let _ = writeln!(w, "  </joint>");

        let center = fmt3(&link.com);
        let size = fmt3(&link.dims);
        let _ = writeln!(w, "  <link name=\"{child}\">");
        let _ = writeln!(w, "    <inertial>");
        let _ = writeln!(w, "      <origin xyz=\"{center}\" rpy=\"0 0 0\"/>");
        let _ = writeln!(w, "      <mass value=\"{}\"/>", link.mass);
        let _ = writeln!(
            w,
            "      <inertia ixx=\"{}\" ixy=\"0\" ixz=\"0\" iyy=\"{}\" iyz=\"0\" izz=\"{}\"/>",
            link.inertia.x, link.inertia.y, link.inertia.z
        );
        let _ = writeln!(w, "    </inertial>");
        for tag in ["visual", "collision"] {
            let _ = writeln!(w, "    <{tag}>");
            let _ = writeln!(w, "      <origin xyz=\"{center}\" rpy=\"0 0 0\"/>");
            let _ = writeln!(w, "      <geometry>");
            let _ = writeln!(w, "        <box size=\"{size}\"/>");
            let _ = writeln!(w, "      </geometry>");
            let _ = writeln!(w, "    </{tag}>");
        }
        let _ = writeln!(w, "  </link>");
    }
    let _ = writeln!(w, "</robot>");
    out
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::Parse {
        context: "URDF".into(),
        message: message.into(),
    }
}

fn floats<const N: usize>(text: &str, what: &str) -> Result<[f64; N]> {
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(format!("{what}: {e}")))?;
    values
        .try_into()
        .map_err(|_| parse_err(format!("{what}: expected {N} numbers")))
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, tag: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(tag))
}

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str, what: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| parse_err(format!("{what}: missing attribute `{name}`")))
}

fn link_name<'a>(node: roxmltree::Node<'a, '_>) -> &'a str {
    node.attribute("name").unwrap_or("")
}

fn origin(node: roxmltree::Node, what: &str) -> Result<(Vector3<f64>, Vector3<f64>)> {
    match child(node, "origin") {
        None => Ok((Vector3::zeros(), Vector3::zeros())),
        Some(o) => {
            let xyz = o
                .attribute("xyz")
                .map(|t| floats::<3>(t, &format!("{what} origin xyz")))
                .transpose()?
                .unwrap_or([0.0; 3]);
            let rpy = o
                .attribute("rpy")
                .map(|t| floats::<3>(t, &format!("{what} origin rpy")))
                .transpose()?
                .unwrap_or([0.0; 3]);
            Ok((xyz.into(), rpy.into()))
        }
    }
}

fn parse_link(node: roxmltree::Node, name: &str) -> Result<Link> {
    let what = format!("link `{name}`");
    let visual = child(node, "visual").ok_or_else(|| parse_err(format!("{what}: missing <visual>")))?;
    let (center, rpy) = origin(visual, &format!("{what} visual"))?;
    if rpy != Vector3::zeros() {
        return Err(parse_err(format!("{what} visual: rotated boxes are not supported")));
    }
    let size = child(visual, "geometry")
        .and_then(|g| child(g, "box"))
        .ok_or_else(|| parse_err(format!("{what} visual: missing <geometry><box>")))?;
    let dims: Vector3<f64> = floats::<3>(attr(size, "size", &format!("{what} box"))?, &format!("{what} box size"))?.into();
    let inertial =
        child(node, "inertial").ok_or_else(|| parse_err(format!("{what}: missing <inertial>")))?;
    let (com, _) = origin(inertial, &format!("{what} inertial"))?;
    let mass_node = child(inertial, "mass")
        .ok_or_else(|| parse_err(format!("{what} inertial: missing <mass>")))?;
    let mass: f64 = attr(mass_node, "value", &format!("{what} mass"))?
        .parse()
        .map_err(|e| parse_err(format!("{what} mass: {e}")))?;
    let inertia_node = child(inertial, "inertia")
        .ok_or_else(|| parse_err(format!("{what} inertial: missing <inertia>")))?;
    let mut inertia = Vector3::zeros();
    for (k, key) in ["ixx", "iyy", "izz"].iter().enumerate() {
        inertia[k] = attr(inertia_node, key, &format!("{what} inertia"))?
            .parse()
            .map_err(|e| parse_err(format!("{what} inertia {key}: {e}")))?;
    }
    let half = center.norm();
    if !(half > 0.0) {
        return Err(parse_err(format!("{what} visual origin: link box must be offset from the joint")));
    }
    Ok(Link {
        length: 2.0 * half,
        direction: center / half,
        dims,
        mass,
        com,
        inertia,
    })
}

/// Reads a serial chain of revolute joints written by [`export_urdf`] (or
/// any URDF of the same shape).
pub fn parse_urdf(text: &str) -> Result<KinematicModel> {
    let doc = roxmltree::Document::parse(text).map_err(|e| parse_err(e.to_string()))?;
    let robot = doc.root_element();
    if !robot.has_tag_name("robot") {
        return Err(parse_err("root element must be <robot>"));
    }
    let links: Vec<_> = robot.children().filter(|c| c.has_tag_name("link")).collect();
    let joints: Vec<_> = robot.children().filter(|c| c.has_tag_name("joint")).collect();
    let mut parsed = Vec::with_capacity(joints.len());
    for j in &joints {
        let name = attr(*j, "name", "joint")?;
        let what = format!("joint `{name}`");
        let kind = attr(*j, "type", &what)?;
        if kind != "revolute" {
            return Err(parse_err(format!("{what}: type `{kind}` is not supported, expected revolute")));
        }
        let parent = child(*j, "parent")
            .ok_or_else(|| parse_err(format!("{what}: missing <parent>")))
            .and_then(|p| attr(p, "link", &format!("{what} parent")))?;
        let child_link = child(*j, "child")
            .ok_or_else(|| parse_err(format!("{what}: missing <child>")))
            .and_then(|c| attr(c, "link", &format!("{what} child")))?;
        parsed.push((*j, name, parent, child_link));
    }
    let root = links
        .iter()
        .map(|l| link_name(*l))
        .find(|n| !parsed.iter().any(|(_, _, _, c)| c == n))
        .ok_or_else(|| parse_err("no root link"))?;
    let mut current = root.to_string();
    let mut model_joints = Vec::new();
    let mut model_links = Vec::new();
    loop {
        let mut next = parsed.iter().filter(|(_, _, p, _)| *p == current);
        let Some(&(node, name, _, child_name)) = next.next() else {
            break;
        };
        if next.next().is_some() {
            return Err(parse_err(format!("link `{current}`: branching chains are not supported")));
        }
        let what = format!("joint `{name}`");
        let (translation, rpy) = origin(node, &what)?;
        let axis: Vector3<f64> = child(node, "axis")
            .map(|a| floats::<3>(attr(a, "xyz", &format!("{what} axis"))?, &format!("{what} axis xyz")))
            .transpose()?
            .unwrap_or([1.0, 0.0, 0.0])
            .into();
        if axis.norm() == 0.0 {
            return Err(parse_err(format!("{what} axis: zero vector")));
        }
        let limit = child(node, "limit").ok_or_else(|| parse_err(format!("{what}: missing <limit>")))?;
        let bound = |key: &str| -> Result<f64> {
            attr(limit, key, &format!("{what} limit"))?
                .parse()
                .map_err(|e| parse_err(format!("{what} limit {key}: {e}")))
        };
        model_joints.push(Joint {
            rotation: matrix_from_rpy(&rpy),
            translation,
            axis: if axis.norm() == 1.0 { axis } else { axis.normalize() },
            lower: bound("lower")?,
            upper: bound("upper")?,
        });
        let link_node = links
            .iter()
            .find(|l| link_name(**l) == child_name)
            .ok_or_else(|| parse_err(format!("{what}: child link `{child_name}` not declared")))?;
        model_links.push(parse_link(*link_node, child_name)?);
        current = child_name.to_string();
    }
    if model_joints.len() != joints.len() {
        return Err(parse_err("joints are not a single chain from the root link"));
    }
    if model_joints.is_empty() {
        return Err(parse_err("no revolute joints"));
    }
    Ok(KinematicModel::new(model_joints, model_links))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design_space::{decode, enumerate_orientations, orientation, Genotype, JointGene, SearchSpace};

    fn one_link() -> KinematicModel {
        let g = Genotype {
            base_offset: [0.1, 0.0, -0.05],
            joints: vec![JointGene::General {
                orientation: orientation::IDENTITY_ORIENTATION,
                direction: 4,
                length: 0.4,
            }],
        };
        decode(&SearchSpace::general(1), &g).unwrap()
    }

    #[test]
    fn single_link_structure() {
        let doc = export_urdf(&one_link(), "demo");
        assert_eq!(doc.matches("<joint ").count(), 1);
        assert_eq!(doc.matches("type=\"revolute\"").count(), 1);
        assert_eq!(doc.matches("<link ").count(), 2);
        assert!(doc.contains("<box size=\"0.15 0.15 0.4\"/>"));
        let ixx: f64 = doc.split("ixx=\"").nth(1).unwrap().split('"').next().unwrap().parse().unwrap();
        assert!((ixx - 0.136875).abs() < 1e-12, "{doc}");
        assert!(doc.contains("rpy=\"0 0 0\""));
    }

    #[test]
    fn roundtrip_is_exact() {
        let model = one_link();
        assert_eq!(parse_urdf(&export_urdf(&model, "demo")).unwrap(), model);
    }

    #[test]
    fn rpy_roundtrip_of_orientations() {
        for r in enumerate_orientations() {
            assert_eq!(matrix_from_rpy(&rpy_from_matrix(&r)), r);
        }
        let r = crate::kinematics::axis_angle(&Vector3::new(0.2, -0.5, 0.8).normalize(), 1.1);
        assert!((matrix_from_rpy(&rpy_from_matrix(&r)) - r).abs().max() < 1e-12);
    }

    #[test]
    fn missing_limit_names_field() {
        let doc = export_urdf(&one_link(), "demo").replace(
            "<limit lower=\"-1.5707963267948966\" upper=\"1.5707963267948966\" effort=\"1000\" velocity=\"1\"/>",
            "",
        );
        let err = parse_urdf(&doc).unwrap_err().to_string();
        assert!(err.contains("limit"), "{err}");
    }

    #[test]
    fn escapes_name() {
        let doc = export_urdf(&one_link(), "a<b");
        assert!(doc.contains("name=\"a&lt;b\""));
        assert!(parse_urdf(&doc).is_ok());
    }
}
