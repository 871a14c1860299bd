//! Target sets and the two design objectives.
//!
//! For targets `x_ref_i`, each design is scored by
//! `E_x = sum_i ||x_i - x_ref_i||` and `E_tau = sum_i ||tau_i||`, where
//! `x_i, tau_i` are the tip position and gravity torque at the inverse
//! kinematics solution for target `i`.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design_space::{BaseRange, Interval, KinematicModel, ValidationReport};
use crate::kinematics::{solve_ik, IkOptions, Pose};
use crate::{seed, Error, Result};

/// Objective penalty added for infeasible designs.
pub const PENALTY: f64 = 1e3;

/// Base-range defaults of the shipped scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    #[default]
    General,
    GeneralTarget1,
    GeneralTarget2,
    GeneralTarget3,
    Module,
}

impl Preset {
    pub fn base_range(self) -> BaseRange {
        let mut r = BaseRange::uniform(-1.0, 1.0);
        match self {
            Preset::General => {}
            Preset::GeneralTarget1 => r.z = Interval::new(-0.1, 0.1),
            Preset::GeneralTarget2 => r.x = Interval::new(-1.0, 0.0),
            Preset::GeneralTarget3 => r.z = Interval::new(-1.0, 0.0),
            Preset::Module => {
                r.x = Interval::new(-1.0, 0.0);
                r.z = Interval::new(-1.0, 0.0);
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    pub label: String,
    pub targets: Vec<Pose>,
    pub base_range: BaseRange,
    /// Mass held at the tip while reaching each target, kg.
    pub payload: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetDocument {
    label: String,
    #[serde(default)]
    preset: Preset,
    #[serde(default)]
    payload: f64,
    #[serde(default)]
    base_range: BaseOverrides,
    #[serde(default)]
    target: Vec<TargetEntry>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct BaseOverrides {
    x: Option<Interval>,
    y: Option<Interval>,
    z: Option<Interval>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetEntry {
    position: [f64; 3],
    /// Unit quaternion `[w, x, y, z]`.
    orientation: Option<[f64; 4]>,
}

impl TargetSet {
    pub fn positions(positions: &[[f64; 3]], base_range: BaseRange) -> Self {
        Self {
            label: String::new(),
            targets: positions
                .iter()
                .map(|p| Pose::position(Vector3::from(*p)))
                .collect(),
            base_range,
            payload: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Shifts every target and the base range by `shift`.
    pub fn translated(&self, shift: &Vector3<f64>) -> Self {
        let mut out = self.clone();
        for t in &mut out.targets {
            t.position += shift;
        }
        out.base_range = self.base_range.translated(&[shift.x, shift.y, shift.z]);
        out
    }
}

/// Parses a target-set document (TOML).
pub fn load_targets(document: &str) -> Result<TargetSet> {
    let err = |message: String| Error::Parse {
        context: "target set".into(),
        message,
    };
    let doc: TargetDocument = toml::from_str(document).map_err(|e| err(e.to_string()))?;
    if doc.target.is_empty() {
        return Err(err("field `target`: at least one target is required".into()));
    }
    if !(doc.payload >= 0.0 && doc.payload.is_finite()) {
        return Err(err("field `payload`: must be a non-negative mass".into()));
    }
    let mut base_range = doc.preset.base_range();
    for (slot, name, value) in [
        (&mut base_range.x, "x", doc.base_range.x),
        (&mut base_range.y, "y", doc.base_range.y),
        (&mut base_range.z, "z", doc.base_range.z),
    ] {
        if let Some(v) = value {
            if !v.is_valid() {
                return Err(err(format!("field `base_range.{name}`: need finite lo <= hi")));
            }
            *slot = v;
        }
    }
    let mut targets = Vec::with_capacity(doc.target.len());
    for (i, entry) in doc.target.into_iter().enumerate() {
        if entry.position.iter().any(|c| !c.is_finite()) {
            return Err(err(format!("field `target[{i}].position`: must be finite")));
        }
        let orientation = match entry.orientation {
            None => None,
            Some([w, x, y, z]) => {
                let q = Quaternion::new(w, x, y, z);
                if !q.coords.iter().all(|c| c.is_finite()) || (q.norm() - 1.0).abs() > 1e-6 {
                    return Err(err(format!(
                        "field `target[{i}].orientation`: must be a unit quaternion [w, x, y, z]"
                    )));
                }
                Some(UnitQuaternion::from_quaternion(q).to_rotation_matrix().into_inner())
            }
        };
        targets.push(Pose {
            position: Vector3::from(entry.position),
            orientation,
        });
    }
    Ok(TargetSet {
        label: doc.label,
        targets,
        base_range,
        payload: doc.payload,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDiagnostics {
    pub position_error: f64,
    pub torque_norm: f64,
    pub converged: bool,
    /// Joint angles of the inverse-kinematics solution.
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub e_x: f64,
    pub e_tau: f64,
    pub feasible: bool,
    pub per_target: Vec<TargetDiagnostics>,
}

impl ObjectiveVector {
    /// A bare objective pair, mostly for tests and synthetic problems.
    pub fn new(e_x: f64, e_tau: f64) -> Self {
        Self {
            e_x,
            e_tau,
            feasible: true,
            per_target: Vec::new(),
        }
    }

    pub fn pair(&self) -> [f64; 2] {
        [self.e_x, self.e_tau]
    }
}

/// Seed of the inverse-kinematics restarts for one target.
///
/// Keyed on the target's offset from the base, quantized to a micrometer, so
/// reordering targets or translating the whole problem leaves each solve unchanged.
fn target_seed(opts_seed: u64, target: &Pose, base: &Vector3<f64>) -> u64 {
    let rel = target.position - base;
    rel.iter().fold(opts_seed, |s, c| {
        seed::derive(s, (c * 1e6).round() as i64 as u64)
    })
}

/// Scores a decoded design against a target set.
pub fn evaluate(model: &KinematicModel, targets: &TargetSet, ik_opts: &IkOptions) -> ObjectiveVector {
    let base = model.base_offset();
    let per_target: Vec<TargetDiagnostics> = targets
        .targets
        .par_iter()
        .map(|target| {
            let opts = IkOptions {
                seed: target_seed(ik_opts.seed, target, &base),
                payload: targets.payload,
                ..ik_opts.clone()
            };
            let r = solve_ik(model, target, &opts);
            TargetDiagnostics {
                position_error: r.position_error,
                torque_norm: r.torque.iter().map(|t| t * t).sum::<f64>().sqrt(),
                converged: r.converged,
                angles: r.angles,
            }
        })
        .collect();
    ObjectiveVector {
        e_x: per_target.iter().map(|t| t.position_error).sum(),
        e_tau: per_target.iter().map(|t| t.torque_norm).sum(),
        feasible: true,
        per_target,
    }
}

/// Objective values assigned to an infeasible design.
///
/// `e_x = sum_i ||x_ref_i|| + PENALTY` and `e_tau = PENALTY`; identical for
/// every infeasible design of a campaign.
pub fn penalize(targets: &TargetSet, report: &ValidationReport) -> Result<ObjectiveVector> {
    if report.feasible() {
        return Err(Error::Contract("penalize called with a feasible report".into()));
    }
    let base: f64 = targets.targets.iter().map(|t| t.position.norm()).sum();
    Ok(ObjectiveVector {
        e_x: base + PENALTY,
        e_tau: PENALTY,
        feasible: false,
        per_target: Vec::new(),
    })
}
