//! Design-parameter grammars, genotype sampling, validation and decoding.

mod config;
mod model;
pub mod obb;
pub mod orientation;
pub mod patterns;
pub mod urdf;
mod validate;

use std::sync::Arc;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::optimizer::ParamSpec;
use crate::{Error, Result};

pub use config::SpaceConfig;
pub use model::{Joint, KinematicModel, Link};
pub use orientation::{enumerate_orientations, DIRECTION_COUNT, ORIENTATION_COUNT};
pub use patterns::{ConnectionPattern, PatternTable, PATTERN_COUNT};
pub use validate::{validate_genotype, ValidationReport, Violation, ViolationKind};

/// Allowed interpenetration between link boxes, meters.
pub const CONTACT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfigKind {
    General,
    ActuatorModule,
}

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if self.width() == 0.0 {
            self.lo
        } else {
            (self.lo + self.width() * u).clamp(self.lo, self.hi)
        }
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Self { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Per-axis bounds of the base offset `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseRange {
    pub x: Interval,
    pub y: Interval,
    pub z: Interval,
}

impl BaseRange {
    pub const fn uniform(lo: f64, hi: f64) -> Self {
        Self {
            x: Interval::new(lo, hi),
            y: Interval::new(lo, hi),
            z: Interval::new(lo, hi),
        }
    }

    pub fn axes(&self) -> [Interval; 3] {
        [self.x, self.y, self.z]
    }

    pub fn contains(&self, a: &[f64; 3]) -> bool {
        self.axes().iter().zip(a).all(|(i, v)| i.contains(*v))
    }

    pub fn translated(&self, shift: &[f64; 3]) -> Self {
        let t = |i: Interval, s: f64| Interval::new(i.lo + s, i.hi + s);
        Self {
            x: t(self.x, shift[0]),
            y: t(self.y, shift[1]),
            z: t(self.z, shift[2]),
        }
    }
}

impl Default for BaseRange {
    fn default() -> Self {
        Self::uniform(-1.0, 1.0)
    }
}

/// The campaign's parameter grammar.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub kind: ConfigKind,
    pub n_joint: usize,
    pub link_length: Interval,
    pub base_range: BaseRange,
    /// Symmetric joint limit, radians.
    pub joint_limit: f64,
    /// Side of the square link cross-section, meters (general kind).
    pub link_cross_section: f64,
    /// kg/m^3.
    pub link_density: f64,
    pub module_dims: [f64; 3],
    pub patterns: Arc<PatternTable>,
}

impl SearchSpace {
    pub fn general(n_joint: usize) -> Self {
        Self {
            kind: ConfigKind::General,
            n_joint,
            link_length: Interval::new(0.1, 0.6),
            base_range: BaseRange::default(),
            joint_limit: std::f64::consts::FRAC_PI_2,
            link_cross_section: 0.15,
            link_density: 1000.0,
            module_dims: [0.07, 0.07, 0.115],
            patterns: Arc::new(PatternTable::builtin()),
        }
    }

    pub fn actuator_module(n_joint: usize) -> Self {
        let patterns = PatternTable::builtin();
        Self {
            kind: ConfigKind::ActuatorModule,
            module_dims: patterns.module_dims,
            base_range: BaseRange {
                x: Interval::new(-1.0, 0.0),
                y: Interval::new(-1.0, 1.0),
                z: Interval::new(-1.0, 0.0),
            },
            patterns: Arc::new(patterns),
            ..Self::general(n_joint)
        }
    }

    pub fn with_base_range(mut self, base_range: BaseRange) -> Self {
        self.base_range = base_range;
        self
    }

    pub fn with_n_joint(mut self, n_joint: usize) -> Self {
        self.n_joint = n_joint;
        self
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpace(m.to_string()));
        if self.n_joint == 0 {
            return bad("n_joint must be at least 1");
        }
        if !(self.joint_limit > 0.0 && self.joint_limit.is_finite()) {
            return bad("joint_limit must be positive");
        }
        if !self.base_range.axes().iter().all(Interval::is_valid) {
            return bad("base_range intervals must be finite with lo <= hi");
        }
        if !(self.link_density > 0.0 && self.link_density.is_finite()) {
            return bad("link_density must be positive");
        }
        match self.kind {
            ConfigKind::General => {
                if !self.link_length.is_valid() || self.link_length.lo <= 0.0 {
                    return bad("link_length must lie in (0, inf)");
                }
                if self.link_cross_section <= 0.0 {
                    return bad("link_cross_section must be positive");
                }
            }
            ConfigKind::ActuatorModule => {
                if self.patterns.is_empty() {
                    return bad("connection pattern table is empty");
                }
                if self.module_dims.iter().any(|d| *d <= 0.0) {
                    return bad("module_dims must be positive");
                }
            }
        }
        Ok(())
    }

    /// Side of the square link cross-section used for boxes of this kind.
    pub fn cross_section(&self) -> f64 {
        match self.kind {
            ConfigKind::General => self.link_cross_section,
            ConfigKind::ActuatorModule => self.module_dims[0].min(self.module_dims[1]),
        }
    }

    /// Flat parameter layout: `a_x, a_y, a_z`, then the per-joint genes.
    pub fn param_specs(&self) -> Vec<ParamSpec> {
        let mut specs: Vec<ParamSpec> = self
            .base_range
            .axes()
            .iter()
            .map(|i| ParamSpec::Continuous { lo: i.lo, hi: i.hi })
            .collect();
        for _ in 0..self.n_joint {
            match self.kind {
                ConfigKind::General => {
                    specs.push(ParamSpec::Categorical { n: ORIENTATION_COUNT });
                    specs.push(ParamSpec::Categorical { n: DIRECTION_COUNT });
                    specs.push(ParamSpec::Continuous {
                        lo: self.link_length.lo,
                        hi: self.link_length.hi,
                    });
                }
                ConfigKind::ActuatorModule => {
                    specs.push(ParamSpec::Categorical { n: self.patterns.len() })
                }
            }
        }
        specs
    }

    /// Column names matching [`SearchSpace::param_specs`].
    pub fn param_names(&self) -> Vec<String> {
        let mut names = vec!["a_x".to_string(), "a_y".into(), "a_z".into()];
        for j in 1..=self.n_joint {
            match self.kind {
                ConfigKind::General => {
                    names.push(format!("j{j}_orientation"));
                    names.push(format!("j{j}_direction"));
                    names.push(format!("j{j}_length"));
                }
                ConfigKind::ActuatorModule => names.push(format!("j{j}_connection")),
            }
        }
        names
    }
}

/// Genes of one joint and the link attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JointGene {
    General {
        orientation: usize,
        direction: usize,
        length: f64,
    },
    Module {
        connection: usize,
    },
}

/// One sampled design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genotype {
    pub base_offset: [f64; 3],
    pub joints: Vec<JointGene>,
}

impl Genotype {
    pub fn base(&self) -> Vector3<f64> {
        Vector3::from(self.base_offset)
    }

    /// Flattens into the layout of [`SearchSpace::param_specs`].
    pub fn to_params(&self) -> Vec<f64> {
        let mut out = self.base_offset.to_vec();
        for gene in &self.joints {
            match *gene {
                JointGene::General {
                    orientation,
                    direction,
                    length,
                } => out.extend([orientation as f64, direction as f64, length]),
                JointGene::Module { connection } => out.push(connection as f64),
            }
        }
        out
    }

    pub fn from_params(space: &SearchSpace, params: &[f64]) -> Result<Self> {
        let per_joint = match space.kind {
            ConfigKind::General => 3,
            ConfigKind::ActuatorModule => 1,
        };
        if params.len() != 3 + per_joint * space.n_joint {
            return Err(Error::MalformedGenotype(format!(
                "expected {} parameters, got {}",
                3 + per_joint * space.n_joint,
                params.len()
            )));
        }
        let index = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::MalformedGenotype(format!("{v} is not a category index")))
            }
        };
        let joints = params[3..]
            .chunks(per_joint)
            .map(|c| {
                Ok(match space.kind {
                    ConfigKind::General => JointGene::General {
                        orientation: index(c[0])?,
                        direction: index(c[1])?,
                        length: c[2],
                    },
                    ConfigKind::ActuatorModule => JointGene::Module {
                        connection: index(c[0])?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base_offset: [params[0], params[1], params[2]],
            joints,
        })
    }
}

/// Draws a genotype uniformly from the space.
pub fn sample_genotype<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Genotype {
    let base_offset = [
        space.base_range.x.sample(rng),
        space.base_range.y.sample(rng),
        space.base_range.z.sample(rng),
    ];
    let joints = (0..space.n_joint)
        .map(|_| match space.kind {
            ConfigKind::General => JointGene::General {
                orientation: rng.random_range(0..ORIENTATION_COUNT),
                direction: rng.random_range(0..DIRECTION_COUNT),
                length: space.link_length.sample(rng),
            },
            ConfigKind::ActuatorModule => JointGene::Module {
                connection: rng.random_range(0..space.patterns.len()),
            },
        })
        .collect();
    Genotype {
        base_offset,
        joints,
    }
}

/// Decodes a genotype into a serial chain.
///
/// Joint `i`'s frame is joint `i - 1`'s moving frame composed with the
/// translation `l_{i-1} d_{i-1}` and the rotation `R_i`; joint 1 sits at the
/// base offset `a` with rotation `R_1` relative to the world.
pub fn decode(space: &SearchSpace, genotype: &Genotype) -> Result<KinematicModel> {
    if genotype.joints.len() != space.n_joint {
        return Err(Error::MalformedGenotype(format!(
            "expected {} joint genes, got {}",
            space.n_joint,
            genotype.joints.len()
        )));
    }
    let width = space.cross_section();
    let mut joints = Vec::with_capacity(space.n_joint);
    let mut links = Vec::with_capacity(space.n_joint);
    let mut translation = genotype.base();
    for (i, gene) in genotype.joints.iter().enumerate() {
        let (rotation, direction, length) = match (space.kind, *gene) {
            (
                ConfigKind::General,
                JointGene::General {
                    orientation,
                    direction,
                    length,
                },
            ) => {
                let r = orientation::orientation(orientation).ok_or_else(|| {
                    Error::MalformedGenotype(format!(
                        "joint {}: orientation index {orientation} out of range",
                        i + 1
                    ))
                })?;
                let d = orientation::direction(direction).ok_or_else(|| {
                    Error::MalformedGenotype(format!(
                        "joint {}: direction index {direction} out of range",
                        i + 1
                    ))
                })?;
                (r, d, length)
            }
            (ConfigKind::ActuatorModule, JointGene::Module { connection }) => {
                let p = space.patterns.get(connection).ok_or_else(|| {
                    Error::MalformedGenotype(format!(
                        "joint {}: connection index {connection} out of range",
                        i + 1
                    ))
                })?;
                (p.rotation, p.direction, p.length)
            }
            _ => {
                return Err(Error::MalformedGenotype(format!(
                    "joint {}: gene kind does not match the search space",
                    i + 1
                )))
            }
        };
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::MalformedGenotype(format!(
                "joint {}: link length {length} must be positive",
                i + 1
            )));
        }
        joints.push(Joint {
            rotation,
            translation,
            axis: orientation::joint_axis(),
            lower: -space.joint_limit,
            upper: space.joint_limit,
        });
        links.push(Link::cuboid(direction, length, width, space.link_density));
        translation = direction * length;
    }
    Ok(KinematicModel::new(joints, links))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn general_defaults() {
        let s = SearchSpace::general(3);
        s.check().unwrap();
        assert_eq!(s.link_length, Interval::new(0.1, 0.6));
        assert_eq!(s.link_cross_section, 0.15);
        assert_eq!(s.link_density, 1000.0);
        assert_eq!(s.joint_limit, std::f64::consts::FRAC_PI_2);
        assert_eq!(SearchSpace::actuator_module(3).module_dims, [0.07, 0.07, 0.115]);
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(SearchSpace::general(0).check().is_err());
        let mut s = SearchSpace::general(2);
        s.link_length = Interval::new(0.0, 0.5);
        assert!(s.check().is_err());
        let mut s = SearchSpace::general(2);
        s.joint_limit = 0.0;
        assert!(s.check().is_err());
    }

    #[test]
    fn sample_respects_ranges() {
        let space = SearchSpace::general(3);
        let mut rng = seed::rng(3);
        for _ in 0..200 {
            let g = sample_genotype(&space, &mut rng);
            assert_eq!(g.joints.len(), 3);
            for gene in &g.joints {
                let JointGene::General { length, .. } = *gene else {
                    panic!("wrong kind")
                };
                assert!((0.1..=0.6).contains(&length));
            }
            assert!(space.base_range.contains(&g.base_offset));
        }
    }

    #[test]
    fn collapsed_interval_is_exact() {
        let mut range = BaseRange::default();
        range.z = Interval::new(0.25, 0.25);
        let space = SearchSpace::general(2).with_base_range(range);
        let mut rng = seed::rng(11);
        for _ in 0..50 {
            assert_eq!(sample_genotype(&space, &mut rng).base_offset[2], 0.25);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let space = SearchSpace::actuator_module(4);
        let a = sample_genotype(&space, &mut seed::rng(5));
        let b = sample_genotype(&space, &mut seed::rng(5));
        assert_eq!(a, b);
    }

    #[test]
    fn params_roundtrip() {
        for space in [SearchSpace::general(3), SearchSpace::actuator_module(2)] {
            let g = sample_genotype(&space, &mut seed::rng(1));
            let p = g.to_params();
            assert_eq!(p.len(), space.param_specs().len());
            assert_eq!(p.len(), space.param_names().len());
            assert_eq!(Genotype::from_params(&space, &p).unwrap(), g);
        }
    }

    #[test]
    fn single_link_mass() {
        let space = SearchSpace::general(1);
        let g = Genotype {
            base_offset: [0.0; 3],
            joints: vec![JointGene::General {
                orientation: orientation::IDENTITY_ORIENTATION,
                direction: 0,
                length: 0.4,
            }],
        };
        let model = decode(&space, &g).unwrap();
        assert!((model.links[0].mass - 9.0).abs() < 1e-12);
        assert_eq!(model.links[0].com, Vector3::new(0.2, 0.0, 0.0));
    }

    #[test]
    fn decode_rejects_bad_indices() {
        let space = SearchSpace::general(1);
        let g = Genotype {
            base_offset: [0.0; 3],
            joints: vec![JointGene::General {
                orientation: 12,
                direction: 0,
                length: 0.4,
            }],
        };
        assert!(matches!(decode(&space, &g), Err(Error::MalformedGenotype(_))));
        let module = SearchSpace::actuator_module(1);
        let g = Genotype {
            base_offset: [0.0; 3],
            joints: vec![JointGene::Module { connection: 26 }],
        };
        assert!(matches!(decode(&module, &g), Err(Error::MalformedGenotype(_))));
    }

    #[test]
    fn module_rows_bit_exact() {
        let space = SearchSpace::actuator_module(2);
        for c in 0..PATTERN_COUNT {
            let g = Genotype {
                base_offset: [0.0; 3],
                joints: vec![JointGene::Module { connection: c }; 2],
            };
            let model = decode(&space, &g).unwrap();
            let row = &space.patterns.patterns[c];
            assert_eq!(model.joints[1].rotation, row.rotation);
            assert_eq!(model.joints[1].translation, row.direction * row.length);
            assert_eq!(model.links[0].direction, row.direction);
            assert_eq!(model.links[0].length.to_bits(), row.length.to_bits());
        }
    }
}
