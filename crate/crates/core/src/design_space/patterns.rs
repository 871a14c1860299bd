//! Connection-pattern table of the actuator-module configuration.

use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use crate::{Error, Result};

/// Number of connection patterns in the shipped table.
pub const PATTERN_COUNT: usize = 26;

const DEFAULT_TABLE: &str = include_str!("../../fixtures/connection_patterns.toml");

/// One way of attaching the next actuator module.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionPattern {
    pub attachment: u8,
    pub note: String,
    pub rotation: Matrix3<f64>,
    pub direction: Vector3<f64>,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternTable {
    pub version: u32,
    pub module_dims: [f64; 3],
    pub patterns: Vec<ConnectionPattern>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    version: u32,
    module_dims: [f64; 3],
    pattern: Vec<RawPattern>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPattern {
    index: usize,
    attachment: u8,
    note: String,
    rotation: [f64; 9],
    direction: [f64; 3],
    length: f64,
}

impl PatternTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_TABLE).expect("shipped pattern table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |message: String| Error::Parse {
            context: "connection pattern table".into(),
            message,
        };
        let raw: RawTable = toml::from_str(text).map_err(|e| err(e.to_string()))?;
        if raw.pattern.is_empty() {
            return Err(err("table has no patterns".into()));
        }
        let mut patterns = Vec::with_capacity(raw.pattern.len());
        for (position, row) in raw.pattern.into_iter().enumerate() {
            if row.index != position {
                return Err(err(format!(
                    "pattern at position {position} declares index {}",
                    row.index
                )));
            }
            let rotation = Matrix3::from_row_slice(&row.rotation);
            let orthonormal = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
            if orthonormal > 1e-9 || (rotation.determinant() - 1.0).abs() > 1e-9 {
                return Err(err(format!("pattern {position}: rotation is not proper")));
            }
            let direction = Vector3::from(row.direction);
            let nonzero = direction.iter().filter(|c| **c != 0.0).count();
            if nonzero != 1 || (direction.norm() - 1.0).abs() > 1e-12 {
                return Err(err(format!(
                    "pattern {position}: direction must be a signed unit axis"
                )));
            }
            if !(row.length > 0.0 && row.length.is_finite()) {
                return Err(err(format!("pattern {position}: length must be positive")));
            }
            patterns.push(ConnectionPattern {
                attachment: row.attachment,
                note: row.note,
                rotation,
                direction,
                length: row.length,
            });
        }
        Ok(Self {
            version: raw.version,
            module_dims: raw.module_dims,
            patterns,
        })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&ConnectionPattern> {
        self.patterns.get(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_eight_plus_six_times_three_rows() {
        let table = PatternTable::builtin();
        assert_eq!(table.len(), PATTERN_COUNT);
        let first = table.patterns.iter().filter(|p| p.attachment == 1).count();
        let second = table.patterns.iter().filter(|p| p.attachment == 2).count();
        assert_eq!((first, second), (8, 18));
        assert_eq!(table.module_dims, [0.07, 0.07, 0.115]);
    }

    #[test]
    fn rejects_improper_rotation() {
        let text = r#"
version = 1
module_dims = [0.07, 0.07, 0.115]
[[pattern]]
index = 0
attachment = 1
note = "mirror"
rotation = [-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
direction = [1.0, 0.0, 0.0]
length = 0.1
"#;
        assert!(PatternTable::parse(text).is_err());
    }
}
