use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BaseRange, ConfigKind, Interval, PatternTable, SearchSpace};
use crate::{Error, Result};

/// Search-space file (TOML). Omitted fields take the defaults of the kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: ConfigKind,
    /// Joint count; a campaign's sweep list overrides it.
    #[serde(default)]
    pub n_joint: Option<usize>,
    #[serde(default)]
    pub joint_limit_deg: Option<f64>,
    #[serde(default)]
    pub link_length: Option<Interval>,
    #[serde(default)]
    pub link_cross_section: Option<f64>,
    #[serde(default)]
    pub link_density: Option<f64>,
    /// Connection-pattern table, relative to the config file (module kind).
    #[serde(default)]
    pub pattern_table: Option<String>,
    /// Per-axis base-range overrides; otherwise the target set's ranges apply.
    #[serde(default)]
    pub base_range: Option<BaseRangeOverride>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseRangeOverride {
    pub x: Option<Interval>,
    pub y: Option<Interval>,
    pub z: Option<Interval>,
}

impl SpaceConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            context: "search space".into(),
            message: e.to_string(),
        })
    }

    /// Builds the search space. `base_dir` resolves `pattern_table`;
    /// `target_base` supplies the base range for axes not overridden here.
    pub fn build(&self, base_dir: &Path, target_base: BaseRange) -> Result<SearchSpace> {
        let n_joint = self.n_joint.unwrap_or(1);
        let mut space = match self.kind {
            ConfigKind::General => SearchSpace::general(n_joint),
            ConfigKind::ActuatorModule => SearchSpace::actuator_module(n_joint),
        };
        if let Some(deg) = self.joint_limit_deg {
            space.joint_limit = deg.to_radians();
        }
        if let Some(l) = self.link_length {
            space.link_length = l;
        }
        if let Some(w) = self.link_cross_section {
            space.link_cross_section = w;
        }
        if let Some(rho) = self.link_density {
            space.link_density = rho;
        }
        if let Some(path) = &self.pattern_table {
            let full = base_dir.join(path);
            let text = std::fs::read_to_string(&full).map_err(|e| Error::Parse {
                context: format!("pattern_table {}", full.display()),
                message: e.to_string(),
            })?;
            let table = PatternTable::parse(&text)?;
            space.module_dims = table.module_dims;
            space.patterns = Arc::new(table);
        }
        let mut base = target_base;
        if let Some(o) = &self.base_range {
            base.x = o.x.unwrap_or(base.x);
            base.y = o.y.unwrap_or(base.y);
            base.z = o.z.unwrap_or(base.z);
        }
        space.base_range = base;
        space.check()?;
        Ok(space)
    }
}
