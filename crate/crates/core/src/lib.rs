//! Synthesis of serial modular-robot designs.
//!
//! The crate is organised bottom-up:
//!
//! - [`design_space`]: parameter grammars, genotype sampling, overlap validation,
//!   decoding into a [`KinematicModel`] and URDF import/export.
//! - [`kinematics`]: forward kinematics, geometric Jacobians, gravity-static joint
//!   torques and damped-least-squares inverse kinematics.
//! - [`evaluation`]: target sets and the two objectives (summed position error and
//!   summed torque norm).
//! - [`optimizer`]: Pareto utilities and a multi-objective Tree-structured Parzen
//!   Estimator with an ask/tell interface.

pub mod design_space;
pub mod evaluation;
pub mod kinematics;
pub mod optimizer;
pub mod seed;

pub use design_space::{
    ConfigKind, Genotype, JointGene, KinematicModel, SearchSpace, ValidationReport,
};
pub use evaluation::{ObjectiveVector, TargetSet};
pub use kinematics::{IkOptions, IkResult, Pose};

/// Errors raised when a caller breaks an operation's contract.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed genotype: {0}")]
    MalformedGenotype(String),

    #[error("joint state has {got} angles, model has {expected} joints")]
    JointCountMismatch { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
