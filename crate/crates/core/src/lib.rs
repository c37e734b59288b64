//! Zeno and anti-Zeno transition probabilities for a driven quantum system
//! under repeated finite-duration, finite-strength measurements.

pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod system;
pub mod twolevel;

pub use detector::{DetectorModel, PointerKind, TabulatedF};
pub use error::{Result, ZenoError};
pub use perturbation::{JumpResult, SurvivalAfterN};
pub use quadrature::QuadOptions;
pub use system::{Drive, DriveConvention, LevelSystem, Scenario, Schedule, StateId, Transition};
pub use twolevel::{ResultApprox, TwoLevelParams};
