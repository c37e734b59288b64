//! Scenario files (TOML).
//!
//! ```toml
//! [system]
//! levels = [{ n = 0, energy = -0.5 }, { n = 1, energy = 0.5 }]
//! initial = { n = 0, alpha = 0 }
//!
//! [drive]
//! omega_L = 1.0
//! convention = "rwa"
//! elements = [{ f = 1, i = 0, re = 0.02, im = 0.0 }]
//!
//! [detector]
//! kind = "gaussian"
//! sigma = 1.0
//! lambda = 1000.0
//!
//! [schedule]
//! tau = 0.01
//! T = 1.0
//! N = 1
//! t0 = 0.0
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detector::{DetectorModel, TabulatedF};
use crate::error::{Result, ZenoError};
use crate::system::{Drive, DriveConvention, LevelSystem, Scenario, Schedule, StateId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub n: u32,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxEntry {
    pub n: u32,
    pub alpha: u32,
    pub e1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub n: u32,
    #[serde(default)]
    pub alpha: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub levels: Vec<LevelEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aux: Vec<AuxEntry>,
    /// Monitored state; the lowest basis state when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<StateEntry>,
}

/// Matrix element V_{fα₁,iα} = re + i·im. The Hermitian partner is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementEntry {
    pub f: u32,
    #[serde(default)]
    pub alpha1: u32,
    pub i: u32,
    #[serde(default)]
    pub alpha: u32,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(rename = "omega_L")]
    pub omega_l: f64,
    #[serde(default)]
    pub convention: DriveConvention,
    pub elements: Vec<ElementEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub kind: DetectorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Two-column file `x re [im]`, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub tau: f64,
    #[serde(rename = "T")]
    pub period: f64,
    #[serde(rename = "N", default = "one")]
    pub repetitions: u32,
    #[serde(default)]
    pub t0: f64,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemSection,
    pub drive: DriveSection,
    pub detector: DetectorSection,
    pub schedule: ScheduleSection,
}

/// A validated scenario with its monitored state.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub initial: StateId,
}

fn tag(field: &str) -> impl Fn(ZenoError) -> ZenoError + '_ {
    move |e| match e {
        ZenoError::Config { .. } => e,
        other => ZenoError::config(field, other.to_string()),
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .and_then(|s| text.get(..s.start))
                .map(|head| head.lines().count().to_string())
                .map_or_else(|| "config".to_string(), |line| format!("config (line {line})"));
            ZenoError::config(field, e.message().to_string())
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ZenoError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::parse(&text)?, base))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Validates every section; `base` anchors a relative table path.
    pub fn resolve(&self, base: &Path) -> Result<Resolved> {
        let levels: Vec<(u32, f64)> = self.system.levels.iter().map(|l| (l.n, l.energy)).collect();
        let aux: Vec<(u32, u32, f64)> = self
            .system
            .aux
            .iter()
            .map(|a| (a.n, a.alpha, a.e1))
            .collect();
        let system = LevelSystem::new(&levels, &aux).map_err(tag("system"))?;

        let initial = match &self.system.initial {
            Some(s) => {
                let id = StateId::new(s.n, s.alpha);
                if !system.contains(id) {
                    return Err(ZenoError::config(
                        "system.initial",
                        format!("{id} is not a basis state"),
                    ));
                }
                id
            }
            None => system.states()[0],
        };

        let entries: Vec<(StateId, StateId, Complex64)> = self
            .drive
            .elements
            .iter()
            .map(|e| {
                (
                    StateId::new(e.f, e.alpha1),
                    StateId::new(e.i, e.alpha),
                    Complex64::new(e.re, e.im),
                )
            })
            .collect();
        let drive = Drive::new(&entries, self.drive.omega_l, self.drive.convention)
            .map_err(tag("drive"))?;

        let det = &self.detector;
        let detector = match det.kind {
            DetectorKind::Gaussian => {
                let sigma = det.sigma.ok_or_else(|| {
                    ZenoError::config("detector.sigma", "required for a gaussian pointer")
                })?;
                DetectorModel::gaussian(sigma, det.lambda).map_err(tag("detector"))?
            }
            DetectorKind::Tabulated => {
                let rel = det.table.as_ref().ok_or_else(|| {
                    ZenoError::config("detector.table", "required for a tabulated pointer")
                })?;
                let table = TabulatedF::load(base.join(rel)).map_err(tag("detector.table"))?;
                DetectorModel::tabulated(table, det.lambda).map_err(tag("detector"))?
            }
        };

        let s = &self.schedule;
        let schedule =
            Schedule::new(s.tau, s.period, s.repetitions, s.t0).map_err(tag("schedule"))?;

        let scenario = Scenario::new(system, drive, detector, schedule).map_err(tag("drive"))?;
        Ok(Resolved { scenario, initial })
    }
}
