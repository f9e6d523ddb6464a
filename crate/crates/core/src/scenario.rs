//! Declarative description of one simulation run.

use serde::{Deserialize, Serialize};

use crate::assembly::{ModelOptions, RpmProfile, StageConfig};
use crate::error::{require_non_negative, Error, Result};
use crate::loads::AeroEnvironment;
use crate::sections::{CrackSpec, MaterialProperties};
use crate::solver::{FboEvent, FodEvent, SolverSettings};

pub const MAX_STAGES: usize = 2;

/// Rayleigh damping ratio and the two 1-based modes it is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DampingSettings {
    pub zeta: f64,
    pub mode_pair: (usize, usize),
}

impl Default for DampingSettings {
    fn default() -> Self {
        DampingSettings {
            zeta: 0.02,
            mode_pair: (1, 5),
        }
    }
}

/// Short-time spectrum window (s) and fractional overlap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StftSettings {
    pub window: f64,
    pub overlap: f64,
}

impl Default for StftSettings {
    fn default() -> Self {
        StftSettings {
            window: 0.1,
            overlap: 0.5,
        }
    }
}

/// Recorded channels and derived products.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    /// Channel labels such as `stage1.uy`, `shaft_tip.uz` or
    /// `stage2.blade3.tip.ux`; empty selects the hub translations of every
    /// stage.
    pub channels: Vec<String>,
    /// Write the spectrum of each stage's radial displacement.
    pub spectrum: bool,
    /// Write the short-time spectrum of each stage's radial displacement.
    pub stft: Option<StftSettings>,
}

/// Where a recorded DOF lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Hub(usize),
    ShaftTip,
    BladeTip { stage: usize, blade: usize },
}

pub const DOF_NAMES: [&str; 6] = ["ux", "uy", "uz", "rx", "ry", "rz"];

/// A parsed channel label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelSpec {
    pub probe: Probe,
    pub dof: usize,
}

impl ChannelSpec {
    pub fn parse(label: &str) -> Result<Self> {
        let bad = || {
            Error::validation(
                "outputs.channels",
                format!("unrecognised channel `{label}` (expected e.g. stage1.uy, shaft_tip.uz, stage1.blade2.tip.ux)"),
            )
        };
        let parts: Vec<&str> = label.split('.').collect();
        let dof = DOF_NAMES
            .iter()
            .position(|d| Some(d) == parts.last())
            .ok_or_else(bad)?;
        let index = |s: &str, prefix: &str| -> Option<usize> {
            s.strip_prefix(prefix)?.parse().ok().filter(|&i| i >= 1)
        };
        let probe = match parts.as_slice() {
            ["shaft_tip", _] => Probe::ShaftTip,
            [s, _] => Probe::Hub(index(s, "stage").ok_or_else(bad)?),
            [s, b, "tip", _] => Probe::BladeTip {
                stage: index(s, "stage").ok_or_else(bad)?,
                blade: index(b, "blade").ok_or_else(bad)?,
            },
            _ => return Err(bad()),
        };
        Ok(ChannelSpec { probe, dof })
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub stages: Vec<StageConfig>,
    pub material: MaterialProperties,
    pub aero: AeroEnvironment,
    pub rpm: RpmProfile,
    #[serde(default)]
    pub cracks: Vec<CrackSpec>,
    #[serde(default)]
    pub fbo: Vec<FboEvent>,
    #[serde(default)]
    pub fod: Vec<FodEvent>,
    pub solver: SolverSettings,
    #[serde(default)]
    pub damping: DampingSettings,
    #[serde(default)]
    pub model: ModelOptions,
    #[serde(default)]
    pub outputs: OutputSettings,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("config", e.to_string()))
    }

    /// Checks every invariant that does not need the assembled model.
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() || self.stages.len() > MAX_STAGES {
            return Err(Error::validation(
                "stages",
                format!("between 1 and {MAX_STAGES} stages are supported (got {})", self.stages.len()),
            ));
        }
        for (k, stage) in self.stages.iter().enumerate() {
            stage.validate(&format!("stages[{k}]"))?;
        }
        self.material.validate("material")?;
        self.aero.validate("aero")?;
        self.rpm.validate("rpm")?;
        self.solver.validate("solver")?;
        require_non_negative("damping.zeta", self.damping.zeta)?;
        let (i, j) = self.damping.mode_pair;
        if i == 0 || j == 0 || i == j {
            return Err(Error::validation(
                "damping.mode_pair",
                format!("({i}, {j}) must be two distinct 1-based modes"),
            ));
        }
        let blade = |field: &str, stage: usize, blade: usize| -> Result<&StageConfig> {
            let s = stage
                .checked_sub(1)
                .and_then(|k| self.stages.get(k))
                .ok_or_else(|| Error::validation(format!("{field}.stage"), format!("no stage {stage}")))?;
            if blade == 0 || blade > s.blades.count {
                return Err(Error::validation(
                    format!("{field}.blade"),
                    format!("stage {stage} has no blade {blade}"),
                ));
            }
            Ok(s)
        };
        for (c, crack) in self.cracks.iter().enumerate() {
            let field = format!("cracks[{c}]");
            let s = blade(&field, crack.stage, crack.blade)?;
            crack.validate(&field, &s.blades)?;
        }
        let in_run = |field: String, t: f64| -> Result<()> {
            if !(t >= 0.0 && t <= self.solver.duration) {
                return Err(Error::validation(
                    field,
                    format!("event time {t} lies outside the run [0, {}]", self.solver.duration),
                ));
            }
            Ok(())
        };
        for (e, ev) in self.fbo.iter().enumerate() {
            let field = format!("fbo[{e}]");
            let s = blade(&field, ev.stage, ev.blade)?;
            in_run(format!("{field}.time"), ev.time)?;
            if !(ev.break_location > 0.0 && ev.break_location < s.blades.length) {
                return Err(Error::validation(
                    format!("{field}.break_location"),
                    format!("must lie strictly inside the blade span (0, {})", s.blades.length),
                ));
            }
            if self.fbo[..e].iter().any(|o| o.stage == ev.stage && o.blade == ev.blade) {
                return Err(Error::validation(format!("{field}.blade"), "at most one blade-off event per blade"));
            }
        }
        for (e, ev) in self.fod.iter().enumerate() {
            let field = format!("fod[{e}]");
            blade(&field, ev.stage, ev.blade)?;
            ev.validate(&field)?;
            in_run(format!("{field}.time"), ev.time)?;
        }
        for label in &self.outputs.channels {
            let spec = ChannelSpec::parse(label)?;
            match spec.probe {
                Probe::Hub(s) if s > self.stages.len() => {
                    return Err(Error::validation("outputs.channels", format!("`{label}`: no stage {s}")))
                }
                Probe::BladeTip { stage, blade: b } => {
                    blade("outputs.channels", stage, b)?;
                }
                _ => {}
            }
        }
        if let Some(stft) = self.outputs.stft {
            crate::error::require_positive("outputs.stft.window", stft.window)?;
            if !(0.0..1.0).contains(&stft.overlap) {
                return Err(Error::validation("outputs.stft.overlap", "must lie in [0, 1)"));
            }
        }
        Ok(())
    }

    /// Validated copy with every default made explicit.
    pub fn resolve(&self) -> Result<Scenario> {
        self.validate()?;
        let mut out = self.clone();
        if out.aero.chord.is_none() {
            out.aero.chord = Some(self.stages[0].blades.width);
        }
        if out.outputs.channels.is_empty() {
            out.outputs.channels = default_channels(self.stages.len());
        }
        Ok(out)
    }
}

/// Hub translations of every stage.
pub fn default_channels(stages: usize) -> Vec<String> {
    (1..=stages)
        .flat_map(|s| ["ux", "uy", "uz"].map(|d| format!("stage{s}.{d}")))
        .collect()
}
