//! `modal`: natural frequencies of the blade, the bare shaft or the assembly.

use std::path::Path;

use clap::ValueEnum;
use rotorsim::assembly::{blade_cantilever, shaft_alone, BoundaryCondition, SystemMatrices};
use rotorsim::solver::{build_model, modal_analysis};
use rotorsim::{Error, Scenario};
use serde::Serialize;

use crate::error::CliResult;
use crate::io::{load_scenario, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModalCase {
    /// One blade cantilevered at its root, with its crack if any.
    Blade,
    /// The shaft segments without disks or blades.
    Shaft,
    /// The full rotor at rest.
    Assembly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalReport {
    pub case: ModalCase,
    pub frequencies_hz: Vec<f64>,
    pub boundary_conditions: String,
}

/// Which blade the `blade` case uses; both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BladeSelection {
    pub stage: usize,
    pub blade: usize,
}

pub fn run_modal(config: &Path, case: ModalCase, count: usize, blade: BladeSelection, out: &Path) -> CliResult<ModalReport> {
    let scenario = load_scenario(config)?.resolve()?;
    let report = modal_report(&scenario, case, count, blade)?;
    write_json(out, &report)?;
    Ok(report)
}

pub fn modal_report(scenario: &Scenario, case: ModalCase, count: usize, selection: BladeSelection) -> rotorsim::Result<ModalReport> {
    if count == 0 {
        return Err(Error::validation("count", "must be positive (got 0)"));
    }
    let root = match scenario.model.boundary {
        BoundaryCondition::Clamped => "shaft root clamped (all six DOFs)",
        BoundaryCondition::Pinned => "shaft root pinned (translations and spin rotation fixed)",
    };
    let (system, boundary_conditions): (SystemMatrices, String) = match case {
        ModalCase::Blade => {
            let stage = selection
                .stage
                .checked_sub(1)
                .and_then(|s| scenario.stages.get(s))
                .ok_or_else(|| Error::validation("stage", format!("no stage {}", selection.stage)))?;
            if selection.blade == 0 || selection.blade > stage.blades.count {
                return Err(Error::validation("blade", format!("no blade {} on stage {}", selection.blade, selection.stage)));
            }
            let crack = scenario
                .cracks
                .iter()
                .find(|c| c.stage == selection.stage && c.blade == selection.blade);
            let system = blade_cantilever(&stage.blades, &scenario.material, crack, scenario.model.crack_length_scale)?;
            let label = match crack {
                Some(c) => format!(
                    "blade {} of stage {} clamped at the root, tip free; crack {} m deep at {} m",
                    selection.blade, selection.stage, c.depth, c.location
                ),
                None => format!("blade {} of stage {} clamped at the root, tip free; uncracked", selection.blade, selection.stage),
            };
            (system, label)
        }
        ModalCase::Shaft => (
            shaft_alone(&scenario.stages, &scenario.material, scenario.model.boundary)?,
            format!("{root}; shaft tip free; no disks or blades"),
        ),
        ModalCase::Assembly => (
            build_model(scenario)?.assemble(0.0),
            format!("{root}; shaft tip free; blades clamped to their hubs; at rest"),
        ),
    };
    let modal = modal_analysis(&system, count)?;
    Ok(ModalReport {
        case,
        frequencies_hz: modal.frequencies_hz,
        boundary_conditions,
    })
}
