//! `simulate`: one run to a directory of CSV and JSON files.

use std::path::Path;

use rotorsim::signals::{spectrum, stage_difference_spectrum, stft_seconds, Spectrogram};
use rotorsim::solver::{simulate, SimulationOutput};
use rotorsim::Scenario;
use serde::Serialize;

use crate::error::CliResult;
use crate::io::{create_dir, load_scenario, write_columns, write_json};

pub const SPECTRUM_NOTE: &str =
    "amplitude = 2|X_k|/N for 0 < k < N/2 and |X_k|/N at DC and Nyquist; phase = arg X_k (rad)";

/// Scalar results written to `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub dt: f64,
    pub rayleigh_a0: f64,
    pub rayleigh_a1: f64,
    /// Frequencies of the two modes the damping is anchored at (Hz).
    pub anchor_frequencies_hz: (f64, f64),
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Largest hub radial displacement of each stage over the run.
    pub radial_max: Vec<f64>,
    /// Largest hub radial displacement of each stage over the final
    /// revolution at full speed.
    pub radial_last_revolution_max: Vec<f64>,
}

pub fn run_simulate(config: &Path, out: &Path) -> CliResult<RunSummary> {
    let scenario = load_scenario(config)?.resolve()?;
    let output = simulate(&scenario)?;
    write_run(&scenario, &output, out)
}

/// Writes every product of a finished run into `out`.
pub fn write_run(scenario: &Scenario, output: &SimulationOutput, out: &Path) -> CliResult<RunSummary> {
    create_dir(out)?;
    write_json(&out.join("run.json"), scenario)?;

    let series = &output.series;
    let times = series.times();
    let mut header = vec!["time".to_owned()];
    header.extend(series.channels.iter().map(|c| c.name.clone()));
    let mut columns: Vec<&[f64]> = vec![&times];
    columns.extend(series.channels.iter().map(|c| c.values.as_slice()));
    write_columns(&out.join("timeseries.csv"), &[], &header, &columns)?;

    let stage_names: Vec<String> = (1..=output.radial.len()).map(|s| format!("stage{s}")).collect();
    let mut header = vec!["time".to_owned()];
    header.extend(stage_names.iter().cloned());
    let mut columns: Vec<&[f64]> = vec![&times];
    columns.extend(output.radial.iter().map(Vec::as_slice));
    write_columns(&out.join("radial.csv"), &[], &header, &columns)?;

    let dt = series.dt;
    if scenario.outputs.spectrum {
        let spectra = output
            .radial
            .iter()
            .map(|r| spectrum(r, dt))
            .collect::<rotorsim::Result<Vec<_>>>()?;
        let mut header = vec!["frequency_hz".to_owned()];
        let mut columns: Vec<&[f64]> = vec![&spectra[0].frequencies];
        for (name, s) in stage_names.iter().zip(&spectra) {
            header.push(format!("{name}_amplitude"));
            header.push(format!("{name}_phase"));
            columns.push(&s.amplitude);
            columns.push(&s.phase);
        }
        let difference = match output.radial.as_slice() {
            [a, b] => Some(stage_difference_spectrum(a, b, dt)?),
            _ => None,
        };
        if let Some(d) = &difference {
            header.push("difference_amplitude".to_owned());
            header.push("difference_phase".to_owned());
            columns.push(&d.amplitude);
            columns.push(&d.phase);
        }
        write_columns(&out.join("spectrum.csv"), &[SPECTRUM_NOTE], &header, &columns)?;
    }
    if let Some(stft) = scenario.outputs.stft {
        for (name, r) in stage_names.iter().zip(&output.radial) {
            let grid = stft_seconds(r, dt, stft.window, stft.overlap)?;
            write_spectrogram(&out.join(format!("stft_{name}.csv")), &grid)?;
        }
    }

    let revolution = scenario.rpm.omega_target.recip() * std::f64::consts::TAU;
    let last = if revolution.is_finite() {
        ((revolution / dt).ceil() as usize).clamp(1, times.len())
    } else {
        times.len()
    };
    let max = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(*x));
    let summary = RunSummary {
        steps: times.len() - 1,
        dt,
        rayleigh_a0: output.rayleigh.0,
        rayleigh_a1: output.rayleigh.1,
        anchor_frequencies_hz: output.anchor_frequencies,
        initial_mass: output.initial_mass,
        final_mass: output.final_mass,
        radial_max: output.radial.iter().map(|r| max(r)).collect(),
        radial_last_revolution_max: output.radial.iter().map(|r| max(&r[r.len() - last..])).collect(),
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// One row per window: centre time, then one column per frequency bin.
pub fn write_spectrogram(path: &Path, grid: &Spectrogram) -> CliResult<()> {
    let mut header = vec!["time".to_owned()];
    header.extend(grid.frequencies.iter().map(|f| f.to_string()));
    let mut transposed: Vec<Vec<f64>> = vec![grid.times.clone()];
    for bin in 0..grid.frequencies.len() {
        transposed.push(grid.grid.iter().map(|row| row[bin]).collect());
    }
    let columns: Vec<&[f64]> = transposed.iter().map(Vec::as_slice).collect();
    let note = format!(
        "periodic Hann window of {} samples, hop {}; amplitude = 2|X_k|/sum(w) for 0 < k < N/2 and |X_k|/sum(w) at DC and Nyquist; rows are window centres (s), columns frequencies (Hz)",
        grid.window_length, grid.hop
    );
    write_columns(path, &[&note], &header, &columns)
}
