//! `spectrum`: spectrum or short-time spectrum of one column of a CSV file.

use std::path::Path;

use rotorsim::scenario::StftSettings;
use rotorsim::signals::{spectrum, stft_seconds};

use crate::error::{CliError, CliResult};
use crate::io::{read_columns, write_columns};
use crate::simulate::{write_spectrogram, SPECTRUM_NOTE};

/// Relative spread of the sample intervals accepted as uniform sampling.
const UNIFORM_TOLERANCE: f64 = 1e-6;

pub fn run_spectrum(input: &Path, channel: &str, stft: Option<StftSettings>, out: &Path) -> CliResult<()> {
    let (header, columns) = read_columns(input)?;
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .map(|i| columns[i].as_slice())
            .ok_or_else(|| CliError::input(input, format!("no column `{name}` (have {})", header.join(", "))))
    };
    let times = column("time")?;
    let values = column(channel)?;
    let dt = sample_interval(times).map_err(|m| CliError::input(input, m))?;
    match stft {
        Some(s) => write_spectrogram(out, &stft_seconds(values, dt, s.window, s.overlap)?),
        None => {
            let s = spectrum(values, dt)?;
            let header = ["frequency_hz", "amplitude", "phase"].map(str::to_owned);
            write_columns(out, &[SPECTRUM_NOTE], &header, &[&s.frequencies, &s.amplitude, &s.phase])
        }
    }
}

/// Interval of a uniformly sampled, increasing time column.
pub fn sample_interval(times: &[f64]) -> Result<f64, String> {
    if times.len() < 2 {
        return Err(format!("need at least two samples (got {})", times.len()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err("time column must increase".to_owned());
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > UNIFORM_TOLERANCE * dt {
            return Err(format!("time column is not uniformly sampled near row {}", i + 2));
        }
    }
    Ok(dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_of_uniform_samples() {
        let t: Vec<f64> = (0..1001).map(|i| i as f64 * 1e-4).collect();
        assert!((sample_interval(&t).unwrap() - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn rejects_irregular_or_short_columns() {
        assert!(sample_interval(&[0.0]).is_err());
        assert!(sample_interval(&[0.0, 0.0, 0.0]).is_err());
        assert!(sample_interval(&[0.0, 0.1, 0.3, 0.4]).is_err());
    }
}
