//! Post-processing of displacement histories: radial displacement, whirl
//! components, spectra, short-time spectra and the two-stage difference
//! spectrum.
//!
//! Spectra are single-sided and calibrated so a bin-centred sinusoid of
//! amplitude `a` reads `a`:
//!
//! ```text
//! A_0 = |X_0| / N,   A_k = 2 |X_k| / N,   A_{N/2} = |X_{N/2}| / N  (even N)
//! ```
//!
//! Phases are `arg X_k`, so `cos(2π f t + φ)` reads `φ`. Short-time spectra
//! use a periodic Hann window and divide by its coherent gain `Σ w` instead
//! of `N`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};

/// One named sample sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    pub name: String,
    pub values: Vec<f64>,
}

/// Uniformly sampled histories of equal length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub dt: f64,
    pub start: f64,
    pub channels: Vec<Channel>,
}

impl TimeSeries {
    pub fn new(dt: f64, start: f64) -> Result<Self> {
        require_positive("dt", dt)?;
        Ok(TimeSeries {
            dt,
            start,
            channels: Vec::new(),
        })
    }

    /// Samples per channel (zero when there are no channels).
    pub fn len(&self) -> usize {
        self.channels.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push_channel(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if !self.channels.is_empty() && values.len() != self.len() {
            return Err(Error::validation(
                format!("channels.{name}"),
                format!("has {} samples, expected {}", values.len(), self.len()),
            ));
        }
        if self.channel(&name).is_some() {
            return Err(Error::validation(format!("channels.{name}"), "duplicate channel"));
        }
        self.channels.push(Channel { name, values });
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.start + i as f64 * self.dt).collect()
    }

    /// Samples with `time >= t`, as an index.
    pub fn index_at(&self, t: f64) -> usize {
        (((t - self.start) / self.dt).ceil().max(0.0) as usize).min(self.len())
    }
}

/// Single-sided amplitude and phase spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Hz, from 0 to the Nyquist frequency.
    pub frequencies: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// rad, in (−π, π].
    pub phase: Vec<f64>,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Bin nearest to `freq`.
    pub fn bin(&self, freq: f64) -> usize {
        let df = self.resolution();
        if df == 0.0 {
            return 0;
        }
        ((freq / df).round().max(0.0) as usize).min(self.frequencies.len() - 1)
    }

    /// Largest non-DC bin as `(frequency, amplitude)`.
    pub fn peak(&self) -> (f64, f64) {
        peak_bin(&self.frequencies, &self.amplitude)
    }
}

fn peak_bin(freqs: &[f64], amps: &[f64]) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    for (f, a) in freqs.iter().zip(amps).skip(1) {
        if *a > best.1 {
            best = (*f, *a);
        }
    }
    best
}

/// Time-frequency amplitude grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrogram {
    /// Samples per window.
    pub window_length: usize,
    /// Samples between window starts.
    pub hop: usize,
    pub window: Vec<f64>,
    /// Window-centre times relative to the first sample (s).
    pub times: Vec<f64>,
    pub frequencies: Vec<f64>,
    /// `grid[slice][bin]`.
    pub grid: Vec<Vec<f64>>,
}

impl Spectrogram {
    /// Frequency of the largest non-DC bin of each slice.
    pub fn peak_frequencies(&self) -> Vec<f64> {
        self.grid.iter().map(|row| peak_bin(&self.frequencies, row).0).collect()
    }
}

/// `√(u_y² + u_z²)` sample by sample.
pub fn radial(u_y: &[f64], u_z: &[f64]) -> Result<Vec<f64>> {
    if u_y.len() != u_z.len() {
        return Err(Error::validation(
            "radial",
            format!("channel lengths differ ({} vs {})", u_y.len(), u_z.len()),
        ));
    }
    Ok(u_y.iter().zip(u_z).map(|(y, z)| y.hypot(*z)).collect())
}

/// Radii of the forward and backward circular whirl components at
/// `frequency` in the orbit `u_y + i u_z`, whose first sample is at time
/// `start`.
///
/// An orbit `a e^{iωt} + b e^{-iωt}` gives `(|a|, |b|)` exactly when the
/// samples span whole periods; other frequencies leak in at `O(1/(N Δf))`.
pub fn whirl_amplitudes(u_y: &[f64], u_z: &[f64], dt: f64, start: f64, frequency: f64) -> Result<(f64, f64)> {
    require_positive("dt", dt)?;
    if u_y.len() != u_z.len() || u_y.is_empty() {
        return Err(Error::validation(
            "whirl",
            format!("need two equal non-empty channels (got {} and {})", u_y.len(), u_z.len()),
        ));
    }
    let w = 2.0 * PI * frequency;
    let (mut forward, mut backward) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
    for (i, (y, z)) in u_y.iter().zip(u_z).enumerate() {
        let orbit = Complex::new(*y, *z);
        let turn = Complex::from_polar(1.0, w * (start + i as f64 * dt));
        forward += orbit * turn.conj();
        backward += orbit * turn;
    }
    let n = u_y.len() as f64;
    Ok((forward.norm() / n, backward.norm() / n))
}

fn dft(samples: &[f64]) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

fn single_sided(bins: &[Complex<f64>], gain: f64) -> (Vec<f64>, Vec<f64>) {
    let n = bins.len();
    let half = n / 2;
    let mut amplitude = Vec::with_capacity(half + 1);
    let mut phase = Vec::with_capacity(half + 1);
    for (k, x) in bins.iter().take(half + 1).enumerate() {
        let edge = k == 0 || (n.is_multiple_of(2) && k == half);
        amplitude.push(if edge { 1.0 } else { 2.0 } * x.norm() / gain);
        let p = x.arg();
        phase.push(if p <= -PI { PI } else { p });
    }
    (amplitude, phase)
}

/// Single-sided spectrum of a uniformly sampled channel.
pub fn spectrum(channel: &[f64], dt: f64) -> Result<Spectrum> {
    require_positive("dt", dt)?;
    if channel.len() < 2 {
        return Err(Error::validation("spectrum", "needs at least two samples"));
    }
    let n = channel.len();
    let (amplitude, phase) = single_sided(&dft(channel), n as f64);
    let df = 1.0 / (n as f64 * dt);
    Ok(Spectrum {
        frequencies: (0..amplitude.len()).map(|k| k as f64 * df).collect(),
        amplitude,
        phase,
    })
}

/// Periodic Hann window.
pub fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Short-time spectra over Hann-tapered windows.
pub fn stft(channel: &[f64], dt: f64, window_length: usize, hop: usize) -> Result<Spectrogram> {
    require_positive("dt", dt)?;
    if window_length < 2 {
        return Err(Error::validation("stft.window", "window needs at least two samples"));
    }
    if window_length > channel.len() {
        return Err(Error::validation(
            "stft.window",
            format!("window of {window_length} samples exceeds the {} available", channel.len()),
        ));
    }
    if hop == 0 || hop > window_length {
        return Err(Error::validation("stft.overlap", "hop must lie in [1, window length]"));
    }
    let window = hann(window_length);
    let gain: f64 = window.iter().sum();
    let fft = FftPlanner::new().plan_fft_forward(window_length);
    let mut times = Vec::new();
    let mut grid = Vec::new();
    let mut start = 0;
    while start + window_length <= channel.len() {
        let mut buf: Vec<Complex<f64>> = channel[start..start + window_length]
            .iter()
            .zip(&window)
            .map(|(x, w)| Complex::new(x * w, 0.0))
            .collect();
        fft.process(&mut buf);
        grid.push(single_sided(&buf, gain).0);
        times.push((start as f64 + 0.5 * window_length as f64) * dt);
        start += hop;
    }
    let df = 1.0 / (window_length as f64 * dt);
    Ok(Spectrogram {
        window_length,
        hop,
        frequencies: (0..=window_length / 2).map(|k| k as f64 * df).collect(),
        window,
        times,
        grid,
    })
}

/// [`stft`] with the window given in seconds and the overlap as a fraction.
pub fn stft_seconds(channel: &[f64], dt: f64, window: f64, overlap: f64) -> Result<Spectrogram> {
    require_positive("stft.window", window)?;
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::validation("stft.overlap", format!("must lie in [0, 1) (got {overlap})")));
    }
    let window_length = (window / dt).round() as usize;
    let hop = ((window_length as f64 * (1.0 - overlap)).round() as usize).max(1);
    stft(channel, dt, window_length, hop)
}

/// Spectrum of `stage2 − stage1`.
pub fn stage_difference_spectrum(stage1: &[f64], stage2: &[f64], dt: f64) -> Result<Spectrum> {
    if stage1.len() != stage2.len() {
        return Err(Error::validation(
            "stage_difference",
            format!("channel lengths differ ({} vs {})", stage1.len(), stage2.len()),
        ));
    }
    let diff: Vec<f64> = stage2.iter().zip(stage1).map(|(b, a)| b - a).collect();
    spectrum(&diff, dt)
}
