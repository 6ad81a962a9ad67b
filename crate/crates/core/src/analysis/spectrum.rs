use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::{Error, Result};

/// Peaks below this fraction of the largest bin are ignored.
pub const PEAK_THRESHOLD: f64 = 0.1;

/// Minimum distance between two reported peaks, in bins.
pub const PEAK_SEPARATION_BINS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub power: f64,
}

/// One-sided power spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin centres [Hz], from 0 to Nyquist.
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    /// Detected peaks, strongest first.
    pub peaks: Vec<Peak>,
}

impl Spectrum {
    /// Frequency resolution [Hz].
    pub fn bin_width(&self) -> f64 {
        if self.frequencies.len() < 2 {
            0.0
        } else {
            self.frequencies[1] - self.frequencies[0]
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,power\n");
        for (f, p) in self.frequencies.iter().zip(&self.power) {
            out.push_str(&format!("{},{}\n", super::fmt_f64(*f), super::fmt_f64(*p)));
        }
        out
    }
}

/// Periodogram of a uniformly sampled signal after removing a linear trend
/// and applying a Hann window.
pub fn power_spectrum(signal: &[f64], sample_rate_hz: f64) -> Result<Spectrum> {
    if signal.len() < 2 {
        return Err(Error::Sampling(format!("need at least 2 samples, got {}", signal.len())));
    }
    if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
        return Err(Error::param("sample_rate_hz", "must be finite and > 0"));
    }
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::Sampling("signal contains non-finite samples".into()));
    }
    let n = signal.len();
    let detrended = detrend(signal);
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect();
    let norm = sample_rate_hz * window.iter().map(|w| w * w).sum::<f64>();

    let mut buf: Vec<Complex<f64>> = detrended
        .iter()
        .zip(&window)
        .map(|(x, w)| Complex::new(x * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let half = n / 2;
    let frequencies: Vec<f64> = (0..=half).map(|k| k as f64 * sample_rate_hz / n as f64).collect();
    let power: Vec<f64> = (0..=half)
        .map(|k| {
            let one_sided = if k == 0 || (n.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
            one_sided * buf[k].norm_sqr() / norm
        })
        .collect();
    let peaks = find_peaks(&frequencies, &power);
    Ok(Spectrum {
        frequencies,
        power,
        peaks,
    })
}

/// As [`power_spectrum`], deriving the rate from timestamps, which must be
/// uniformly spaced.
pub fn power_spectrum_timed(times: &[f64], signal: &[f64]) -> Result<Spectrum> {
    if times.len() != signal.len() {
        return Err(Error::Dimension(format!(
            "{} timestamps for {} samples",
            times.len(),
            signal.len()
        )));
    }
    if times.len() < 2 {
        return Err(Error::Sampling(format!("need at least 2 samples, got {}", times.len())));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Sampling("timestamps must increase".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        if (step - dt).abs() > 1e-6 * dt {
            return Err(Error::Sampling(format!(
                "non-uniform step {step} at sample {i} (mean {dt})"
            )));
        }
    }
    power_spectrum(signal, 1.0 / dt)
}

fn detrend(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let x_mean = x.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in x.iter().enumerate() {
        let dt = i as f64 - t_mean;
        sxy += dt * (v - x_mean);
        sxx += dt * dt;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    x.iter()
        .enumerate()
        .map(|(i, v)| v - x_mean - slope * (i as f64 - t_mean))
        .collect()
}

fn find_peaks(freq: &[f64], power: &[f64]) -> Vec<Peak> {
    let max = power.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let floor = PEAK_THRESHOLD * max;
    let last = power.len() - 1;
    let mut candidates: Vec<usize> = (0..=last)
        .filter(|&k| {
            let left = k == 0 || power[k] > power[k - 1];
            let right = k == last || power[k] >= power[k + 1];
            power[k] >= floor && left && right
        })
        .collect();
    candidates.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for k in candidates {
        if kept.iter().all(|&j| j.abs_diff(k) >= PEAK_SEPARATION_BINS) {
            kept.push(k);
        }
    }
    kept.into_iter()
        .map(|k| Peak {
            frequency: freq[k],
            power: power[k],
        })
        .collect()
}
