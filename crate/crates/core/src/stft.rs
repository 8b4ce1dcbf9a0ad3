//! Analysis/synthesis transform: Hann window, 512-point DFT, 128 shift.
//!
//! Signals are zero-padded by `size - shift` samples at both ends before
//! framing, so every original sample is covered by the full set of
//! overlapping windows and the round trip reconstructs it exactly.
//! Synthesis uses least-squares overlap-add: frames are windowed again
//! and divided by the accumulated squared window.

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// STFT parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    /// Analysis window length in samples.
    pub window_size: usize,
    /// DFT length; must be >= `window_size`.
    pub dft_size: usize,
    /// Frame shift (hop) in samples; must divide `window_size`.
    pub shift: usize,
    pub sample_rate: u32,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_size: 512,
            dft_size: 512,
            shift: 128,
            sample_rate: 8000,
        }
    }
}

impl StftConfig {
    pub fn num_bins(&self) -> usize {
        self.dft_size / 2 + 1
    }

    /// Zero padding added to each end before framing.
    pub fn boundary_pad(&self) -> usize {
        self.window_size - self.shift
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_size == 0 || self.shift == 0 {
            return Err(Error::InvalidInput(
                "window size and shift must be positive".into(),
            ));
        }
        if self.window_size % self.shift != 0 {
            return Err(Error::InvalidInput(format!(
                "shift {} must divide window size {}",
                self.shift, self.window_size
            )));
        }
        if self.dft_size < self.window_size {
            return Err(Error::InvalidInput(format!(
                "dft size {} must be >= window size {}",
                self.dft_size, self.window_size
            )));
        }
        Ok(())
    }
}

/// Periodic Hann window of length `n`.
pub fn hann_periodic(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Complex STFT, indexed `(channel, frame, bin)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfTensor {
    pub data: Array3<Complex64>,
    /// Length of the time-domain signal this tensor was computed from.
    pub num_samples: usize,
    pub config: StftConfig,
}

impl TfTensor {
    pub fn num_channels(&self) -> usize {
        self.data.shape()[0]
    }
    pub fn num_frames(&self) -> usize {
        self.data.shape()[1]
    }
    pub fn num_bins(&self) -> usize {
        self.data.shape()[2]
    }
}

/// Forward STFT of a `(channels, samples)` signal.
pub fn analyze(signal: &Array2<f64>, cfg: &StftConfig) -> Result<TfTensor> {
    cfg.validate()?;
    let (channels, num_samples) = (signal.shape()[0], signal.shape()[1]);
    if num_samples < cfg.window_size {
        return Err(Error::TooShort {
            needed: cfg.window_size,
            got: num_samples,
        });
    }
    let pad = cfg.boundary_pad();
    let padded_len = num_samples + 2 * pad;
    let num_frames = (padded_len - cfg.window_size).div_ceil(cfg.shift) + 1;
    let window = hann_periodic(cfg.window_size);

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(cfg.dft_size);
    let num_bins = cfg.num_bins();

    let mut data = Array3::zeros((channels, num_frames, num_bins));
    let mut frame_buf = vec![Complex64::ZERO; cfg.dft_size];
    for d in 0..channels {
        for t in 0..num_frames {
            let start = t * cfg.shift;
            for (i, slot) in frame_buf.iter_mut().enumerate() {
                *slot = Complex64::ZERO;
                if i < cfg.window_size {
                    // Position in the zero-padded signal.
                    let p = start + i;
                    if p >= pad && p < pad + num_samples {
                        slot.re = signal[(d, p - pad)] * window[i];
                    }
                }
            }
            fft.process(&mut frame_buf);
            for f in 0..num_bins {
                data[(d, t, f)] = frame_buf[f];
            }
        }
    }
    Ok(TfTensor {
        data,
        num_samples,
        config: *cfg,
    })
}

/// Inverse STFT via least-squares overlap-add; returns `(channels, samples)`.
pub fn synthesize(tf: &TfTensor) -> Result<Array2<f64>> {
    let cfg = &tf.config;
    cfg.validate()?;
    let (channels, num_frames, num_bins) = (tf.num_channels(), tf.num_frames(), tf.num_bins());
    if num_bins != cfg.num_bins() {
        return Err(Error::ShapeMismatch(format!(
            "tensor has {} bins, config expects {}",
            num_bins,
            cfg.num_bins()
        )));
    }
    let pad = cfg.boundary_pad();
    let total_len = (num_frames - 1) * cfg.shift + cfg.window_size;
    let window = hann_periodic(cfg.window_size);

    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(cfg.dft_size);
    let scale = 1.0 / cfg.dft_size as f64;

    // Squared-window normalization is channel independent.
    let mut wsum = vec![0.0f64; total_len];
    for t in 0..num_frames {
        let start = t * cfg.shift;
        for (i, &w) in window.iter().enumerate() {
            wsum[start + i] += w * w;
        }
    }

    let mut out = Array2::zeros((channels, tf.num_samples));
    let mut spec = vec![Complex64::ZERO; cfg.dft_size];
    for d in 0..channels {
        let mut acc = vec![0.0f64; total_len];
        for t in 0..num_frames {
            // Rebuild the two-sided spectrum from the one-sided half.
            for f in 0..num_bins {
                spec[f] = tf.data[(d, t, f)];
            }
            for f in num_bins..cfg.dft_size {
                spec[f] = tf.data[(d, t, cfg.dft_size - f)].conj();
            }
            ifft.process(&mut spec);
            let start = t * cfg.shift;
            for (i, &w) in window.iter().enumerate() {
                acc[start + i] += spec[i].re * scale * w;
            }
        }
        for n in 0..tf.num_samples {
            let p = n + pad;
            if wsum[p] > 1e-12 {
                out[(d, n)] = acc[p] / wsum[p];
            }
        }
    }
    Ok(out)
}
