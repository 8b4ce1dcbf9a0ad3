//! Float32 WAV I/O for multi-channel signals, plus sinc resampling for
//! ingesting sources recorded at other rates.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// Write a `(channels, samples)` signal as float32 WAV.
pub fn write_wav(path: &Path, signal: &Array2<f64>, sample_rate: u32) -> Result<()> {
    let (channels, samples) = (signal.shape()[0], signal.shape()[1]);
    if channels == 0 || channels > u16::MAX as usize {
        return Err(Error::InvalidInput(format!("bad channel count {channels}")));
    }
    let spec = hound::WavSpec {
        channels: channels as u16,
        sample_rate,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for n in 0..samples {
        for d in 0..channels {
            writer.write_sample(signal[(d, n)] as f32)?;
        }
    }
    writer.finalize()?;
    Ok(())
}

/// Read a WAV file into a `(channels, samples)` array.
///
/// Float32 and 16/24/32-bit integer PCM are accepted; integers are
/// scaled to [-1, 1).
pub fn read_wav(path: &Path) -> Result<(Array2<f64>, u32)> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        hound::SampleFormat::Int => {
            let scale = 1.0 / (1u64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 * scale))
                .collect::<std::result::Result<_, _>>()?
        }
    };
    let frames = interleaved.len() / channels;
    let mut out = Array2::zeros((channels, frames));
    for n in 0..frames {
        for d in 0..channels {
            out[(d, n)] = interleaved[n * channels + d];
        }
    }
    Ok((out, spec.sample_rate))
}

/// Read a mono WAV, resampling to `target_rate` if needed.
pub fn read_wav_mono(path: &Path, target_rate: u32) -> Result<Vec<f64>> {
    let (data, rate) = read_wav(path)?;
    if data.shape()[0] != 1 {
        return Err(Error::InvalidInput(format!(
            "{}: expected mono, got {} channels",
            path.display(),
            data.shape()[0]
        )));
    }
    let mono: Vec<f64> = data.row(0).to_vec();
    if rate == target_rate {
        Ok(mono)
    } else {
        Ok(resample_sinc(&mono, rate, target_rate))
    }
}

/// Windowed-sinc resampler (32-tap half-width Hann window).
pub fn resample_sinc(x: &[f64], from_rate: u32, to_rate: u32) -> Vec<f64> {
    if from_rate == to_rate || x.is_empty() {
        return x.to_vec();
    }
    let ratio = from_rate as f64 / to_rate as f64;
    let out_len = ((x.len() as f64) / ratio).floor() as usize;
    // Cut off at the lower Nyquist when downsampling.
    let cutoff = (to_rate as f64 / from_rate as f64).min(1.0);
    let half = 32isize;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let center = n as f64 * ratio;
        let base = center.floor() as isize;
        let mut acc = 0.0;
        for m in (base - half)..=(base + half) {
            if m < 0 || m as usize >= x.len() {
                continue;
            }
            let t = center - m as f64;
            let u = t * cutoff;
            let sinc = if u.abs() < 1e-12 {
                1.0
            } else {
                (std::f64::consts::PI * u).sin() / (std::f64::consts::PI * u)
            };
            let w = 0.5 * (1.0 + (std::f64::consts::PI * t / (half as f64 + 1.0)).cos());
            acc += x[m as usize] * cutoff * sinc * w;
        }
        out.push(acc);
    }
    out
}
