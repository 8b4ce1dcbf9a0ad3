//! Image-method room impulse response simulation.
//!
//! Shoebox rooms with a frequency-independent wall reflection coefficient
//! derived from Sabine's formula. Fractional delays are realized with a
//! Hann-windowed sinc kernel. The common propagation offset of each
//! source is removed across all channels at once, so inter-channel delay
//! structure is preserved, and the RIR is split into an early part (up to
//! 50 ms after the detected start) and the late remainder.

use ndarray::{Array3, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, SceneGeometry};

/// Simulation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RirConfig {
    /// Speed of sound in m/s.
    pub speed_of_sound: f64,
    /// Maximum reflection order; `None` includes every image that can
    /// land inside the RIR window.
    pub max_order: Option<usize>,
    /// RIR length in samples; `None` uses `ceil(1.25 * t60 * fs)`.
    pub rir_length: Option<usize>,
    /// Length of the windowed-sinc fractional-delay kernel (odd).
    pub fractional_delay_taps: usize,
    /// Remove the per-source propagation offset (shared across mics).
    pub compensate_delay: bool,
    /// Early/late boundary after the RIR start, in seconds.
    pub early_window: f64,
    /// Apply the Allen-Berkley 100 Hz high-pass after accumulation.
    ///
    /// All image amplitudes are positive, so the dense late tail builds
    /// up a spurious low-frequency ramp; this filter removes it.
    pub highpass: bool,
}

impl Default for RirConfig {
    fn default() -> Self {
        Self {
            speed_of_sound: 343.0,
            max_order: None,
            rir_length: None,
            fractional_delay_taps: 81,
            compensate_delay: true,
            early_window: 0.050,
            highpass: true,
        }
    }
}

/// Impulse responses per `(source, mic)` with their early/late split.
#[derive(Debug, Clone, PartialEq)]
pub struct RirSet {
    /// Full RIRs, shape `(sources, mics, samples)`.
    pub h: Array3<f64>,
    pub h_early: Array3<f64>,
    pub h_late: Array3<f64>,
    /// Detected start sample per source (minimum over mics), valid for
    /// the stored (possibly delay-compensated) `h`.
    pub start_sample: Vec<usize>,
    /// Samples removed from the head of each source's RIRs.
    pub delay_compensation: Vec<usize>,
    pub sample_rate: u32,
    pub t60_target: f64,
}

/// Wall reflection coefficient from Sabine's formula.
///
/// `alpha = 0.161 V / (S T60)`, `beta = sqrt(1 - alpha)`.
pub fn t60_to_absorption(room_dims: [f64; 3], t60: f64) -> Result<f64> {
    if t60 <= 0.0 || room_dims.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidInput(
            "t60 and room dimensions must be positive".into(),
        ));
    }
    let [l, w, h] = room_dims;
    let volume = l * w * h;
    let surface = 2.0 * (l * w + l * h + w * h);
    let alpha = 0.161 * volume / (surface * t60);
    if alpha >= 1.0 {
        return Err(Error::InfeasibleT60 { t60, alpha });
    }
    Ok((1.0 - alpha).sqrt())
}

/// First sample whose magnitude exceeds a tenth of the channel maximum,
/// minimized over channels. `h` has shape `(mics, samples)`.
pub fn detect_rir_start(h: ArrayView2<f64>) -> Result<usize> {
    let mut start = usize::MAX;
    for row in h.rows() {
        let max = row.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if max == 0.0 {
            return Err(Error::AllZeroRir);
        }
        let threshold = max / 10.0;
        let idx = row
            .iter()
            .position(|&v| v.abs() > threshold)
            .expect("channel maximum exceeds its own tenth");
        start = start.min(idx);
    }
    Ok(start)
}

/// Fill `h_early`/`h_late` from `h` using the stored start samples.
///
/// The boundary is `start + round(early_window * fs)`; the early part
/// covers samples `0..boundary`, the late part the rest. If the boundary
/// falls beyond the RIR, the whole RIR is early (logged).
pub fn split_early_late(rirs: &mut RirSet, early_window: f64) {
    let (num_sources, num_mics, len) = rirs.h.dim();
    let window = (early_window * rirs.sample_rate as f64).round() as usize;
    rirs.h_early = Array3::zeros((num_sources, num_mics, len));
    rirs.h_late = Array3::zeros((num_sources, num_mics, len));
    for k in 0..num_sources {
        let boundary = rirs.start_sample[k] + window;
        if boundary >= len {
            log::warn!(
                "early/late boundary {boundary} beyond RIR length {len} for source {k}; \
                 late part degenerates to zero"
            );
        }
        let boundary = boundary.min(len);
        for d in 0..num_mics {
            for n in 0..boundary {
                rirs.h_early[(k, d, n)] = rirs.h[(k, d, n)];
            }
            for n in boundary..len {
                rirs.h_late[(k, d, n)] = rirs.h[(k, d, n)];
            }
        }
    }
}

/// Simulate the RIR set for a scene.
pub fn simulate_rir(scene: &SceneGeometry, cfg: &RirConfig) -> Result<RirSet> {
    let fs = scene.sample_rate as f64;
    if cfg.fractional_delay_taps % 2 == 0 || cfg.fractional_delay_taps < 3 {
        return Err(Error::InvalidInput(
            "fractional_delay_taps must be odd and >= 3".into(),
        ));
    }
    for (what, positions) in [
        ("mic", &scene.mic_positions),
        ("source", &scene.source_positions),
    ] {
        for (i, p) in positions.iter().enumerate() {
            if (0..3).any(|a| p[a] <= 0.0 || p[a] >= scene.room_dims[a]) {
                return Err(Error::InvalidInput(format!(
                    "{what} {i} lies outside the room"
                )));
            }
        }
    }

    let rir_length = cfg
        .rir_length
        .unwrap_or(((1.25 * scene.t60 * fs).ceil()) as usize);
    if cfg.max_order.is_none() && (rir_length as f64) < scene.t60 * fs {
        return Err(Error::InvalidInput(format!(
            "rir_length {rir_length} shorter than t60 ({} samples)",
            (scene.t60 * fs).ceil()
        )));
    }
    let half_taps = (cfg.fractional_delay_taps - 1) / 2;
    let max_direct = scene
        .source_positions
        .iter()
        .flat_map(|&s| scene.mic_positions.iter().map(move |&m| dist(s, m)))
        .fold(0.0f64, f64::max);
    if ((max_direct / cfg.speed_of_sound * fs).round() as usize) + half_taps >= rir_length {
        return Err(Error::TooShort {
            needed: (max_direct / cfg.speed_of_sound * fs).round() as usize + half_taps + 1,
            got: rir_length,
        });
    }

    let beta = t60_to_absorption(scene.room_dims, scene.t60)?;
    let num_sources = scene.source_positions.len();
    let num_mics = scene.mic_positions.len();
    let mut h = Array3::zeros((num_sources, num_mics, rir_length));
    for (k, &src) in scene.source_positions.iter().enumerate() {
        for (d, &mic) in scene.mic_positions.iter().enumerate() {
            let mut rir = h.index_axis_mut(ndarray::Axis(0), k);
            let mut channel = rir.index_axis_mut(ndarray::Axis(0), d);
            accumulate_images(
                channel.as_slice_mut().expect("contiguous rir row"),
                src,
                mic,
                scene.room_dims,
                beta,
                cfg,
                fs,
            );
        }
    }

    if cfg.highpass {
        for k in 0..num_sources {
            for d in 0..num_mics {
                let mut rir = h.index_axis_mut(ndarray::Axis(0), k);
                let mut channel = rir.index_axis_mut(ndarray::Axis(0), d);
                highpass_100hz(channel.as_slice_mut().expect("contiguous rir row"), fs);
            }
        }
    }

    let mut delay_compensation = vec![0usize; num_sources];
    if cfg.compensate_delay {
        for k in 0..num_sources {
            let start = detect_rir_start(h.index_axis(ndarray::Axis(0), k))?;
            delay_compensation[k] = start;
            if start > 0 {
                for d in 0..num_mics {
                    for n in 0..rir_length {
                        h[(k, d, n)] = if n + start < rir_length {
                            h[(k, d, n + start)]
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
    }

    let mut start_sample = Vec::with_capacity(num_sources);
    for k in 0..num_sources {
        start_sample.push(detect_rir_start(h.index_axis(ndarray::Axis(0), k))?);
    }

    let mut rirs = RirSet {
        h,
        h_early: Array3::zeros((0, 0, 0)),
        h_late: Array3::zeros((0, 0, 0)),
        start_sample,
        delay_compensation,
        sample_rate: scene.sample_rate,
        t60_target: scene.t60,
    };
    split_early_late(&mut rirs, cfg.early_window);
    Ok(rirs)
}

/// Add every image-source contribution for one (source, mic) pair.
fn accumulate_images(
    out: &mut [f64],
    src: [f64; 3],
    mic: [f64; 3],
    room: [f64; 3],
    beta: f64,
    cfg: &RirConfig,
    fs: f64,
) {
    let rir_length = out.len();
    let taps = cfg.fractional_delay_taps;
    let half = ((taps - 1) / 2) as isize;
    let max_dist = (rir_length + taps) as f64 * cfg.speed_of_sound / fs;
    // Lattice cell counts so every image within max_dist is visited.
    let bound = |dim: f64| (max_dist / (2.0 * dim)).ceil() as isize + 1;
    let (nx, ny, nz) = (bound(room[0]), bound(room[1]), bound(room[2]));

    // Powers of beta are reused heavily; precompute a table covering the
    // largest possible summed reflection order, 2(nx+ny+nz) + 3.
    let max_pow = 2 * (nx + ny + nz) as usize + 4;
    let mut beta_pow = Vec::with_capacity(max_pow + 1);
    let mut acc = 1.0;
    for _ in 0..=max_pow {
        beta_pow.push(acc);
        acc *= beta;
    }

    for mx in -nx..=nx {
        for my in -ny..=ny {
            for mz in -nz..=nz {
                for q in 0..2usize {
                    for j in 0..2usize {
                        for kk in 0..2usize {
                            let order_x = (2 * mx - q as isize).unsigned_abs();
                            let order_y = (2 * my - j as isize).unsigned_abs();
                            let order_z = (2 * mz - kk as isize).unsigned_abs();
                            if let Some(max_order) = cfg.max_order {
                                if order_x + order_y + order_z > max_order {
                                    continue;
                                }
                            }
                            let img = [
                                (1.0 - 2.0 * q as f64) * src[0] + 2.0 * mx as f64 * room[0],
                                (1.0 - 2.0 * j as f64) * src[1] + 2.0 * my as f64 * room[1],
                                (1.0 - 2.0 * kk as f64) * src[2] + 2.0 * mz as f64 * room[2],
                            ];
                            let distance = dist(img, mic);
                            let delay = distance / cfg.speed_of_sound * fs;
                            let base = delay.floor() as isize;
                            if base - half >= rir_length as isize {
                                continue;
                            }
                            let gain = beta_pow[order_x + order_y + order_z]
                                / (4.0 * std::f64::consts::PI * distance.max(1e-6));
                            let frac = delay - base as f64;
                            write_kernel(out, base, frac, gain, taps);
                        }
                    }
                }
            }
        }
    }
}

/// Accumulate `gain` times a Hann-windowed sinc centered at `base + frac`.
fn write_kernel(out: &mut [f64], base: isize, frac: f64, gain: f64, taps: usize) {
    let half = ((taps - 1) / 2) as isize;
    let half_width = (half + 1) as f64;
    for n in 0..taps as isize {
        let idx = base + n - half;
        if idx < 0 || idx >= out.len() as isize {
            continue;
        }
        let t = (n - half) as f64 - frac;
        let window = 0.5 * (1.0 + (std::f64::consts::PI * t / half_width).cos());
        let sinc = if t.abs() < 1e-12 {
            1.0
        } else {
            let pt = std::f64::consts::PI * t;
            pt.sin() / pt
        };
        out[idx as usize] += gain * window * sinc;
    }
}

/// Allen-Berkley high-pass (100 Hz cutoff), run in place.
fn highpass_100hz(h: &mut [f64], fs: f64) {
    let w = 2.0 * std::f64::consts::PI * 100.0 / fs;
    let r1 = (-w).exp();
    let b1 = 2.0 * r1 * w.cos();
    let b2 = -r1 * r1;
    let a1 = -(1.0 + r1);
    let mut y = [0.0f64; 3];
    for v in h.iter_mut() {
        let x0 = *v;
        y[2] = y[1];
        y[1] = y[0];
        y[0] = b1 * y[1] + b2 * y[2] + x0;
        *v = y[0] + a1 * y[1] + r1 * y[2];
    }
}

/// Backward-integrated energy decay curve in dB, normalized to 0 dB.
pub fn schroeder_curve(h: &[f64]) -> Vec<f64> {
    let mut tail = 0.0;
    let mut cum: Vec<f64> = h
        .iter()
        .rev()
        .map(|&v| {
            tail += v * v;
            tail
        })
        .collect();
    cum.reverse();
    let total = cum.first().copied().unwrap_or(0.0);
    cum.iter()
        .map(|&e| {
            if total > 0.0 && e > 0.0 {
                10.0 * (e / total).log10()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// Reverberation time estimated from the Schroeder curve.
///
/// A line is fit between the -5 dB and -35 dB crossings (falling back to
/// -25 dB) and extrapolated to -60 dB.
pub fn estimate_t60(h: &[f64], sample_rate: u32) -> Option<f64> {
    let curve = schroeder_curve(h);
    for end_db in [-35.0, -25.0] {
        if let Some(t60) = fit_decay(&curve, sample_rate, -5.0, end_db) {
            return Some(t60);
        }
    }
    None
}

fn fit_decay(curve: &[f64], sample_rate: u32, start_db: f64, end_db: f64) -> Option<f64> {
    let i_start = curve.iter().position(|&v| v <= start_db)?;
    let i_end = curve.iter().position(|&v| v <= end_db)?;
    if i_end <= i_start + 1 {
        return None;
    }
    let dt = 1.0 / sample_rate as f64;
    let (mut sx, mut sy, mut sxy, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    let n = (i_end - i_start + 1) as f64;
    for i in i_start..=i_end {
        let x = i as f64 * dt;
        let y = curve[i];
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
    }
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    if slope >= 0.0 {
        return None;
    }
    Some(-60.0 / slope)
}
