//! Mixture assembly: offset padding, image rendering, sensor noise.
//!
//! The observation is built in a fixed order -- images first, then
//! noise, then the sum -- so `y = sum_k x_k + n` holds exactly, sample
//! by sample.

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fft::convolve;
use crate::geometry::SceneGeometry;
use crate::rir::{simulate_rir, RirConfig, RirSet};
use crate::seed::{stream_rng, Stream};

/// All signals of one simulated scene, time domain, per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureBundle {
    /// Padded source signals at their origin, shape `(sources, samples)`.
    pub sources: Array2<f64>,
    /// Padding offset applied to each source.
    pub offsets: Vec<usize>,
    /// Speech images, shape `(sources, mics, samples)`.
    pub images: Array3<f64>,
    pub images_early: Array3<f64>,
    pub images_late: Array3<f64>,
    /// White sensor noise, shape `(mics, samples)`.
    pub noise: Array2<f64>,
    /// Observation `y = sum_k x_k + n`.
    pub observation: Array2<f64>,
    pub snr: f64,
    pub sample_rate: u32,
}

/// Zero-pad sources to a common length with a random start offset.
///
/// The output length is the longest input length; the longest utterance
/// keeps offset 0, each shorter one starts at a uniform integer offset
/// in `{0, ..., L_max - L_k}` with the remainder padded at the end.
pub fn pad_with_random_offset<R: Rng>(
    sources: &[Vec<f64>],
    rng: &mut R,
) -> Result<(Array2<f64>, Vec<usize>)> {
    if sources.is_empty() {
        return Err(Error::InvalidInput("no sources to pad".into()));
    }
    let max_len = sources.iter().map(Vec::len).max().unwrap();
    if max_len == 0 {
        return Err(Error::InvalidInput("sources are empty".into()));
    }
    let mut offsets = Vec::with_capacity(sources.len());
    let mut out = Array2::zeros((sources.len(), max_len));
    for (k, src) in sources.iter().enumerate() {
        let slack = max_len - src.len();
        let offset = if slack == 0 {
            0
        } else {
            rng.random_range(0..=slack as u64) as usize
        };
        offsets.push(offset);
        for (n, &v) in src.iter().enumerate() {
            out[(k, offset + n)] = v;
        }
    }
    Ok((out, offsets))
}

/// Convolve each padded source with its RIRs, truncated to the source
/// length. Returns `(images, images_early, images_late)`.
pub fn render_images(
    sources: &Array2<f64>,
    rirs: &RirSet,
) -> Result<(Array3<f64>, Array3<f64>, Array3<f64>)> {
    let (num_sources, num_samples) = (sources.shape()[0], sources.shape()[1]);
    let (rir_sources, num_mics, _) = rirs.h.dim();
    if rir_sources != num_sources {
        return Err(Error::ShapeMismatch(format!(
            "{num_sources} sources but RIRs for {rir_sources}"
        )));
    }
    let mut images = Array3::zeros((num_sources, num_mics, num_samples));
    let mut early = Array3::zeros((num_sources, num_mics, num_samples));
    let mut late = Array3::zeros((num_sources, num_mics, num_samples));
    for k in 0..num_sources {
        let src = sources.row(k).to_vec();
        for d in 0..num_mics {
            for (dst, h) in [
                (&mut images, &rirs.h),
                (&mut early, &rirs.h_early),
                (&mut late, &rirs.h_late),
            ] {
                let kernel = h
                    .index_axis(ndarray::Axis(0), k)
                    .row(d)
                    .to_vec();
                let full = convolve(&kernel, &src);
                for n in 0..num_samples {
                    dst[(k, d, n)] = full[n];
                }
            }
        }
    }
    Ok((images, early, late))
}

/// Sum of images over sources, shape `(mics, samples)`.
pub fn sum_images(images: &Array3<f64>) -> Array2<f64> {
    let (num_sources, num_mics, num_samples) = images.dim();
    let mut out = Array2::zeros((num_mics, num_samples));
    for k in 0..num_sources {
        for d in 0..num_mics {
            for n in 0..num_samples {
                out[(d, n)] += images[(k, d, n)];
            }
        }
    }
    out
}

/// Add white Gaussian sensor noise at the requested SNR.
///
/// The reference power is the mean power of the sum of images across all
/// channels and samples. `snr_db = +inf` yields zero noise. Returns
/// `(observation, noise)`.
pub fn add_sensor_noise<R: Rng>(
    images: &Array3<f64>,
    snr_db: f64,
    rng: &mut R,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let summed = sum_images(images);
    let (num_mics, num_samples) = summed.dim();
    let p_x = summed.iter().map(|v| v * v).sum::<f64>() / (num_mics * num_samples) as f64;
    if p_x <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    if snr_db.is_nan() {
        return Err(Error::NonFinite("snr".into()));
    }

    let mut noise = Array2::zeros((num_mics, num_samples));
    if snr_db.is_finite() {
        let sigma = (p_x / 10f64.powf(snr_db / 10.0)).sqrt();
        for d in 0..num_mics {
            for n in 0..num_samples {
                let e: f64 = StandardNormal.sample(rng);
                noise[(d, n)] = sigma * e;
            }
        }
    }
    let mut observation = summed;
    observation += &noise;
    Ok((observation, noise))
}

/// Full scene assembly: pad, simulate RIRs, render images, add noise.
///
/// Randomness is drawn from sub-streams of `scene.seed`, so the result
/// is a pure function of `(scene, sources, rir_cfg)`.
pub fn build_scene_bundle(
    scene: &SceneGeometry,
    raw_sources: &[Vec<f64>],
    rir_cfg: &RirConfig,
) -> Result<(MixtureBundle, RirSet)> {
    if raw_sources.len() != scene.source_positions.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} source signals for {} source positions",
            raw_sources.len(),
            scene.source_positions.len()
        )));
    }
    let mut offset_rng = stream_rng(scene.seed, Stream::Offsets);
    let (sources, offsets) = pad_with_random_offset(raw_sources, &mut offset_rng)?;
    let rirs = simulate_rir(scene, rir_cfg)?;
    let (images, images_early, images_late) = render_images(&sources, &rirs)?;
    let mut noise_rng = stream_rng(scene.seed, Stream::Noise);
    let (observation, noise) = add_sensor_noise(&images, scene.snr, &mut noise_rng)?;
    Ok((
        MixtureBundle {
            sources,
            offsets,
            images,
            images_early,
            images_late,
            noise,
            observation,
            snr: scene.snr,
            sample_rate: scene.sample_rate,
        },
        rirs,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_scene, GeometryConfig};
    use crate::seed::rng_from_seed;
    use crate::synth::{generate_sources, SynthConfig};

    #[test]
    fn equal_lengths_get_zero_offsets() {
        let sources = vec![vec![1.0; 1600], vec![2.0; 1600]];
        let (_, offsets) = pad_with_random_offset(&sources, &mut rng_from_seed(0)).unwrap();
        assert_eq!(offsets, vec![0, 0]);
    }

    #[test]
    fn offset_bounds_and_determinism() {
        let sources = vec![vec![1.0; 16000], vec![1.0; 8000]];
        let (padded, offsets) = pad_with_random_offset(&sources, &mut rng_from_seed(3)).unwrap();
        assert_eq!(padded.shape(), &[2, 16000]);
        assert_eq!(offsets[0], 0);
        assert!(offsets[1] <= 8000);
        let (_, offsets2) = pad_with_random_offset(&sources, &mut rng_from_seed(3)).unwrap();
        assert_eq!(offsets, offsets2);
        // Content is placed at the offset, zeros elsewhere.
        assert_eq!(padded[(1, offsets[1])], 1.0);
        if offsets[1] > 0 {
            assert_eq!(padded[(1, offsets[1] - 1)], 0.0);
        }
    }

    #[test]
    fn empty_source_list_rejected() {
        assert!(pad_with_random_offset(&[], &mut rng_from_seed(0)).is_err());
    }

    fn tiny_bundle(seed: u64) -> (MixtureBundle, RirSet, SceneGeometry) {
        let cfg = GeometryConfig::default();
        let scene = sample_scene(&cfg, seed).unwrap();
        let synth = SynthConfig {
            utterance_length_range: [1.0, 1.4],
            ..SynthConfig::default()
        };
        let mut rng = stream_rng(scene.seed, Stream::Sources);
        let sources = generate_sources(&synth, 2, &mut rng);
        let (bundle, rirs) = build_scene_bundle(&scene, &sources, &RirConfig::default()).unwrap();
        (bundle, rirs, scene)
    }

    #[test]
    fn observation_is_exact_sum() {
        let (bundle, _, _) = tiny_bundle(21);
        let summed = sum_images(&bundle.images);
        for d in 0..bundle.noise.shape()[0] {
            for n in 0..bundle.noise.shape()[1] {
                assert_eq!(
                    bundle.observation[(d, n)],
                    summed[(d, n)] + bundle.noise[(d, n)]
                );
            }
        }
    }

    #[test]
    fn early_plus_late_matches_full_image() {
        let (bundle, _, _) = tiny_bundle(22);
        let max_abs = bundle
            .images
            .iter()
            .zip(bundle.images_early.iter().zip(bundle.images_late.iter()))
            .map(|(x, (e, l))| (x - (e + l)).abs())
            .fold(0.0f64, f64::max);
        assert!(max_abs <= 1e-10, "max deviation {max_abs}");
    }

    #[test]
    fn impulse_source_reproduces_rir() {
        let cfg = GeometryConfig::default();
        let scene = sample_scene(&cfg, 5).unwrap();
        let rirs = simulate_rir(&scene, &RirConfig::default()).unwrap();
        let rir_len = rirs.h.dim().2;
        let mut impulse = vec![0.0; rir_len];
        impulse[0] = 1.0;
        let sources = Array2::from_shape_fn((2, rir_len), |(k, n)| {
            if n == 0 && k < 2 {
                impulse[0]
            } else {
                0.0
            }
        });
        let (images, _, _) = render_images(&sources, &rirs).unwrap();
        for k in 0..2 {
            for d in 0..6 {
                for n in 0..rir_len {
                    assert!((images[(k, d, n)] - rirs.h[(k, d, n)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn image_energy_bounded_by_youngs_inequality() {
        let (bundle, rirs, _) = tiny_bundle(23);
        for k in 0..2 {
            let s_norm: f64 = bundle
                .sources
                .row(k)
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            for d in 0..6 {
                let h_l1: f64 = rirs
                    .h
                    .index_axis(ndarray::Axis(0), k)
                    .row(d)
                    .iter()
                    .map(|v| v.abs())
                    .sum();
                let x_norm: f64 = (0..bundle.images.dim().2)
                    .map(|n| bundle.images[(k, d, n)].powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(x_norm <= s_norm * h_l1 + 1e-9);
            }
        }
    }

    #[test]
    fn doubling_source_doubles_image() {
        let (bundle, rirs, _) = tiny_bundle(24);
        let doubled = &bundle.sources * 2.0;
        let (images2, _, _) = render_images(&doubled, &rirs).unwrap();
        for (a, b) in bundle.images.iter().zip(images2.iter()) {
            assert!((2.0 * a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn snr_definition_holds_empirically() {
        let (bundle, _, scene) = tiny_bundle(25);
        let summed = sum_images(&bundle.images);
        let p_x: f64 =
            summed.iter().map(|v| v * v).sum::<f64>() / summed.len() as f64;
        let p_n: f64 =
            bundle.noise.iter().map(|v| v * v).sum::<f64>() / bundle.noise.len() as f64;
        let snr = 10.0 * (p_x / p_n).log10();
        assert!(
            (snr - scene.snr).abs() < 0.1,
            "empirical {snr} vs target {}",
            scene.snr
        );
    }

    #[test]
    fn infinite_snr_means_no_noise() {
        let cfg = GeometryConfig::default();
        let mut scene = sample_scene(&cfg, 26).unwrap();
        scene.snr = f64::INFINITY;
        let synth = SynthConfig {
            utterance_length_range: [1.0, 1.2],
            ..SynthConfig::default()
        };
        let sources = generate_sources(&synth, 2, &mut rng_from_seed(1));
        let (bundle, _) = build_scene_bundle(&scene, &sources, &RirConfig::default()).unwrap();
        assert!(bundle.noise.iter().all(|&v| v == 0.0));
        let summed = sum_images(&bundle.images);
        assert_eq!(bundle.observation, summed);
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let (a, _, _) = tiny_bundle(27);
        let (b, _, _) = tiny_bundle(27);
        assert_eq!(a.noise, b.noise);
        assert_eq!(a.observation, b.observation);
    }

    #[test]
    fn all_zero_images_cannot_define_snr() {
        let images = Array3::zeros((1, 2, 100));
        assert!(matches!(
            add_sensor_noise(&images, 20.0, &mut rng_from_seed(0)),
            Err(Error::ZeroSignal)
        ));
    }

    #[test]
    fn single_speaker_bundle() {
        let cfg = GeometryConfig {
            num_sources: 1,
            ..GeometryConfig::default()
        };
        let scene = sample_scene(&cfg, 30).unwrap();
        let synth = SynthConfig {
            utterance_length_range: [1.0, 1.0],
            ..SynthConfig::default()
        };
        let sources = generate_sources(&synth, 1, &mut rng_from_seed(2));
        let (bundle, _) = build_scene_bundle(&scene, &sources, &RirConfig::default()).unwrap();
        for d in 0..6 {
            for n in 0..bundle.observation.shape()[1] {
                assert_eq!(
                    bundle.observation[(d, n)],
                    bundle.images[(0, d, n)] + bundle.noise[(d, n)]
                );
            }
        }
    }
}
