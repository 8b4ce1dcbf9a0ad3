//! Simulation, separation, and evaluation toolkit for spatialized
//! two-speaker reverberant mixtures.
//!
//! The pipeline: sample a randomized room/array/source geometry
//! ([`geometry`]), simulate image-method room impulse responses with an
//! early/late split ([`rir`]), render speech images and add white sensor
//! noise ([`mixer`]), cluster the multichannel STFT ([`stft`]) with a
//! complex angular central Gaussian mixture model ([`cacgmm`]), beamform
//! with a mask-based Souden MVDR ([`beamforming`]), and score the result
//! with four SDR variants ([`metrics`]).

pub mod assignment;
pub mod beamforming;
pub mod cacgmm;
pub mod error;
pub mod fft;
pub mod geometry;
pub mod hermitian;
pub mod manifest;
pub mod metrics;
pub mod mixer;
pub mod rir;
pub mod seed;
pub mod stft;
pub mod synth;
pub mod wav;

pub use error::{Error, Result};
