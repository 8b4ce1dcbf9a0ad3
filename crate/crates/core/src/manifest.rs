//! Dataset and scene manifest schemas (JSON on disk).
//!
//! A generated dataset is a directory of scene folders plus a single
//! `manifest.json`. Each scene folder carries the WAVs named here and a
//! `scene.json` holding its own `SceneManifest`. All paths are relative
//! to the scene directory.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::SceneGeometry;

pub const MANIFEST_VERSION: &str = "1";

/// File names inside one scene directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneFiles {
    /// D-channel observation.
    pub observation: String,
    /// D-channel sensor noise.
    pub noise: String,
    /// Mono source signals, one per speaker.
    pub sources: Vec<String>,
    /// D-channel speech images, one per speaker.
    pub images: Vec<String>,
    pub images_early: Vec<String>,
    pub images_late: Vec<String>,
}

impl SceneFiles {
    pub fn standard(num_sources: usize) -> Self {
        let per_source = |stem: &str| {
            (0..num_sources)
                .map(|k| format!("{stem}_{k}.wav"))
                .collect::<Vec<_>>()
        };
        Self {
            observation: "observation.wav".into(),
            noise: "noise.wav".into(),
            sources: per_source("source"),
            images: per_source("speech_image"),
            images_early: per_source("speech_image_early"),
            images_late: per_source("speech_image_late"),
        }
    }
}

/// RIR bookkeeping persisted with each scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RirInfo {
    pub start_samples: Vec<usize>,
    pub delay_compensation: Vec<usize>,
    pub rir_length: usize,
}

/// Everything needed to reproduce and evaluate one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub scene_id: String,
    pub seed: u64,
    pub sample_rate: u32,
    pub num_samples: usize,
    pub geometry: SceneGeometry,
    pub offsets: Vec<usize>,
    pub snr: f64,
    pub t60: f64,
    pub rir: RirInfo,
    pub files: SceneFiles,
}

/// Top-level dataset manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub version: String,
    pub master_seed: u64,
    /// Echo of the full pipeline configuration used for generation.
    pub config: serde_json::Value,
    pub scenes: Vec<SceneManifest>,
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_scene, GeometryConfig};

    #[test]
    fn manifest_round_trips_through_json() {
        let scene = sample_scene(&GeometryConfig::default(), 9).unwrap();
        let manifest = DatasetManifest {
            version: MANIFEST_VERSION.into(),
            master_seed: 9,
            config: serde_json::json!({"note": "test"}),
            scenes: vec![SceneManifest {
                scene_id: scene.scene_id.clone(),
                seed: scene.seed,
                sample_rate: scene.sample_rate,
                num_samples: 16000,
                offsets: vec![0, 123],
                snr: scene.snr,
                t60: scene.t60,
                geometry: scene,
                rir: RirInfo {
                    start_samples: vec![0, 0],
                    delay_compensation: vec![31, 35],
                    rir_length: 3000,
                },
                files: SceneFiles::standard(2),
            }],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        manifest.save(&path).unwrap();
        let loaded = DatasetManifest::load(&path).unwrap();
        assert_eq!(manifest, loaded);
    }
}
