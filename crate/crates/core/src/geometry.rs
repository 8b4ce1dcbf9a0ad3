//! Randomized room / array / source geometry sampling.
//!
//! Every quantity is drawn uniformly from a configured range: room size,
//! array center and rotation, per-source distance, azimuth and height,
//! T60 and SNR. Source azimuths are sampled without any minimum angular
//! separation, so two sources can end up behind each other. A slight
//! random tilt of the circular array avoids accidental symmetries in the
//! RIR simulation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{stream_rng, Stream};

/// Minimum distance of any microphone or source to a wall, in meters.
pub const WALL_CLEARANCE: f64 = 0.1;

const MAX_SAMPLE_ATTEMPTS: usize = 1000;

/// Uniform ranges for every sampled quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig {
    /// Room length range in meters (x axis).
    pub room_length_range: [f64; 2],
    /// Room width range in meters (y axis).
    pub room_width_range: [f64; 2],
    /// Room height range in meters (z axis).
    pub room_height_range: [f64; 2],
    /// Array center offset from the x=0 wall, in meters.
    pub array_center_x_range: [f64; 2],
    /// Array center offset from the y=0 wall, in meters.
    pub array_center_y_range: [f64; 2],
    /// Array center height range in meters.
    pub array_center_z_range: [f64; 2],
    /// Source height range in meters.
    pub source_height_range: [f64; 2],
    /// Radius of the circular microphone array in meters.
    pub array_radius: f64,
    /// Number of microphones on the ring.
    pub num_mics: usize,
    /// Number of speech sources K.
    pub num_sources: usize,
    /// Horizontal source distance from the array center, in meters.
    pub source_distance_range: [f64; 2],
    /// Reverberation time range in seconds.
    pub t60_range: [f64; 2],
    /// Sensor-noise SNR range in dB.
    pub snr_range: [f64; 2],
    /// Maximum absolute x/y tilt of the array plane, in radians.
    pub tilt_max: f64,
    /// Sample rate in Hz.
    pub sample_rate: u32,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            room_length_range: [7.6, 8.4],
            room_width_range: [5.6, 6.4],
            room_height_range: [2.6, 3.4],
            array_center_x_range: [3.6, 4.4],
            array_center_y_range: [2.6, 3.4],
            array_center_z_range: [1.0, 1.5],
            source_height_range: [1.4, 1.9],
            array_radius: 0.10,
            num_mics: 6,
            num_sources: 2,
            source_distance_range: [1.0, 2.0],
            t60_range: [0.2, 0.5],
            snr_range: [20.0, 30.0],
            tilt_max: 0.1,
            sample_rate: 8000,
        }
    }
}

impl GeometryConfig {
    /// Check the configuration invariants.
    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("room_length_range", self.room_length_range),
            ("room_width_range", self.room_width_range),
            ("room_height_range", self.room_height_range),
            ("array_center_x_range", self.array_center_x_range),
            ("array_center_y_range", self.array_center_y_range),
            ("array_center_z_range", self.array_center_z_range),
            ("source_height_range", self.source_height_range),
            ("source_distance_range", self.source_distance_range),
            ("t60_range", self.t60_range),
            ("snr_range", self.snr_range),
        ];
        for (name, [lo, hi]) in ranges {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InfeasibleConfig(format!(
                    "{name} must satisfy low <= high, got [{lo}, {hi}]"
                )));
            }
        }
        if self.num_mics < 2 {
            return Err(Error::InfeasibleConfig("num_mics must be >= 2".into()));
        }
        if self.num_sources < 1 {
            return Err(Error::InfeasibleConfig("num_sources must be >= 1".into()));
        }
        if self.array_radius <= 0.0 {
            return Err(Error::InfeasibleConfig("array_radius must be > 0".into()));
        }
        if self.tilt_max < 0.0 {
            return Err(Error::InfeasibleConfig("tilt_max must be >= 0".into()));
        }
        // Conservative feasibility check: array ring plus the farthest
        // source must fit inside the smallest room's half-extent.
        let half_min = self.room_length_range[0].min(self.room_width_range[0]) / 2.0;
        if self.array_radius + self.source_distance_range[1] >= half_min - WALL_CLEARANCE {
            return Err(Error::InfeasibleConfig(format!(
                "array radius {} + max source distance {} does not fit in a {} m half-extent",
                self.array_radius, self.source_distance_range[1], half_min
            )));
        }
        Ok(())
    }
}

/// One sampled world: room, array pose, sources, T60 and SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGeometry {
    pub scene_id: String,
    pub seed: u64,
    /// Room extents in meters, `[length, width, height]`.
    pub room_dims: [f64; 3],
    pub array_center: [f64; 3],
    /// Rotation `[roll_x, pitch_y, yaw_z]` in radians, applied to the mic
    /// ring as `Rz(yaw) * Ry(pitch) * Rx(roll)`.
    pub array_rotation: [f64; 3],
    pub array_radius: f64,
    pub mic_positions: Vec<[f64; 3]>,
    pub source_positions: Vec<[f64; 3]>,
    /// Reverberation time in seconds.
    pub t60: f64,
    /// Sensor-noise SNR in dB.
    pub snr: f64,
    pub sample_rate: u32,
}

fn rotation_matrix(rot: [f64; 3]) -> [[f64; 3]; 3] {
    let (sr, cr) = rot[0].sin_cos();
    let (sp, cp) = rot[1].sin_cos();
    let (sy, cy) = rot[2].sin_cos();
    // Rz(yaw) * Ry(pitch) * Rx(roll)
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

fn rotate(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn inside_with_clearance(p: [f64; 3], room: [f64; 3]) -> bool {
    (0..3).all(|i| p[i] >= WALL_CLEARANCE && p[i] <= room[i] - WALL_CLEARANCE)
}

/// Sample one scene from `config` under `seed`.
///
/// The draw order is fixed: room dims (l, w, h); array center (x, y, z);
/// rotation (yaw, tilt_x, tilt_y); t60; snr; then per source (distance,
/// azimuth, height). A draw that violates wall clearance rejects the
/// whole attempt and redraws everything, so identical `(config, seed)`
/// always yields an identical scene.
pub fn sample_scene(config: &GeometryConfig, seed: u64) -> Result<SceneGeometry> {
    config.validate()?;
    let mut rng = stream_rng(seed, Stream::Geometry);
    let uni = |rng: &mut rand_chacha::ChaCha12Rng, [lo, hi]: [f64; 2]| -> f64 {
        if lo == hi {
            lo
        } else {
            rng.random_range(lo..hi)
        }
    };

    let mut last_reason = String::new();
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let room_dims = [
            uni(&mut rng, config.room_length_range),
            uni(&mut rng, config.room_width_range),
            uni(&mut rng, config.room_height_range),
        ];
        let array_center = [
            uni(&mut rng, config.array_center_x_range),
            uni(&mut rng, config.array_center_y_range),
            uni(&mut rng, config.array_center_z_range),
        ];
        let yaw = uni(&mut rng, [0.0, 2.0 * std::f64::consts::PI]);
        let tilt_x = uni(&mut rng, [-config.tilt_max, config.tilt_max]);
        let tilt_y = uni(&mut rng, [-config.tilt_max, config.tilt_max]);
        let array_rotation = [tilt_x, tilt_y, yaw];
        let t60 = uni(&mut rng, config.t60_range);
        let snr = uni(&mut rng, config.snr_range);

        let rot = rotation_matrix(array_rotation);
        let mut mic_positions = Vec::with_capacity(config.num_mics);
        for i in 0..config.num_mics {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / config.num_mics as f64;
            let local = [
                config.array_radius * theta.cos(),
                config.array_radius * theta.sin(),
                0.0,
            ];
            let off = rotate(&rot, local);
            mic_positions.push([
                array_center[0] + off[0],
                array_center[1] + off[1],
                array_center[2] + off[2],
            ]);
        }

        let mut source_positions = Vec::with_capacity(config.num_sources);
        for _ in 0..config.num_sources {
            let distance = uni(&mut rng, config.source_distance_range);
            let azimuth = uni(&mut rng, [0.0, 2.0 * std::f64::consts::PI]);
            let height = uni(&mut rng, config.source_height_range);
            source_positions.push([
                array_center[0] + distance * azimuth.cos(),
                array_center[1] + distance * azimuth.sin(),
                height,
            ]);
        }

        let mic_ok = mic_positions
            .iter()
            .all(|&p| inside_with_clearance(p, room_dims));
        let src_ok = source_positions
            .iter()
            .all(|&p| inside_with_clearance(p, room_dims));
        if !mic_ok {
            last_reason = "microphone outside wall clearance".into();
            continue;
        }
        if !src_ok {
            last_reason = "source outside wall clearance".into();
            continue;
        }

        return Ok(SceneGeometry {
            scene_id: format!("scene_{seed:016x}"),
            seed,
            room_dims,
            array_center,
            array_rotation,
            array_radius: config.array_radius,
            mic_positions,
            source_positions,
            t60,
            snr,
            sample_rate: config.sample_rate,
        });
    }
    Err(Error::RejectionFailed {
        attempts: MAX_SAMPLE_ATTEMPTS,
        reason: last_reason,
    })
}

/// Check scene invariants; returns one message per violation.
pub fn validate_scene(scene: &SceneGeometry) -> Vec<String> {
    let mut violations = Vec::new();
    if scene.room_dims.iter().any(|&d| d <= 0.0) {
        violations.push("non-positive room dimension".to_string());
    }
    for (i, &p) in scene.mic_positions.iter().enumerate() {
        if !inside_with_clearance(p, scene.room_dims) {
            violations.push(format!("mic {i} outside clearance"));
        }
    }
    for (i, &p) in scene.source_positions.iter().enumerate() {
        if !inside_with_clearance(p, scene.room_dims) {
            violations.push(format!("source {i} outside clearance"));
        }
    }
    for (i, &p) in scene.mic_positions.iter().enumerate() {
        let d = dist(p, scene.array_center);
        if (d - scene.array_radius).abs() > 1e-9 {
            violations.push(format!("mic ring radius mismatch (mic {i})"));
        }
    }
    violations
}

/// Euclidean distance between two points.
pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Horizontal (xy-plane) distance between two points.
pub fn horizontal_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
