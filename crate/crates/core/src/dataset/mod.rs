//! Synthetic ground truth, degradation pairs and their on-disk layout.

pub mod io;
pub mod rng;
pub mod scene;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use io::{load_external_dir, load_stack, save_stack, ImageFormat};
pub use scene::{synth_scene, SceneFields, SceneKind, SceneSpec};

use crate::error::{Error, Result};
use crate::mosaic::{mosaic, CpfaPattern, CpfaRaw};
use crate::polarimetry::synthesize_from_params;
use crate::raster::{downsample_area, Plane, PolarStack};

pub const MANIFEST_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// RNG stream reserved for sensor noise.
const NOISE_STREAM: u64 = 0x6e6f697365;

/// One simulated capture: high-resolution truth, its `2^rounds` reduction and
/// the CPFA raw of the reduction.
#[derive(Debug, Clone)]
pub struct Sample {
    pub spec: SceneSpec,
    pub rounds: u32,
    pub gt_hr: PolarStack,
    pub gt_lr: PolarStack,
    pub raw: CpfaRaw,
}

/// Builds a sample in memory.
///
/// The spec's dims are the high-resolution dims; the raw has dims divided by
/// `2^rounds`. All arrays are rounded to `f32` precision so a `pfm` round
/// trip reproduces them exactly.
pub fn make_sample(spec: &SceneSpec, rounds: u32, pattern: &CpfaPattern) -> Result<Sample> {
    spec.validate(rounds)?;
    let fields = synth_scene(spec)?;
    let exact_hr = synthesize_from_params(&fields.s0, &fields.params)?;
    let factor = 1usize << rounds;
    let gt_lr = if rounds == 0 {
        exact_hr.clone()
    } else {
        exact_hr.try_map_planes(|p| downsample_area(p, factor))?
    };
    let gt_hr = exact_hr.map_planes(io::round_to_f32);
    let gt_lr = gt_lr.map_planes(io::round_to_f32);
    let clean = mosaic(&gt_lr, pattern)?;
    let raw = if spec.noise_sigma > 0.0 {
        let noisy = add_sensor_noise(clean.plane(), spec.seed, spec.noise_sigma);
        CpfaRaw::new(io::round_to_f32(&noisy), pattern.clone())?
    } else {
        clean
    };
    Ok(Sample {
        spec: spec.clone(),
        rounds,
        gt_hr,
        gt_lr,
        raw,
    })
}

/// Additive Gaussian noise, clamped to [0, 1], keyed per pixel by `(seed, x, y)`.
pub fn add_sensor_noise(plane: &Plane, seed: u64, sigma: f64) -> Plane {
    let (h, w) = plane.dims();
    Plane::from_fn(h, w, |y, x| {
        let n = rng::gaussian(seed, NOISE_STREAM, x as u64, y as u64);
        (plane.get(y, x) + sigma * n).clamp(0.0, 1.0)
    })
}

/// JSON description of a sample directory. Paths are relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleManifest {
    pub version: u32,
    pub format: ImageFormat,
    pub rounds: u32,
    pub scene: SceneSpec,
    pub pattern: PathBuf,
    pub gt_hr: PathBuf,
    pub gt_lr: PathBuf,
    pub raw: PathBuf,
    pub hr_dims: [usize; 2],
    pub lr_dims: [usize; 2],
}

impl SampleManifest {
    pub fn read(path: &Path) -> Result<SampleManifest> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::MissingFile(path.to_path_buf()))
            }
            Err(e) => return Err(Error::io(path, e)),
        };
        let m: SampleManifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        if m.version != MANIFEST_VERSION {
            return Err(Error::InvalidConfig(format!(
                "{}: unsupported manifest version {}",
                path.display(),
                m.version
            )));
        }
        Ok(m)
    }
}

/// A manifest together with the directory it lives in.
#[derive(Debug, Clone)]
pub struct SampleDir {
    pub root: PathBuf,
    pub manifest: SampleManifest,
}

impl SampleDir {
    pub fn open(manifest_path: &Path) -> Result<SampleDir> {
        let manifest = SampleManifest::read(manifest_path)?;
        let root = manifest_path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        Ok(SampleDir { root, manifest })
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(MANIFEST_FILE)
    }

    pub fn pattern(&self) -> Result<CpfaPattern> {
        read_pattern(&self.root.join(&self.manifest.pattern))
    }

    pub fn raw(&self) -> Result<CpfaRaw> {
        let [h, w] = self.manifest.lr_dims;
        let plane = io::load_plane(&self.root.join(&self.manifest.raw), Some((h, w)))?;
        CpfaRaw::new(plane, self.pattern()?)
    }

    pub fn gt_hr(&self) -> Result<PolarStack> {
        let [h, w] = self.manifest.hr_dims;
        load_stack(&self.root.join(&self.manifest.gt_hr), self.manifest.format, Some((h, w)))
    }

    pub fn gt_lr(&self) -> Result<PolarStack> {
        let [h, w] = self.manifest.lr_dims;
        load_stack(&self.root.join(&self.manifest.gt_lr), self.manifest.format, Some((h, w)))
    }
}

pub fn read_pattern(path: &Path) -> Result<CpfaPattern> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    io::write_atomic(path, text.as_bytes())
}

/// Writes a sample under `dir` and returns its manifest.
pub fn write_sample(sample: &Sample, dir: &Path, format: ImageFormat) -> Result<SampleDir> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let raw_name = format!("raw.{}", format.extension());
    save_stack(&dir.join("gt_hr"), &sample.gt_hr, format)?;
    save_stack(&dir.join("gt_lr"), &sample.gt_lr, format)?;
    io::save_plane(&dir.join(&raw_name), sample.raw.plane(), format)?;
    write_json(&dir.join("pattern.json"), sample.raw.pattern())?;
    let (hh, hw) = sample.gt_hr.dims();
    let (lh, lw) = sample.gt_lr.dims();
    let manifest = SampleManifest {
        version: MANIFEST_VERSION,
        format,
        rounds: sample.rounds,
        scene: sample.spec.clone(),
        pattern: "pattern.json".into(),
        gt_hr: "gt_hr".into(),
        gt_lr: "gt_lr".into(),
        raw: raw_name.into(),
        hr_dims: [hh, hw],
        lr_dims: [lh, lw],
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(SampleDir {
        root: dir.to_path_buf(),
        manifest,
    })
}

/// Simulates one sample and writes it under `dir`.
pub fn make_pair(
    spec: &SceneSpec,
    rounds: u32,
    pattern: &CpfaPattern,
    dir: &Path,
    format: ImageFormat,
) -> Result<SampleDir> {
    let sample = make_sample(spec, rounds, pattern)?;
    write_sample(&sample, dir, format)
}
