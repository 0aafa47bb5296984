//! Scene-suite experiments on demosaicing artifacts and reconstruction quality.
//!
//! * `err_gap`: error rates of S0, DoP and AoP after bilinear demosaicing;
//! * `input_quality`: super-resolution rounds fed ground-truth vs demosaiced input;
//! * `err_vs_res`: error rates of one scene rendered at increasing resolution;
//! * `complementarity`: joint pipeline vs the demosaic-then-upsample baseline.
//!
//! Scenes are processed in parallel when the `parallel` feature is on; results
//! are collected in seed order so every output is identical to a sequential run.

use serde::{Deserialize, Serialize};

use crate::dataset::{make_sample, Sample, SceneKind, SceneSpec};
use crate::error::Result;
use crate::metrics::{error_rate, error_rate_angular, evaluate, Derived, EvalReport};
use crate::mosaic::{cpfa_demosaic_bilinear, CpfaPattern};
use crate::pipeline::{run_pidsr, run_sequential_baseline, super_resolve, StageConfig};
use crate::raster::PolarStack;

pub const ERR_VS_RES_SIZES: [usize; 4] = [64, 128, 256, 512];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub size: usize,
    /// Fixed scene kind, or `None` to cycle through all kinds.
    pub kind: Option<SceneKind>,
    pub p_range: [f64; 2],
    /// Noise levels, cycled so that every scene kind meets every level.
    pub noise_sigmas: Vec<f64>,
    pub stage: StageConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: 20,
            size: 64,
            kind: None,
            p_range: [0.05, 0.6],
            noise_sigmas: vec![0.0],
            stage: StageConfig::default(),
        }
    }
}

impl SuiteConfig {
    /// Scene `index` of the suite. Kind and noise level are keyed on the
    /// scene's seed, so a seed names the same scene in every suite.
    pub fn scene(&self, index: usize, size: usize) -> SceneSpec {
        let seed = self.seed + index as u64;
        let kinds = SceneKind::ALL.len() as u64;
        let kind = self.kind.unwrap_or(SceneKind::ALL[(seed % kinds) as usize]);
        let noise = match self.noise_sigmas.len() as u64 {
            0 => 0.0,
            n => self.noise_sigmas[((seed + seed / kinds) % n) as usize],
        };
        SceneSpec {
            seed,
            height: size,
            width: size,
            kind,
            p_range: self.p_range,
            noise_sigma: noise,
        }
    }
}

fn par_collect<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Error rates of S0, DoP and AoP (AoP normalized by π, distance π-periodic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    pub s0: f64,
    pub p: f64,
    pub theta: f64,
}

impl ErrorRates {
    pub fn of(pred: &PolarStack, gt: &PolarStack) -> Result<ErrorRates> {
        let dp = Derived::of(pred);
        let dg = Derived::of(gt);
        Ok(ErrorRates {
            s0: error_rate(&dp.stokes.s0, &dg.stokes.s0)?,
            p: error_rate(&dp.params.dop, &dg.params.dop)?,
            theta: error_rate_angular(&dp.params.aop, &dg.params.aop)?,
        })
    }

    pub fn mean(items: &[ErrorRates]) -> ErrorRates {
        let n = items.len().max(1) as f64;
        ErrorRates {
            s0: items.iter().map(|e| e.s0).sum::<f64>() / n,
            p: items.iter().map(|e| e.p).sum::<f64>() / n,
            theta: items.iter().map(|e| e.theta).sum::<f64>() / n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneRates {
    pub seed: u64,
    pub kind: SceneKind,
    pub size: usize,
    pub rates: ErrorRates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrGap {
    pub scenes: Vec<SceneRates>,
    pub mean: ErrorRates,
}

/// Bilinear-demosaicing error rates over a scene suite.
pub fn err_gap(cfg: &SuiteConfig, pattern: &CpfaPattern) -> Result<ErrGap> {
    let scenes = par_collect(cfg.count, |i| {
        let spec = cfg.scene(i, cfg.size);
        let sample = make_sample(&spec, 0, pattern)?;
        let pred = cpfa_demosaic_bilinear(&sample.raw)?;
        Ok(SceneRates {
            seed: spec.seed,
            kind: spec.kind,
            size: spec.height,
            rates: ErrorRates::of(&pred, &sample.gt_lr)?,
        })
    })?;
    let mean = ErrorRates::mean(&scenes.iter().map(|s| s.rates).collect::<Vec<_>>());
    Ok(ErrGap { scenes, mean })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrVsRes {
    pub seed: u64,
    pub kind: SceneKind,
    pub entries: Vec<SceneRates>,
}

/// One scene rendered at each size, demosaiced bilinearly.
pub fn err_vs_res(cfg: &SuiteConfig, sizes: &[usize], pattern: &CpfaPattern) -> Result<ErrVsRes> {
    let base = cfg.scene(0, sizes.first().copied().unwrap_or(cfg.size));
    let entries = par_collect(sizes.len(), |i| {
        let spec = SceneSpec {
            height: sizes[i],
            width: sizes[i],
            ..base.clone()
        };
        let sample = make_sample(&spec, 0, pattern)?;
        let pred = cpfa_demosaic_bilinear(&sample.raw)?;
        Ok(SceneRates {
            seed: spec.seed,
            kind: spec.kind,
            size: sizes[i],
            rates: ErrorRates::of(&pred, &sample.gt_lr)?,
        })
    })?;
    Ok(ErrVsRes {
        seed: base.seed,
        kind: base.kind,
        entries,
    })
}

/// Aggregated reports of two arms on the same scenes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedArms {
    pub rounds: u32,
    pub scene_seeds: Vec<u64>,
    pub arms: Vec<ArmResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmResult {
    pub name: String,
    pub aggregate: EvalReport,
    pub per_scene: Vec<EvalReport>,
}

impl PairedArms {
    pub fn arm(&self, name: &str) -> Option<&ArmResult> {
        self.arms.iter().find(|a| a.name == name)
    }
}

fn run_arms(
    cfg: &SuiteConfig,
    rounds: u32,
    pattern: &CpfaPattern,
    names: [&str; 2],
    scale: &str,
    arms: impl Fn(&Sample) -> Result<[(PolarStack, PolarStack); 2]> + Sync + Send,
) -> Result<PairedArms> {
    let per = par_collect(cfg.count, |i| {
        let spec = cfg.scene(i, cfg.size);
        let sample = make_sample(&spec, rounds, pattern)?;
        let [(a, ga), (b, gb)] = arms(&sample)?;
        Ok((
            spec.seed,
            evaluate(&a, &ga, scale, names[0])?,
            evaluate(&b, &gb, scale, names[1])?,
        ))
    })?;
    let scene_seeds = per.iter().map(|p| p.0).collect();
    let first: Vec<EvalReport> = per.iter().map(|p| p.1.clone()).collect();
    let second: Vec<EvalReport> = per.iter().map(|p| p.2.clone()).collect();
    let mk = |name: &str, reports: Vec<EvalReport>| ArmResult {
        name: name.to_string(),
        aggregate: EvalReport::aggregate(&reports).expect("non-empty suite"),
        per_scene: reports,
    };
    Ok(PairedArms {
        rounds,
        scene_seeds,
        arms: vec![mk(names[0], first), mk(names[1], second)],
    })
}

/// Super-resolution rounds applied to ground-truth low-resolution stacks
/// (`gt-input`) and to bilinear-demosaiced stacks (`demosaiced-input`).
pub fn input_quality(cfg: &SuiteConfig, rounds: u32, pattern: &CpfaPattern) -> Result<PairedArms> {
    let scale = format!("{}x", 1u32 << rounds);
    run_arms(cfg, rounds, pattern, ["gt-input", "demosaiced-input"], &scale, |s| {
        let from_gt = super_resolve(&s.gt_lr, &cfg.stage, rounds);
        let demosaiced = cpfa_demosaic_bilinear(&s.raw)?;
        let from_dm = super_resolve(&demosaiced, &cfg.stage, rounds);
        Ok([(from_gt, s.gt_hr.clone()), (from_dm, s.gt_hr.clone())])
    })
}

/// Joint pipeline (`pidsr`) against the sequential baseline (`sequential`),
/// both at `2^rounds` scale.
pub fn complementarity(cfg: &SuiteConfig, rounds: u32, pattern: &CpfaPattern) -> Result<PairedArms> {
    let scale = format!("{}x", 1u32 << rounds);
    let stage = StageConfig {
        rounds,
        ..cfg.stage
    };
    run_arms(cfg, rounds, pattern, ["pidsr", "sequential"], &scale, |s| {
        let out = run_pidsr(&s.raw, &stage)?;
        let joint = out.super_resolved.unwrap_or(out.demosaiced);
        let seq = run_sequential_baseline(&s.raw, rounds)?;
        Ok([(joint, s.gt_hr.clone()), (seq, s.gt_hr.clone())])
    })
}
