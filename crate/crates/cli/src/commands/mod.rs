pub mod eval;
pub mod experiment;
pub mod reconstruct;
pub mod simulate;

use std::path::Path;

use polarforge::dataset::read_pattern;
use polarforge::experiment::SuiteConfig;
use polarforge::{CpfaPattern, StageConfig};

use crate::args::SceneArgs;
use crate::error::{CliError, CliResult};

pub fn pattern_or_default(path: Option<&Path>) -> CliResult<CpfaPattern> {
    Ok(match path {
        Some(p) => read_pattern(p)?,
        None => CpfaPattern::default(),
    })
}

pub fn suite_config(scene: &SceneArgs, count: usize, stage: StageConfig) -> CliResult<SuiteConfig> {
    let p_range = match scene.p_range[..] {
        [lo, hi] => [lo, hi],
        _ => return Err(CliError::Usage("--p-range takes exactly two values".into())),
    };
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    Ok(SuiteConfig {
        seed: scene.seed,
        count,
        size: scene.size,
        kind: scene.kind,
        p_range,
        noise_sigmas: scene.noise.clone(),
        stage,
    })
}

pub fn scale_tag(rounds: u32) -> String {
    format!("{}x", 1u64 << rounds)
}
