use std::path::PathBuf;

use polarforge::dataset::{make_pair, SceneSpec};
use polarforge::StageConfig;
use rayon::prelude::*;

use super::{pattern_or_default, suite_config};
use crate::args::SimulateArgs;
use crate::error::CliResult;

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let pattern = pattern_or_default(args.pattern.as_deref())?;
    let suite = suite_config(&args.scene, args.count, StageConfig::default())?;
    let specs: Vec<SceneSpec> = (0..args.count).map(|i| suite.scene(i, args.scene.size)).collect();
    for spec in &specs {
        spec.validate(args.rounds)?;
    }
    let dir_of = |spec: &SceneSpec| -> PathBuf {
        if args.count == 1 {
            args.out.clone()
        } else {
            args.out.join(format!("scene_{}", spec.seed))
        }
    };
    let written = specs
        .par_iter()
        .map(|spec| make_pair(spec, args.rounds, &pattern, &dir_of(spec), args.format))
        .collect::<Result<Vec<_>, _>>()?;
    for sample in written {
        println!("{}", sample.manifest_path().display());
    }
    Ok(())
}
