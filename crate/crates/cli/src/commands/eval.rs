use std::path::{Path, PathBuf};

use polarforge::dataset::{load_external_dir, load_stack, SampleDir};
use polarforge::metrics::{evaluate, EvalReport};
use polarforge::PolarStack;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::scale_tag;
use super::reconstruct::{ReconstructionRecord, RECORD_FILE};
use crate::args::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::output::{emit, envelope};

#[derive(Debug, Serialize)]
struct SceneEntry {
    pred: PathBuf,
    manifest: PathBuf,
    seed: u64,
    report: EvalReport,
}

struct Prediction {
    stack: PolarStack,
    scale: Option<String>,
    method: String,
    manifest: PathBuf,
}

fn mismatch(pred: &Path, pred_scale: &str, gt_scale: &str) -> CliError {
    CliError::Usage(format!(
        "scale mismatch for {}: prediction is {pred_scale}, ground truth is {gt_scale}",
        pred.display()
    ))
}

fn load_prediction(dir: &Path, args: &EvalArgs) -> CliResult<Prediction> {
    if !dir.join(RECORD_FILE).exists() {
        let manifest = args.manifest.clone().ok_or_else(|| {
            CliError::Usage(format!("{} has no {RECORD_FILE}; pass --manifest", dir.display()))
        })?;
        return Ok(Prediction {
            stack: load_external_dir(dir)?,
            scale: args.scale.clone(),
            method: "external".into(),
            manifest,
        });
    }
    let record = ReconstructionRecord::read(dir)?;
    let output = match &args.scale {
        Some(s) => record.outputs.iter().find(|o| &o.scale == s).ok_or_else(|| {
            let have: Vec<&str> = record.outputs.iter().map(|o| o.scale.as_str()).collect();
            CliError::Usage(format!(
                "scale mismatch for {}: requested {s}, reconstruction has {}",
                dir.display(),
                have.join(", ")
            ))
        })?,
        None => record
            .outputs
            .last()
            .ok_or_else(|| CliError::Usage(format!("{}: no outputs recorded", dir.display())))?,
    };
    let manifest = args
        .manifest
        .clone()
        .or(record.manifest.clone())
        .ok_or_else(|| CliError::Usage(format!("{}: no manifest recorded; pass --manifest", dir.display())))?;
    let [h, w] = output.dims;
    Ok(Prediction {
        stack: load_stack(&dir.join(&output.stack), record.format, Some((h, w)))?,
        scale: Some(output.scale.clone()),
        method: serde_json::to_value(record.method)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        manifest,
    })
}

fn score(dir: &Path, args: &EvalArgs) -> CliResult<SceneEntry> {
    let pred = load_prediction(dir, args)?;
    let sample = SampleDir::open(&pred.manifest)?;
    let m = &sample.manifest;
    let hr_scale = scale_tag(m.rounds);
    let dims = pred.stack.dims();
    // bare stack directories declare their scale through their dims
    let scale = match pred.scale {
        Some(s) => s,
        None if dims == (m.lr_dims[0], m.lr_dims[1]) => scale_tag(0),
        None if dims == (m.hr_dims[0], m.hr_dims[1]) => hr_scale.clone(),
        None => {
            let found = format!("{}x{} px", dims.0, dims.1);
            return Err(mismatch(dir, &found, &format!("1x or {hr_scale}")));
        }
    };
    let gt = if scale == scale_tag(0) {
        sample.gt_lr()?
    } else if scale == hr_scale {
        sample.gt_hr()?
    } else {
        return Err(mismatch(dir, &scale, &format!("1x or {hr_scale}")));
    };
    if gt.dims() != dims {
        let found = format!("{scale} ({}x{} px)", dims.0, dims.1);
        let want = format!("{scale} ({}x{} px)", gt.dims().0, gt.dims().1);
        return Err(mismatch(dir, &found, &want));
    }
    Ok(SceneEntry {
        pred: dir.to_path_buf(),
        manifest: pred.manifest,
        seed: m.scene.seed,
        report: evaluate(&pred.stack, &gt, &scale, &pred.method)?,
    })
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    if args.manifest.is_some() && args.pred.len() > 1 {
        return Err(CliError::Usage("--manifest applies to a single --pred".into()));
    }
    let scenes = args
        .pred
        .par_iter()
        .map(|dir| score(dir, args))
        .collect::<CliResult<Vec<_>>>()?;
    let first = &scenes[0].report.scale;
    if let Some(other) = scenes.iter().find(|s| &s.report.scale != first) {
        return Err(mismatch(&other.pred, &other.report.scale, first));
    }
    let reports: Vec<EvalReport> = scenes.iter().map(|s| s.report.clone()).collect();
    let aggregate = EvalReport::aggregate(&reports).expect("at least one --pred");
    let body = json!({ "scale": first, "scenes": scenes, "aggregate": aggregate });
    emit(&envelope("eval", args, body)?, args.report.as_deref())
}
