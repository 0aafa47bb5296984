use polarforge::dataset::SceneKind;
use polarforge::experiment::{complementarity, err_gap, err_vs_res, input_quality, PairedArms, SceneRates};
use polarforge::metrics::EvalReport;
use polarforge::CpfaPattern;
use serde::Serialize;
use serde_json::json;

use super::suite_config;
use crate::args::{ExperimentCommand, RoundsArgs, SuiteArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, envelope, write_csv};

#[derive(Serialize)]
struct RateRow {
    seed: u64,
    kind: SceneKind,
    size: usize,
    er_s0: f64,
    er_p: f64,
    er_theta: f64,
}

impl From<&SceneRates> for RateRow {
    fn from(s: &SceneRates) -> Self {
        RateRow {
            seed: s.seed,
            kind: s.kind,
            size: s.size,
            er_s0: s.rates.s0,
            er_p: s.rates.p,
            er_theta: s.rates.theta,
        }
    }
}

#[derive(Serialize)]
struct ArmRow {
    arm: String,
    seed: u64,
    s0_psnr_db: Option<f64>,
    s0_ssim: f64,
    p_psnr_db: Option<f64>,
    theta_mae_deg: f64,
}

fn arm_rows(result: &PairedArms) -> Vec<ArmRow> {
    let mut rows = Vec::new();
    for arm in &result.arms {
        for (seed, r) in result.scene_seeds.iter().zip(&arm.per_scene) {
            rows.push(ArmRow {
                arm: arm.name.clone(),
                seed: *seed,
                s0_psnr_db: r.s0.psnr.db,
                s0_ssim: r.s0.ssim,
                p_psnr_db: r.p.psnr.db,
                theta_mae_deg: r.theta_mae_deg,
            });
        }
    }
    rows
}

/// Differences `first - second` of the aggregate headline metrics.
fn gap(result: &PairedArms) -> serde_json::Value {
    let agg = |i: usize| -> &EvalReport { &result.arms[i].aggregate };
    let db = |r: &EvalReport| r.s0.psnr.as_db();
    json!({
        "s0_psnr_db": db(agg(0)) - db(agg(1)),
        "theta_mae_deg": agg(0).theta_mae_deg - agg(1).theta_mae_deg,
    })
}

fn paired(
    name: &str,
    args: &RoundsArgs,
    pattern: &CpfaPattern,
    f: fn(&polarforge::experiment::SuiteConfig, u32, &CpfaPattern) -> polarforge::Result<PairedArms>,
) -> CliResult<()> {
    let s = &args.suite;
    let cfg = suite_config(&s.scene, s.count, s.stage.config(args.rounds))?;
    cfg.stage.validate()?;
    for i in 0..cfg.count {
        cfg.scene(i, cfg.size).validate(args.rounds)?;
    }
    let result = f(&cfg, args.rounds, pattern)?;
    if let Some(path) = &s.csv {
        write_csv(path, &arm_rows(&result))?;
    }
    let body = json!({ "gap": gap(&result), "result": result });
    emit(&envelope(name, args, body)?, s.report.as_deref())
}

fn check_suite(s: &SuiteArgs) -> CliResult<polarforge::experiment::SuiteConfig> {
    let cfg = suite_config(&s.scene, s.count, s.stage.config(0))?;
    cfg.stage.validate()?;
    Ok(cfg)
}

pub fn run(cmd: &ExperimentCommand) -> CliResult<()> {
    let pattern = CpfaPattern::default();
    match cmd {
        ExperimentCommand::ErrGap(s) => {
            let cfg = check_suite(s)?;
            for i in 0..cfg.count {
                cfg.scene(i, cfg.size).validate(0)?;
            }
            let result = err_gap(&cfg, &pattern)?;
            if let Some(path) = &s.csv {
                write_csv(path, &result.scenes.iter().map(RateRow::from).collect::<Vec<_>>())?;
            }
            emit(&envelope("experiment err-gap", s, json!({ "result": result }))?, s.report.as_deref())
        }
        ExperimentCommand::ErrVsRes(a) => {
            let cfg = check_suite(&a.suite)?;
            if a.sizes.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::Usage("--sizes must be strictly increasing".into()));
            }
            for &size in &a.sizes {
                cfg.scene(0, size).validate(0)?;
            }
            let result = err_vs_res(&cfg, &a.sizes, &pattern)?;
            if let Some(path) = &a.suite.csv {
                write_csv(path, &result.entries.iter().map(RateRow::from).collect::<Vec<_>>())?;
            }
            emit(&envelope("experiment err-vs-res", a, json!({ "result": result }))?, a.suite.report.as_deref())
        }
        ExperimentCommand::InputQuality(a) => paired("experiment input-quality", a, &pattern, input_quality),
        ExperimentCommand::Complementarity(a) => paired("experiment complementarity", a, &pattern, complementarity),
    }
}
