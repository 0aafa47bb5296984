use std::path::{Path, PathBuf};

use polarforge::dataset::io::{load_plane, save_plane, save_stack};
use polarforge::dataset::{read_pattern, ImageFormat, SampleDir};
use polarforge::mosaic::cpfa_demosaic_bilinear;
use polarforge::polarimetry::{compute_params, compute_stokes};
use polarforge::{run_pidsr, run_sequential_baseline, Channel, ColorImage, CpfaPattern, CpfaRaw, PolarStack};
use serde::{Deserialize, Serialize};

use super::scale_tag;
use crate::args::{Method, ReconstructArgs};
use crate::error::{CliError, CliResult};
use crate::output::{emit, envelope};

pub const RECORD_FILE: &str = "reconstruction.json";

/// The machine-readable part of `reconstruction.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionRecord {
    pub method: Method,
    pub rounds: u32,
    pub format: ImageFormat,
    /// Manifest path as given on the command line.
    pub manifest: Option<PathBuf>,
    pub raw_dims: [usize; 2],
    pub outputs: Vec<OutputRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputRecord {
    pub name: String,
    pub scale: String,
    pub dims: [usize; 2],
    /// Stack and derived-plane directories, relative to the record.
    pub stack: PathBuf,
    pub derived: PathBuf,
}

impl ReconstructionRecord {
    pub fn read(dir: &Path) -> CliResult<ReconstructionRecord> {
        let path = dir.join(RECORD_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

fn load_input(args: &ReconstructArgs) -> CliResult<(CpfaRaw, Option<u32>)> {
    if let Some(m) = &args.manifest {
        let sample = SampleDir::open(m)?;
        return Ok((sample.raw()?, Some(sample.manifest.rounds)));
    }
    let path = args.raw.as_ref().expect("clap enforces --manifest or --raw");
    let pattern = match &args.pattern {
        Some(p) => read_pattern(p)?,
        None => CpfaPattern::default(),
    };
    Ok((CpfaRaw::new(load_plane(path, None)?, pattern)?, None))
}

fn resolve_rounds(args: &ReconstructArgs, from_manifest: Option<u32>) -> CliResult<u32> {
    match args.method {
        Method::Bilinear => match args.rounds {
            Some(r) if r > 0 => Err(CliError::Usage(
                "--method bilinear only demosaics; use pidsr or sequential for --rounds > 0".into(),
            )),
            _ => Ok(0),
        },
        _ => Ok(args.rounds.or(from_manifest).unwrap_or(0)),
    }
}

fn write_derived(dir: &Path, stack: &PolarStack) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let stokes = compute_stokes(stack);
    let params = compute_params(&stokes);
    let planes: [(&str, &ColorImage); 3] = [("s0", &stokes.s0), ("dop", &params.dop), ("aop", &params.aop)];
    for (name, image) in planes {
        for c in Channel::ALL {
            let file = dir.join(format!("{name}_{}.pfm", c.letter()));
            save_plane(&file, image.channel(c), ImageFormat::Pfm)?;
        }
    }
    Ok(())
}

pub fn run(args: &ReconstructArgs) -> CliResult<()> {
    let (raw, manifest_rounds) = load_input(args)?;
    let rounds = resolve_rounds(args, manifest_rounds)?;
    let config = args.stage.config(rounds);
    config.validate()?;

    let mut outputs: Vec<(&str, String, PolarStack)> = Vec::new();
    match args.method {
        Method::Pidsr => {
            let out = run_pidsr(&raw, &config)?;
            outputs.push(("demosaiced", scale_tag(0), out.demosaiced));
            if let Some(sr) = out.super_resolved {
                outputs.push(("sr", scale_tag(rounds), sr));
            }
        }
        Method::Bilinear => outputs.push(("demosaiced", scale_tag(0), cpfa_demosaic_bilinear(&raw)?)),
        Method::Sequential => {
            outputs.push(("demosaiced", scale_tag(0), cpfa_demosaic_bilinear(&raw)?));
            if rounds > 0 {
                outputs.push(("sr", scale_tag(rounds), run_sequential_baseline(&raw, rounds)?));
            }
        }
    }
    for (name, _, stack) in &outputs {
        if !stack.all_finite() {
            return Err(CliError::Numerical(format!("{name} output")));
        }
    }

    let mut records = Vec::new();
    for (name, scale, stack) in &outputs {
        let derived = Path::new("derived").join(name);
        save_stack(&args.out.join(name), stack, args.format)?;
        write_derived(&args.out.join(&derived), stack)?;
        let (h, w) = stack.dims();
        records.push(OutputRecord {
            name: name.to_string(),
            scale: scale.clone(),
            dims: [h, w],
            stack: PathBuf::from(name),
            derived,
        });
    }
    let (h, w) = raw.dims();
    let record = ReconstructionRecord {
        method: args.method,
        rounds,
        format: args.format,
        manifest: args.manifest.clone(),
        raw_dims: [h, w],
        outputs: records,
    };
    let mut body = serde_json::to_value(&record).map_err(|e| CliError::Usage(e.to_string()))?;
    body["stage"] = serde_json::to_value(config).map_err(|e| CliError::Usage(e.to_string()))?;
    let path = args.out.join(RECORD_FILE);
    emit(&envelope("reconstruct", args, body)?, Some(&path))?;
    println!("{}", path.display());
    Ok(())
}
