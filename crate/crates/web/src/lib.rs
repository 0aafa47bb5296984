//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Everything is computed from a scene spec, so the page only passes a few
//! numbers in and gets RGBA buffers or plain number arrays back.

pub mod colormap;

use polarforge::dataset::{make_sample, SceneKind, SceneSpec};
use polarforge::experiment::{err_vs_res, SuiteConfig, ERR_VS_RES_SIZES};
use polarforge::metrics::mae_angular;
use polarforge::mosaic::cpfa_demosaic_bilinear;
use polarforge::polarimetry::{angular_distance, compute_params, compute_stokes, PolarParams, StokesStack};
use polarforge::{run_pidsr, Channel, CpfaPattern, PolarStack, StageConfig};
use wasm_bindgen::prelude::*;

use colormap::{cyclic, flatten, heat, rgb, sequential};

/// Angular error that saturates the error colormap, in degrees.
const ERROR_SPAN_DEG: f64 = 30.0;

fn spec(kind: &str, seed: u32, size: u32, noise: f64) -> Result<SceneSpec, String> {
    let kind: SceneKind = kind.parse().map_err(|e| format!("{e}"))?;
    let mut s = SceneSpec::new(seed as u64, size as usize, kind);
    s.noise_sigma = noise;
    s.validate(0).map_err(|e| e.to_string())?;
    Ok(s)
}

struct Derived {
    stokes: StokesStack,
    params: PolarParams,
}

fn derive(stack: &PolarStack) -> Derived {
    let stokes = compute_stokes(stack);
    let params = compute_params(&stokes);
    Derived { stokes, params }
}

fn render(d: &Derived, quantity: &str) -> Result<Vec<u8>, String> {
    let [r, g, b] = Channel::ALL.map(|c| d.stokes.s0.channel(c).data());
    let dop = d.params.dop.channel(Channel::G).data();
    let aop = d.params.aop.channel(Channel::G).data();
    Ok(match quantity {
        // s0 / 2 is the unpolarized intensity, already in [0, 1]
        "s0" => flatten((0..r.len()).map(|i| rgb(r[i] / 2.0, g[i] / 2.0, b[i] / 2.0))),
        "dop" => flatten(dop.iter().map(|&p| sequential(p))),
        "aop" => flatten(aop.iter().map(|&t| cyclic(t))),
        other => return Err(format!("unknown quantity {other:?}; expected s0, dop or aop")),
    })
}

/// RGBA rendering (`size`×`size`) of a scene's ground-truth S0, DoP or AoP.
pub fn scene_rgba(kind: &str, seed: u32, size: u32, quantity: &str) -> Result<Vec<u8>, String> {
    let s = make_sample(&spec(kind, seed, size, 0.0)?, 0, &CpfaPattern::default()).map_err(|e| e.to_string())?;
    render(&derive(&s.gt_hr), quantity)
}

/// Joint and bilinear demosaicing of one simulated raw.
pub struct Comparison {
    pub size: usize,
    pub pidsr_mae_deg: f64,
    pub bilinear_mae_deg: f64,
    pub pidsr_error: Vec<u8>,
    pub bilinear_error: Vec<u8>,
    pub pidsr_aop: Vec<u8>,
    pub bilinear_aop: Vec<u8>,
}

fn error_map(pred: &Derived, gt: &Derived) -> Vec<u8> {
    let a = pred.params.aop.channel(Channel::G).data();
    let b = gt.params.aop.channel(Channel::G).data();
    flatten(
        a.iter()
            .zip(b)
            .map(|(&x, &y)| heat(angular_distance(x, y).to_degrees() / ERROR_SPAN_DEG)),
    )
}

pub fn compare(kind: &str, seed: u32, size: u32, noise: f64) -> Result<Comparison, String> {
    let s = make_sample(&spec(kind, seed, size, noise)?, 0, &CpfaPattern::default()).map_err(|e| e.to_string())?;
    let joint = run_pidsr(&s.raw, &StageConfig::default()).map_err(|e| e.to_string())?.demosaiced;
    let bilinear = cpfa_demosaic_bilinear(&s.raw).map_err(|e| e.to_string())?;
    let (gt, j, b) = (derive(&s.gt_hr), derive(&joint), derive(&bilinear));
    let mae = |d: &Derived| mae_angular(&d.params.aop, &gt.params.aop).map_err(|e| e.to_string());
    Ok(Comparison {
        size: size as usize,
        pidsr_mae_deg: mae(&j)?,
        bilinear_mae_deg: mae(&b)?,
        pidsr_error: error_map(&j, &gt),
        bilinear_error: error_map(&b, &gt),
        pidsr_aop: render(&j, "aop")?,
        bilinear_aop: render(&b, "aop")?,
    })
}

/// Flat `[size, er_s0, er_p, er_theta]` rows of the bilinear demosaicing
/// error of one scene rendered at each sweep size.
pub fn resolution_sweep(kind: &str, seed: u32) -> Result<Vec<f64>, String> {
    let kind: SceneKind = kind.parse().map_err(|e| format!("{e}"))?;
    let cfg = SuiteConfig {
        seed: seed as u64,
        kind: Some(kind),
        ..SuiteConfig::default()
    };
    let r = err_vs_res(&cfg, &ERR_VS_RES_SIZES, &CpfaPattern::default()).map_err(|e| e.to_string())?;
    Ok(r.entries
        .iter()
        .flat_map(|e| [e.size as f64, e.rates.s0, e.rates.p, e.rates.theta])
        .collect())
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// RGBA bytes of a scene's S0 (color), DoP or AoP (green channel).
#[wasm_bindgen(js_name = renderScene)]
pub fn render_scene(kind: &str, seed: u32, size: u32, quantity: &str) -> Result<Vec<u8>, JsError> {
    scene_rgba(kind, seed, size, quantity).map_err(js)
}

#[wasm_bindgen(js_name = errorVsResolution)]
pub fn error_vs_resolution(kind: &str, seed: u32) -> Result<Vec<f64>, JsError> {
    resolution_sweep(kind, seed).map_err(js)
}

#[wasm_bindgen(js_name = ReconstructionComparison)]
pub struct JsComparison(Comparison);

#[wasm_bindgen(js_class = ReconstructionComparison)]
impl JsComparison {
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> u32 {
        self.0.size as u32
    }

    #[wasm_bindgen(getter, js_name = pidsrMaeDeg)]
    pub fn pidsr_mae_deg(&self) -> f64 {
        self.0.pidsr_mae_deg
    }

    #[wasm_bindgen(getter, js_name = bilinearMaeDeg)]
    pub fn bilinear_mae_deg(&self) -> f64 {
        self.0.bilinear_mae_deg
    }

    /// `method` is `pidsr` or `bilinear`; `view` is `error` or `aop`.
    pub fn rgba(&self, method: &str, view: &str) -> Result<Vec<u8>, JsError> {
        let c = &self.0;
        match (method, view) {
            ("pidsr", "error") => Ok(c.pidsr_error.clone()),
            ("pidsr", "aop") => Ok(c.pidsr_aop.clone()),
            ("bilinear", "error") => Ok(c.bilinear_error.clone()),
            ("bilinear", "aop") => Ok(c.bilinear_aop.clone()),
            _ => Err(JsError::new(&format!("no view {method}/{view}"))),
        }
    }
}

/// Demosaics one simulated raw with the joint pipeline and with bilinear
/// interpolation and scores both AoP maps against the truth.
#[wasm_bindgen(js_name = compareReconstruction)]
pub fn compare_reconstruction(kind: &str, seed: u32, size: u32, noise: f64) -> Result<JsComparison, JsError> {
    compare(kind, seed, size, noise).map(JsComparison).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_buffers_have_rgba_size() {
        for q in ["s0", "dop", "aop"] {
            assert_eq!(scene_rgba("blobs", 3, 32, q).unwrap().len(), 32 * 32 * 4);
        }
        assert!(scene_rgba("blobs", 3, 32, "s3").is_err());
        assert!(scene_rgba("clouds", 3, 32, "s0").is_err());
        assert!(scene_rgba("blobs", 3, 30, "s0").is_err());
    }

    #[test]
    fn comparison_scores_both_methods() {
        let c = compare("gradient", 1, 32, 0.0).unwrap();
        assert!(c.pidsr_mae_deg.is_finite() && c.bilinear_mae_deg.is_finite());
        assert_eq!(c.pidsr_error.len(), 32 * 32 * 4);
        assert_eq!(c.bilinear_aop.len(), 32 * 32 * 4);
    }

    #[test]
    fn sweep_rows() {
        let rows = resolution_sweep("texture", 0).unwrap();
        assert_eq!(rows.len(), 4 * ERR_VS_RES_SIZES.len());
        assert_eq!(rows[0], 64.0);
        assert!(rows[3] > rows[rows.len() - 1]);
    }
}
