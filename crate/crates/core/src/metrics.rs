//! Reconstruction quality measures: PSNR, SSIM, π-periodic angular error,
//! the error rate used for the demosaicing-artifact study, and the three
//! weighted training-loss terms evaluated as plain quality scores.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarimetry::{angular_distance, compute_params, compute_stokes, PolarParams, StokesStack};
use crate::raster::{check_dims, gradient_l1, Angle, ColorImage, Plane, PolarStack};

/// Weights of the image, Stokes and polarization terms.
pub const LOSS_WEIGHTS: [f64; 3] = [1.0, 10.0, 10.0];

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// PSNR in dB against peak 1.0. Returns `f64::INFINITY` for identical inputs.
pub fn psnr(x: &ColorImage, gt: &ColorImage) -> Result<f64> {
    check_dims(x.dims(), gt.dims())?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (a, b) in x.samples().zip(gt.samples()) {
        let d = a - b;
        sum += d * d;
        n += 1;
    }
    let mse = sum / n as f64;
    Ok(if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    })
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let c = (SSIM_WINDOW / 2) as f64;
    let mut k = [0.0; SSIM_WINDOW];
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-(d * d) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.map(|v| v / s)
}

/// Separable "valid" Gaussian filtering: output is `(h-10) × (w-10)`.
fn filter_valid(p: &[f64], h: usize, w: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    let mut tmp = vec![0.0; h * ow];
    for y in 0..h {
        let row = &p[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = k.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            let mut s = 0.0;
            for (i, kv) in k.iter().enumerate() {
                s += kv * tmp[(y + i) * ow + x];
            }
            out[y * ow + x] = s;
        }
    }
    out
}

/// Mean single-scale SSIM of one plane pair over all valid window positions.
pub fn ssim_plane(x: &Plane, y: &Plane) -> Result<f64> {
    check_dims(x.dims(), y.dims())?;
    let (h, w) = x.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::TooSmall {
            height: h,
            width: w,
            min: SSIM_WINDOW,
        });
    }
    let k = gaussian_kernel();
    let (a, b) = (x.data(), y.data());
    let aa: Vec<f64> = a.iter().map(|v| v * v).collect();
    let bb: Vec<f64> = b.iter().map(|v| v * v).collect();
    let ab: Vec<f64> = a.iter().zip(b).map(|(u, v)| u * v).collect();
    let mu_a = filter_valid(a, h, w, &k);
    let mu_b = filter_valid(b, h, w, &k);
    let e_aa = filter_valid(&aa, h, w, &k);
    let e_bb = filter_valid(&bb, h, w, &k);
    let e_ab = filter_valid(&ab, h, w, &k);
    let c1 = (SSIM_K1 * 1.0).powi(2);
    let c2 = (SSIM_K2 * 1.0).powi(2);
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / mu_a.len() as f64)
}

/// SSIM averaged over the three channels.
pub fn ssim(x: &ColorImage, gt: &ColorImage) -> Result<f64> {
    check_dims(x.dims(), gt.dims())?;
    let mut s = 0.0;
    for (a, b) in x.channels().iter().zip(gt.channels()) {
        s += ssim_plane(a, b)?;
    }
    Ok(s / 3.0)
}

/// Mean π-periodic angular error in degrees.
pub fn mae_angular(theta: &ColorImage, theta_gt: &ColorImage) -> Result<f64> {
    check_dims(theta.dims(), theta_gt.dims())?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (a, b) in theta.samples().zip(theta_gt.samples()) {
        sum += angular_distance(a, b);
        n += 1;
    }
    Ok((sum / n as f64).to_degrees())
}

/// `Σ|v - v_gt| / Σ v` with channels pooled.
pub fn error_rate(v: &ColorImage, v_gt: &ColorImage) -> Result<f64> {
    check_dims(v.dims(), v_gt.dims())?;
    let mut err = 0.0;
    let mut total = 0.0;
    for (a, b) in v.samples().zip(v_gt.samples()) {
        err += (a - b).abs();
        total += a;
    }
    if total <= 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(err / total)
}

/// Error rate of an angle field normalized to [0, 1] by π, with the absolute
/// difference replaced by the π-periodic distance.
pub fn error_rate_angular(theta: &ColorImage, theta_gt: &ColorImage) -> Result<f64> {
    check_dims(theta.dims(), theta_gt.dims())?;
    let mut err = 0.0;
    let mut total = 0.0;
    for (a, b) in theta.samples().zip(theta_gt.samples()) {
        err += angular_distance(a, b) / PI;
        total += a / PI;
    }
    if total <= 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(err / total)
}

fn l1(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let mut s = 0.0;
    let mut n = 0usize;
    for (x, y) in a.samples().zip(b.samples()) {
        s += (x - y).abs();
        n += 1;
    }
    Ok(s / n as f64)
}

fn l1_angular(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let mut s = 0.0;
    let mut n = 0usize;
    for (x, y) in a.samples().zip(b.samples()) {
        s += angular_distance(x, y);
        n += 1;
    }
    Ok(s / n as f64)
}

fn grad_color(a: &ColorImage, b: &ColorImage) -> Result<f64> {
    let mut s = 0.0;
    for (x, y) in a.channels().iter().zip(b.channels()) {
        s += gradient_l1(x, y)?;
    }
    Ok(s / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossTerms {
    pub image: f64,
    pub stokes: f64,
    pub polarization: f64,
    pub total: f64,
}

impl LossTerms {
    pub fn from_parts(image: f64, stokes: f64, polarization: f64) -> Self {
        let [a, b, c] = LOSS_WEIGHTS;
        LossTerms {
            image,
            stokes,
            polarization,
            total: a * image + b * stokes + c * polarization,
        }
    }
}

/// Image, Stokes and polarization loss terms and their weighted sum.
///
/// * image: mean |(I0 + I90) - (I45 + I135)| of the prediction plus the
///   gradient loss of the four images against ground truth;
/// * stokes: gradient loss on `s0` plus mean |Δs1| and mean |Δs2|;
/// * polarization: mean |Δp| plus mean π-periodic |Δθ| (radians).
///
/// Multi-plane terms are averaged over their planes.
pub fn loss_terms(pred: &PolarStack, gt: &PolarStack) -> Result<LossTerms> {
    check_dims(pred.dims(), gt.dims())?;
    let [i1, i2, i3, i4] = pred.images();
    let sum13 = i1.zip_map(i3, |a, b| a + b)?;
    let sum24 = i2.zip_map(i4, |a, b| a + b)?;
    let identity = l1(&sum13, &sum24)?;
    let mut grad = 0.0;
    for a in Angle::ALL {
        grad += grad_color(pred.image(a), gt.image(a))?;
    }
    let image = identity + grad / 4.0;

    let sp = compute_stokes(pred);
    let sg = compute_stokes(gt);
    let stokes = grad_color(&sp.s0, &sg.s0)? + l1(&sp.s1, &sg.s1)? + l1(&sp.s2, &sg.s2)?;

    let pp = compute_params(&sp);
    let pg = compute_params(&sg);
    let polarization = l1(&pp.dop, &pg.dop)? + l1_angular(&pp.aop, &pg.aop)?;

    Ok(LossTerms::from_parts(image, stokes, polarization))
}

/// Quantity rows of an [`EvalReport`], mirroring the usual polarization table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "I0")]
    I0,
    #[serde(rename = "I45")]
    I45,
    #[serde(rename = "I90")]
    I90,
    #[serde(rename = "I135")]
    I135,
    #[serde(rename = "S0")]
    S0,
    #[serde(rename = "p")]
    Dop,
    #[serde(rename = "theta")]
    Aop,
}

/// PSNR with an explicit marker for identical inputs (serialized as `null`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsnrValue {
    pub db: Option<f64>,
    pub identical: bool,
}

impl PsnrValue {
    pub fn from_db(db: f64) -> Self {
        if db.is_infinite() {
            PsnrValue {
                db: None,
                identical: true,
            }
        } else {
            PsnrValue {
                db: Some(db),
                identical: false,
            }
        }
    }

    pub fn as_db(&self) -> f64 {
        self.db.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub psnr: PsnrValue,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub scale: String,
    pub scene_count: usize,
    #[serde(rename = "I0")]
    pub i0: ImageScore,
    #[serde(rename = "I45")]
    pub i45: ImageScore,
    #[serde(rename = "I90")]
    pub i90: ImageScore,
    #[serde(rename = "I135")]
    pub i135: ImageScore,
    #[serde(rename = "S0")]
    pub s0: ImageScore,
    pub p: ImageScore,
    /// Mean angular error of θ in degrees.
    pub theta_mae_deg: f64,
}

impl EvalReport {
    pub fn image_scores(&self) -> [(Quantity, &ImageScore); 6] {
        [
            (Quantity::I0, &self.i0),
            (Quantity::I45, &self.i45),
            (Quantity::I90, &self.i90),
            (Quantity::I135, &self.i135),
            (Quantity::S0, &self.s0),
            (Quantity::Dop, &self.p),
        ]
    }

    /// Unweighted mean of per-scene reports. PSNR stays "identical" only if every
    /// scene was identical; otherwise identical scenes are skipped in the mean.
    pub fn aggregate(reports: &[EvalReport]) -> Option<EvalReport> {
        let first = reports.first()?;
        let n = reports.len() as f64;
        let agg_score = |get: fn(&EvalReport) -> &ImageScore| {
            let finite: Vec<f64> = reports.iter().filter_map(|r| get(r).psnr.db).collect();
            let psnr = if finite.is_empty() {
                PsnrValue {
                    db: None,
                    identical: true,
                }
            } else {
                PsnrValue {
                    db: Some(finite.iter().sum::<f64>() / finite.len() as f64),
                    identical: false,
                }
            };
            ImageScore {
                psnr,
                ssim: reports.iter().map(|r| get(r).ssim).sum::<f64>() / n,
            }
        };
        Some(EvalReport {
            method: first.method.clone(),
            scale: first.scale.clone(),
            scene_count: reports.iter().map(|r| r.scene_count).sum(),
            i0: agg_score(|r| &r.i0),
            i45: agg_score(|r| &r.i45),
            i90: agg_score(|r| &r.i90),
            i135: agg_score(|r| &r.i135),
            s0: agg_score(|r| &r.s0),
            p: agg_score(|r| &r.p),
            theta_mae_deg: reports.iter().map(|r| r.theta_mae_deg).sum::<f64>() / n,
        })
    }
}

fn score(x: &ColorImage, gt: &ColorImage) -> Result<ImageScore> {
    Ok(ImageScore {
        psnr: PsnrValue::from_db(psnr(x, gt)?),
        ssim: ssim(x, gt)?,
    })
}

/// Stokes parameters and polarization parameters of a stack, computed once.
pub struct Derived {
    pub stokes: StokesStack,
    pub params: PolarParams,
}

impl Derived {
    pub fn of(stack: &PolarStack) -> Self {
        let stokes = compute_stokes(stack);
        let params = compute_params(&stokes);
        Derived { stokes, params }
    }
}

/// Scores one reconstruction against ground truth.
///
/// DoP and AoP are compared per color channel and averaged.
pub fn evaluate(pred: &PolarStack, gt: &PolarStack, scale: &str, method: &str) -> Result<EvalReport> {
    check_dims(pred.dims(), gt.dims())?;
    let dp = Derived::of(pred);
    let dg = Derived::of(gt);
    Ok(EvalReport {
        method: method.to_string(),
        scale: scale.to_string(),
        scene_count: 1,
        i0: score(pred.image(Angle::A0), gt.image(Angle::A0))?,
        i45: score(pred.image(Angle::A45), gt.image(Angle::A45))?,
        i90: score(pred.image(Angle::A90), gt.image(Angle::A90))?,
        i135: score(pred.image(Angle::A135), gt.image(Angle::A135))?,
        s0: score(&dp.stokes.s0, &dg.stokes.s0)?,
        p: score(&dp.params.dop, &dg.params.dop)?,
        theta_mae_deg: mae_angular(&dp.params.aop, &dg.params.aop)?,
    })
}
