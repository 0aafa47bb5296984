//! Two-stage recurrent joint demosaicing and super-resolution.
//!
//! A raw mosaic is first split into four half-resolution color images. Each
//! round then runs a coherence stage (`f`, same resolution) followed by an
//! enhancement stage (`g`, doubles resolution). Round 1 restores the sensor
//! resolution; every further round doubles it again.
//!
//! The split leaves each angle's samples a quarter of a half-resolution pixel
//! away from the common pixel center, in a direction set by the pattern. Before
//! the first coherence stage the four images are translated back onto a common
//! grid, otherwise every intensity gradient leaks into `s1`/`s2`.
//!
//! Both stages work in the Stokes domain. `f` median-filters the polarized
//! components `s1`/`s2`, which removes the checkerboard left by splitting the
//! mosaic, and `g` upsamples `(s0, s1, s2)` rather than the four intensity
//! images. Everything downstream of a Stokes synthesis satisfies
//! `I0 + I90 = I45 + I135` by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mosaic::{convert_raw_to_halfres, cpfa_demosaic_bilinear, CpfaPattern, CpfaRaw};
use crate::polarimetry::{
    clamp_stokes_feasible, compute_stokes, consistency_project, synthesize_from_stokes, StokesStack,
};
use crate::raster::{median_filter, resample_bilinear, shift_bilinear, upsample_2x, Angle, PolarStack};

/// Knobs of the deterministic stage implementations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    /// Median window radius applied to `s1`/`s2` in stage f (0, 1 or 2).
    pub f_median_radius: usize,
    /// Also median-filter `s0` in stage f.
    pub f_denoise: bool,
    /// Guided high-frequency boost of `s0` in stage g.
    pub g_sharpen: bool,
    /// Super-resolution rounds after the demosaicing round; output scale is `2^rounds`.
    pub rounds: u32,
}

impl Default for StageConfig {
    fn default() -> Self {
        StageConfig {
            f_median_radius: 1,
            f_denoise: false,
            g_sharpen: false,
            rounds: 0,
        }
    }
}

impl StageConfig {
    pub fn with_rounds(rounds: u32) -> Self {
        StageConfig {
            rounds,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.f_median_radius > 2 {
            return Err(Error::InvalidConfig(format!(
                "f_median_radius must be 0, 1 or 2, got {}",
                self.f_median_radius
            )));
        }
        if self.rounds > 6 {
            return Err(Error::InvalidConfig(format!(
                "rounds must be at most 6, got {}",
                self.rounds
            )));
        }
        Ok(())
    }
}

/// Result of [`run_pidsr`].
#[derive(Debug, Clone)]
pub struct PidsrOutput {
    /// Full-resolution reconstruction (same size as the raw).
    pub demosaiced: PolarStack,
    /// `2^rounds` reconstruction; `None` when `rounds == 0`.
    pub super_resolved: Option<PolarStack>,
    /// Stage-f outputs, one per round.
    pub intermediates: Vec<PolarStack>,
}

/// Strength of the optional stage-g detail boost.
const SHARPEN_GAIN: f64 = 0.5;

/// Coherence stage: median-filter the polarized Stokes components, resynthesize,
/// project onto the polarization identity and clamp to [0, 1].
pub fn stage_f(input: &PolarStack, config: &StageConfig) -> PolarStack {
    let stokes = compute_stokes(input);
    let r = config.f_median_radius;
    let s0 = if config.f_denoise {
        stokes.s0.map_planes(|p| median_filter(p, r))
    } else {
        stokes.s0
    };
    let filtered = StokesStack {
        s0,
        s1: stokes.s1.map_planes(|p| median_filter(p, r)),
        s2: stokes.s2.map_planes(|p| median_filter(p, r)),
    };
    finish(&filtered)
}

/// Enhancement stage: 2× upsampling carried out on the Stokes parameters.
///
/// Written in residual form the result is `R_int + Δ` where `R_int` is the
/// per-image bilinear upsample; because bilinear resampling is linear the two
/// only differ where the feasibility clamp or the optional sharpening acts.
pub fn stage_g(input: &PolarStack, config: &StageConfig) -> PolarStack {
    let stokes = compute_stokes(input);
    let mut up = stokes
        .try_map_planes(upsample_2x)
        .expect("stack planes are non-empty");
    if config.g_sharpen {
        up = sharpen_intensity(&up);
    }
    finish(&up)
}

fn finish(stokes: &StokesStack) -> PolarStack {
    let stack = synthesize_from_stokes(&clamp_stokes_feasible(stokes));
    consistency_project(&stack).clamp01()
}

/// Unsharp mask on `s0` with `s1`/`s2` rescaled alongside, so that DoP and
/// AoP are untouched.
fn sharpen_intensity(stokes: &StokesStack) -> StokesStack {
    let boosted = stokes.s0.map_planes(|p| {
        let blurred = box3(p);
        p.zip_map(&blurred, |v, b| (v + SHARPEN_GAIN * (v - b)).max(0.0))
            .expect("same dims")
    });
    let ratio = boosted
        .zip_map(&stokes.s0, |n, o| if o > 1e-12 { n / o } else { 1.0 })
        .expect("same dims");
    StokesStack {
        s1: stokes.s1.zip_map(&ratio, |s, r| s * r).expect("same dims"),
        s2: stokes.s2.zip_map(&ratio, |s, r| s * r).expect("same dims"),
        s0: boosted,
    }
}

fn box3(p: &crate::raster::Plane) -> crate::raster::Plane {
    let (h, w) = p.dims();
    crate::raster::Plane::from_fn(h, w, |y, x| {
        let mut s = 0.0;
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                s += p.get_clamped(y as isize + dy, x as isize + dx);
            }
        }
        s / 9.0
    })
}

/// Translates each angle image of a half-resolution split onto the shared
/// pixel centers. An angle sampled at sensor offset `p` in its 2×2 block sits
/// `(p - 0.5) / 2` half-resolution pixels from the center.
pub fn align_angle_grids(half: &PolarStack, pattern: &CpfaPattern) -> PolarStack {
    let mut out = half.clone();
    for angle in Angle::ALL {
        let (py, px) = pattern.angle_phase(angle);
        let dy = (0.5 - py as f64) / 2.0;
        let dx = (0.5 - px as f64) / 2.0;
        *out.image_mut(angle) = half.image(angle).map_planes(|p| shift_bilinear(p, dy, dx));
    }
    out
}

/// One recurrent round: `g(f(x))`, doubling the resolution.
pub fn run_round(input: &PolarStack, config: &StageConfig) -> (PolarStack, PolarStack) {
    let t = stage_f(input, config);
    let out = stage_g(&t, config);
    (t, out)
}

/// Joint demosaicing and super-resolution from a raw mosaic.
pub fn run_pidsr(raw: &CpfaRaw, config: &StageConfig) -> Result<PidsrOutput> {
    config.validate()?;
    let half = align_angle_grids(&convert_raw_to_halfres(raw)?, raw.pattern());
    let (t, demosaiced) = run_round(&half, config);
    let mut intermediates = vec![t];
    let mut current = demosaiced.clone();
    for _ in 0..config.rounds {
        let (t, next) = run_round(&current, config);
        intermediates.push(t);
        current = next;
    }
    let super_resolved = (config.rounds > 0).then_some(current);
    Ok(PidsrOutput {
        demosaiced,
        super_resolved,
        intermediates,
    })
}

/// Applies `rounds` recurrent rounds to an already demosaiced stack.
pub fn super_resolve(stack: &PolarStack, config: &StageConfig, rounds: u32) -> PolarStack {
    let mut current = stack.clone();
    for _ in 0..rounds {
        current = run_round(&current, config).1;
    }
    current
}

/// Demosaic-then-upsample baseline: the bilinear CPFA demosaicer followed by an
/// independent bilinear resize of every plane by `2^rounds`.
pub fn run_sequential_baseline(raw: &CpfaRaw, rounds: u32) -> Result<PolarStack> {
    let demosaiced = cpfa_demosaic_bilinear(raw)?;
    if rounds == 0 {
        return Ok(demosaiced);
    }
    let k = 1usize << rounds;
    let (h, w) = demosaiced.dims();
    demosaiced.try_map_planes(|p| resample_bilinear(p, h * k, w * k))
}
