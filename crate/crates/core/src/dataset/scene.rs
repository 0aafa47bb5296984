//! Procedural polarized scenes.
//!
//! Fields are continuous functions of normalized image coordinates sampled at
//! pixel centers, so the same spec rendered at two resolutions describes the
//! same scene. Randomness comes from [`super::rng`] keyed by the seed and, for
//! lattice noise, by integer lattice coordinates.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rng::{uniform, Draws};
use crate::error::{Error, Result};
use crate::polarimetry::{wrap_pi, PolarParams};
use crate::raster::{Channel, ColorImage, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    Gradient,
    Blobs,
    Texture,
    Piecewise,
}

impl SceneKind {
    pub const ALL: [SceneKind; 4] = [
        SceneKind::Gradient,
        SceneKind::Blobs,
        SceneKind::Texture,
        SceneKind::Piecewise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Gradient => "gradient",
            SceneKind::Blobs => "blobs",
            SceneKind::Texture => "texture",
            SceneKind::Piecewise => "piecewise",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SceneKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown scene kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub kind: SceneKind,
    pub p_range: [f64; 2],
    pub noise_sigma: f64,
}

impl SceneSpec {
    pub fn new(seed: u64, size: usize, kind: SceneKind) -> Self {
        SceneSpec {
            seed,
            height: size,
            width: size,
            kind,
            p_range: [0.05, 0.6],
            noise_sigma: 0.0,
        }
    }

    /// Checks value ranges and that dims split into `2^rounds` copies of whole CPFA tiles.
    pub fn validate(&self, rounds: u32) -> Result<()> {
        let [lo, hi] = self.p_range;
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidConfig(format!(
                "p_range must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]"
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        let unit = 4usize << rounds;
        if self.height == 0 || self.width == 0 || !self.height.is_multiple_of(unit) || !self.width.is_multiple_of(unit) {
            return Err(Error::NotDivisible {
                height: self.height,
                width: self.width,
                factor: unit,
            });
        }
        Ok(())
    }
}

/// Ground-truth total intensity and polarization fields of a scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFields {
    pub s0: ColorImage,
    pub params: PolarParams,
}

/// Point sample of the three scalar fields, before per-channel tinting.
#[derive(Clone, Copy)]
struct Sample {
    intensity: f64,
    dop: f64,
    aop: f64,
}

trait Field {
    fn at(&self, u: f64, v: f64) -> Sample;
}

/// Renders the spec's scene at its own dims.
pub fn synth_scene(spec: &SceneSpec) -> Result<SceneFields> {
    spec.validate(0)?;
    let mut draws = Draws::new(spec.seed, 0);
    let tint = [draws.range(0.7, 1.0), draws.range(0.75, 1.0), draws.range(0.55, 0.95)];
    let dop_gain = [draws.range(0.85, 1.0), 1.0, draws.range(0.85, 1.0)];
    let [plo, phi] = spec.p_range;
    let field: Box<dyn Field> = match spec.kind {
        SceneKind::Gradient => Box::new(GradientField::new(&mut draws)),
        SceneKind::Blobs => Box::new(BlobField::new(&mut draws)),
        SceneKind::Texture => Box::new(TextureField::new(spec.seed)),
        SceneKind::Piecewise => Box::new(PiecewiseField::new(&mut draws)),
    };
    let (h, w) = (spec.height, spec.width);
    let mut samples = Vec::with_capacity(h * w);
    for y in 0..h {
        let v = (y as f64 + 0.5) / h as f64;
        for x in 0..w {
            let u = (x as f64 + 0.5) / w as f64;
            samples.push(field.at(u, v));
        }
    }
    let plane = |f: &dyn Fn(&Sample) -> f64| {
        Plane::new(h, w, samples.iter().map(f).collect()).expect("sized")
    };
    let s0 = ColorImage::new(Channel::ALL.map(|c| {
        let t = tint[c.index()];
        plane(&|s| (0.08 + 0.84 * s.intensity.clamp(0.0, 1.0)) * t)
    }))?;
    let dop = ColorImage::new(Channel::ALL.map(|c| {
        let g = dop_gain[c.index()];
        plane(&|s| plo + (phi - plo) * (s.dop.clamp(0.0, 1.0) * g))
    }))?;
    let aop_plane = plane(&|s| wrap_pi(s.aop));
    let aop = ColorImage::new([aop_plane.clone(), aop_plane.clone(), aop_plane])?;
    Ok(SceneFields {
        s0,
        params: PolarParams::new(dop, aop)?,
    })
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

struct Ramp {
    cos: f64,
    sin: f64,
}

impl Ramp {
    fn new(draws: &mut Draws) -> Self {
        let phi = draws.range(0.0, 2.0 * PI);
        Ramp {
            cos: phi.cos(),
            sin: phi.sin(),
        }
    }

    /// Linear in (u, v), spanning roughly [0, 1] over the image.
    fn at(&self, u: f64, v: f64) -> f64 {
        let span = self.cos.abs() + self.sin.abs();
        0.5 + ((u - 0.5) * self.cos + (v - 0.5) * self.sin) / span
    }
}

struct GradientField {
    intensity: Ramp,
    dop: Ramp,
    aop: Ramp,
    aop_offset: f64,
}

impl GradientField {
    fn new(draws: &mut Draws) -> Self {
        GradientField {
            intensity: Ramp::new(draws),
            dop: Ramp::new(draws),
            aop: Ramp::new(draws),
            aop_offset: draws.range(0.0, PI),
        }
    }
}

impl Field for GradientField {
    fn at(&self, u: f64, v: f64) -> Sample {
        Sample {
            intensity: self.intensity.at(u, v),
            dop: self.dop.at(u, v),
            // sweeps 1.6π, so the wrapped field crosses the 0/π seam
            aop: self.aop_offset + 1.6 * PI * self.aop.at(u, v),
        }
    }
}

struct Blob {
    cu: f64,
    cv: f64,
    inv_two_r2: f64,
    amp: f64,
}

impl Blob {
    fn new(draws: &mut Draws, r_lo: f64, r_hi: f64, amp_lo: f64, amp_hi: f64) -> Self {
        let r = draws.range(r_lo, r_hi);
        Blob {
            cu: draws.draw(),
            cv: draws.draw(),
            inv_two_r2: 1.0 / (2.0 * r * r),
            amp: draws.range(amp_lo, amp_hi),
        }
    }

    fn at(&self, u: f64, v: f64) -> f64 {
        let d2 = (u - self.cu).powi(2) + (v - self.cv).powi(2);
        self.amp * (-d2 * self.inv_two_r2).exp()
    }
}

struct BlobField {
    intensity: Vec<Blob>,
    dop: Vec<Blob>,
    aop: Vec<Blob>,
    aop_ramp: Ramp,
    aop_offset: f64,
}

impl BlobField {
    fn new(draws: &mut Draws) -> Self {
        let mut many = |n: usize, lo, hi, alo, ahi| (0..n).map(|_| Blob::new(draws, lo, hi, alo, ahi)).collect::<Vec<_>>();
        let intensity = many(7, 0.05, 0.2, -0.6, 0.9);
        let dop = many(5, 0.08, 0.25, 0.3, 1.0);
        let aop = many(4, 0.08, 0.25, -1.2 * PI, 1.2 * PI);
        BlobField {
            intensity,
            dop,
            aop,
            aop_ramp: Ramp::new(draws),
            aop_offset: draws.range(0.0, PI),
        }
    }
}

impl Field for BlobField {
    fn at(&self, u: f64, v: f64) -> Sample {
        let i: f64 = self.intensity.iter().map(|b| b.at(u, v)).sum();
        let p: f64 = self.dop.iter().map(|b| b.at(u, v)).sum();
        let a: f64 = self.aop.iter().map(|b| b.at(u, v)).sum();
        Sample {
            intensity: 0.35 + 0.5 * i.tanh(),
            dop: 1.0 - (-p).exp(),
            aop: self.aop_offset + a + 1.2 * PI * self.aop_ramp.at(u, v),
        }
    }
}

/// Smoothly interpolated value noise over an integer lattice.
struct ValueNoise {
    seed: u64,
    stream: u64,
    cells: f64,
}

impl ValueNoise {
    fn lattice(&self, ix: i64, iy: i64) -> f64 {
        uniform(self.seed, self.stream, ix as u64, iy as u64)
    }

    fn at(&self, u: f64, v: f64) -> f64 {
        let (fu, fv) = (u * self.cells, v * self.cells);
        let (iu, iv) = (fu.floor(), fv.floor());
        let (tu, tv) = (smoothstep(fu - iu), smoothstep(fv - iv));
        let (ix, iy) = (iu as i64, iv as i64);
        let top = self.lattice(ix, iy) * (1.0 - tu) + self.lattice(ix + 1, iy) * tu;
        let bottom = self.lattice(ix, iy + 1) * (1.0 - tu) + self.lattice(ix + 1, iy + 1) * tu;
        top * (1.0 - tv) + bottom * tv
    }
}

struct Fractal {
    octaves: Vec<(ValueNoise, f64)>,
}

impl Fractal {
    fn new(seed: u64, stream: u64, base_cells: f64, count: usize) -> Self {
        let mut amp = 1.0;
        let mut total = 0.0;
        let mut octaves = Vec::new();
        for k in 0..count {
            octaves.push((
                ValueNoise {
                    seed,
                    stream: stream * 16 + k as u64,
                    cells: base_cells * f64::from(1u32 << k),
                },
                amp,
            ));
            total += amp;
            amp *= 0.5;
        }
        for o in &mut octaves {
            o.1 /= total;
        }
        Fractal { octaves }
    }

    fn at(&self, u: f64, v: f64) -> f64 {
        self.octaves.iter().map(|(n, a)| a * n.at(u, v)).sum()
    }
}

struct TextureField {
    intensity: Fractal,
    dop: Fractal,
    aop: Fractal,
}

impl TextureField {
    fn new(seed: u64) -> Self {
        TextureField {
            intensity: Fractal::new(seed, 1, 3.0, 3),
            dop: Fractal::new(seed, 2, 2.0, 3),
            aop: Fractal::new(seed, 3, 2.0, 3),
        }
    }
}

impl Field for TextureField {
    fn at(&self, u: f64, v: f64) -> Sample {
        Sample {
            intensity: self.intensity.at(u, v),
            dop: self.dop.at(u, v),
            aop: 2.5 * PI * self.aop.at(u, v),
        }
    }
}

struct Region {
    cu: f64,
    cv: f64,
    intensity: f64,
    dop: f64,
    aop: f64,
}

/// Voronoi cells with constant values, blended over a narrow band at the
/// boundaries. Angles are blended as doubled-angle vectors.
struct PiecewiseField {
    regions: Vec<Region>,
}

const PIECEWISE_EDGE: f64 = 0.02;

impl PiecewiseField {
    fn new(draws: &mut Draws) -> Self {
        let regions = (0..7)
            .map(|_| Region {
                cu: draws.draw(),
                cv: draws.draw(),
                intensity: draws.range(0.1, 0.95),
                dop: draws.range(0.0, 1.0),
                aop: draws.range(0.0, PI),
            })
            .collect();
        PiecewiseField { regions }
    }
}

impl Field for PiecewiseField {
    fn at(&self, u: f64, v: f64) -> Sample {
        let d: Vec<f64> = self
            .regions
            .iter()
            .map(|r| ((u - r.cu).powi(2) + (v - r.cv).powi(2)).sqrt())
            .collect();
        let nearest = d.iter().copied().fold(f64::INFINITY, f64::min);
        let (mut wsum, mut i, mut p, mut c, mut s) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (r, &dk) in self.regions.iter().zip(&d) {
            let wgt = 1.0 - smoothstep((dk - nearest) / PIECEWISE_EDGE);
            if wgt <= 0.0 {
                continue;
            }
            wsum += wgt;
            i += wgt * r.intensity;
            p += wgt * r.dop;
            c += wgt * (2.0 * r.aop).cos();
            s += wgt * (2.0 * r.aop).sin();
        }
        Sample {
            intensity: i / wsum,
            dop: p / wsum,
            aop: 0.5 * s.atan2(c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        for kind in SceneKind::ALL {
            let spec = SceneSpec::new(11, 32, kind);
            let a = synth_scene(&spec).unwrap();
            let b = synth_scene(&spec).unwrap();
            assert_eq!(a, b);
            assert!(a.params.aop.samples().all(|t| (0.0..PI).contains(&t)));
            assert!(a.params.dop.samples().all(|p| (0.05..=0.6).contains(&p)));
            assert!(a.s0.samples().all(|s| (0.0..=1.0).contains(&s)));
        }
    }

    #[test]
    fn constant_dop_when_range_collapses() {
        let mut spec = SceneSpec::new(3, 16, SceneKind::Gradient);
        spec.p_range = [0.4, 0.4];
        let f = synth_scene(&spec).unwrap();
        assert!(f.params.dop.samples().all(|p| p == 0.4));
    }

    #[test]
    fn aop_field_crosses_the_seam() {
        for kind in SceneKind::ALL {
            let f = synth_scene(&SceneSpec::new(5, 64, kind)).unwrap();
            let aop = f.params.aop.channel(Channel::R);
            let mut crossings = 0;
            for y in 0..64 {
                for x in 0..63 {
                    if (aop.get(y, x) - aop.get(y, x + 1)).abs() > PI / 2.0 {
                        crossings += 1;
                    }
                }
            }
            assert!(crossings > 0, "{kind} has no wrap crossing");
        }
    }

    #[test]
    fn validation() {
        let spec = SceneSpec::new(0, 130, SceneKind::Blobs);
        assert!(spec.validate(0).is_err());
        let spec = SceneSpec::new(0, 128, SceneKind::Blobs);
        assert!(spec.validate(5).is_ok());
        assert!(spec.validate(6).is_err());
        let mut bad = spec.clone();
        bad.p_range = [0.5, 0.2];
        assert!(bad.validate(0).is_err());
        assert_eq!("texture".parse::<SceneKind>().unwrap(), SceneKind::Texture);
        assert!("fog".parse::<SceneKind>().is_err());
    }
}
