//! Linear Stokes parameters, degree and angle of polarization.
//!
//! Sign convention: `s1 = I90 - I0` and `s2 = I135 - I45`. Compared with the
//! more common `I0 - I90` convention, the angle of polarization produced here
//! is rotated by π/2.

use std::f64::consts::PI;

use crate::error::Result;
use crate::raster::{check_dims, map_array, Angle, Channel, ColorImage, Plane, PolarStack};

/// Floor for `s0` when dividing to obtain the degree of polarization.
pub const DOP_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StokesStack {
    pub s0: ColorImage,
    pub s1: ColorImage,
    pub s2: ColorImage,
}

impl StokesStack {
    pub fn new(s0: ColorImage, s1: ColorImage, s2: ColorImage) -> Result<Self> {
        check_dims(s0.dims(), s1.dims())?;
        check_dims(s0.dims(), s2.dims())?;
        Ok(StokesStack { s0, s1, s2 })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.s0.dims()
    }

    /// Applies `f` to each of the nine planes.
    pub fn map_planes(&self, f: impl Fn(&Plane) -> Plane + Sync + Send) -> StokesStack {
        let [s0, s1, s2] = map_array(&[&self.s0, &self.s1, &self.s2], |im| im.map_planes(&f));
        StokesStack { s0, s1, s2 }
    }

    pub fn try_map_planes(
        &self,
        f: impl Fn(&Plane) -> Result<Plane> + Sync + Send,
    ) -> Result<StokesStack> {
        let [s0, s1, s2] = map_array(&[&self.s0, &self.s1, &self.s2], |im| im.try_map_planes(&f));
        StokesStack::new(s0?, s1?, s2?)
    }
}

/// Per-channel degree (`dop`, in [0, 1]) and angle (`aop`, radians in [0, π)) of polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarParams {
    pub dop: ColorImage,
    pub aop: ColorImage,
}

impl PolarParams {
    pub fn new(dop: ColorImage, aop: ColorImage) -> Result<Self> {
        check_dims(dop.dims(), aop.dims())?;
        Ok(PolarParams { dop, aop })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dop.dims()
    }
}

/// Wraps an angle into [0, π).
#[inline]
pub fn wrap_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    // rem_euclid can round up to exactly PI for tiny negative inputs
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Shortest distance between two angles on the π-periodic circle, in [0, π/2].
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Per-pixel Stokes triple from four analyzer intensities.
#[inline]
pub fn stokes_of(i0: f64, i45: f64, i90: f64, i135: f64) -> (f64, f64, f64) {
    ((i0 + i45 + i90 + i135) / 2.0, i90 - i0, i135 - i45)
}

/// Per-pixel (dop, aop) from a Stokes triple.
#[inline]
pub fn params_of(s0: f64, s1: f64, s2: f64) -> (f64, f64) {
    let mag = (s1 * s1 + s2 * s2).sqrt();
    let dop = (mag / s0.max(DOP_EPS)).clamp(0.0, 1.0);
    let aop = if s1 == 0.0 && s2 == 0.0 {
        0.0
    } else {
        wrap_pi(0.5 * s2.atan2(s1))
    };
    (dop, aop)
}

/// Per-pixel analyzer intensities (I0, I45, I90, I135) from a Stokes triple.
#[inline]
pub fn intensities_of(s0: f64, s1: f64, s2: f64) -> [f64; 4] {
    [
        (s0 - s1) / 2.0,
        (s0 - s2) / 2.0,
        (s0 + s1) / 2.0,
        (s0 + s2) / 2.0,
    ]
}

pub fn compute_stokes(stack: &PolarStack) -> StokesStack {
    let (h, w) = stack.dims();
    let per_channel = map_array(&Channel::ALL, |&c| {
        let [i0, i45, i90, i135] = Angle::ALL.map(|a| stack.plane(a, c).data());
        let n = h * w;
        let (mut s0, mut s1, mut s2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for k in 0..n {
            let (a, b, c) = stokes_of(i0[k], i45[k], i90[k], i135[k]);
            s0[k] = a;
            s1[k] = b;
            s2[k] = c;
        }
        [s0, s1, s2].map(|d| Plane::new(h, w, d).expect("sized by construction"))
    });
    assemble_triples(per_channel)
}

fn assemble_triples(per_channel: [[Plane; 3]; 3]) -> StokesStack {
    let [[r0, r1, r2], [g0, g1, g2], [b0, b1, b2]] = per_channel;
    let img = |a, b, c| ColorImage::new([a, b, c]).expect("same dims");
    StokesStack {
        s0: img(r0, g0, b0),
        s1: img(r1, g1, b1),
        s2: img(r2, g2, b2),
    }
}

pub fn compute_params(stokes: &StokesStack) -> PolarParams {
    let (h, w) = stokes.dims();
    let [dr, ar, dg, ag, db, ab] = {
        let per = map_array(&Channel::ALL, |&c| {
            let s0 = stokes.s0.channel(c).data();
            let s1 = stokes.s1.channel(c).data();
            let s2 = stokes.s2.channel(c).data();
            let mut dop = Vec::with_capacity(s0.len());
            let mut aop = Vec::with_capacity(s0.len());
            for k in 0..s0.len() {
                let (p, t) = params_of(s0[k], s1[k], s2[k]);
                dop.push(p);
                aop.push(t);
            }
            (
                Plane::new(h, w, dop).expect("sized"),
                Plane::new(h, w, aop).expect("sized"),
            )
        });
        let [(a, b), (c, d), (e, f)] = per;
        [a, b, c, d, e, f]
    };
    PolarParams {
        dop: ColorImage::new([dr, dg, db]).expect("same dims"),
        aop: ColorImage::new([ar, ag, ab]).expect("same dims"),
    }
}

/// Stack whose Stokes parameters are exactly `stokes` (no clamping).
pub fn synthesize_from_stokes(stokes: &StokesStack) -> PolarStack {
    let (h, w) = stokes.dims();
    let per_channel = map_array(&Channel::ALL, |&c| {
        let s0 = stokes.s0.channel(c).data();
        let s1 = stokes.s1.channel(c).data();
        let s2 = stokes.s2.channel(c).data();
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(h * w));
        for k in 0..s0.len() {
            let v = intensities_of(s0[k], s1[k], s2[k]);
            for (o, x) in out.iter_mut().zip(v) {
                o.push(x);
            }
        }
        out.map(|d| Plane::new(h, w, d).expect("sized"))
    });
    let [[r0, r1, r2, r3], [g0, g1, g2, g3], [b0, b1, b2, b3]] = per_channel;
    let img = |a, b, c| ColorImage::new([a, b, c]).expect("same dims");
    PolarStack::new([img(r0, g0, b0), img(r1, g1, b1), img(r2, g2, b2), img(r3, g3, b3)])
        .expect("same dims")
}

/// Inverse of [`compute_params`] given the total intensity.
pub fn synthesize_from_params(s0: &ColorImage, params: &PolarParams) -> Result<PolarStack> {
    check_dims(s0.dims(), params.dims())?;
    let s1 = s0.zip_map(&params.dop, |a, p| a * p)?;
    let s2 = s1.clone();
    let s1 = s1.zip_map(&params.aop, |m, t| m * (2.0 * t).cos())?;
    let s2 = s2.zip_map(&params.aop, |m, t| m * (2.0 * t).sin())?;
    let stack = synthesize_from_stokes(&StokesStack::new(s0.clone(), s1, s2)?);
    // |s1|, |s2| <= s0 analytically; clear rounding-level negatives
    Ok(stack.map_planes(|p| p.map(|v| v.max(0.0))))
}

/// Restricts each Stokes vector to the set that synthesizes intensities in
/// [0, 1]: `s0` in [0, 2] and polarized magnitude at most `min(s0, 2 - s0)`.
/// Vectors already inside the set are returned unchanged.
pub fn clamp_stokes_feasible(stokes: &StokesStack) -> StokesStack {
    let mut out = stokes.clone();
    for c in Channel::ALL {
        let s0 = out.s0.channel_mut(c).data_mut().to_vec();
        let mut s0n = s0.clone();
        let mut s1 = out.s1.channel(c).data().to_vec();
        let mut s2 = out.s2.channel(c).data().to_vec();
        for k in 0..s0.len() {
            let a = s0[k].clamp(0.0, 2.0);
            s0n[k] = a;
            let limit = a.min(2.0 - a);
            let mag = (s1[k] * s1[k] + s2[k] * s2[k]).sqrt();
            if mag > limit {
                let scale = if mag > 0.0 { limit / mag } else { 0.0 };
                s1[k] *= scale;
                s2[k] *= scale;
            }
        }
        out.s0.channel_mut(c).data_mut().copy_from_slice(&s0n);
        out.s1.channel_mut(c).data_mut().copy_from_slice(&s1);
        out.s2.channel_mut(c).data_mut().copy_from_slice(&s2);
    }
    out
}

/// Minimum-L2 correction enforcing `I0 + I90 = I45 + I135`, then clamping negatives to 0.
///
/// Clamping can reintroduce a violation of at most `|d|` at pixels that went negative.
pub fn consistency_project(stack: &PolarStack) -> PolarStack {
    let mut out = stack.clone();
    for c in Channel::ALL {
        let (h, w) = stack.dims();
        let [i1, i2, i3, i4] = Angle::ALL.map(|a| stack.plane(a, c).data());
        let mut res: [Vec<f64>; 4] = std::array::from_fn(|_| Vec::with_capacity(h * w));
        for k in 0..i1.len() {
            let d = (i1[k] + i3[k] - i2[k] - i4[k]) / 4.0;
            res[0].push((i1[k] - d).max(0.0));
            res[1].push((i2[k] + d).max(0.0));
            res[2].push((i3[k] - d).max(0.0));
            res[3].push((i4[k] + d).max(0.0));
        }
        for (a, d) in Angle::ALL.into_iter().zip(res) {
            out.image_mut(a)
                .channel_mut(c)
                .data_mut()
                .copy_from_slice(&d);
        }
    }
    out
}

/// Mean of the four analyzer images; equals `s0 / 2`.
pub fn average_image(stack: &PolarStack) -> ColorImage {
    let [a, b, c, d] = stack.images();
    let sum = a
        .zip_map(b, |x, y| x + y)
        .and_then(|s| s.zip_map(c, |x, y| x + y))
        .and_then(|s| s.zip_map(d, |x, y| x + y))
        .expect("stack images share dims");
    sum.map(|v| v / 4.0)
}
