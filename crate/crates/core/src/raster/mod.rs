//! Image containers shared by every stage: single-channel [`Plane`]s, RGB
//! [`ColorImage`]s and the four-angle [`PolarStack`].

mod filter;
mod resample;

pub use filter::median_filter;
pub use resample::{downsample_area, gradient_l1, resample_bilinear, shift_bilinear, upsample_2x};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Polarizer orientation of one of the four analyzer channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Angle {
    A0,
    A45,
    A90,
    A135,
}

impl Angle {
    /// Stack order (0°, 45°, 90°, 135°).
    pub const ALL: [Angle; 4] = [Angle::A0, Angle::A45, Angle::A90, Angle::A135];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn degrees(self) -> u32 {
        match self {
            Angle::A0 => 0,
            Angle::A45 => 45,
            Angle::A90 => 90,
            Angle::A135 => 135,
        }
    }

    pub fn from_degrees(deg: u32) -> Option<Angle> {
        Angle::ALL.into_iter().find(|a| a.degrees() == deg)
    }

    pub fn radians(self) -> f64 {
        f64::from(self.degrees()).to_radians()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Channel {
    R,
    G,
    B,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Channel::R => 'r',
            Channel::G => 'g',
            Channel::B => 'b',
        }
    }

    pub fn from_letter(c: char) -> Option<Channel> {
        match c {
            'r' => Some(Channel::R),
            'g' => Some(Channel::G),
            'b' => Some(Channel::B),
            _ => None,
        }
    }
}

/// Applies `f` to every element of a small fixed-size array, in parallel when
/// the `parallel` feature is enabled. Output order always matches input order.
pub(crate) fn map_array<T, U, F, const N: usize>(items: &[T; N], f: F) -> [U; N]
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let out: Vec<U> = {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let out: Vec<U> = items.iter().map(f).collect();
    match out.try_into() {
        Ok(arr) => arr,
        Err(_) => unreachable!("length preserved by map"),
    }
}

/// Single-channel raster of real samples, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != height * width {
            return Err(Error::InvalidConfig(format!(
                "plane data length {} does not match {height}x{width}",
                data.len()
            )));
        }
        Ok(Plane {
            height,
            width,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        Plane {
            height,
            width,
            data: vec![value; height * width],
        }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    /// Builds a plane by evaluating `f(y, x)` at every pixel.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(height * width);
        for y in 0..height {
            for x in 0..width {
                data.push(f(y, x));
            }
        }
        Plane {
            height,
            width,
            data,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Sample with coordinates clamped to the border.
    #[inline]
    pub fn get_clamped(&self, y: isize, x: isize) -> f64 {
        let yy = y.clamp(0, self.height as isize - 1) as usize;
        let xx = x.clamp(0, self.width as isize - 1) as usize;
        self.get(yy, xx)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pixelwise combination of two planes of identical size.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        check_dims(self.dims(), other.dims())?;
        Ok(Plane {
            height: self.height,
            width: self.width,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn clamp01(&self) -> Plane {
        self.map(|v| v.clamp(0.0, 1.0))
    }
}

pub(crate) fn check_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimMismatch { left: a, right: b });
    }
    Ok(())
}

/// Three planes in (r, g, b) order.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    channels: [Plane; 3],
}

impl ColorImage {
    pub fn new(channels: [Plane; 3]) -> Result<Self> {
        let d = channels[0].dims();
        for c in &channels[1..] {
            check_dims(d, c.dims())?;
        }
        Ok(ColorImage { channels })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        let p = Plane::filled(height, width, value);
        ColorImage {
            channels: [p.clone(), p.clone(), p],
        }
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(Channel, usize, usize) -> f64,
    ) -> Self {
        let channels = Channel::ALL.map(|c| Plane::from_fn(height, width, |y, x| f(c, y, x)));
        ColorImage { channels }
    }

    pub fn channel(&self, c: Channel) -> &Plane {
        &self.channels[c.index()]
    }

    pub fn channel_mut(&mut self, c: Channel) -> &mut Plane {
        &mut self.channels[c.index()]
    }

    pub fn channels(&self) -> &[Plane; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [Plane; 3] {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    pub fn height(&self) -> usize {
        self.channels[0].height()
    }

    pub fn width(&self) -> usize {
        self.channels[0].width()
    }

    pub fn map_planes(&self, f: impl Fn(&Plane) -> Plane + Sync + Send) -> ColorImage {
        ColorImage {
            channels: map_array(&self.channels, f),
        }
    }

    pub fn try_map_planes(
        &self,
        f: impl Fn(&Plane) -> Result<Plane> + Sync + Send,
    ) -> Result<ColorImage> {
        let [r, g, b] = map_array(&self.channels, f);
        ColorImage::new([r?, g?, b?])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> ColorImage {
        self.map_planes(|p| p.map(&f))
    }

    pub fn zip_map(&self, other: &ColorImage, f: impl Fn(f64, f64) -> f64) -> Result<ColorImage> {
        check_dims(self.dims(), other.dims())?;
        let [a, b, c] = &self.channels;
        let [x, y, z] = &other.channels;
        Ok(ColorImage {
            channels: [a.zip_map(x, &f)?, b.zip_map(y, &f)?, c.zip_map(z, &f)?],
        })
    }

    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.channels.iter().flat_map(|p| p.data().iter().copied())
    }

    pub fn all_finite(&self) -> bool {
        self.channels.iter().all(Plane::all_finite)
    }
}

/// Four full-color images ordered by analyzer angle (0°, 45°, 90°, 135°).
#[derive(Debug, Clone, PartialEq)]
pub struct PolarStack {
    images: [ColorImage; 4],
}

impl PolarStack {
    pub fn new(images: [ColorImage; 4]) -> Result<Self> {
        let d = images[0].dims();
        for im in &images[1..] {
            check_dims(d, im.dims())?;
        }
        Ok(PolarStack { images })
    }

    pub fn filled(height: usize, width: usize, values: [f64; 4]) -> Self {
        PolarStack {
            images: values.map(|v| ColorImage::filled(height, width, v)),
        }
    }

    pub fn image(&self, a: Angle) -> &ColorImage {
        &self.images[a.index()]
    }

    pub fn image_mut(&mut self, a: Angle) -> &mut ColorImage {
        &mut self.images[a.index()]
    }

    pub fn images(&self) -> &[ColorImage; 4] {
        &self.images
    }

    pub fn into_images(self) -> [ColorImage; 4] {
        self.images
    }

    /// Single-channel plane `I_angle^channel`.
    pub fn plane(&self, a: Angle, c: Channel) -> &Plane {
        self.images[a.index()].channel(c)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.images[0].dims()
    }

    pub fn height(&self) -> usize {
        self.images[0].height()
    }

    pub fn width(&self) -> usize {
        self.images[0].width()
    }

    pub fn map_images(&self, f: impl Fn(&ColorImage) -> ColorImage + Sync + Send) -> PolarStack {
        PolarStack {
            images: map_array(&self.images, f),
        }
    }

    pub fn map_planes(&self, f: impl Fn(&Plane) -> Plane + Sync + Send) -> PolarStack {
        self.map_images(|im| im.map_planes(&f))
    }

    pub fn try_map_planes(
        &self,
        f: impl Fn(&Plane) -> Result<Plane> + Sync + Send,
    ) -> Result<PolarStack> {
        let [a, b, c, d] = map_array(&self.images, |im| im.try_map_planes(&f));
        PolarStack::new([a?, b?, c?, d?])
    }

    pub fn clamp01(&self) -> PolarStack {
        self.map_planes(Plane::clamp01)
    }

    pub fn all_finite(&self) -> bool {
        self.images.iter().all(ColorImage::all_finite)
    }

    /// Largest pixelwise violation of `I0 + I90 = I45 + I135` over all channels.
    pub fn max_identity_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for c in Channel::ALL {
            let [i1, i2, i3, i4] = Angle::ALL.map(|a| self.plane(a, c).data());
            for k in 0..i1.len() {
                worst = worst.max(((i1[k] + i3[k]) - (i2[k] + i4[k])).abs());
            }
        }
        worst
    }
}
