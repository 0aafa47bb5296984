//! Color-polarization filter array (CPFA) sampling.
//!
//! The sensor tile is 4×4 pixels. Every pixel carries one analyzer angle and
//! one color channel. The raw image is the sum of the twelve masked planes
//! `M_ij · I_angle^channel`; because the masks partition the pixel grid each
//! raw pixel equals exactly one source sample.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{map_array, Angle, Channel, ColorImage, Plane, PolarStack};

pub const TILE: usize = 4;

/// One (angle, channel) filter cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FilterCell {
    pub angle: Angle,
    pub channel: Channel,
}

impl fmt::Display for FilterCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.angle.degrees(), self.channel.letter())
    }
}

impl FromStr for FilterCell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPattern(format!("cannot parse cell {s:?}, expected e.g. \"90:r\""));
        let (a, c) = s.split_once(':').ok_or_else(bad)?;
        let angle = a
            .trim()
            .parse::<u32>()
            .ok()
            .and_then(Angle::from_degrees)
            .ok_or_else(bad)?;
        let mut chars = c.trim().chars();
        let channel = match (chars.next(), chars.next()) {
            (Some(ch), None) => Channel::from_letter(ch.to_ascii_lowercase()).ok_or_else(bad)?,
            _ => return Err(bad()),
        };
        Ok(FilterCell { angle, channel })
    }
}

/// 2×2 color arrangement of one angle's sub-mosaic, indexed `[y % 2][x % 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BayerLayout(pub [[Channel; 2]; 2]);

impl BayerLayout {
    pub const RGGB: BayerLayout = BayerLayout([[Channel::R, Channel::G], [Channel::G, Channel::B]]);

    #[inline]
    pub fn channel_at(&self, y: usize, x: usize) -> Channel {
        self.0[y % 2][x % 2]
    }
}

impl fmt::Display for BayerLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0 {
            for c in row {
                write!(f, "{}", c.letter().to_ascii_uppercase())?;
            }
        }
        Ok(())
    }
}

/// 4×4 CPFA tile, `tile[y][x]`.
///
/// Each angle must occupy one parity class of the pixel grid (so that it can be
/// pulled out as a half-resolution sub-mosaic) and see every color channel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CpfaPattern {
    tile: [[FilterCell; TILE]; TILE],
}

impl Default for CpfaPattern {
    /// 2×2 Bayer blocks (R G / G B), each holding the polarization block (90 45 / 135 0).
    fn default() -> Self {
        let bayer = [[Channel::R, Channel::G], [Channel::G, Channel::B]];
        let pol = [[Angle::A90, Angle::A45], [Angle::A135, Angle::A0]];
        let tile = std::array::from_fn(|y| {
            std::array::from_fn(|x| FilterCell {
                angle: pol[y % 2][x % 2],
                channel: bayer[y / 2][x / 2],
            })
        });
        CpfaPattern { tile }
    }
}

impl CpfaPattern {
    pub fn new(tile: [[FilterCell; TILE]; TILE]) -> Result<Self> {
        let p = CpfaPattern { tile };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        for angle in Angle::ALL {
            let cells: Vec<(usize, usize)> = self.positions(|c| c.angle == angle).collect();
            if cells.len() != 4 {
                return Err(Error::InvalidPattern(format!(
                    "angle {} appears {} times per tile, expected 4",
                    angle.degrees(),
                    cells.len()
                )));
            }
            let parity = (cells[0].0 % 2, cells[0].1 % 2);
            if cells.iter().any(|&(y, x)| (y % 2, x % 2) != parity) {
                return Err(Error::InvalidPattern(format!(
                    "angle {} does not sit on a single 2x2 sub-lattice",
                    angle.degrees()
                )));
            }
            for ch in Channel::ALL {
                if !cells.iter().any(|&(y, x)| self.tile[y][x].channel == ch) {
                    return Err(Error::InvalidPattern(format!(
                        "angle {} never sees channel {}",
                        angle.degrees(),
                        ch.letter()
                    )));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn cell(&self, y: usize, x: usize) -> FilterCell {
        self.tile[y % TILE][x % TILE]
    }

    /// Tile positions `(y, x)` whose cell satisfies `pred`.
    pub fn positions<P: Fn(FilterCell) -> bool>(&self, pred: P) -> impl Iterator<Item = (usize, usize)> + use<'_, P> {
        (0..TILE)
            .flat_map(|y| (0..TILE).map(move |x| (y, x)))
            .filter(move |&(y, x)| pred(self.tile[y][x]))
    }

    /// Number of tile cells carrying (angle, channel).
    pub fn multiplicity(&self, angle: Angle, channel: Channel) -> usize {
        self.positions(|c| c.angle == angle && c.channel == channel).count()
    }

    /// Parity class `(y % 2, x % 2)` of an angle's pixels.
    pub fn angle_phase(&self, angle: Angle) -> (usize, usize) {
        let (y, x) = self
            .positions(|c| c.angle == angle)
            .next()
            .expect("validated pattern contains every angle");
        (y % 2, x % 2)
    }

    /// Color arrangement of an angle's half-resolution sub-mosaic.
    pub fn bayer_for(&self, angle: Angle) -> BayerLayout {
        let (py, px) = self.angle_phase(angle);
        BayerLayout(std::array::from_fn(|by| {
            std::array::from_fn(|bx| self.tile[2 * by + py][2 * bx + px].channel)
        }))
    }

    pub fn cells(&self) -> Vec<String> {
        self.tile
            .iter()
            .flat_map(|row| row.iter().map(ToString::to_string))
            .collect()
    }
}

impl TryFrom<Vec<String>> for CpfaPattern {
    type Error = Error;

    fn try_from(cells: Vec<String>) -> Result<Self> {
        if cells.len() != TILE * TILE {
            return Err(Error::InvalidPattern(format!(
                "expected {} cells, got {}",
                TILE * TILE,
                cells.len()
            )));
        }
        let parsed: Vec<FilterCell> = cells.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        let tile = std::array::from_fn(|y| std::array::from_fn(|x| parsed[y * TILE + x]));
        CpfaPattern::new(tile)
    }
}

impl From<CpfaPattern> for Vec<String> {
    fn from(p: CpfaPattern) -> Self {
        p.cells()
    }
}

/// Single-plane sensor output together with the pattern that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CpfaRaw {
    plane: Plane,
    pattern: CpfaPattern,
}

impl CpfaRaw {
    /// Rejects dims that are not whole tiles and non-finite samples.
    pub fn new(plane: Plane, pattern: CpfaPattern) -> Result<Self> {
        check_tile_dims(plane.height(), plane.width())?;
        if !plane.all_finite() {
            return Err(Error::NonFinite("raw mosaic".into()));
        }
        Ok(CpfaRaw { plane, pattern })
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn pattern(&self) -> &CpfaPattern {
        &self.pattern
    }

    pub fn dims(&self) -> (usize, usize) {
        self.plane.dims()
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }
}

fn check_tile_dims(h: usize, w: usize) -> Result<()> {
    if h == 0 || w == 0 {
        return Err(Error::EmptyPlane);
    }
    if !h.is_multiple_of(TILE) || !w.is_multiple_of(TILE) {
        return Err(Error::NotDivisible {
            height: h,
            width: w,
            factor: TILE,
        });
    }
    Ok(())
}

/// Binary masks `M_ij` keyed by (angle, channel), in `Angle::ALL × Channel::ALL` order.
pub fn build_masks(pattern: &CpfaPattern, h: usize, w: usize) -> Result<Vec<((Angle, Channel), Plane)>> {
    check_tile_dims(h, w)?;
    let mut out = Vec::with_capacity(12);
    for a in Angle::ALL {
        for c in Channel::ALL {
            let m = Plane::from_fn(h, w, |y, x| {
                let cell = pattern.cell(y, x);
                if cell.angle == a && cell.channel == c {
                    1.0
                } else {
                    0.0
                }
            });
            out.push(((a, c), m));
        }
    }
    Ok(out)
}

/// Forward sensor model: each raw pixel takes the stack sample its filter selects.
pub fn mosaic(stack: &PolarStack, pattern: &CpfaPattern) -> Result<CpfaRaw> {
    let (h, w) = stack.dims();
    check_tile_dims(h, w)?;
    let plane = Plane::from_fn(h, w, |y, x| {
        let cell = pattern.cell(y, x);
        stack.plane(cell.angle, cell.channel).get(y, x)
    });
    CpfaRaw::new(plane, pattern.clone())
}

/// Collects one angle's pixels into an `h/2 × w/2` Bayer mosaic.
pub fn extract_angle_cfa(raw: &CpfaRaw, angle: Angle) -> (Plane, BayerLayout) {
    let (py, px) = raw.pattern.angle_phase(angle);
    let (h, w) = raw.dims();
    let sub = Plane::from_fn(h / 2, w / 2, |y, x| raw.plane.get(2 * y + py, 2 * x + px));
    (sub, raw.pattern.bayer_for(angle))
}

/// Bilinear Bayer demosaicing.
///
/// Measured samples are kept bit-exactly. A missing channel is the mean of the
/// same-channel samples in the 3×3 neighbourhood (2 orthogonal, 4 orthogonal
/// or 4 diagonal, depending on the site); neighbours outside the image are skipped.
pub fn cfa_demosaic_bilinear(cfa: &Plane, layout: BayerLayout) -> Result<ColorImage> {
    let (h, w) = cfa.dims();
    if h == 0 || w == 0 {
        return Err(Error::EmptyPlane);
    }
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::NotDivisible {
            height: h,
            width: w,
            factor: 2,
        });
    }
    let channels = map_array(&Channel::ALL, |&ch| {
        Plane::from_fn(h, w, |y, x| {
            if layout.channel_at(y, x) == ch {
                return cfa.get(y, x);
            }
            let mut sum = 0.0;
            let mut n = 0usize;
            for ny in y.saturating_sub(1)..(y + 2).min(h) {
                for nx in x.saturating_sub(1)..(x + 2).min(w) {
                    if layout.channel_at(ny, nx) == ch {
                        sum += cfa.get(ny, nx);
                        n += 1;
                    }
                }
            }
            sum / n as f64
        })
    });
    ColorImage::new(channels)
}

/// Four half-resolution full-color images: each angle's sub-mosaic, Bayer-demosaiced.
pub fn convert_raw_to_halfres(raw: &CpfaRaw) -> Result<PolarStack> {
    let images = map_array(&Angle::ALL, |&a| {
        let (sub, layout) = extract_angle_cfa(raw, a);
        cfa_demosaic_bilinear(&sub, layout)
    });
    let [a, b, c, d] = images;
    PolarStack::new([a?, b?, c?, d?])
}

/// Full-resolution baseline demosaicer.
///
/// Each (angle, channel) sample lattice is interpolated on its own with a
/// separable tent of half-width one tile period, normalized by the weights that
/// actually land on samples. On a rectangular lattice this is plain bilinear
/// interpolation; on the two-site green lattices it averages the two bilinear
/// estimates. Measured samples are kept bit-exactly.
pub fn cpfa_demosaic_bilinear(raw: &CpfaRaw) -> Result<PolarStack> {
    let pattern = &raw.pattern;
    let images = map_array(&Angle::ALL, |&a| {
        let channels = Channel::ALL.map(|c| {
            let sites: Vec<(usize, usize)> = pattern
                .positions(|cell| cell.angle == a && cell.channel == c)
                .collect();
            interpolate_lattice(raw.plane(), &sites, a, c, pattern)
        });
        ColorImage::new(channels).expect("same dims")
    });
    PolarStack::new(images)
}

fn interpolate_lattice(
    raw: &Plane,
    sites: &[(usize, usize)],
    angle: Angle,
    channel: Channel,
    pattern: &CpfaPattern,
) -> Plane {
    let (h, w) = raw.dims();
    let period = TILE as isize;
    let tent = |d: isize| 1.0 - d.unsigned_abs() as f64 / TILE as f64;
    Plane::from_fn(h, w, |y, x| {
        let cell = pattern.cell(y, x);
        if cell.angle == angle && cell.channel == channel {
            return raw.get(y, x);
        }
        let (yi, xi) = (y as isize, x as isize);
        let mut num = 0.0;
        let mut den = 0.0;
        for &(oy, ox) in sites {
            let (oy, ox) = (oy as isize, ox as isize);
            let y0 = oy + (yi - oy).div_euclid(period) * period;
            let x0 = ox + (xi - ox).div_euclid(period) * period;
            for sy in [y0, y0 + period] {
                if sy < 0 || sy >= h as isize {
                    continue;
                }
                let wy = tent(yi - sy);
                for sx in [x0, x0 + period] {
                    if sx < 0 || sx >= w as isize {
                        continue;
                    }
                    let wt = wy * tent(xi - sx);
                    num += wt * raw.get(sy as usize, sx as usize);
                    den += wt;
                }
            }
        }
        // tile-aligned dims keep at least one in-bounds lattice row and column
        debug_assert!(den > 0.0);
        num / den
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack_with(f: impl Fn(Angle, Channel, usize, usize) -> f64, h: usize, w: usize) -> PolarStack {
        let imgs = Angle::ALL.map(|a| ColorImage::from_fn(h, w, |c, y, x| f(a, c, y, x)));
        PolarStack::new(imgs).unwrap()
    }

    #[test]
    fn default_pattern_layout() {
        let p = CpfaPattern::default();
        assert_eq!(p.cell(0, 0).to_string(), "90:r");
        assert_eq!(p.cell(0, 1).to_string(), "45:r");
        assert_eq!(p.cell(1, 0).to_string(), "135:r");
        assert_eq!(p.cell(1, 1).to_string(), "0:r");
        assert_eq!(p.cell(0, 2).to_string(), "90:g");
        assert_eq!(p.cell(3, 3).to_string(), "0:b");
        for a in Angle::ALL {
            assert_eq!(p.bayer_for(a), BayerLayout::RGGB);
            assert_eq!(p.multiplicity(a, Channel::R), 1);
            assert_eq!(p.multiplicity(a, Channel::G), 2);
            assert_eq!(p.multiplicity(a, Channel::B), 1);
        }
    }

    #[test]
    fn pattern_json_round_trip_and_validation() {
        let p = CpfaPattern::default();
        let js = serde_json::to_string(&p).unwrap();
        assert!(js.starts_with("[\"90:r\",\"45:r\","));
        let back: CpfaPattern = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);

        let mut cells = p.cells();
        cells.swap(0, 1); // 90 and 45 trade places: both leave their sub-lattice
        assert!(CpfaPattern::try_from(cells).is_err());
        assert!(CpfaPattern::try_from(vec!["90:r".to_string(); 15]).is_err());
        assert!("91:r".parse::<FilterCell>().is_err());
        assert!("90:x".parse::<FilterCell>().is_err());
    }

    #[test]
    fn masks_count_per_tile_and_are_periodic() {
        let p = CpfaPattern::default();
        let masks = build_masks(&p, 4, 4).unwrap();
        for ((a, c), m) in &masks {
            let count = m.data().iter().sum::<f64>() as usize;
            assert_eq!(count, p.multiplicity(*a, *c));
        }
        let masks = build_masks(&p, 12, 8).unwrap();
        for (_, m) in &masks {
            for y in 0..8 {
                for x in 0..4 {
                    assert_eq!(m.get(y, x), m.get(y + 4, x + 4));
                }
            }
        }
        assert!(build_masks(&p, 6, 8).is_err());
    }

    #[test]
    fn mosaic_of_angle_indexed_stack() {
        let p = CpfaPattern::default();
        let st = stack_with(|a, _, _, _| a.index() as f64 / 4.0, 8, 8);
        let raw = mosaic(&st, &p).unwrap();
        // tile enumeration: rows alternate (90, 45) and (135, 0)
        let want_row0 = [0.5, 0.25, 0.5, 0.25];
        let want_row1 = [0.75, 0.0, 0.75, 0.0];
        for x in 0..4 {
            assert_eq!(raw.plane().get(0, x), want_row0[x]);
            assert_eq!(raw.plane().get(1, x), want_row1[x]);
            assert_eq!(raw.plane().get(4, x + 4), want_row0[x]);
        }
    }

    #[test]
    fn extraction_yields_bayer_pattern() {
        let p = CpfaPattern::default();
        let st = stack_with(
            |_, c, _, _| match c {
                Channel::R => 1.0,
                Channel::G => 0.5,
                Channel::B => 0.0,
            },
            8,
            8,
        );
        let raw = mosaic(&st, &p).unwrap();
        for a in Angle::ALL {
            let (sub, layout) = extract_angle_cfa(&raw, a);
            assert_eq!(sub.dims(), (4, 4));
            assert_eq!(layout.to_string(), "RGGB");
            for y in 0..4 {
                for x in 0..4 {
                    let want = [[1.0, 0.5], [0.5, 0.0]][y % 2][x % 2];
                    assert_eq!(sub.get(y, x), want);
                }
            }
        }
    }

    #[test]
    fn extraction_is_a_bijection_on_raw_pixels() {
        let p = CpfaPattern::default();
        let raw = CpfaRaw::new(Plane::from_fn(8, 12, |y, x| (y * 12 + x) as f64), p).unwrap();
        let mut seen: Vec<f64> = Angle::ALL
            .iter()
            .flat_map(|&a| extract_angle_cfa(&raw, a).0.into_data())
            .collect();
        assert_eq!(seen.len(), 96);
        seen.sort_by(f64::total_cmp);
        assert!(seen.iter().enumerate().all(|(i, &v)| v == i as f64));
    }

    #[test]
    fn bayer_bilinear_kernel_on_red_impulses() {
        // r = 1 at r-sites, 0 elsewhere
        let cfa = Plane::from_fn(4, 4, |y, x| if y % 2 == 0 && x % 2 == 0 { 1.0 } else { 0.0 });
        let img = cfa_demosaic_bilinear(&cfa, BayerLayout::RGGB).unwrap();
        let r = img.channel(Channel::R);
        // interior g-site (row 2, col 1): both horizontal neighbours are red sites
        assert_eq!(r.get(2, 1), 1.0);
        // interior b-site (1,1): four diagonal red sites
        assert_eq!(r.get(1, 1), 1.0);
        // green channel at a red site: mean of 4 orthogonal greens, all 0
        assert_eq!(img.channel(Channel::G).get(2, 2), 0.0);

        // a single red impulse: diagonal average gives 1/4, horizontal pair 1/2
        let mut cfa = Plane::zeros(6, 6);
        cfa.set(2, 2, 1.0);
        let img = cfa_demosaic_bilinear(&cfa, BayerLayout::RGGB).unwrap();
        let r = img.channel(Channel::R);
        assert_eq!(r.get(3, 3), 0.25);
        assert_eq!(r.get(2, 3), 0.5);
        assert_eq!(r.get(3, 2), 0.5);
        assert_eq!(r.get(2, 2), 1.0);
    }

    #[test]
    fn constant_raw_demosaics_to_constant() {
        let p = CpfaPattern::default();
        let raw = CpfaRaw::new(Plane::filled(16, 16, 0.37), p).unwrap();
        let full = cpfa_demosaic_bilinear(&raw).unwrap();
        assert_eq!(full.dims(), (16, 16));
        assert!(full.images().iter().all(|im| im.samples().all(|v| (v - 0.37).abs() < 1e-15)));
        let half = convert_raw_to_halfres(&raw).unwrap();
        assert_eq!(half.dims(), (8, 8));
        assert!(half.images().iter().all(|im| im.samples().all(|v| (v - 0.37).abs() < 1e-15)));
    }

    #[test]
    fn cpfa_bilinear_is_exact_on_affine_interior() {
        let p = CpfaPattern::default();
        let f = |y: usize, x: usize| 0.2 + 0.01 * x as f64 + 0.005 * y as f64;
        let st = stack_with(|a, c, y, x| f(y, x) * (1.0 + 0.1 * a.index() as f64) * (1.0 - 0.1 * c.index() as f64), 32, 32);
        let raw = mosaic(&st, &p).unwrap();
        let full = cpfa_demosaic_bilinear(&raw).unwrap();
        for a in Angle::ALL {
            for c in Channel::ALL {
                for y in 4..28 {
                    for x in 4..28 {
                        let d = (full.plane(a, c).get(y, x) - st.plane(a, c).get(y, x)).abs();
                        assert!(d < 1e-12, "{a:?} {c:?} ({y},{x}) off by {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_untiled_dimensions() {
        let p = CpfaPattern::default();
        assert!(CpfaRaw::new(Plane::zeros(6, 8), p.clone()).is_err());
        let st = PolarStack::filled(6, 8, [0.0; 4]);
        assert!(mosaic(&st, &p).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        let mut plane = Plane::filled(8, 8, 0.5);
        plane.set(3, 3, f64::NAN);
        let err = CpfaRaw::new(plane, CpfaPattern::default()).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
