//! On-disk formats for planes and polarization stacks.
//!
//! A stack is a directory of twelve single-channel files named
//! `I{000|045|090|135}_{r|g|b}.{pfm|png}`. `pfm` stores little-endian 32-bit
//! floats; `png` stores 16-bit grayscale quantized as `round(clamp(v) * 65535)`.

use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{Angle, Channel, ColorImage, Plane, PolarStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    Png16,
    Pfm,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png16 => "png",
            ImageFormat::Pfm => "pfm",
        }
    }

    pub fn from_extension(ext: &str) -> Option<ImageFormat> {
        match ext {
            "png" => Some(ImageFormat::Png16),
            "pfm" => Some(ImageFormat::Pfm),
            _ => None,
        }
    }
}

impl fmt::Display for ImageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageFormat::Png16 => "png16",
            ImageFormat::Pfm => "pfm",
        })
    }
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "png16" => Ok(ImageFormat::Png16),
            "pfm" => Ok(ImageFormat::Pfm),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format {s:?}, expected png16 or pfm"
            ))),
        }
    }
}

/// File stem for one (angle, channel) plane, e.g. `I045_g`.
pub fn plane_stem(angle: Angle, channel: Channel) -> String {
    format!("I{:03}_{}", angle.degrees(), channel.letter())
}

pub fn plane_file_name(angle: Angle, channel: Channel, format: ImageFormat) -> String {
    format!("{}.{}", plane_stem(angle, channel), format.extension())
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn encode_pfm(plane: &Plane) -> Vec<u8> {
    let (h, w) = plane.dims();
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(h * w * 4);
    // rows are stored bottom-to-top
    for y in (0..h).rev() {
        for x in 0..w {
            out.extend_from_slice(&(plane.get(y, x) as f32).to_le_bytes());
        }
    }
    out
}

pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<Plane> {
    let corrupt = |reason: &str| Error::CorruptHeader {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut pos = 0usize;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos || pos - start > 32 {
            return Err(corrupt("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| corrupt("non-ascii header"))?);
    }
    // exactly one whitespace byte separates the header from the data
    pos += 1;
    match tokens[0] {
        "Pf" => {}
        "PF" => return Err(corrupt("three-channel PFM is not supported")),
        _ => return Err(corrupt("missing Pf magic")),
    }
    let w: usize = tokens[1].parse().map_err(|_| corrupt("bad width"))?;
    let h: usize = tokens[2].parse().map_err(|_| corrupt("bad height"))?;
    let scale: f64 = tokens[3].parse().map_err(|_| corrupt("bad scale"))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(corrupt("bad scale"));
    }
    let little = scale < 0.0;
    let need = h
        .checked_mul(w)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    if bytes.len() < pos || bytes.len() - pos != need {
        return Err(corrupt("data length does not match dimensions"));
    }
    let data = &bytes[pos..];
    let mut out = Plane::zeros(h, w);
    for (i, chunk) in data.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (row, x) = (i / w, i % w);
        out.set(h - 1 - row, x, f64::from(v));
    }
    Ok(out)
}

/// Quantizes to 16 bits: `round(clamp(v, 0, 1) * 65535)`.
pub fn quantize16(v: f64) -> u16 {
    (v.clamp(0.0, 1.0) * 65535.0).round() as u16
}

pub fn encode_png16(plane: &Plane, path: &Path) -> Result<Vec<u8>> {
    let (h, w) = plane.dims();
    let mut buf = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut buf, w as u32, h as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Sixteen);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
        // PNG mandates network byte order for 16-bit samples
        let bytes: Vec<u8> = plane
            .data()
            .iter()
            .flat_map(|&v| quantize16(v).to_be_bytes())
            .collect();
        writer
            .write_image_data(&bytes)
            .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    Ok(buf)
}

pub fn decode_png16(bytes: &[u8], path: &Path) -> Result<Plane> {
    let corrupt = |reason: String| Error::CorruptHeader {
        path: path.to_path_buf(),
        reason,
    };
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder.read_info().map_err(|e| corrupt(e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Sixteen {
        return Err(corrupt(format!(
            "expected 16-bit grayscale, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let frame = reader.next_frame(&mut buf).map_err(|e| corrupt(e.to_string()))?;
    let data: Vec<f64> = buf[..frame.buffer_size()]
        .chunks_exact(2)
        .map(|c| f64::from(u16::from_be_bytes([c[0], c[1]])) / 65535.0)
        .collect();
    Plane::new(h, w, data).map_err(|_| corrupt("pixel count does not match dimensions".into()))
}

pub fn save_plane(path: &Path, plane: &Plane, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Pfm => encode_pfm(plane),
        ImageFormat::Png16 => encode_png16(plane, path)?,
    };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads a plane, inferring the format from the extension.
pub fn load_plane(path: &Path, expected: Option<(usize, usize)>) -> Result<Plane> {
    let format = path
        .extension()
        .and_then(|e| e.to_str())
        .and_then(ImageFormat::from_extension)
        .ok_or_else(|| Error::InconsistentFormat(path.to_path_buf()))?;
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::MissingFile(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    let plane = match format {
        ImageFormat::Pfm => decode_pfm(&bytes, path)?,
        ImageFormat::Png16 => decode_png16(&bytes, path)?,
    };
    if let Some(dims) = expected {
        if plane.dims() != dims {
            return Err(Error::FileDimMismatch {
                path: path.to_path_buf(),
                expected: dims,
                found: plane.dims(),
            });
        }
    }
    Ok(plane)
}

pub fn save_stack(dir: &Path, stack: &PolarStack, format: ImageFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for a in Angle::ALL {
        for c in Channel::ALL {
            save_plane(&dir.join(plane_file_name(a, c, format)), stack.plane(a, c), format)?;
        }
    }
    Ok(())
}

/// Loads the twelve planes of a stack written by [`save_stack`].
///
/// When `expected` is given every plane must have those dims.
pub fn load_stack(dir: &Path, format: ImageFormat, expected: Option<(usize, usize)>) -> Result<PolarStack> {
    let mut dims = expected;
    let mut images = Vec::with_capacity(4);
    for a in Angle::ALL {
        let mut channels = Vec::with_capacity(3);
        for c in Channel::ALL {
            let plane = load_plane(&dir.join(plane_file_name(a, c, format)), dims)?;
            dims.get_or_insert(plane.dims());
            channels.push(plane);
        }
        let [r, g, b]: [Plane; 3] = channels.try_into().expect("three channels");
        images.push(ColorImage::new([r, g, b])?);
    }
    let images: [ColorImage; 4] = match images.try_into() {
        Ok(a) => a,
        Err(_) => unreachable!("four angles"),
    };
    PolarStack::new(images)
}

/// Loads a third-party directory holding exactly the twelve stack files in
/// one format. No polarization consistency is enforced.
pub fn load_external_dir(dir: &Path) -> Result<PolarStack> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let wanted: Vec<String> = Angle::ALL
        .iter()
        .flat_map(|&a| Channel::ALL.map(move |c| plane_stem(a, c)))
        .collect();
    let mut formats = Vec::new();
    let mut found = Vec::new();
    let mut extra = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let path = entry.path();
        let Some(format) = path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(ImageFormat::from_extension)
        else {
            continue;
        };
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        if wanted.iter().any(|w| w == stem) {
            if !formats.contains(&format) {
                formats.push(format);
            }
            found.push(stem.to_string());
        } else {
            extra.push(name);
        }
    }
    if formats.len() > 1 {
        return Err(Error::InconsistentFormat(dir.to_path_buf()));
    }
    let format = formats.first().copied().unwrap_or(ImageFormat::Png16);
    let mut missing: Vec<String> = wanted
        .iter()
        .filter(|w| !found.contains(w))
        .map(|w| format!("{w}.{}", format.extension()))
        .collect();
    missing.sort();
    extra.sort();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::DirectoryContents {
            dir: dir.to_path_buf(),
            missing,
            extra,
        });
    }
    load_stack(dir, format, None)
}

/// Rounds every sample to the nearest `f32`, making a `pfm` round trip exact.
pub fn round_to_f32(plane: &Plane) -> Plane {
    plane.map(|v| f64::from(v as f32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_plane(h: usize, w: usize) -> Plane {
        round_to_f32(&Plane::from_fn(h, w, |y, x| ((y * w + x) as f64 * 0.618).fract()))
    }

    #[test]
    fn pfm_round_trip_is_bit_exact() {
        let p = sample_plane(5, 7);
        let back = decode_pfm(&encode_pfm(&p), Path::new("x.pfm")).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn pfm_header_errors() {
        let p = Path::new("x.pfm");
        assert!(matches!(decode_pfm(b"P5\n1 1\n-1.0\n\0\0\0\0", p), Err(Error::CorruptHeader { .. })));
        assert!(matches!(decode_pfm(b"Pf\n2 2\n-1.0\n\0\0\0\0", p), Err(Error::CorruptHeader { .. })));
        assert!(matches!(decode_pfm(b"Pf\n", p), Err(Error::CorruptHeader { .. })));
        // big-endian data is accepted
        let mut be = b"Pf\n1 1\n1.0\n".to_vec();
        be.extend_from_slice(&0.25f32.to_be_bytes());
        assert_eq!(decode_pfm(&be, p).unwrap().get(0, 0), 0.25);
    }

    #[test]
    fn png_quantization() {
        assert_eq!(quantize16(1.0), 65535);
        assert_eq!(quantize16(0.0), 0);
        assert_eq!(quantize16(1.5), 65535);
        let p = Plane::from_fn(6, 4, |y, x| (y * 4 + x) as f64 / 23.0);
        let path = Path::new("x.png");
        let back = decode_png16(&encode_png16(&p, path).unwrap(), path).unwrap();
        for (a, b) in p.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn stack_files_and_external_dir() {
        let dir = tempfile::tempdir().unwrap();
        let imgs = [0.1, 0.2, 0.3, 0.4].map(|v| ColorImage::from_fn(4, 8, |c, y, x| round_to_f32(&Plane::filled(1, 1, v + 0.01 * (y + x + c.index()) as f64)).get(0, 0)));
        let st = PolarStack::new(imgs).unwrap();
        save_stack(dir.path(), &st, ImageFormat::Pfm).unwrap();
        assert!(dir.path().join("I045_g.pfm").exists());
        assert_eq!(load_stack(dir.path(), ImageFormat::Pfm, Some((4, 8))).unwrap(), st);
        assert!(matches!(
            load_stack(dir.path(), ImageFormat::Pfm, Some((8, 8))),
            Err(Error::FileDimMismatch { .. })
        ));
        assert_eq!(load_external_dir(dir.path()).unwrap(), st);

        fs::remove_file(dir.path().join("I045_g.pfm")).unwrap();
        let err = load_external_dir(dir.path()).unwrap_err();
        assert!(err.to_string().contains("I045_g.pfm"), "{err}");
        assert!(matches!(
            load_stack(dir.path(), ImageFormat::Pfm, None),
            Err(Error::MissingFile(_))
        ));

        save_plane(&dir.path().join("I045_g.png"), st.plane(Angle::A45, Channel::G), ImageFormat::Png16).unwrap();
        assert!(matches!(load_external_dir(dir.path()), Err(Error::InconsistentFormat(_))));
    }
}
