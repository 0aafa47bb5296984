use super::{check_dims, Plane};
use crate::error::{Error, Result};

/// Source coordinate and blend weight along one axis for a half-pixel-center
/// resize from `src_len` to `dst_len` samples.
#[derive(Clone, Copy)]
struct Tap {
    lo: usize,
    hi: usize,
    frac: f64,
}

fn axis_taps(src_len: usize, dst_len: usize) -> Vec<Tap> {
    let scale = src_len as f64 / dst_len as f64;
    let max = (src_len - 1) as f64;
    (0..dst_len)
        .map(|i| {
            let s = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, max);
            let lo = s.floor() as usize;
            let hi = (lo + 1).min(src_len - 1);
            Tap {
                lo,
                hi,
                frac: s - lo as f64,
            }
        })
        .collect()
}

/// Bilinear resize with half-pixel-center alignment and clamp-to-edge borders.
///
/// Output pixel `i` samples the source at `(i + 0.5) * scale - 0.5`.
pub fn resample_bilinear(src: &Plane, out_h: usize, out_w: usize) -> Result<Plane> {
    if src.is_empty() {
        return Err(Error::EmptyPlane);
    }
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidConfig(format!(
            "output dimensions must be positive, got {out_h}x{out_w}"
        )));
    }
    if src.dims() == (out_h, out_w) {
        return Ok(src.clone());
    }
    let ys = axis_taps(src.height(), out_h);
    let xs = axis_taps(src.width(), out_w);
    let mut data = Vec::with_capacity(out_h * out_w);
    for ty in &ys {
        for tx in &xs {
            let top = lerp(src.get(ty.lo, tx.lo), src.get(ty.lo, tx.hi), tx.frac);
            let bottom = lerp(src.get(ty.hi, tx.lo), src.get(ty.hi, tx.hi), tx.frac);
            data.push(lerp(top, bottom, ty.frac));
        }
    }
    Plane::new(out_h, out_w, data)
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else {
        a + (b - a) * t
    }
}

/// Bilinear translation: output `(y, x)` samples the source at
/// `(y + dy, x + dx)`, clamped to the edge.
pub fn shift_bilinear(src: &Plane, dy: f64, dx: f64) -> Plane {
    let (h, w) = src.dims();
    let tap = |i: usize, d: f64, len: usize| {
        let s = (i as f64 + d).clamp(0.0, (len - 1) as f64);
        let lo = s.floor() as usize;
        Tap {
            lo,
            hi: (lo + 1).min(len - 1),
            frac: s - lo as f64,
        }
    };
    let ys: Vec<Tap> = (0..h).map(|y| tap(y, dy, h)).collect();
    let xs: Vec<Tap> = (0..w).map(|x| tap(x, dx, w)).collect();
    Plane::from_fn(h, w, |y, x| {
        let (ty, tx) = (ys[y], xs[x]);
        let top = lerp(src.get(ty.lo, tx.lo), src.get(ty.lo, tx.hi), tx.frac);
        let bottom = lerp(src.get(ty.hi, tx.lo), src.get(ty.hi, tx.hi), tx.frac);
        lerp(top, bottom, ty.frac)
    })
}

pub fn upsample_2x(src: &Plane) -> Result<Plane> {
    resample_bilinear(src, src.height() * 2, src.width() * 2)
}

/// Box-filter decimation: each output pixel is the mean of a `factor`×`factor` block.
pub fn downsample_area(src: &Plane, factor: usize) -> Result<Plane> {
    if src.is_empty() {
        return Err(Error::EmptyPlane);
    }
    if factor < 2 {
        return Err(Error::InvalidConfig(format!(
            "downsample factor must be at least 2, got {factor}"
        )));
    }
    let (h, w) = src.dims();
    if h % factor != 0 || w % factor != 0 {
        return Err(Error::NotDivisible {
            height: h,
            width: w,
            factor,
        });
    }
    let (oh, ow) = (h / factor, w / factor);
    let norm = (factor * factor) as f64;
    let mut data = vec![0.0; oh * ow];
    for y in 0..h {
        let row = &src.data()[y * w..(y + 1) * w];
        let out_row = &mut data[(y / factor) * ow..(y / factor + 1) * ow];
        for (ox, chunk) in row.chunks_exact(factor).enumerate() {
            out_row[ox] += chunk.iter().sum::<f64>();
        }
    }
    for v in &mut data {
        *v /= norm;
    }
    Plane::new(oh, ow, data)
}

/// Gradient loss between two planes.
///
/// Mean absolute difference of forward x-differences plus mean absolute
/// difference of forward y-differences. An axis of length 1 contributes 0.
pub fn gradient_l1(a: &Plane, b: &Plane) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let (h, w) = a.dims();
    let mut gx = 0.0;
    let mut gy = 0.0;
    for y in 0..h {
        for x in 0..w {
            if x + 1 < w {
                let da = a.get(y, x + 1) - a.get(y, x);
                let db = b.get(y, x + 1) - b.get(y, x);
                gx += (da - db).abs();
            }
            if y + 1 < h {
                let da = a.get(y + 1, x) - a.get(y, x);
                let db = b.get(y + 1, x) - b.get(y, x);
                gy += (da - db).abs();
            }
        }
    }
    let nx = h * w.saturating_sub(1);
    let ny = h.saturating_sub(1) * w;
    let mx = if nx > 0 { gx / nx as f64 } else { 0.0 };
    let my = if ny > 0 { gy / ny as f64 } else { 0.0 };
    Ok(mx + my)
}
