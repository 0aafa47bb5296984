//! Value-to-RGBA mappings for the demo canvases.

use std::f64::consts::PI;

pub type Rgba = [u8; 4];

fn byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn lerp_stops(stops: &[[f64; 3]], t: f64) -> Rgba {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    let f = t - i as f64;
    let (a, b) = (stops[i], stops[i + 1]);
    [
        byte(a[0] + (b[0] - a[0]) * f),
        byte(a[1] + (b[1] - a[1]) * f),
        byte(a[2] + (b[2] - a[2]) * f),
        255,
    ]
}

/// Sequential map for values in [0, 1], dark blue to yellow.
pub fn sequential(t: f64) -> Rgba {
    const STOPS: [[f64; 3]; 5] = [
        [0.267, 0.005, 0.329],
        [0.230, 0.322, 0.546],
        [0.128, 0.567, 0.551],
        [0.369, 0.789, 0.383],
        [0.993, 0.906, 0.144],
    ];
    lerp_stops(&STOPS, t)
}

/// Black-red-yellow-white map for errors in [0, 1].
pub fn heat(t: f64) -> Rgba {
    const STOPS: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [0.8, 0.0, 0.0], [1.0, 0.85, 0.0], [1.0, 1.0, 1.0]];
    lerp_stops(&STOPS, t)
}

/// Cyclic hue map for an angle on [0, π): θ and θ + π get the same color.
pub fn cyclic(theta: f64) -> Rgba {
    let h = theta.rem_euclid(PI) / PI * 6.0;
    let x = 1.0 - (h % 2.0 - 1.0).abs();
    let (r, g, b) = match h as u32 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [byte(r), byte(g), byte(b), 255]
}

pub fn rgb(r: f64, g: f64, b: f64) -> Rgba {
    [byte(r), byte(g), byte(b), 255]
}

pub fn flatten(pixels: impl Iterator<Item = Rgba>) -> Vec<u8> {
    pixels.flat_map(|p| p.into_iter()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints() {
        assert_eq!(heat(0.0), [0, 0, 0, 255]);
        assert_eq!(heat(1.0), [255, 255, 255, 255]);
        assert_eq!(heat(7.0), heat(1.0));
        assert_eq!(sequential(-1.0), sequential(0.0));
        assert_eq!(sequential(1.0), [253, 231, 37, 255]);
    }

    #[test]
    fn cyclic_wraps_at_pi() {
        assert_eq!(cyclic(0.0), [255, 0, 0, 255]);
        assert_eq!(cyclic(PI), cyclic(0.0));
        assert_eq!(cyclic(0.3 + PI), cyclic(0.3));
        assert_eq!(cyclic(PI / 6.0), [255, 255, 0, 255]);
        assert_eq!(cyclic(PI / 3.0), [0, 255, 0, 255]);
        assert_eq!(cyclic(-0.2), cyclic(PI - 0.2));
    }

    #[test]
    fn flatten_is_row_major_rgba() {
        let v = flatten([[1, 2, 3, 4], [5, 6, 7, 8]].into_iter());
        assert_eq!(v, [1, 2, 3, 4, 5, 6, 7, 8]);
    }
}
