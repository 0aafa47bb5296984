use super::Plane;

/// Square-window median filter with clamp-to-edge borders. Radius 0 is the identity.
pub fn median_filter(src: &Plane, radius: usize) -> Plane {
    if radius == 0 || src.is_empty() {
        return src.clone();
    }
    let r = radius as isize;
    let side = 2 * radius + 1;
    let mut window = Vec::with_capacity(side * side);
    let (h, w) = src.dims();
    let mut out = Plane::zeros(h, w);
    for y in 0..h as isize {
        for x in 0..w as isize {
            window.clear();
            for dy in -r..=r {
                for dx in -r..=r {
                    window.push(src.get_clamped(y + dy, x + dx));
                }
            }
            let mid = window.len() / 2;
            let (_, m, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
            out.set(y as usize, x as usize, *m);
        }
    }
    out
}
