//! Metrics checked against direct, unoptimized formula evaluations.

use std::f64::consts::PI;

use polarforge::metrics::{error_rate, error_rate_angular, mae_angular, psnr, ssim};
use polarforge::ColorImage;
use proptest::prelude::*;

const N: usize = 16;

fn image(data: &[f64]) -> ColorImage {
    ColorImage::from_fn(N, N, |c, y, x| data[(c.index() * N + y) * N + x])
}

fn pixels() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 3 * N * N)
}

fn angles() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..PI, 3 * N * N)
}

fn oracle_psnr(a: &[f64], b: &[f64]) -> f64 {
    let mse = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64;
    -10.0 * mse.log10()
}

// 2-D window weights and per-window moments, no separability, no reuse.
fn oracle_ssim_plane(a: &[f64], b: &[f64]) -> f64 {
    let (win, sigma) = (11usize, 1.5f64);
    let half = (win / 2) as f64;
    let mut w = vec![0.0; win * win];
    for i in 0..win {
        for j in 0..win {
            let (dy, dx) = (i as f64 - half, j as f64 - half);
            w[i * win + j] = (-(dy * dy + dx * dx) / (2.0 * sigma * sigma)).exp();
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let mut acc = 0.0;
    let mut count = 0.0;
    for y0 in 0..=N - win {
        for x0 in 0..=N - win {
            let (mut ma, mut mb) = (0.0, 0.0);
            for i in 0..win {
                for j in 0..win {
                    let k = (y0 + i) * N + x0 + j;
                    ma += w[i * win + j] * a[k];
                    mb += w[i * win + j] * b[k];
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for i in 0..win {
                for j in 0..win {
                    let k = (y0 + i) * N + x0 + j;
                    va += w[i * win + j] * (a[k] - ma).powi(2);
                    vb += w[i * win + j] * (b[k] - mb).powi(2);
                    cov += w[i * win + j] * (a[k] - ma) * (b[k] - mb);
                }
            }
            acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            count += 1.0;
        }
    }
    acc / count
}

fn oracle_ssim(a: &[f64], b: &[f64]) -> f64 {
    (0..3)
        .map(|c| {
            let r = c * N * N..(c + 1) * N * N;
            oracle_ssim_plane(&a[r.clone()], &b[r])
        })
        .sum::<f64>()
        / 3.0
}

fn oracle_error_rate(v: &[f64], gt: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..v.len() {
        num += (v[i] - gt[i]).abs();
        den += v[i];
    }
    num / den
}

fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % PI;
    d.min(PI - d)
}

fn oracle_mae_deg(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| circ(*x, *y)).sum::<f64>() / a.len() as f64 * 180.0 / PI
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn psnr_matches_direct_formula(a in pixels(), b in pixels()) {
        let got = psnr(&image(&a), &image(&b)).unwrap();
        prop_assert!((got - oracle_psnr(&a, &b)).abs() < 1e-9);
    }

    #[test]
    fn ssim_matches_direct_formula(a in pixels(), b in pixels()) {
        let got = ssim(&image(&a), &image(&b)).unwrap();
        prop_assert!((got - oracle_ssim(&a, &b)).abs() < 1e-6);
    }

    #[test]
    fn ssim_of_correlated_images(a in pixels(), noise in pixels()) {
        // near-identical pairs exercise the high-SSIM end
        let b: Vec<f64> = a.iter().zip(&noise).map(|(x, n)| (x + 0.05 * (n - 0.5)).clamp(0.0, 1.0)).collect();
        let got = ssim(&image(&a), &image(&b)).unwrap();
        prop_assert!((got - oracle_ssim(&a, &b)).abs() < 1e-6);
    }

    #[test]
    fn error_rate_matches_direct_formula(a in pixels(), b in pixels()) {
        let got = error_rate(&image(&a), &image(&b)).unwrap();
        prop_assert!((got - oracle_error_rate(&a, &b)).abs() < 1e-9);
    }

    #[test]
    fn angular_metrics_match_direct_formula(a in angles(), b in angles()) {
        let got = mae_angular(&image(&a), &image(&b)).unwrap();
        prop_assert!((got - oracle_mae_deg(&a, &b)).abs() < 1e-6);
        let er = error_rate_angular(&image(&a), &image(&b)).unwrap();
        let num: f64 = a.iter().zip(&b).map(|(x, y)| circ(*x, *y)).sum();
        prop_assert!((er - num / a.iter().sum::<f64>()).abs() < 1e-9);
    }

    #[test]
    fn mae_is_a_metric_on_the_half_circle(a in angles(), b in angles(), c in angles()) {
        let (ia, ib, ic) = (image(&a), image(&b), image(&c));
        let ab = mae_angular(&ia, &ib).unwrap();
        prop_assert!((ab - mae_angular(&ib, &ia).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= mae_angular(&ia, &ic).unwrap() + mae_angular(&ic, &ib).unwrap() + 1e-9);
        let shifted = ia.map(|v| (v + PI) % PI);
        prop_assert!((mae_angular(&shifted, &ib).unwrap() - ab).abs() < 1e-9);
    }

    #[test]
    fn error_rate_is_scale_covariant(a in pixels(), b in pixels(), k in 0.1..10.0f64) {
        let base = error_rate(&image(&a), &image(&b)).unwrap();
        let scaled = error_rate(&image(&a).map(|v| v * k), &image(&b).map(|v| v * k)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-12);
    }
}

#[test]
fn analytic_cases() {
    let half = ColorImage::filled(N, N, 0.5);
    let six = ColorImage::filled(N, N, 0.6);
    assert!((error_rate(&half, &six).unwrap() - 0.2).abs() < 1e-12);
    assert!((psnr(&half, &six).unwrap() - 20.0).abs() < 1e-9);
    assert_eq!(psnr(&half, &half).unwrap(), f64::INFINITY);
    assert!((ssim(&half, &half).unwrap() - 1.0).abs() < 1e-12);
    let a = ColorImage::filled(N, N, 0.1 * PI);
    let b = ColorImage::filled(N, N, 0.95 * PI);
    assert!((mae_angular(&a, &b).unwrap() - 27.0).abs() < 1e-9);
}
