use proptest::prelude::*;
use snakelet_core::snakelet::{Snakelet, SnakeletParams};
use snakelet_core::*;

/// Fixed-point relaxation: keep marking weak pixels next to marked ones
/// until nothing changes.
fn reachability_oracle(nms: &RasterImage, th: Thresholds) -> Vec<bool> {
    let (w, h) = (nms.width() as isize, nms.height() as isize);
    let v = nms.data();
    let mut mark: Vec<bool> = v.iter().map(|&x| x >= th.high && x > th.low).collect();
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if mark[i] || v[i] <= th.low {
                    continue;
                }
                let touches = (-1..=1).any(|dy| {
                    (-1..=1).any(|dx| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0 && ny >= 0 && nx < w && ny < h && mark[(ny * w + nx) as usize]
                    })
                });
                if touches {
                    mark[i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return mark;
        }
    }
}

fn image(w: usize, h: usize, data: Vec<f64>) -> RasterImage {
    RasterImage::new(w, h, 1, data).unwrap()
}

/// Smooth test image from a few low-frequency cosine modes.
fn smooth_image(w: usize, h: usize, coeffs: &[(usize, usize, f64)]) -> RasterImage {
    RasterImage::from_fn(w, h, |x, y| {
        let mut v = 0.5;
        for &(kx, ky, a) in coeffs {
            let cx = libm::cos(core::f64::consts::PI * kx as f64 * (x as f64 + 0.5) / w as f64);
            let cy = libm::cos(core::f64::consts::PI * ky as f64 * (y as f64 + 0.5) / h as f64);
            v += a * cx * cy;
        }
        v
    })
    .unwrap()
}

proptest! {
    #[test]
    fn hysteresis_matches_oracle(
        data in proptest::collection::vec(0.0f64..=1.0, 256),
        a in 0.0f64..=1.0,
        b in 0.0f64..=1.0,
    ) {
        let th = Thresholds::new(a.max(b), a.min(b)).unwrap();
        let nms = image(16, 16, data);
        let got = hysteresis(&nms, th).unwrap();
        prop_assert_eq!(got.membership(), &reachability_oracle(&nms, th)[..]);
        for p in got.pixels() {
            prop_assert!(nms.get(p.x, p.y, 0) > th.low);
        }
    }

    #[test]
    fn hysteresis_is_monotone(
        data in proptest::collection::vec(0.0f64..=1.0, 144),
        low in 0.0f64..0.4,
        high in 0.5f64..0.9,
        bump in 0.0f64..0.1,
    ) {
        let nms = image(12, 12, data);
        let base = hysteresis(&nms, Thresholds::new(high, low).unwrap()).unwrap();
        let higher = hysteresis(&nms, Thresholds::new(high + bump, low).unwrap()).unwrap();
        let raised_low = hysteresis(&nms, Thresholds::new(high, low + bump).unwrap()).unwrap();
        for p in higher.pixels().chain(raised_low.pixels()) {
            prop_assert!(base.get(p.x, p.y));
        }
    }

    #[test]
    fn smoothing_respects_extremes(
        data in proptest::collection::vec(0.0f64..=1.0, 99),
        sigma in 0.1f64..3.0,
    ) {
        let img = image(11, 9, data);
        let out = gaussian_smooth(&img, sigma).unwrap();
        let (lo, hi) = img.data().iter().fold((1.0f64, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        for &v in out.data() {
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }

    #[test]
    fn smoothing_semigroup(
        s1 in 0.5f64..=2.0,
        s2 in 0.5f64..=2.0,
        coeffs in proptest::collection::vec((0usize..3, 0usize..3, -0.1f64..0.1), 1..4),
    ) {
        let img = smooth_image(24, 20, &coeffs);
        let twice = gaussian_smooth(&gaussian_smooth(&img, s1).unwrap(), s2).unwrap();
        let once = gaussian_smooth(&img, libm::sqrt(s1 * s1 + s2 * s2)).unwrap();
        for (a, b) in twice.data().iter().zip(once.data()) {
            prop_assert!((a - b).abs() <= 1e-3, "{} vs {}", a, b);
        }
    }

    #[test]
    fn nms_keeps_or_zeroes(data in proptest::collection::vec(0.0f64..=1.0, 100), sigma in 0.0f64..2.0) {
        let img = image(10, 10, data);
        let g = gradient_gray(&img, sigma).unwrap();
        let nms = nonmax_suppress(&g);
        for (i, &v) in nms.data().iter().enumerate() {
            prop_assert!(v == 0.0 || v == g.magnitude[i].min(1.0));
        }
    }

    #[test]
    fn gray_magnitude_is_component_norm(data in proptest::collection::vec(0.0f64..=1.0, 64), sigma in 0.0f64..2.0) {
        let g = gradient_gray(&image(8, 8, data), sigma).unwrap();
        for i in 0..64 {
            prop_assert!((g.magnitude[i] - libm::hypot(g.gx[i], g.gy[i])).abs() < 1e-9);
            prop_assert!((0.0..core::f64::consts::PI).contains(&g.orientation[i]));
        }
    }

    #[test]
    fn color_orientation_matches_gray(data in proptest::collection::vec(0.0f64..=1.0, 64), sigma in 0.0f64..2.0) {
        let gray = image(8, 8, data.clone());
        let rgb = RasterImage::new(8, 8, 3, data.iter().flat_map(|&v| [v, v, v]).collect()).unwrap();
        let a = gradient_gray(&gray, sigma).unwrap();
        let b = gradient_color(&rgb, sigma).unwrap();
        for i in 0..64 {
            if a.magnitude[i] > 1e-6 {
                let d = (a.orientation[i] - b.orientation[i]).abs();
                prop_assert!(d.min(core::f64::consts::PI - d) < 1e-6);
            }
        }
    }

    #[test]
    fn resample_keeps_arc_length_of_smooth_chains(
        radius in 15.0f64..60.0,
        n in 10usize..40,
        start in 0.0f64..6.0,
    ) {
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = start + 2.0 * i as f64 / radius;
                Point::new(100.0 + radius * libm::cos(t), 100.0 + radius * libm::sin(t))
            })
            .collect();
        let s = Snakelet::new(0, 0, pts, false, true).unwrap();
        let r = s.resample(&SnakeletParams::default()).unwrap();
        prop_assert!((r.arc_length() - s.arc_length()).abs() <= 0.01 * s.arc_length());
    }
}
