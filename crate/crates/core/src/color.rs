use crate::mask::BinaryMask;
use crate::raster::{IntensityImage, RgbImage};

/// BT.601 luma.
pub fn luma(rgb: [u8; 3]) -> f64 {
    0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64
}

pub fn to_grayscale(img: &RgbImage) -> IntensityImage {
    IntensityImage::from_raw(
        img.width(),
        img.height(),
        img.data().iter().map(|&p| luma(p)).collect(),
    )
}

/// HSV hue in degrees `[0, 360)`, or `None` for achromatic pixels.
pub fn hue(rgb: [u8; 3]) -> Option<f64> {
    let [r, g, b] = rgb.map(|c| c as f64);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let chroma = max - min;
    if chroma == 0.0 {
        return None;
    }
    let h = if max == r {
        60.0 * ((g - b) / chroma)
    } else if max == g {
        60.0 * ((b - r) / chroma + 2.0)
    } else {
        60.0 * ((r - g) / chroma + 4.0)
    };
    let h = h.rem_euclid(360.0);
    // rem_euclid can land exactly on 360 for tiny negative inputs
    Some(if h >= 360.0 { 0.0 } else { h })
}

/// HSV value (brightest channel) in `[0, 255]`.
pub fn value(rgb: [u8; 3]) -> f64 {
    rgb.into_iter().max().unwrap_or(0) as f64
}

/// Per-pixel hue map; `None` marks achromatic pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct HueMap {
    pub width: u32,
    pub height: u32,
    pub hues: Vec<Option<f64>>,
}

pub fn rgb_to_hue(img: &RgbImage) -> HueMap {
    HueMap {
        width: img.width(),
        height: img.height(),
        hues: img.data().iter().map(|&p| hue(p)).collect(),
    }
}

/// Naive hair mask: pixels no brighter than `val_hi` whose hue lies in
/// `[hue_lo, hue_hi]` (wrapping through 0 when `hue_lo > hue_hi`). Achromatic
/// pixels pass on value alone.
pub fn hsv_threshold(img: &RgbImage, hue_lo: f64, hue_hi: f64, val_hi: f64) -> BinaryMask {
    let in_range = |h: f64| {
        if hue_lo <= hue_hi {
            (hue_lo..=hue_hi).contains(&h)
        } else {
            h >= hue_lo || h <= hue_hi
        }
    };
    BinaryMask::from_fn(img.width(), img.height(), |x, y| {
        let p = img.get(x, y);
        value(p) <= val_hi && hue(p).is_none_or(in_range)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn grayscale_examples() {
        let img = RgbImage::new(3, 1, vec![[255, 255, 255], [0, 0, 0], [255, 0, 0]]).unwrap();
        let g = to_grayscale(&img);
        assert_abs_diff_eq!(g.get(0, 0), 255.0, epsilon = 1e-9);
        assert_eq!(g.get(1, 0), 0.0);
        assert_abs_diff_eq!(g.get(2, 0), 76.245, epsilon = 1e-9);
    }

    #[test]
    fn hue_examples() {
        assert_eq!(hue([255, 0, 0]), Some(0.0));
        assert_eq!(hue([0, 255, 0]), Some(120.0));
        assert_eq!(hue([0, 0, 255]), Some(240.0));
        assert_eq!(hue([128, 128, 128]), None);
        assert_abs_diff_eq!(
            hue([255, 0, 1]).unwrap(),
            360.0 - 60.0 / 255.0,
            epsilon = 1e-9
        );
    }

    proptest! {
        #[test]
        fn grayscale_stays_in_range(r: u8, g: u8, b: u8) {
            let l = luma([r, g, b]);
            prop_assert!((0.0..=255.0 + 1e-9).contains(&l));
        }

        #[test]
        fn hue_is_scale_invariant(r in 0u8..=63, g in 0u8..=63, b in 0u8..=63, s in 1u8..=4) {
            let scaled = [r * s, g * s, b * s];
            match (hue([r, g, b]), hue(scaled)) {
                (None, None) => {}
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9),
                other => prop_assert!(false, "mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn threshold_mask() {
        let img = RgbImage::new(
            4,
            1,
            vec![[20, 10, 5], [10, 10, 10], [200, 100, 50], [5, 10, 40]],
        )
        .unwrap();
        let m = hsv_threshold(&img, 0.0, 60.0, 100.0);
        assert_eq!(m.bits(), &[true, true, false, false]);
        let wrapped = hsv_threshold(&img, 200.0, 30.0, 100.0);
        assert_eq!(wrapped.bits(), &[true, true, false, true]);
    }
}
