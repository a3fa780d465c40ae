//! Soft and binary hair masks, and exponential smoothing of a mask stream.

use crate::error::{invalid, Error, Result};
use crate::raster::{checked_len, ensure_same_dims};

/// Default smoothing weight given to the newest frame.
pub const DEFAULT_ALPHA: f64 = 0.9;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Per-pixel hair membership in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl SoftMask {
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if values.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} mask values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidRaster(format!(
                "mask value {} at index {i} is outside [0, 1]",
                values[i]
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn constant(width: u32, height: u32, value: f64) -> Result<Self> {
        let n = checked_len(width, height)?;
        Self::new(width, height, vec![value; n])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }
}

/// Per-pixel hair membership, `true` = hair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if bits.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} mask bits, got {}",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn filled(width: u32, height: u32, value: bool) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits).expect("invalid dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Inclusive bounding box `(x_min, y_min, x_max, y_max)` of the set pixels.
    pub fn bounding_box(&self) -> Option<(u32, u32, u32, u32)> {
        let w = self.width as usize;
        let mut bb: Option<(u32, u32, u32, u32)> = None;
        for (i, _) in self.bits.iter().enumerate().filter(|(_, &b)| b) {
            let (x, y) = ((i % w) as u32, (i / w) as u32);
            bb = Some(match bb {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        bb
    }

    /// True if `self` contains every set pixel of `other`.
    pub fn is_superset_of(&self, other: &BinaryMask) -> bool {
        self.dims() == other.dims() && self.bits.iter().zip(&other.bits).all(|(a, b)| *a || !*b)
    }

    /// Converts to a soft mask with values 0 or 1.
    pub fn to_soft(&self) -> SoftMask {
        SoftMask {
            width: self.width,
            height: self.height,
            values: self
                .bits
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

/// Thresholds a soft mask: a pixel is hair iff its value is `>= threshold`.
pub fn binarize(mask: &SoftMask, threshold: f64) -> BinaryMask {
    BinaryMask {
        width: mask.width,
        height: mask.height,
        bits: mask.values.iter().map(|&v| v >= threshold).collect(),
    }
}

/// Exponentially weighted moving average over a stream of soft masks.
///
/// The first frame initializes the accumulator; every later frame is folded
/// in as `alpha * frame + (1 - alpha) * accum`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalFilter {
    alpha: f64,
    frames_seen: u64,
    accum: Option<SoftMask>,
}

impl TemporalFilter {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        Ok(Self {
            alpha,
            frames_seen: 0,
            accum: None,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn frames_seen(&self) -> u64 {
        self.frames_seen
    }

    pub fn current(&self) -> Option<&SoftMask> {
        self.accum.as_ref()
    }

    pub fn update(&mut self, frame: &SoftMask) -> Result<&SoftMask> {
        let accum = match self.accum.take() {
            None => frame.clone(),
            Some(mut acc) => {
                if let Err(e) = ensure_same_dims("frame", acc.dims(), frame.dims()) {
                    self.accum = Some(acc);
                    return Err(e);
                }
                let a = self.alpha;
                for (v, &f) in acc.values.iter_mut().zip(&frame.values) {
                    // convex combination; clamp guards the last ulp
                    *v = (a * f + (1.0 - a) * *v).clamp(0.0, 1.0);
                }
                acc
            }
        };
        self.frames_seen += 1;
        Ok(self.accum.insert(accum))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn px(v: f64) -> SoftMask {
        SoftMask::new(1, 1, vec![v]).unwrap()
    }

    #[test]
    fn first_frame_initializes() {
        let mut f = TemporalFilter::new(0.9).unwrap();
        let m = SoftMask::new(2, 1, vec![0.25, 0.75]).unwrap();
        assert_eq!(f.update(&m).unwrap(), &m);
        assert_eq!(f.frames_seen(), 1);
    }

    #[test]
    fn impulse_after_zero() {
        let mut f = TemporalFilter::new(0.9).unwrap();
        f.update(&SoftMask::new(2, 1, vec![0.0, 0.0]).unwrap())
            .unwrap();
        let out = f
            .update(&SoftMask::new(2, 1, vec![1.0, 0.0]).unwrap())
            .unwrap();
        assert!((out.values()[0] - 0.9).abs() < 1e-15);
        assert_eq!(out.values()[1], 0.0);
    }

    #[test]
    fn one_then_zero() {
        let mut f = TemporalFilter::new(0.9).unwrap();
        f.update(&px(1.0)).unwrap();
        let out = f.update(&px(0.0)).unwrap();
        // 0.9 * 0 + 0.1 * 1
        assert!((out.values()[0] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_alpha_and_mismatch() {
        assert!(TemporalFilter::new(0.0).is_err());
        assert!(TemporalFilter::new(1.5).is_err());
        assert!(TemporalFilter::new(f64::NAN).is_err());
        let mut f = TemporalFilter::new(1.0).unwrap();
        f.update(&px(0.5)).unwrap();
        let err = f
            .update(&SoftMask::constant(2, 2, 0.5).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        // state survives the rejected frame
        assert_eq!(f.current(), Some(&px(0.5)));
        assert_eq!(f.frames_seen(), 1);
    }

    #[test]
    fn binarize_boundary() {
        let m = SoftMask::new(4, 1, vec![0.49, 0.5, 0.51, 1.0]).unwrap();
        assert_eq!(binarize(&m, 0.5).bits(), &[false, true, true, true]);
    }

    #[test]
    fn bounding_box_and_superset() {
        let m = BinaryMask::from_fn(5, 4, |x, y| (1..=3).contains(&x) && y == 2);
        assert_eq!(m.bounding_box(), Some((1, 2, 3, 2)));
        assert!(BinaryMask::filled(5, 4, true).is_superset_of(&m));
        assert!(!m.is_superset_of(&BinaryMask::filled(5, 4, true)));
        assert_eq!(BinaryMask::filled(2, 2, false).bounding_box(), None);
    }

    proptest! {
        #[test]
        fn accumulator_stays_in_unit_interval(
            alpha in 0.01f64..=1.0,
            frames in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 4), 1..20),
        ) {
            let mut f = TemporalFilter::new(alpha).unwrap();
            for fr in &frames {
                let out = f.update(&SoftMask::new(2, 2, fr.clone()).unwrap()).unwrap();
                prop_assert!(out.values().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }

        #[test]
        fn convergence_bound(
            alpha in 0.05f64..=1.0,
            first in 0.0f64..=1.0,
            target in 0.0f64..=1.0,
            n in 1usize..30,
        ) {
            let mut f = TemporalFilter::new(alpha).unwrap();
            f.update(&px(first)).unwrap();
            for _ in 0..n {
                f.update(&px(target)).unwrap();
            }
            // n identical frames after the first: deviation decays by (1 - alpha) per frame
            let dev = (f.current().unwrap().values()[0] - target).abs();
            let bound = (1.0 - alpha).powi(n as i32) * (first - target).abs();
            prop_assert!(dev <= bound + 1e-12);
        }

        #[test]
        fn linear_in_the_stream(
            alpha in 0.05f64..=1.0,
            a in 0.0f64..=1.0,
            s1 in prop::collection::vec(0.0f64..=1.0, 1..12),
            s2seed in prop::collection::vec(0.0f64..=1.0, 12),
        ) {
            let s2 = &s2seed[..s1.len()];
            let b = 1.0 - a;
            let run = |s: &mut dyn Iterator<Item = f64>| {
                let mut f = TemporalFilter::new(alpha).unwrap();
                let mut last = 0.0;
                for v in s {
                    last = f.update(&px(v.clamp(0.0, 1.0))).unwrap().values()[0];
                }
                last
            };
            let mixed = run(&mut s1.iter().zip(s2).map(|(x, y)| a * x + b * y));
            let sep = a * run(&mut s1.iter().copied()) + b * run(&mut s2.iter().copied());
            prop_assert!((mixed - sep).abs() < 1e-12);
        }
    }
}
