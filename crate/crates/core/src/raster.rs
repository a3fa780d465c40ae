//! Pixel-indexed rasters shared by every stage.
//!
//! All rasters are row-major with the origin at the top-left pixel, `x`
//! growing rightward and `y` growing downward.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on pixel count accepted anywhere in the crate.
pub const MAX_PIXELS: usize = 1 << 28;

pub(crate) fn checked_len(width: u32, height: u32) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidRaster(format!(
            "dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    let n = (width as usize)
        .checked_mul(height as usize)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or_else(|| Error::InvalidRaster(format!("{width}x{height} is too large")))?;
    Ok(n)
}

pub(crate) fn ensure_same_dims(
    what: &'static str,
    want: (u32, u32),
    got: (u32, u32),
) -> Result<()> {
    if want != got {
        return Err(Error::DimensionMismatch {
            what,
            want_w: want.0,
            want_h: want.1,
            got_w: got.0,
            got_h: got.1,
        });
    }
    Ok(())
}

/// Grayscale intensity image, nominal range `[0, 255]`, stored as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    width: u32,
    height: u32,
    data: Vec<f64>,
}

impl IntensityImage {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if data.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} samples for {width}x{height}, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidRaster(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    ///
    /// Panics if the dimensions are invalid or `f` returns a non-finite value.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("from_fn produced an invalid image")
    }

    pub fn constant(width: u32, height: u32, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub(crate) fn from_raw(width: u32, height: u32, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width as usize * height as usize);
        Self {
            width,
            height,
            data,
        }
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// Sample with replicate padding: out-of-range coordinates clamp to the border.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> f64 {
        let xc = x.clamp(0, self.width as i64 - 1) as usize;
        let yc = y.clamp(0, self.height as i64 - 1) as usize;
        self.data[yc * self.width as usize + xc]
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    /// Population variance of all pixel values.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.data.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.data.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(
            self.width,
            self.height,
            self.data.iter().map(|&v| f(v)).collect(),
        )
        .expect("map produced a non-finite value")
    }

    /// Rotates the image 90 degrees counter-clockwise as displayed
    /// (`out(x, y) = in(w - 1 - y, x)`).
    pub fn rotate90(&self) -> Self {
        let (w, h) = self.dims();
        Self::from_fn(h, w, |x, y| self.get(w - 1 - y, x))
    }
}

/// 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, data: Vec<[u8; 3]>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if data.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} pixels for {width}x{height}, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data).expect("invalid dimensions")
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

    pub fn data(&self) -> &[[u8; 3]] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Depth-camera points in raster order, camera frame, meters (`+z` away
/// from the camera). Invalid pixels are stored as a NaN triple.
#[derive(Debug, Clone)]
pub struct OrganizedCloud {
    width: u32,
    height: u32,
    points: Vec<[f32; 3]>,
}

const INVALID_POINT: [f32; 3] = [f32::NAN; 3];

#[inline]
fn point_is_valid(p: &[f32; 3]) -> bool {
    p.iter().all(|c| c.is_finite()) && p[2] > 0.0
}

impl OrganizedCloud {
    /// Any point that is non-finite or has `z <= 0` is recorded as missing depth.
    pub fn new(width: u32, height: u32, points: Vec<[f32; 3]>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if points.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} points for {width}x{height}, got {}",
                points.len()
            )));
        }
        let points = points
            .into_iter()
            .map(|p| if point_is_valid(&p) { p } else { INVALID_POINT })
            .collect();
        Ok(Self {
            width,
            height,
            points,
        })
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> Option<[f32; 3]>,
    ) -> Self {
        let mut points = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                points.push(f(x, y).unwrap_or(INVALID_POINT));
            }
        }
        Self::new(width, height, points).expect("invalid dimensions")
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

    /// Raw points; invalid pixels hold NaN.
    pub fn raw_points(&self) -> &[[f32; 3]] {
        &self.points
    }

    #[inline]
    pub fn is_valid_index(&self, i: usize) -> bool {
        point_is_valid(&self.points[i])
    }

    #[inline]
    pub fn point_index(&self, i: usize) -> Option<Vector3<f64>> {
        let p = &self.points[i];
        point_is_valid(p).then(|| Vector3::new(p[0] as f64, p[1] as f64, p[2] as f64))
    }

    #[inline]
    pub fn point(&self, x: u32, y: u32) -> Option<Vector3<f64>> {
        self.point_index(y as usize * self.width as usize + x as usize)
    }
}

impl PartialEq for OrganizedCloud {
    /// Bitwise equality, so two invalid pixels compare equal.
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self
                .points
                .iter()
                .zip(&other.points)
                .all(|(a, b)| a.iter().zip(b).all(|(u, v)| u.to_bits() == v.to_bits()))
    }
}

/// Subpixel image coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelPoint {
    pub x: f64,
    pub y: f64,
}

impl PixelPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Nearest pixel, if it lies within a `width x height` raster.
    #[inline]
    pub fn nearest_pixel(&self, width: u32, height: u32) -> Option<(u32, u32)> {
        let x = self.x.round();
        let y = self.y.round();
        (x >= 0.0 && y >= 0.0 && x < width as f64 && y < height as f64)
            .then_some((x as u32, y as u32))
    }

    pub fn distance(&self, other: &PixelPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}
