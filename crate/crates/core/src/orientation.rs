//! Hair-flow orientation field from the gradient structure tensor.
//!
//! The flow direction is perpendicular to the dominant gradient direction:
//! `θ = ½·atan2(j12 + j21, j11 − j22) + π/2`, wrapped into `[0, π)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::check_odd;
use crate::raster::{checked_len, IntensityImage};
use crate::shock::{shock_iterate, CoherenceParams};
use crate::tensor::{sym2_eigenvalues, StructureTensorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrientationParams {
    pub k_delta: usize,
    /// Tensor averaging window.
    pub k_window: usize,
}

impl Default for OrientationParams {
    fn default() -> Self {
        Self {
            k_delta: 3,
            k_window: 5,
        }
    }
}

impl OrientationParams {
    pub fn validate(&self) -> Result<()> {
        check_odd("k_delta", self.k_delta)?;
        check_odd("k_window", self.k_window)
    }
}

/// Per-pixel undirected flow angle in `[0, π)` plus coherence in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationField {
    width: u32,
    height: u32,
    theta: Vec<f64>,
    coherence: Vec<f64>,
}

/// Narrows an angle in `[0, π)` to `f32` without rounding up onto `π`.
pub fn theta_to_f32(theta: f64) -> f32 {
    let t = theta as f32;
    if (t as f64) >= PI {
        0.0
    } else {
        t
    }
}

/// Wraps any angle into `[0, π)`.
pub fn wrap_pi(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

impl OrientationField {
    pub fn new(width: u32, height: u32, theta: Vec<f64>, coherence: Vec<f64>) -> Result<Self> {
        let n = checked_len(width, height)?;
        if theta.len() != n || coherence.len() != n {
            return Err(Error::InvalidRaster(format!(
                "expected {n} theta and coherence samples, got {} and {}",
                theta.len(),
                coherence.len()
            )));
        }
        if let Some(i) = theta.iter().position(|&t| !(t >= 0.0 && t < PI)) {
            return Err(Error::InvalidRaster(format!(
                "theta {} at index {i} is outside [0, pi)",
                theta[i]
            )));
        }
        if let Some(i) = coherence.iter().position(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidRaster(format!(
                "coherence {} at index {i} is outside [0, 1]",
                coherence[i]
            )));
        }
        Ok(Self {
            width,
            height,
            theta,
            coherence,
        })
    }

    /// Builds a field from `f(x, y) -> (theta, coherence)`; theta is wrapped
    /// into `[0, π)` and coherence clamped into `[0, 1]`.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> (f64, f64)) -> Self {
        let n = width as usize * height as usize;
        let (mut theta, mut coherence) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for y in 0..height {
            for x in 0..width {
                let (t, c) = f(x, y);
                theta.push(wrap_pi(t));
                coherence.push(c.clamp(0.0, 1.0));
            }
        }
        Self::new(width, height, theta, coherence).expect("from_fn produced an invalid field")
    }

    /// Same angle everywhere, full coherence.
    pub fn uniform(width: u32, height: u32, theta: f64) -> Self {
        Self::from_fn(width, height, |_, _| (theta, 1.0))
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

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn coherence(&self) -> &[f64] {
        &self.coherence
    }

    #[inline]
    pub fn theta_at(&self, x: u32, y: u32) -> f64 {
        self.theta[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn coherence_at(&self, x: u32, y: u32) -> f64 {
        self.coherence[y as usize * self.width as usize + x as usize]
    }

    /// Grayscale preview with `θ·255/π` per pixel.
    pub fn preview(&self) -> IntensityImage {
        IntensityImage::from_raw(
            self.width,
            self.height,
            self.theta.iter().map(|&t| t * 255.0 / PI).collect(),
        )
    }
}

pub fn structure_tensor(
    img: &IntensityImage,
    params: &OrientationParams,
) -> Result<StructureTensorField> {
    params.validate()?;
    StructureTensorField::compute(img, params.k_delta, params.k_window)
}

/// Flow angle and coherence for a single tensor.
pub fn orientation_of(j11: f64, j12: f64, j21: f64, j22: f64) -> (f64, f64) {
    let trace = j11 + j22;
    if !(trace > 0.0) {
        return (FRAC_PI_2, 0.0);
    }
    let theta = wrap_pi(0.5 * (j12 + j21).atan2(j11 - j22) + FRAC_PI_2);
    let (l1, l2) = sym2_eigenvalues(j11, 0.5 * (j12 + j21), j22);
    let coherence = ((l1 - l2) / (l1 + l2)).clamp(0.0, 1.0);
    (theta, coherence)
}

pub fn orientation(tensor: &StructureTensorField) -> OrientationField {
    let (w, h) = tensor.dims();
    let mut i = 0usize;
    OrientationField::from_fn(w, h, |_, _| {
        let (a, b, c, d) = tensor.at(i);
        i += 1;
        orientation_of(a, b, c, d)
    })
}

/// Shock filter, then structure-tensor orientation.
pub fn field_from_image(
    img: &IntensityImage,
    coherence: &CoherenceParams,
    params: &OrientationParams,
) -> Result<OrientationField> {
    let filtered = shock_iterate(img, coherence)?;
    Ok(orientation(&structure_tensor(&filtered, params)?))
}

/// Orientation without the shock filter.
pub fn field_without_filter(
    img: &IntensityImage,
    params: &OrientationParams,
) -> Result<OrientationField> {
    Ok(orientation(&structure_tensor(img, params)?))
}

/// Smallest angle between two undirected orientations, in `[0, π/2]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}
