//! Coherence-enhancing shock filter.
//!
//! Each iteration estimates the dominant gradient direction `e` per pixel
//! from the windowed structure tensor, measures the second directional
//! derivative `I_vv = eᵀ H e` along it, replaces the pixel by the local
//! window maximum or minimum depending on the sign of `I_vv`, and blends
//! the result back into the image.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::{check_odd, sobel, window_max, window_min, Axis, WindowWeighting};
use crate::raster::IntensityImage;
use crate::tensor::{sym2_dominant_eigenvector, StructureTensorField};

/// Which morphological operation is applied where `I_vv > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvexityConvention {
    /// Window maximum where `I_vv > 0`, minimum where `I_vv < 0`.
    #[default]
    AsWritten,
    /// Window minimum where `I_vv > 0`, maximum where `I_vv < 0`.
    Weickert,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoherenceParams {
    /// Sobel size for the Hessian and the gradients.
    pub k_delta: usize,
    /// Structure tensor averaging window.
    pub k_e: usize,
    /// Min/max window.
    pub k_m: usize,
    /// Weight kept from the current image in each blend.
    pub c_blend: f64,
    pub iterations: usize,
    pub convention: ConvexityConvention,
    /// Weighting inside the `k_e` window.
    pub window: WindowWeighting,
}

impl Default for CoherenceParams {
    fn default() -> Self {
        Self {
            k_delta: 7,
            k_e: 11,
            k_m: 3,
            c_blend: 0.9,
            iterations: 3,
            convention: ConvexityConvention::AsWritten,
            window: WindowWeighting::Box,
        }
    }
}

impl CoherenceParams {
    pub fn validate(&self) -> Result<()> {
        check_odd("k_delta", self.k_delta)?;
        check_odd("k_e", self.k_e)?;
        check_odd("k_m", self.k_m)?;
        if !(0.0..=1.0).contains(&self.c_blend) {
            return Err(invalid(
                "c_blend",
                format!("must lie in [0, 1], got {}", self.c_blend),
            ));
        }
        Ok(())
    }
}

/// Second derivatives from composed first-derivative Sobel filters.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    pub i_xx: IntensityImage,
    pub i_xy: IntensityImage,
    pub i_yy: IntensityImage,
}

pub fn hessian(img: &IntensityImage, k_delta: usize) -> Result<Hessian> {
    let gx = sobel(img, Axis::X, k_delta)?;
    let gy = sobel(img, Axis::Y, k_delta)?;
    Ok(Hessian {
        i_xx: sobel(&gx, Axis::X, k_delta)?,
        i_xy: sobel(&gx, Axis::Y, k_delta)?,
        i_yy: sobel(&gy, Axis::Y, k_delta)?,
    })
}

/// Per-pixel unit dominant eigenvector of the local structure tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenField {
    pub width: u32,
    pub height: u32,
    pub e_x: Vec<f64>,
    pub e_y: Vec<f64>,
}

pub fn dominant_eigenvector(
    img: &IntensityImage,
    k_e: usize,
    k_delta: usize,
    window: WindowWeighting,
) -> Result<EigenField> {
    let t = StructureTensorField::compute_weighted(img, k_delta, k_e, window)?;
    let n = img.data().len();
    let (mut e_x, mut e_y) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let (a, b, _, c) = t.at(i);
        let (x, y) = sym2_dominant_eigenvector(a, b, c);
        e_x.push(x);
        e_y.push(y);
    }
    Ok(EigenField {
        width: img.width(),
        height: img.height(),
        e_x,
        e_y,
    })
}

/// `I_vv = e_x² I_xx + 2 e_x e_y I_xy + e_y² I_yy`.
pub fn convexity(e: &EigenField, h: &Hessian) -> IntensityImage {
    let data = (0..e.e_x.len())
        .map(|i| {
            let (x, y) = (e.e_x[i], e.e_y[i]);
            x * x * h.i_xx.data()[i] + 2.0 * x * y * h.i_xy.data()[i] + y * y * h.i_yy.data()[i]
        })
        .collect();
    IntensityImage::from_raw(e.width, e.height, data)
}

/// One filter iteration.
pub fn shock_step(img: &IntensityImage, params: &CoherenceParams) -> Result<IntensityImage> {
    let e = dominant_eigenvector(img, params.k_e, params.k_delta, params.window)?;
    let h = hessian(img, params.k_delta)?;
    let ivv = convexity(&e, &h);
    let maxed = window_max(img, params.k_m)?;
    let mined = window_min(img, params.k_m)?;
    let (on_pos, on_neg) = match params.convention {
        ConvexityConvention::AsWritten => (&maxed, &mined),
        ConvexityConvention::Weickert => (&mined, &maxed),
    };
    let keep = 1.0 - params.c_blend;
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let s = ivv.data()[i];
            let target = if s > 0.0 {
                on_pos.data()[i]
            } else if s < 0.0 {
                on_neg.data()[i]
            } else {
                return v;
            };
            // v*c + target*(1-c), written so that target == v returns v exactly
            (v + keep * (target - v)).clamp(v.min(target), v.max(target))
        })
        .collect();
    Ok(IntensityImage::from_raw(img.width(), img.height(), data))
}

/// Runs `params.iterations` filter iterations.
pub fn shock_iterate(img: &IntensityImage, params: &CoherenceParams) -> Result<IntensityImage> {
    params.validate()?;
    let mut cur = img.clone();
    for _ in 0..params.iterations {
        cur = shock_step(&cur, params)?;
    }
    Ok(cur)
}
