//! Separable linear filters and rank filters with replicate-padded borders.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::raster::IntensityImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

pub(crate) fn check_odd(name: &'static str, size: usize) -> Result<()> {
    if size < 3 || size % 2 == 0 {
        return Err(invalid(name, format!("must be odd and >= 3, got {size}")));
    }
    Ok(())
}

fn check_kernel(size: usize, img: &IntensityImage) -> Result<()> {
    check_odd("kernel size", size)?;
    let limit = img.width().min(img.height()) as usize;
    if size > limit {
        return Err(invalid(
            "kernel size",
            format!("{size} exceeds the smaller image dimension {limit}"),
        ));
    }
    Ok(())
}

/// Row `n` of Pascal's triangle.
fn binomial(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..n {
        let mut next = vec![1.0; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row
}

/// Smoothing half of the extended Sobel kernel: binomial weights of length `size`.
pub fn sobel_smoothing(size: usize) -> Vec<f64> {
    binomial(size - 1)
}

/// Derivative half of the extended Sobel kernel: `[-1, 0, 1]` convolved with
/// the binomial of length `size - 2`. Used as a correlation kernel, so a
/// rising ramp gives a positive response.
pub fn sobel_derivative(size: usize) -> Vec<f64> {
    let b = binomial(size - 3);
    let mut d = vec![0.0; size];
    for (i, &w) in b.iter().enumerate() {
        d[i] -= w;
        d[i + 2] += w;
    }
    d
}

fn correlate_rows(img: &IntensityImage, k: &[f64]) -> Vec<f64> {
    let (w, h) = img.dims();
    let r = (k.len() / 2) as i64;
    let mut out = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * img.get_clamped(x + i as i64 - r, y);
            }
            out.push(acc);
        }
    }
    out
}

fn correlate_cols(img: &IntensityImage, k: &[f64]) -> Vec<f64> {
    let (w, h) = img.dims();
    let r = (k.len() / 2) as i64;
    let mut out = Vec::with_capacity(w as usize * h as usize);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                acc += kv * img.get_clamped(x, y + i as i64 - r);
            }
            out.push(acc);
        }
    }
    out
}

/// Correlates with the separable kernel `ky ⊗ kx` (rows first, then columns).
pub fn correlate_separable(img: &IntensityImage, kx: &[f64], ky: &[f64]) -> IntensityImage {
    let (w, h) = img.dims();
    let rows = IntensityImage::from_raw(w, h, correlate_rows(img, kx));
    IntensityImage::from_raw(w, h, correlate_cols(&rows, ky))
}

/// Extended Sobel derivative along `axis`.
pub fn sobel(img: &IntensityImage, axis: Axis, size: usize) -> Result<IntensityImage> {
    check_kernel(size, img)?;
    let d = sobel_derivative(size);
    let s = sobel_smoothing(size);
    Ok(match axis {
        Axis::X => correlate_separable(img, &d, &s),
        Axis::Y => correlate_separable(img, &s, &d),
    })
}

/// Unweighted `size x size` window mean.
pub fn box_mean(img: &IntensityImage, size: usize) -> Result<IntensityImage> {
    check_odd("window size", size)?;
    let ones = vec![1.0; size];
    let norm = (size * size) as f64;
    let summed = correlate_separable(img, &ones, &ones);
    let (w, h) = img.dims();
    Ok(IntensityImage::from_raw(
        w,
        h,
        summed.into_data().into_iter().map(|v| v / norm).collect(),
    ))
}

/// Weighting of the pixels inside a square averaging window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowWeighting {
    #[default]
    Box,
    /// Gaussian with `sigma = size / 6`, truncated to the window and renormalized.
    Gaussian,
}

/// `size x size` weighted window mean.
pub fn window_mean(
    img: &IntensityImage,
    size: usize,
    weighting: WindowWeighting,
) -> Result<IntensityImage> {
    match weighting {
        WindowWeighting::Box => box_mean(img, size),
        WindowWeighting::Gaussian => {
            check_odd("window size", size)?;
            let r = (size / 2) as i64;
            let sigma = size as f64 / 6.0;
            let k: Vec<f64> = (-r..=r)
                .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
                .collect();
            let total: f64 = k.iter().sum();
            let k: Vec<f64> = k.into_iter().map(|v| v / total).collect();
            Ok(correlate_separable(img, &k, &k))
        }
    }
}

fn rank_filter(img: &IntensityImage, size: usize, pick: fn(f64, f64) -> f64) -> IntensityImage {
    let (w, h) = img.dims();
    let r = (size / 2) as i64;
    let pass = |src: &IntensityImage, horizontal: bool| {
        let mut out = Vec::with_capacity(w as usize * h as usize);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let mut acc = src.get(x as u32, y as u32);
                for o in -r..=r {
                    let v = if horizontal {
                        src.get_clamped(x + o, y)
                    } else {
                        src.get_clamped(x, y + o)
                    };
                    acc = pick(acc, v);
                }
                out.push(acc);
            }
        }
        IntensityImage::from_raw(w, h, out)
    };
    pass(&pass(img, true), false)
}

/// `size x size` window maximum.
pub fn window_max(img: &IntensityImage, size: usize) -> Result<IntensityImage> {
    check_odd("window size", size)?;
    Ok(rank_filter(img, size, f64::max))
}

/// `size x size` window minimum.
pub fn window_min(img: &IntensityImage, size: usize) -> Result<IntensityImage> {
    check_odd("window size", size)?;
    Ok(rank_filter(img, size, f64::min))
}

/// Normalized Gaussian kernel with radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let k: Vec<f64> = (-r..=r)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = k.iter().sum();
    k.into_iter().map(|v| v / total).collect()
}

pub fn gaussian_blur(img: &IntensityImage, sigma: f64) -> Result<IntensityImage> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    let k = gaussian_kernel(sigma);
    Ok(correlate_separable(img, &k, &k))
}
