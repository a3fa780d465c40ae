//! Gradient structure tensor and closed-form 2x2 symmetric eigen-analysis.

use crate::error::Result;
use crate::filter::{check_odd, sobel, window_mean, Axis, WindowWeighting};
use crate::raster::IntensityImage;

/// Windowed average of the gradient outer product `[Ix², IxIy; IyIx, Iy²]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensorField {
    pub j11: IntensityImage,
    pub j12: IntensityImage,
    pub j21: IntensityImage,
    pub j22: IntensityImage,
}

impl StructureTensorField {
    /// Gradients by Sobel of size `k_delta`, products averaged over a
    /// `k_window x k_window` box.
    pub fn compute(img: &IntensityImage, k_delta: usize, k_window: usize) -> Result<Self> {
        Self::compute_weighted(img, k_delta, k_window, WindowWeighting::Box)
    }

    pub fn compute_weighted(
        img: &IntensityImage,
        k_delta: usize,
        k_window: usize,
        weighting: WindowWeighting,
    ) -> Result<Self> {
        check_odd("k_window", k_window)?;
        let gx = sobel(img, Axis::X, k_delta)?;
        let gy = sobel(img, Axis::Y, k_delta)?;
        let (w, h) = img.dims();
        let prod = |a: &IntensityImage, b: &IntensityImage| {
            IntensityImage::new(
                w,
                h,
                a.data().iter().zip(b.data()).map(|(u, v)| u * v).collect(),
            )
        };
        let s11 = prod(&gx, &gx)?;
        let s12 = prod(&gx, &gy)?;
        let s22 = prod(&gy, &gy)?;
        let j12 = window_mean(&s12, k_window, weighting)?;
        Ok(Self {
            j11: window_mean(&s11, k_window, weighting)?,
            j21: j12.clone(),
            j12,
            j22: window_mean(&s22, k_window, weighting)?,
        })
    }

    pub fn dims(&self) -> (u32, u32) {
        self.j11.dims()
    }

    /// Tensor entries `(j11, j12, j21, j22)` at pixel index `i`.
    #[inline]
    pub fn at(&self, i: usize) -> (f64, f64, f64, f64) {
        (
            self.j11.data()[i],
            self.j12.data()[i],
            self.j21.data()[i],
            self.j22.data()[i],
        )
    }
}

/// Eigenvalues `(λ1, λ2)`, `λ1 >= λ2`, of `[[a, b], [b, c]]`.
#[inline]
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(b);
    (mean + radius, mean - radius)
}

/// Unit eigenvector of the larger eigenvalue of `[[a, b], [b, c]]`, sign
/// normalized so `x > 0`, or `x == 0` and `y > 0`. A tensor with no unique
/// dominant direction (zero or isotropic) yields `(1, 0)`.
#[inline]
pub fn sym2_dominant_eigenvector(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (l1, _) = sym2_eigenvalues(a, b, c);
    let (mut x, mut y) = if a >= c { (l1 - c, b) } else { (b, l1 - a) };
    let n = x.hypot(y);
    if !(n > 0.0) || !n.is_finite() {
        return (1.0, 0.0);
    }
    x /= n;
    y /= n;
    if x < 0.0 || (x == 0.0 && y < 0.0) {
        x = -x;
        y = -y;
    }
    (x, y)
}
