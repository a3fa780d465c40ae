//! Synthetic hair scenes with analytic flow fields.
//!
//! Every scene is a sinusoidal grating whose level lines follow the flow,
//! so the true orientation at each pixel is known in closed form. The depth
//! cloud is a flat sheet one metre from the camera at 1 mm per pixel.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::filter::gaussian_blur;
use crate::mask::BinaryMask;
use crate::orientation::{wrap_pi, OrientationField};
use crate::raster::{IntensityImage, OrganizedCloud, RgbImage};

pub const MIN_SIZE: u32 = 32;
/// Unmasked border around synthetic hair, in pixels.
pub const MASK_MARGIN: u32 = 4;
pub const PLANE_DEPTH_M: f64 = 1.0;
pub const METRES_PER_PIXEL: f64 = 0.001;

const MEAN_LEVEL: f64 = 128.0;
const AMPLITUDE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SceneKind {
    /// Straight strands at `angle_rad` from the +x axis (y pointing down).
    Stripes { angle_rad: f64 },
    /// Strands following `y = c + amplitude * sin(2πx / wavelength)`.
    Waves {
        amplitude_px: f64,
        wavelength_px: f64,
    },
    /// Concentric strands; `center` defaults to the image centre.
    Circular { center: Option<[f64; 2]> },
    /// Left half runs down-left, right half down-right.
    Parting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub kind: SceneKind,
    pub size: u32,
    /// Distance between neighbouring bright strands, measured across the flow.
    pub period_px: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SceneKind, size: u32) -> Self {
        Self {
            kind,
            size,
            period_px: 12.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Self {
        self.noise_sigma = sigma;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < MIN_SIZE {
            return Err(invalid(
                "size",
                format!("must be at least {MIN_SIZE}, got {}", self.size),
            ));
        }
        if !(self.period_px > 0.0 && self.period_px.is_finite()) {
            return Err(invalid(
                "period_px",
                format!("must be positive, got {}", self.period_px),
            ));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid(
                "noise_sigma",
                format!("must be non-negative, got {}", self.noise_sigma),
            ));
        }
        match self.kind {
            SceneKind::Stripes { angle_rad } if !angle_rad.is_finite() => {
                Err(invalid("angle_rad", "must be finite"))
            }
            SceneKind::Waves {
                amplitude_px,
                wavelength_px,
            } => {
                if !(amplitude_px >= 0.0 && amplitude_px.is_finite()) {
                    return Err(invalid("amplitude_px", "must be non-negative"));
                }
                if !(wavelength_px > 0.0 && wavelength_px.is_finite()) {
                    return Err(invalid("wavelength_px", "must be positive"));
                }
                Ok(())
            }
            SceneKind::Circular {
                center: Some([cx, cy]),
            } if !(cx.is_finite() && cy.is_finite()) => Err(invalid("center", "must be finite")),
            _ => Ok(()),
        }
    }

    fn center(&self) -> (f64, f64) {
        let c = (self.size as f64 - 1.0) / 2.0;
        match self.kind {
            SceneKind::Circular {
                center: Some([cx, cy]),
            } => (cx, cy),
            _ => (c, c),
        }
    }

    /// Signed distance across the flow, and the flow angle, at a pixel.
    pub fn phase_and_theta(&self, x: f64, y: f64) -> (f64, f64) {
        match self.kind {
            SceneKind::Stripes { angle_rad } => {
                let (s, c) = angle_rad.sin_cos();
                (-x * s + y * c, wrap_pi(angle_rad))
            }
            SceneKind::Waves {
                amplitude_px: a,
                wavelength_px: l,
            } => {
                let k = 2.0 * PI / l;
                (
                    y - a * (k * x).sin(),
                    wrap_pi((a * k * (k * x).cos()).atan()),
                )
            }
            SceneKind::Circular { .. } => {
                let (cx, cy) = self.center();
                let (dx, dy) = (x - cx, y - cy);
                (dx.hypot(dy), wrap_pi(dy.atan2(dx) + FRAC_PI_2))
            }
            SceneKind::Parting => {
                if x < self.size as f64 / 2.0 {
                    ((x + y) / SQRT_2, 3.0 * FRAC_PI_4)
                } else {
                    ((y - x) / SQRT_2, FRAC_PI_4)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub spec: SyntheticSpec,
    pub image: IntensityImage,
    pub truth: OrientationField,
    pub mask: BinaryMask,
    pub cloud: OrganizedCloud,
}

impl Scene {
    /// Grey colour image with the intensity rounded to 8 bits.
    pub fn rgb(&self) -> RgbImage {
        RgbImage::from_fn(self.image.width(), self.image.height(), |x, y| {
            let v = self.image.get(x, y).round().clamp(0.0, 255.0) as u8;
            [v, v, v]
        })
    }
}

pub fn flat_cloud(width: u32, height: u32) -> OrganizedCloud {
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    OrganizedCloud::from_fn(width, height, |x, y| {
        Some([
            ((x as f64 - cx) * METRES_PER_PIXEL) as f32,
            ((y as f64 - cy) * METRES_PER_PIXEL) as f32,
            PLANE_DEPTH_M as f32,
        ])
    })
}

pub fn generate(spec: &SyntheticSpec) -> Result<Scene> {
    spec.validate()?;
    let n = spec.size;
    let mut noise = if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| invalid("noise_sigma", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        Some(move || normal.sample(&mut rng))
    } else {
        None
    };
    let image = IntensityImage::from_fn(n, n, |x, y| {
        let (phase, _) = spec.phase_and_theta(x as f64, y as f64);
        let clean = MEAN_LEVEL + AMPLITUDE * (2.0 * PI * phase / spec.period_px).cos();
        let eps = noise.as_mut().map_or(0.0, |draw| draw());
        (clean + eps).clamp(0.0, 255.0)
    });
    let truth = OrientationField::from_fn(n, n, |x, y| {
        (spec.phase_and_theta(x as f64, y as f64).1, 1.0)
    });
    let mask = BinaryMask::from_fn(n, n, |x, y| {
        let inner = MASK_MARGIN..n - MASK_MARGIN;
        inner.contains(&x) && inner.contains(&y)
    });
    Ok(Scene {
        spec: *spec,
        image,
        truth,
        mask,
        cloud: flat_cloud(n, n),
    })
}

/// Vertical two-level stripes, softened by a Gaussian blur.
pub fn blurred_stripes(size: u32, period_px: u32, sigma: f64) -> Result<IntensityImage> {
    if size < MIN_SIZE {
        return Err(invalid(
            "size",
            format!("must be at least {MIN_SIZE}, got {size}"),
        ));
    }
    if period_px < 2 {
        return Err(invalid(
            "period_px",
            format!("must be at least 2, got {period_px}"),
        ));
    }
    let sharp = IntensityImage::from_fn(size, size, |x, _| {
        if x % period_px < period_px / 2 {
            200.0
        } else {
            50.0
        }
    });
    gaussian_blur(&sharp, sigma)
}
