//! Spatial cleanup of a hair mask.
//!
//! Keeps the largest connected region, then re-admits pixels whose depth
//! is close to the region's median depth and whose hue is common inside
//! the region.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::color::hue;
use crate::error::{invalid, Error, Result};
use crate::mask::BinaryMask;
use crate::raster::{ensure_same_dims, OrganizedCloud, RgbImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Connectivity::Four => &[(0, -1), (-1, 0), (1, 0), (0, 1)],
            Connectivity::Eight => &[
                (-1, -1),
                (0, -1),
                (1, -1),
                (-1, 0),
                (1, 0),
                (-1, 1),
                (0, 1),
                (1, 1),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RefineParams {
    pub connectivity: Connectivity,
    /// Depth band half-width in standard deviations.
    pub depth_sigma_mult: f64,
    pub hue_bins: usize,
    /// Minimum fraction of mask pixels a hue bin needs to admit candidates.
    pub hue_occupancy_min: f64,
    /// Fraction of achromatic mask pixels above which achromatic candidates
    /// are judged on depth alone.
    pub achromatic_min: f64,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            connectivity: Connectivity::Eight,
            depth_sigma_mult: 2.0,
            hue_bins: 36,
            hue_occupancy_min: 0.01,
            achromatic_min: 0.25,
        }
    }
}

impl RefineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.depth_sigma_mult > 0.0) {
            return Err(invalid("depth_sigma_mult", "must be positive"));
        }
        if self.hue_bins == 0 {
            return Err(invalid("hue_bins", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.hue_occupancy_min) {
            return Err(invalid("hue_occupancy_min", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.achromatic_min) {
            return Err(invalid("achromatic_min", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Labels connected components; returns `(labels, sizes)` where labels are
/// assigned in order of each component's first pixel in row-major order.
pub fn label_components(
    mask: &BinaryMask,
    connectivity: Connectivity,
) -> (Vec<Option<usize>>, Vec<usize>) {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let bits = mask.bits();
    let mut labels: Vec<Option<usize>> = vec![None; bits.len()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for seed in 0..bits.len() {
        if !bits[seed] || labels[seed].is_some() {
            continue;
        }
        let label = sizes.len();
        let mut size = 0;
        labels[seed] = Some(label);
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            size += 1;
            let (x, y) = (i as i64 % w, i as i64 / w);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let j = (ny * w + nx) as usize;
                if bits[j] && labels[j].is_none() {
                    labels[j] = Some(label);
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    (labels, sizes)
}

/// Keeps only the largest connected component. On ties the component whose
/// first pixel comes earliest in row-major order wins.
pub fn largest_component(mask: &BinaryMask, connectivity: Connectivity) -> Result<BinaryMask> {
    let (labels, sizes) = label_components(mask, connectivity);
    let best = sizes
        .iter()
        .enumerate()
        // max_by returns the last maximum; reversed index order makes the earliest win
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .ok_or(Error::EmptyMask)?;
    BinaryMask::new(
        mask.width(),
        mask.height(),
        labels.iter().map(|l| *l == Some(best)).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthStats {
    pub median_z: f64,
    /// Population standard deviation.
    pub std_z: f64,
    pub n: usize,
}

/// Median of a non-empty slice; even counts average the two central values.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn depth_stats(mask: &BinaryMask, cloud: &OrganizedCloud) -> Result<DepthStats> {
    ensure_same_dims("cloud", mask.dims(), cloud.dims())?;
    let mut zs: Vec<f64> = mask
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .filter_map(|(i, _)| cloud.point_index(i).map(|p| p.z))
        .collect();
    if zs.is_empty() {
        return Err(Error::NoValidDepth);
    }
    let n = zs.len();
    let mean = zs.iter().sum::<f64>() / n as f64;
    let var = zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / n as f64;
    Ok(DepthStats {
        median_z: median(&mut zs),
        std_z: var.sqrt(),
        n,
    })
}

/// Occupancy-thresholded circular hue histogram of the mask pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct HueProfile {
    bins: Vec<bool>,
    /// Fraction of mask pixels that are achromatic.
    pub achromatic_fraction: f64,
}

impl HueProfile {
    pub fn from_mask(mask: &BinaryMask, rgb: &RgbImage, params: &RefineParams) -> Self {
        let mut counts = vec![0usize; params.hue_bins];
        let mut total = 0usize;
        let mut achromatic = 0usize;
        for (i, _) in mask.bits().iter().enumerate().filter(|(_, &b)| b) {
            total += 1;
            match hue(rgb.data()[i]) {
                Some(h) => counts[hue_bin(h, params.hue_bins)] += 1,
                None => achromatic += 1,
            }
        }
        let total = total.max(1) as f64;
        Self {
            bins: counts
                .iter()
                .map(|&c| c > 0 && c as f64 / total >= params.hue_occupancy_min)
                .collect(),
            achromatic_fraction: achromatic as f64 / total,
        }
    }

    pub fn admits(&self, h: f64) -> bool {
        self.bins[hue_bin(h, self.bins.len())]
    }
}

fn hue_bin(h: f64, bins: usize) -> usize {
    ((h / 360.0 * bins as f64).floor() as usize).min(bins - 1)
}

/// Adds every non-mask pixel that passes both the depth-band and hue tests.
///
/// Achromatic candidates are judged on depth alone when enough of the mask is
/// achromatic (grey or black hair); otherwise they are rejected.
pub fn expand(
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    rgb: &RgbImage,
    params: &RefineParams,
) -> Result<BinaryMask> {
    params.validate()?;
    ensure_same_dims("rgb", mask.dims(), rgb.dims())?;
    let stats = depth_stats(mask, cloud)?;
    let profile = HueProfile::from_mask(mask, rgb, params);
    let band = params.depth_sigma_mult * stats.std_z;
    let achromatic_ok = profile.achromatic_fraction >= params.achromatic_min;
    let bits = mask
        .bits()
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if b {
                return true;
            }
            let Some(p) = cloud.point_index(i) else {
                return false;
            };
            if (p.z - stats.median_z).abs() > band {
                return false;
            }
            match hue(rgb.data()[i]) {
                Some(h) => profile.admits(h),
                None => achromatic_ok,
            }
        })
        .collect();
    BinaryMask::new(mask.width(), mask.height(), bits)
}

/// Largest component followed by a single expansion pass.
pub fn refine(
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    rgb: &RgbImage,
    params: &RefineParams,
) -> Result<BinaryMask> {
    let core = largest_component(mask, params.connectivity)?;
    expand(&core, cloud, rgb, params)
}
