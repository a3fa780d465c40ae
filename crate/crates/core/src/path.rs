//! Brush-stroke paths traced along the orientation field.
//!
//! Starting at a user-selected pixel, the stroke repeatedly looks up the
//! flow angle at its nearest pixel and advances a fixed step along it. The
//! field is undirected, so each step takes the representative direction
//! closest to the previous step.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mask::BinaryMask;
use crate::orientation::OrientationField;
use crate::raster::{ensure_same_dims, PixelPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathParams {
    /// Step length in pixels.
    pub step_px: f64,
    pub max_steps: usize,
    /// Preferred direction of the first step; need not be normalized.
    pub initial_heading: Option<[f64; 2]>,
}

impl Default for PathParams {
    fn default() -> Self {
        Self {
            step_px: 6.0,
            max_steps: 1000,
            initial_heading: None,
        }
    }
}

impl PathParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_px > 0.0 && self.step_px.is_finite()) {
            return Err(invalid(
                "step_px",
                format!("must be positive, got {}", self.step_px),
            ));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be at least 1"));
        }
        if let Some([hx, hy]) = self.initial_heading {
            if !(hx.hypot(hy) > 0.0) || !hx.is_finite() || !hy.is_finite() {
                return Err(invalid(
                    "initial_heading",
                    "must be a finite non-zero vector",
                ));
            }
        }
        Ok(())
    }
}

/// Ordered stroke points. `step_px` is 0 for variable-step paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PixelPath {
    pub step_px: f64,
    pub points: Vec<PixelPoint>,
}

impl PixelPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Net displacement from the first to the last point.
    pub fn displacement(&self) -> (f64, f64) {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (b.x - a.x, b.y - a.y),
            _ => (0.0, 0.0),
        }
    }
}

/// Why a stroke stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The next point would land on a background pixel.
    MaskExit,
    /// The next point would leave the image.
    ImageExit,
    /// `max_steps` steps were taken.
    StepCap,
    /// A graph search reached its goal set.
    GoalReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannedPath {
    pub path: PixelPath,
    pub terminated_by: Termination,
}

/// Picks the sign of the unit direction `d` for the next step.
///
/// With a previous step, `d` is flipped if it points backwards. For the
/// first step the caller's heading decides; without one, the downward
/// representative is used (ties on `d_y == 0` go rightward).
pub fn orient_step(
    d: (f64, f64),
    prev: Option<(f64, f64)>,
    heading: Option<[f64; 2]>,
) -> (f64, f64) {
    let flip = match (prev, heading) {
        (Some(p), _) => d.0 * p.0 + d.1 * p.1 < 0.0,
        (None, Some([hx, hy])) => d.0 * hx + d.1 * hy < 0.0,
        (None, None) => d.1 < 0.0 || (d.1 == 0.0 && d.0 < 0.0),
    };
    if flip {
        (-d.0, -d.1)
    } else {
        d
    }
}

/// Traces a stroke from `start` through `field`, staying inside `mask`.
pub fn plan(
    field: &OrientationField,
    mask: &BinaryMask,
    start: PixelPoint,
    params: &PathParams,
) -> Result<PlannedPath> {
    params.validate()?;
    ensure_same_dims("mask", field.dims(), mask.dims())?;
    let (w, h) = field.dims();
    let inside = |p: &PixelPoint| p.nearest_pixel(w, h).filter(|&(x, y)| mask.get(x, y));
    if !start.x.is_finite() || !start.y.is_finite() || inside(&start).is_none() {
        return Err(Error::StartOutsideHair {
            x: start.x,
            y: start.y,
        });
    }

    let k = params.step_px;
    let mut points = vec![start];
    let mut prev_dir: Option<(f64, f64)> = None;
    let mut cur = start;
    let terminated_by = loop {
        if points.len() > params.max_steps {
            break Termination::StepCap;
        }
        let (px, py) = cur.nearest_pixel(w, h).expect("current point is inside");
        let theta = field.theta_at(px, py);
        let d = orient_step((theta.cos(), theta.sin()), prev_dir, params.initial_heading);
        let next = PixelPoint::new(cur.x + k * d.0, cur.y + k * d.1);
        match next.nearest_pixel(w, h) {
            None => break Termination::ImageExit,
            Some((nx, ny)) if !mask.get(nx, ny) => break Termination::MaskExit,
            Some(_) => {}
        }
        points.push(next);
        prev_dir = Some(d);
        cur = next;
    };
    Ok(PlannedPath {
        path: PixelPath { step_px: k, points },
        terminated_by,
    })
}

/// Objective quality measures for a stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathMetrics {
    pub length_px: f64,
    /// Mean `|cos|` of the angle between each step and the field at the
    /// step's midpoint; `None` for single-point paths.
    pub mean_alignment: Option<f64>,
    /// Mean absolute turning angle; `None` with fewer than two steps.
    pub mean_turn_rad: Option<f64>,
    pub terminated_by: Termination,
}

pub fn metrics(
    path: &PixelPath,
    field: &OrientationField,
    terminated_by: Termination,
) -> PathMetrics {
    compute_metrics(path, Some(field), terminated_by)
}

/// Length and turning only; alignment needs a field and is left empty.
pub fn shape_metrics(path: &PixelPath, terminated_by: Termination) -> PathMetrics {
    compute_metrics(path, None, terminated_by)
}

fn compute_metrics(
    path: &PixelPath,
    field: Option<&OrientationField>,
    terminated_by: Termination,
) -> PathMetrics {
    let pts = &path.points;
    let mut length = 0.0;
    let mut align = Vec::new();
    let mut dirs = Vec::new();
    for seg in pts.windows(2) {
        let (dx, dy) = (seg[1].x - seg[0].x, seg[1].y - seg[0].y);
        let len = dx.hypot(dy);
        length += len;
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (dx / len, dy / len);
        dirs.push((ux, uy));
        let Some(field) = field else { continue };
        let mid = PixelPoint::new(0.5 * (seg[0].x + seg[1].x), 0.5 * (seg[0].y + seg[1].y));
        if let Some((mx, my)) = mid.nearest_pixel(field.width(), field.height()) {
            let t = field.theta_at(mx, my);
            align.push((ux * t.cos() + uy * t.sin()).abs().min(1.0));
        }
    }
    let turns: Vec<f64> = dirs
        .windows(2)
        .map(|d| {
            let cross = d[0].0 * d[1].1 - d[0].1 * d[1].0;
            let dot = d[0].0 * d[1].0 + d[0].1 * d[1].1;
            cross.atan2(dot).abs()
        })
        .collect();
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    PathMetrics {
        length_px: length,
        mean_alignment: mean(&align),
        mean_turn_rad: mean(&turns),
        terminated_by,
    }
}
