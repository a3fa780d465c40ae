//! Lifts a pixel path into timed end-effector poses.
//!
//! Positions come from the organized cloud. The comb's z-axis points into
//! the fitted hair plane (`-ĥ`), its y-axis follows the path tangent
//! projected into that plane, and x completes a right-handed frame.

use nalgebra::{Matrix3, Rotation3, SymmetricEigen, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mask::BinaryMask;
use crate::path::PixelPath;
use crate::raster::{ensure_same_dims, OrganizedCloud};

/// Plane fitted to the visible hair, normal facing the camera (`z < 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HairPlane {
    pub centroid: Vector3<f64>,
    pub normal: Vector3<f64>,
}

/// Rigid camera-to-robot transform applied to every pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform {
    pub translation: [f64; 3],
    /// `[w, x, y, z]`.
    pub rotation_quat: [f64; 4],
}

impl RigidTransform {
    fn rotation(&self) -> UnitQuaternion<f64> {
        let [w, x, y, z] = self.rotation_quat;
        UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrajectoryParams {
    /// Constant Cartesian speed of the end effector.
    pub speed_mps: f64,
    /// Search radius used when a path pixel has no depth.
    pub lookup_radius_px: u32,
    /// Identity when absent.
    pub extrinsic: Option<RigidTransform>,
}

impl Default for TrajectoryParams {
    fn default() -> Self {
        Self {
            speed_mps: 0.03,
            lookup_radius_px: 5,
            extrinsic: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseFrame {
    pub position: Vector3<f64>,
    /// Columns are the end-effector x, y, z axes.
    pub rotation: Rotation3<f64>,
    pub time_s: f64,
}

/// Serialized pose: position in meters, unit quaternion `[w, x, y, z]` with `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    pub orientation_quat: [f64; 4],
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PosePath {
    pub poses: Vec<Pose>,
}

/// Unit quaternion `[w, x, y, z]` for `r`, canonicalized to `w >= 0`.
pub fn rotation_to_quat(r: &Rotation3<f64>) -> [f64; 4] {
    let q = UnitQuaternion::from_rotation_matrix(r);
    let (w, v) = (q.w, q.imag());
    if w < 0.0 {
        [-w, -v.x, -v.y, -v.z]
    } else {
        [w, v.x, v.y, v.z]
    }
}

pub fn quat_to_rotation(q: [f64; 4]) -> Rotation3<f64> {
    let [w, x, y, z] = q;
    UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(w, x, y, z)).to_rotation_matrix()
}

impl From<&PoseFrame> for Pose {
    fn from(f: &PoseFrame) -> Self {
        Pose {
            position: [f.position.x, f.position.y, f.position.z],
            orientation_quat: rotation_to_quat(&f.rotation),
            time_s: f.time_s,
        }
    }
}

/// Total-least-squares plane through `points`.
pub fn fit_plane_points(points: &[Vector3<f64>]) -> Result<HairPlane> {
    if points.len() < 3 {
        return Err(Error::DegeneratePlane(format!(
            "need at least 3 points with depth, found {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let centroid = points.iter().sum::<Vector3<f64>>() / n;
    let cov = points
        .iter()
        .map(|p| {
            let d = p - centroid;
            d * d.transpose()
        })
        .sum::<Matrix3<f64>>()
        / n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (small, mid, large) = (
        eig.eigenvalues[order[0]],
        eig.eigenvalues[order[1]],
        eig.eigenvalues[order[2]],
    );
    if !(large > 0.0) || mid <= 1e-12 * large {
        return Err(Error::DegeneratePlane(
            "points are collinear or coincident".into(),
        ));
    }
    debug_assert!(small <= mid);
    let mut normal: Vector3<f64> = eig.eigenvectors.column(order[0]).into_owned();
    normal.normalize_mut();
    if normal.z > 0.0 {
        normal = -normal;
    }
    if normal.z == 0.0 {
        return Err(Error::DegeneratePlane(
            "plane is seen edge-on by the camera".into(),
        ));
    }
    Ok(HairPlane { centroid, normal })
}

/// Fits the hair plane to every masked pixel with valid depth.
pub fn fit_plane(mask: &BinaryMask, cloud: &OrganizedCloud) -> Result<HairPlane> {
    ensure_same_dims("cloud", mask.dims(), cloud.dims())?;
    let pts: Vec<Vector3<f64>> = mask
        .bits()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .filter_map(|(i, _)| cloud.point_index(i))
        .collect();
    fit_plane_points(&pts)
}

/// Nearest valid cloud point within `radius` pixels of `(x, y)`; ties go to
/// the smaller row-major index.
fn lookup_depth(cloud: &OrganizedCloud, x: u32, y: u32, radius: u32) -> Option<Vector3<f64>> {
    if let Some(p) = cloud.point(x, y) {
        return Some(p);
    }
    let (w, h) = cloud.dims();
    let r = radius as i64;
    let mut best: Option<(i64, usize)> = None;
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = dx * dx + dy * dy;
            if d2 > r * r {
                continue;
            }
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let idx = ny as usize * w as usize + nx as usize;
            if !cloud.is_valid_index(idx) {
                continue;
            }
            if best.is_none_or(|b| (d2, idx) < b) {
                best = Some((d2, idx));
            }
        }
    }
    best.and_then(|(_, idx)| cloud.point_index(idx))
}

/// 3-D position for each path point; points without depth nearby are dropped.
pub fn path_xyz(
    path: &PixelPath,
    cloud: &OrganizedCloud,
    params: &TrajectoryParams,
) -> Result<Vec<Vector3<f64>>> {
    let (w, h) = cloud.dims();
    let xyz: Vec<Vector3<f64>> = path
        .points
        .iter()
        .filter_map(|p| p.nearest_pixel(w, h))
        .filter_map(|(x, y)| lookup_depth(cloud, x, y, params.lookup_radius_px))
        .collect();
    if xyz.len() < 2 {
        return Err(Error::TooFew3dPoints { found: xyz.len() });
    }
    Ok(xyz)
}

/// End-effector rotations along `xyz`.
pub fn frames(xyz: &[Vector3<f64>], plane: &HairPlane) -> Result<Vec<Rotation3<f64>>> {
    let n = xyz.len();
    if n < 2 {
        return Err(Error::TooFew3dPoints { found: n });
    }
    let h = plane.normal.normalize();
    let z_axis = -h;
    (0..n)
        .map(|t| {
            let v = match t {
                0 => xyz[0] - xyz[1],
                t if t == n - 1 => xyz[n - 2] - xyz[n - 1],
                t => xyz[t - 1] - xyz[t + 1],
            };
            let in_plane = v - v.dot(&h) * h;
            let norm = in_plane.norm();
            if !(norm >= 1e-9) {
                return Err(Error::DegenerateTangent { index: t });
            }
            let y_axis = in_plane / norm;
            let x_axis = y_axis.cross(&z_axis);
            Ok(Rotation3::from_matrix_unchecked(Matrix3::from_columns(&[
                x_axis, y_axis, z_axis,
            ])))
        })
        .collect()
}

/// Constant-speed timestamps from cumulative arc length.
pub fn time_parameterize(xyz: &[Vector3<f64>], params: &TrajectoryParams) -> Result<Vec<f64>> {
    if !(params.speed_mps > 0.0 && params.speed_mps.is_finite()) {
        return Err(invalid(
            "speed_mps",
            format!("must be positive, got {}", params.speed_mps),
        ));
    }
    if xyz.len() < 2 {
        return Err(Error::TooFew3dPoints { found: xyz.len() });
    }
    let mut times = Vec::with_capacity(xyz.len());
    times.push(0.0);
    let mut arc = 0.0;
    for (i, seg) in xyz.windows(2).enumerate() {
        let d = (seg[1] - seg[0]).norm();
        if d == 0.0 {
            return Err(Error::ZeroLengthSegment { index: i });
        }
        arc += d;
        times.push(arc / params.speed_mps);
    }
    Ok(times)
}

/// Full pose frames for `path`, in the robot frame when an extrinsic is set.
pub fn generate_frames(
    path: &PixelPath,
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    params: &TrajectoryParams,
) -> Result<Vec<PoseFrame>> {
    let plane = fit_plane(mask, cloud)?;
    let xyz = path_xyz(path, cloud, params)?;
    let rots = frames(&xyz, &plane)?;
    let times = time_parameterize(&xyz, params)?;
    let ext = params.extrinsic.map(|e| {
        (
            e.rotation().to_rotation_matrix(),
            Vector3::from(e.translation),
        )
    });
    Ok(xyz
        .into_iter()
        .zip(rots)
        .zip(times)
        .map(|((p, r), t)| match &ext {
            None => PoseFrame {
                position: p,
                rotation: r,
                time_s: t,
            },
            Some((er, et)) => PoseFrame {
                position: er * p + et,
                rotation: er * r,
                time_s: t,
            },
        })
        .collect())
}

pub fn generate(
    path: &PixelPath,
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    params: &TrajectoryParams,
) -> Result<PosePath> {
    Ok(PosePath {
        poses: generate_frames(path, mask, cloud, params)?
            .iter()
            .map(Pose::from)
            .collect(),
    })
}
