use super::FormatError;
use crate::path::PixelPath;
use crate::trajectory::PosePath;

fn json_err(e: serde_json::Error) -> FormatError {
    FormatError::Json(e.to_string())
}

pub fn read_path_json(bytes: &[u8]) -> Result<PixelPath, FormatError> {
    let path: PixelPath = serde_json::from_slice(bytes).map_err(json_err)?;
    if path.points.is_empty() {
        return Err(FormatError::InvalidValue {
            field: "points",
            reason: "a path needs at least one point".into(),
        });
    }
    if !(path.step_px >= 0.0) {
        return Err(FormatError::InvalidValue {
            field: "step_px",
            reason: format!("must be non-negative, got {}", path.step_px),
        });
    }
    Ok(path)
}

pub fn write_path_json(path: &PixelPath) -> Vec<u8> {
    serde_json::to_vec(path).expect("path serialization is infallible")
}

pub fn read_pose_json(bytes: &[u8]) -> Result<PosePath, FormatError> {
    let poses: PosePath = serde_json::from_slice(bytes).map_err(json_err)?;
    for (i, p) in poses.poses.iter().enumerate() {
        let norm = p.orientation_quat.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(FormatError::InvalidValue {
                field: "orientation_quat",
                reason: format!("pose {i} has norm {norm}, expected a unit quaternion"),
            });
        }
        if !(p.time_s >= 0.0) {
            return Err(FormatError::InvalidValue {
                field: "time_s",
                reason: format!("pose {i} has negative time {}", p.time_s),
            });
        }
    }
    Ok(poses)
}

pub fn write_pose_json(poses: &PosePath) -> Vec<u8> {
    serde_json::to_vec(poses).expect("pose serialization is infallible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::PixelPoint;
    use crate::trajectory::Pose;

    #[test]
    fn path_json_shape() {
        let p = PixelPath {
            step_px: 6.0,
            points: vec![PixelPoint::new(10.0, 50.0), PixelPoint::new(16.0, 50.5)],
        };
        let bytes = write_path_json(&p);
        assert_eq!(
            std::str::from_utf8(&bytes).unwrap(),
            r#"{"step_px":6.0,"points":[{"x":10.0,"y":50.0},{"x":16.0,"y":50.5}]}"#
        );
        assert_eq!(read_path_json(&bytes).unwrap(), p);
    }

    #[test]
    fn pose_json_shape_and_validation() {
        let poses = PosePath {
            poses: vec![Pose {
                position: [0.1, 0.2, 1.0],
                orientation_quat: [1.0, 0.0, 0.0, 0.0],
                time_s: 0.0,
            }],
        };
        let bytes = write_pose_json(&poses);
        assert_eq!(
            std::str::from_utf8(&bytes).unwrap(),
            r#"{"poses":[{"position":[0.1,0.2,1.0],"orientation_quat":[1.0,0.0,0.0,0.0],"time_s":0.0}]}"#
        );
        assert_eq!(read_pose_json(&bytes).unwrap(), poses);
        let bad = br#"{"poses":[{"position":[0,0,1],"orientation_quat":[2,0,0,0],"time_s":0}]}"#;
        assert!(matches!(
            read_pose_json(bad).unwrap_err(),
            FormatError::InvalidValue {
                field: "orientation_quat",
                ..
            }
        ));
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(
            read_path_json(b"{").unwrap_err(),
            FormatError::Json(_)
        ));
        assert!(matches!(
            read_path_json(br#"{"step_px":6,"points":[]}"#).unwrap_err(),
            FormatError::InvalidValue {
                field: "points",
                ..
            }
        ));
        assert!(matches!(
            read_path_json(br#"{"step_px":-1,"points":[{"x":0,"y":0}]}"#).unwrap_err(),
            FormatError::InvalidValue {
                field: "step_px",
                ..
            }
        ));
    }
}
