use std::collections::BTreeMap;
use std::path::Path;

use hairflow_core::bench::Planner;
use hairflow_core::formats::{
    write_file, write_mask_pgm, write_ocd, write_orf, write_path_json, write_pose_json, write_ppm,
    FormatError,
};
use hairflow_core::path::PathMetrics;
use hairflow_core::{BinaryMask, OrganizedCloud, OrientationField, PixelPath, PosePath, RgbImage};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskSource {
    Upload,
    Fallback,
}

#[derive(Debug, Clone)]
pub struct StoredPath {
    pub planner: Planner,
    pub path: PixelPath,
    pub metrics: PathMetrics,
    pub poses: Option<PosePath>,
}

#[derive(Debug, Default)]
pub struct Session {
    pub rgb: Option<RgbImage>,
    pub cloud: Option<OrganizedCloud>,
    pub mask: Option<(BinaryMask, MaskSource)>,
    pub field: Option<(String, OrientationField)>,
    pub paths: BTreeMap<String, StoredPath>,
    pub accepted: Option<String>,
    fields_made: u64,
    paths_made: u64,
}

impl Session {
    /// Size shared by every uploaded raster, if any is present.
    pub fn dims(&self) -> Option<(u32, u32)> {
        self.rgb
            .as_ref()
            .map(|r| r.dims())
            .or_else(|| self.cloud.as_ref().map(|c| c.dims()))
            .or_else(|| self.mask.as_ref().map(|m| m.0.dims()))
    }

    pub fn next_field_id(&mut self) -> String {
        self.fields_made += 1;
        format!("f{}", self.fields_made)
    }

    pub fn next_path_id(&mut self) -> String {
        self.paths_made += 1;
        format!("p{}", self.paths_made)
    }

    pub fn summary(&self, id: &str) -> SessionSummary {
        SessionSummary {
            id: id.to_string(),
            dims: self.dims().map(|(w, h)| [w, h]),
            rgb: self.rgb.is_some(),
            cloud: self.cloud.is_some(),
            mask: self.mask.as_ref().map(|(m, source)| MaskSummary {
                source: *source,
                width: m.width(),
                height: m.height(),
                hair_pixels: m.count(),
            }),
            field_id: self.field.as_ref().map(|f| f.0.clone()),
            paths: self
                .paths
                .iter()
                .map(|(pid, p)| PathSummary {
                    path_id: pid.clone(),
                    planner: p.planner,
                    points: p.path.len(),
                    metrics: p.metrics,
                    trajectory: p.poses.is_some(),
                })
                .collect(),
            accepted: self.accepted.clone(),
        }
    }

    /// Writes every artifact in its file format under `dir`.
    pub fn dump(&self, id: &str, dir: &Path) -> Result<(), FormatError> {
        let root = dir.join(id);
        let io = |e: std::io::Error| FormatError::Io {
            path: root.display().to_string(),
            reason: e.to_string(),
        };
        std::fs::create_dir_all(root.join("paths")).map_err(io)?;
        if let Some(rgb) = &self.rgb {
            write_file(root.join("rgb.ppm"), &write_ppm(rgb))?;
        }
        if let Some(cloud) = &self.cloud {
            write_file(root.join("cloud.ocd"), &write_ocd(cloud))?;
        }
        if let Some((mask, _)) = &self.mask {
            write_file(root.join("mask.pgm"), &write_mask_pgm(mask))?;
        }
        if let Some((_, field)) = &self.field {
            write_file(root.join("field.orf"), &write_orf(field))?;
        }
        for (pid, p) in &self.paths {
            write_file(
                root.join("paths").join(format!("{pid}.json")),
                &write_path_json(&p.path),
            )?;
            if let Some(poses) = &p.poses {
                write_file(
                    root.join("paths").join(format!("{pid}.poses.json")),
                    &write_pose_json(poses),
                )?;
            }
        }
        let summary = serde_json::to_vec_pretty(&self.summary(id)).expect("summary serializes");
        write_file(root.join("session.json"), &summary)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaskSummary {
    pub source: MaskSource,
    pub width: u32,
    pub height: u32,
    pub hair_pixels: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathSummary {
    pub path_id: String,
    pub planner: Planner,
    pub points: usize,
    pub metrics: PathMetrics,
    pub trajectory: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionSummary {
    pub id: String,
    pub dims: Option<[u32; 2]>,
    pub rgb: bool,
    pub cloud: bool,
    pub mask: Option<MaskSummary>,
    pub field_id: Option<String>,
    pub paths: Vec<PathSummary>,
    pub accepted: Option<String>,
}
