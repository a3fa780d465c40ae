//! Bit-exact readers and writers for the on-disk formats.
//!
//! | format | content |
//! |--------|---------|
//! | PGM `P5` | intensity images and masks (255 = hair) |
//! | PPM `P6` | RGB images |
//! | `ORF1` | orientation field + coherence, f32 LE |
//! | `OCD1` | organized point cloud, f32 LE, NaN triple = missing depth |
//! | JSON | pixel paths and pose paths |

mod binary;
mod json;
mod pnm;

use std::path::Path;

use thiserror::Error;

pub use binary::{read_ocd, read_orf, write_ocd, write_orf};
pub use json::{read_path_json, read_pose_json, write_path_json, write_pose_json};
pub use pnm::{
    read_mask_pgm, read_pgm, read_ppm, read_soft_mask_pgm, write_mask_pgm, write_pgm, write_ppm,
    write_soft_mask_pgm,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic {
        expected: &'static str,
        found: String,
    },

    #[error("malformed header field `{field}`: {reason}")]
    MalformedHeader { field: &'static str, reason: String },

    #[error("unsupported maxval {0} (only 8-bit samples are supported)")]
    UnsupportedMaxval(u32),

    #[error("header field `{field}` overflows the supported raster size")]
    DimensionOverflow { field: &'static str },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },

    #[error("{found} unexpected trailing bytes after payload")]
    TrailingBytes { found: usize },

    #[error("invalid value in `{field}`: {reason}")]
    InvalidValue { field: &'static str, reason: String },

    #[error("json: {0}")]
    Json(String),

    #[error("io error on {path}: {reason}")]
    Io { path: String, reason: String },
}

pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<u8>, FormatError> {
    let path = path.as_ref();
    std::fs::read(path).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<(), FormatError> {
    let path = path.as_ref();
    std::fs::write(path, bytes).map_err(|e| FormatError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Pixel count for a header, rejecting zero and oversized rasters.
pub(crate) fn header_pixels(width: u64, height: u64) -> Result<usize, FormatError> {
    if width == 0 {
        return Err(FormatError::MalformedHeader {
            field: "width",
            reason: "must be at least 1".into(),
        });
    }
    if height == 0 {
        return Err(FormatError::MalformedHeader {
            field: "height",
            reason: "must be at least 1".into(),
        });
    }
    if width > u32::MAX as u64 {
        return Err(FormatError::DimensionOverflow { field: "width" });
    }
    if height > u32::MAX as u64 {
        return Err(FormatError::DimensionOverflow { field: "height" });
    }
    width
        .checked_mul(height)
        .filter(|&n| n <= crate::raster::MAX_PIXELS as u64)
        .map(|n| n as usize)
        .ok_or(FormatError::DimensionOverflow { field: "height" })
}
