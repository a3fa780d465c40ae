use thiserror::Error;

use crate::formats::FormatError;

/// Errors produced by the pipeline stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        what: &'static str,
        want_w: u32,
        want_h: u32,
        got_w: u32,
        got_h: u32,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("mask has no set pixels")]
    EmptyMask,

    #[error("no masked pixel has valid depth")]
    NoValidDepth,

    #[error("start point ({x}, {y}) is outside the hair mask")]
    StartOutsideHair { x: f64, y: f64 },

    #[error("hair graph has no vertices")]
    EmptyGraph,

    #[error("goal set is empty")]
    EmptyGoalSet,

    #[error("no goal vertex is reachable from the start vertex")]
    Unreachable,

    #[error("degenerate hair plane: {0}")]
    DegeneratePlane(String),

    #[error("only {found} path points resolved to 3-D positions, need at least 2")]
    TooFew3dPoints { found: usize },

    #[error("projected path tangent vanishes at point {index}")]
    DegenerateTangent { index: usize },

    #[error("zero-length segment between points {index} and {}", index + 1)]
    ZeroLengthSegment { index: usize },

    #[error(transparent)]
    Format(#[from] FormatError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
