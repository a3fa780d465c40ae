use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use hairflow_core::{Error, FormatError};
use serde::Serialize;

/// Machine-readable failure codes returned in every error body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorCode {
    UnknownSession,
    UnknownPath,
    MissingPrerequisite,
    MaskConflict,
    StartOutsideHair,
    DegeneratePlane,
    #[serde(rename = "too-few-3d-points")]
    TooFew3dPoints,
    DimensionMismatch,
    Unreachable,
    InvalidInput,
    InvalidParameter,
    MalformedBody,
}

impl ErrorCode {
    pub fn status(self) -> StatusCode {
        use ErrorCode::*;
        match self {
            UnknownSession | UnknownPath => StatusCode::NOT_FOUND,
            MissingPrerequisite | MaskConflict => StatusCode::CONFLICT,
            StartOutsideHair | DegeneratePlane | TooFew3dPoints | DimensionMismatch
            | Unreachable | InvalidInput => StatusCode::UNPROCESSABLE_ENTITY,
            InvalidParameter | MalformedBody => StatusCode::BAD_REQUEST,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn missing(what: &str) -> Self {
        Self::new(
            ErrorCode::MissingPrerequisite,
            format!("upload or compute the {what} first"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::StartOutsideHair { .. } => ErrorCode::StartOutsideHair,
            Error::DegeneratePlane(_) => ErrorCode::DegeneratePlane,
            Error::TooFew3dPoints { .. } => ErrorCode::TooFew3dPoints,
            Error::DimensionMismatch { .. } => ErrorCode::DimensionMismatch,
            Error::Unreachable => ErrorCode::Unreachable,
            Error::InvalidParameter { .. } => ErrorCode::InvalidParameter,
            Error::Format(_) => ErrorCode::MalformedBody,
            _ => ErrorCode::InvalidInput,
        };
        Self::new(code, e.to_string())
    }
}

impl From<FormatError> for ApiError {
    fn from(e: FormatError) -> Self {
        Self::new(ErrorCode::MalformedBody, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}
