use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use hairflow_core::bench::Planner;
use hairflow_core::color::{hsv_threshold, to_grayscale};
use hairflow_core::formats::{
    read_mask_pgm, read_ocd, read_ppm, write_orf, write_path_json, write_pose_json,
};
use hairflow_core::mesh::{plan_mesh, MeshParams};
use hairflow_core::orientation::{field_from_image, OrientationParams};
use hairflow_core::path::{metrics, plan, shape_metrics, PathMetrics, PathParams};
use hairflow_core::shock::CoherenceParams;
use hairflow_core::trajectory::{generate, RigidTransform, TrajectoryParams};
use hairflow_core::{PixelPath, PixelPoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{ApiError, ErrorCode};
use crate::session::{MaskSource, Session, StoredPath};
use crate::AppState;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(ErrorCode::MalformedBody, e.to_string()))
}

/// Like `parse`, but an empty body means all defaults.
fn parse_or_default<T: DeserializeOwned + Default>(body: &[u8]) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        parse(body)
    }
}

fn json_bytes(bytes: Vec<u8>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn check_dims(session: &Session, dims: (u32, u32), what: &str) -> Result<(), ApiError> {
    match session.dims() {
        Some(have) if have != dims => Err(ApiError::new(
            ErrorCode::DimensionMismatch,
            format!(
                "{what} is {}x{}, session rasters are {}x{}",
                dims.0, dims.1, have.0, have.1
            ),
        )),
        _ => Ok(()),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    tokio::task::spawn_blocking(f)
        .await
        .expect("worker task panicked")
}

pub async fn create_session(State(app): State<AppState>) -> impl IntoResponse {
    let id = uuid::Uuid::new_v4().simple().to_string();
    app.insert(id.clone());
    (StatusCode::CREATED, Json(json!({ "id": id })))
}

pub async fn get_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let s = session.lock().await;
    Ok(Json(s.summary(&id)).into_response())
}

pub async fn put_rgb(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<StatusCode, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let rgb = read_ppm(&body)?;
    check_dims(&s, rgb.dims(), "rgb")?;
    s.rgb = Some(rgb);
    s.field = None;
    app.persist(&id, &s);
    Ok(StatusCode::NO_CONTENT)
}

pub async fn put_cloud(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<StatusCode, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let cloud = read_ocd(&body)?;
    check_dims(&s, cloud.dims(), "cloud")?;
    s.cloud = Some(cloud);
    app.persist(&id, &s);
    Ok(StatusCode::NO_CONTENT)
}

pub async fn put_mask(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<StatusCode, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let mask = read_mask_pgm(&body)?;
    check_dims(&s, mask.dims(), "mask")?;
    s.mask = Some((mask, MaskSource::Upload));
    app.persist(&id, &s);
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRequest {
    /// Hue bounds in degrees.
    pub hue_lo: f64,
    pub hue_hi: f64,
    /// Brightest admitted HSV value, 0 to 255.
    pub val_hi: f64,
}

pub async fn segment_fallback(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: SegmentRequest = parse(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    if matches!(s.mask, Some((_, MaskSource::Upload))) {
        return Err(ApiError::new(
            ErrorCode::MaskConflict,
            "an uploaded mask already exists",
        ));
    }
    let rgb = s
        .rgb
        .as_ref()
        .ok_or_else(|| ApiError::missing("rgb image"))?;
    let mask = hsv_threshold(rgb, req.hue_lo, req.hue_hi, req.val_hi);
    s.mask = Some((mask, MaskSource::Fallback));
    app.persist(&id, &s);
    let summary = s.summary(&id).mask;
    Ok(Json(summary).into_response())
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrientRequest {
    pub coherence: CoherenceParams,
    pub orientation: OrientationParams,
}

pub async fn orient(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: OrientRequest = parse_or_default(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let rgb = s
        .rgb
        .clone()
        .ok_or_else(|| ApiError::missing("rgb image"))?;
    let field =
        blocking(move || field_from_image(&to_grayscale(&rgb), &req.coherence, &req.orientation))
            .await?;
    let field_id = s.next_field_id();
    s.field = Some((field_id.clone(), field));
    app.persist(&id, &s);
    Ok(Json(json!({ "field_id": field_id })).into_response())
}

pub async fn get_field(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let s = session.lock().await;
    let (_, field) = s
        .field
        .as_ref()
        .ok_or_else(|| ApiError::missing("orientation field"))?;
    Ok((
        [(header::CONTENT_TYPE, "application/octet-stream")],
        write_orf(field),
    )
        .into_response())
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathRequest {
    pub x: f64,
    pub y: f64,
    pub planner: Planner,
    pub step_px: Option<f64>,
    pub max_steps: Option<usize>,
    pub initial_heading: Option<[f64; 2]>,
    pub edge_max_m: Option<f64>,
    pub goal_frac: Option<f64>,
}

impl PathRequest {
    pub fn path_params(&self) -> PathParams {
        let d = PathParams::default();
        PathParams {
            step_px: self.step_px.unwrap_or(d.step_px),
            max_steps: self.max_steps.unwrap_or(d.max_steps),
            initial_heading: self.initial_heading,
        }
    }

    pub fn mesh_params(&self) -> MeshParams {
        let d = MeshParams::default();
        MeshParams {
            edge_max_m: self.edge_max_m.unwrap_or(d.edge_max_m),
            goal_frac: self.goal_frac.unwrap_or(d.goal_frac),
        }
    }
}

#[derive(Serialize)]
struct PlanResponse<'a> {
    path_id: &'a str,
    path: &'a PixelPath,
    metrics: &'a PathMetrics,
}

pub async fn plan_path(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: PathRequest = parse(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let (mask, _) = s.mask.clone().ok_or_else(|| ApiError::missing("mask"))?;
    let field = s.field.as_ref().map(|f| f.1.clone());
    let start = PixelPoint::new(req.x, req.y);
    let (planned, metrics) = match req.planner {
        Planner::Field => {
            let field = field.ok_or_else(|| ApiError::missing("orientation field"))?;
            let params = req.path_params();
            blocking(move || {
                plan(&field, &mask, start, &params).map(|p| {
                    let m = metrics(&p.path, &field, p.terminated_by);
                    (p, m)
                })
            })
            .await?
        }
        Planner::Mesh => {
            let cloud = s
                .cloud
                .clone()
                .ok_or_else(|| ApiError::missing("point cloud"))?;
            let params = req.mesh_params();
            blocking(move || {
                plan_mesh(&mask, &cloud, start, &params).map(|p| {
                    let m = match &field {
                        Some(f) => metrics(&p.path, f, p.terminated_by),
                        None => shape_metrics(&p.path, p.terminated_by),
                    };
                    (p, m)
                })
            })
            .await?
        }
    };
    let pid = s.next_path_id();
    let body = serde_json::to_vec(&PlanResponse {
        path_id: &pid,
        path: &planned.path,
        metrics: &metrics,
    })
    .expect("plan response serializes");
    s.paths.insert(
        pid.clone(),
        StoredPath {
            planner: req.planner,
            path: planned.path,
            metrics,
            poses: None,
        },
    );
    app.persist(&id, &s);
    Ok(json_bytes(body))
}

pub async fn get_path(
    State(app): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let s = session.lock().await;
    let p = stored(&s, &pid)?;
    Ok(json_bytes(write_path_json(&p.path)))
}

fn stored<'a>(s: &'a Session, pid: &str) -> Result<&'a StoredPath, ApiError> {
    s.paths
        .get(pid)
        .ok_or_else(|| ApiError::new(ErrorCode::UnknownPath, format!("no path {pid:?}")))
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryRequest {
    pub speed_mps: Option<f64>,
    pub lookup_radius_px: Option<u32>,
    pub extrinsic: Option<RigidTransform>,
}

impl TrajectoryRequest {
    pub fn params(&self) -> TrajectoryParams {
        let d = TrajectoryParams::default();
        TrajectoryParams {
            speed_mps: self.speed_mps.unwrap_or(d.speed_mps),
            lookup_radius_px: self.lookup_radius_px.unwrap_or(d.lookup_radius_px),
            extrinsic: self.extrinsic,
        }
    }
}

pub async fn trajectory(
    State(app): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: TrajectoryRequest = parse_or_default(&body)?;
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    let path = stored(&s, &pid)?.path.clone();
    let (mask, _) = s.mask.clone().ok_or_else(|| ApiError::missing("mask"))?;
    let cloud = s
        .cloud
        .clone()
        .ok_or_else(|| ApiError::missing("point cloud"))?;
    let params = req.params();
    let poses = blocking(move || generate(&path, &mask, &cloud, &params)).await?;
    let bytes = write_pose_json(&poses);
    s.paths.get_mut(&pid).expect("checked above").poses = Some(poses);
    app.persist(&id, &s);
    Ok(json_bytes(bytes))
}

pub async fn accept(
    State(app): State<AppState>,
    Path((id, pid)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let mut s = session.lock().await;
    stored(&s, &pid)?;
    if s.accepted.as_deref() != Some(pid.as_str()) {
        s.accepted = Some(pid.clone());
        app.persist(&id, &s);
    }
    Ok(Json(json!({ "accepted": pid })).into_response())
}
