//! HTTP session service for interactive stroke planning.
//!
//! A client uploads a scene, asks for the orientation field, plans strokes
//! from chosen start pixels, previews their poses and accepts one. Each
//! session's requests run one at a time; separate sessions run in parallel.

mod error;
mod handlers;
mod session;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::routing::{get, post, put};
use axum::Router;
use tokio::sync::Mutex;
use tower_http::services::ServeDir;

pub use error::{ApiError, ErrorCode};
pub use handlers::{OrientRequest, PathRequest, SegmentRequest, TrajectoryRequest};
pub use session::{MaskSource, Session, SessionSummary};

pub const DATA_DIR_ENV: &str = "HAIRFLOW_DATA_DIR";

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Arc<Mutex<Session>>>>>,
    data_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(data_dir: Option<PathBuf>) -> Self {
        Self {
            sessions: Arc::default(),
            data_dir,
        }
    }

    /// Reads the persistence directory from the environment.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(ErrorCode::UnknownSession, format!("no session {id:?}")))
    }

    fn insert(&self, id: String) {
        self.sessions
            .write()
            .expect("session map poisoned")
            .insert(id, Arc::default());
    }

    fn persist(&self, id: &str, session: &Session) {
        if let Some(dir) = &self.data_dir {
            if let Err(e) = session.dump(id, dir) {
                eprintln!("warning: could not persist session {id}: {e}");
            }
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(handlers::create_session))
        .route("/sessions/{id}", get(handlers::get_session))
        .route("/sessions/{id}/rgb", put(handlers::put_rgb))
        .route("/sessions/{id}/cloud", put(handlers::put_cloud))
        .route("/sessions/{id}/mask", put(handlers::put_mask))
        .route(
            "/sessions/{id}/segment-fallback",
            post(handlers::segment_fallback),
        )
        .route("/sessions/{id}/orient", post(handlers::orient))
        .route("/sessions/{id}/field", get(handlers::get_field))
        .route("/sessions/{id}/paths", post(handlers::plan_path))
        .route("/sessions/{id}/paths/{pid}", get(handlers::get_path))
        .route(
            "/sessions/{id}/paths/{pid}/trajectory",
            post(handlers::trajectory),
        )
        .route("/sessions/{id}/paths/{pid}/accept", post(handlers::accept))
        .with_state(state)
}

/// The API plus static files from `static_dir` for every other route.
pub fn app(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = router(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(
    addr: SocketAddr,
    state: AppState,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(state, static_dir)).await
}
