#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use hairflow_core::formats::{write_mask_pgm, write_ocd, write_ppm};
use hairflow_core::synth::Scene;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub async fn send(
    app: &Router,
    method: Method,
    uri: &str,
    body: impl Into<Vec<u8>>,
) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body.into()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

pub fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

pub async fn new_session(app: &Router) -> String {
    let (status, body) = send(app, Method::POST, "/sessions", "").await;
    assert_eq!(status, StatusCode::CREATED);
    json(&body)["id"].as_str().unwrap().to_string()
}

/// Uploads rgb, cloud and mask; returns the session id.
pub async fn upload_scene(app: &Router, scene: &Scene) -> String {
    let id = new_session(app).await;
    for (part, bytes) in [
        ("rgb", write_ppm(&scene.rgb())),
        ("cloud", write_ocd(&scene.cloud)),
        ("mask", write_mask_pgm(&scene.mask)),
    ] {
        let (status, body) = send(app, Method::PUT, &format!("/sessions/{id}/{part}"), bytes).await;
        assert_eq!(
            status,
            StatusCode::NO_CONTENT,
            "{part}: {}",
            String::from_utf8_lossy(&body)
        );
    }
    id
}
