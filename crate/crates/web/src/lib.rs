//! wasm-bindgen front end for the static page in `www/`.
//!
//! [`Demo`] holds one synthetic scene and exposes the three operations the
//! page drives: run the shock filter, draw the orientation field, and plan a
//! stroke from a clicked pixel with either planner.

use hairflow_core::bench::BenchParams;
use hairflow_core::mesh::{build_graph, plan_on_graph, GoalSet, HairGraph};
use hairflow_core::orientation::{angular_distance, field_without_filter};
use hairflow_core::path::{metrics, plan};
use hairflow_core::shock::{shock_iterate, CoherenceParams, ConvexityConvention};
use hairflow_core::synth::{generate, Scene, SceneKind, SyntheticSpec};
use hairflow_core::{IntensityImage, OrientationField, PixelPoint};
use wasm_bindgen::prelude::*;

pub struct DemoState {
    scene: Scene,
    image: IntensityImage,
    field: OrientationField,
    graph: HairGraph,
    goals: GoalSet,
    params: BenchParams,
}

pub fn scene_kind(name: &str, size: u32) -> Option<SceneKind> {
    Some(match name {
        "stripes" => SceneKind::Stripes { angle_rad: 1.2 },
        "waves" => SceneKind::Waves {
            amplitude_px: size as f64 / 20.0,
            wavelength_px: size as f64 / 2.5,
        },
        "circular" => SceneKind::Circular { center: None },
        "parting" => SceneKind::Parting,
        _ => return None,
    })
}

impl DemoState {
    pub fn new(kind: SceneKind, size: u32, noise: f64, seed: u64) -> hairflow_core::Result<Self> {
        let scene = generate(&SyntheticSpec::new(kind, size).with_noise(noise, seed))?;
        let params = BenchParams::default();
        let field = field_without_filter(&scene.image, &params.orientation)?;
        let graph = build_graph(&scene.mask, &scene.cloud, params.mesh.edge_max_m)?;
        let goals = GoalSet::bottom(&graph, &scene.mask, params.mesh.goal_frac)?;
        Ok(Self {
            image: scene.image.clone(),
            scene,
            field,
            graph,
            goals,
            params,
        })
    }

    pub fn image(&self) -> &IntensityImage {
        &self.image
    }

    pub fn field(&self) -> &OrientationField {
        &self.field
    }

    /// Runs the shock filter on the current image and re-estimates the field.
    pub fn filter(
        &mut self,
        iterations: usize,
        convention: ConvexityConvention,
    ) -> hairflow_core::Result<()> {
        let params = CoherenceParams {
            iterations,
            convention,
            ..self.params.coherence
        };
        self.image = shock_iterate(&self.image, &params)?;
        self.field = field_without_filter(&self.image, &self.params.orientation)?;
        Ok(())
    }

    pub fn reset(&mut self) -> hairflow_core::Result<()> {
        self.image = self.scene.image.clone();
        self.field = field_without_filter(&self.image, &self.params.orientation)?;
        Ok(())
    }

    /// Mean angular error in degrees of the estimated field against the
    /// scene's truth, over hair pixels.
    pub fn error_deg(&self) -> f64 {
        let (w, h) = self.field.dims();
        let (mut sum, mut n) = (0.0, 0usize);
        for y in 0..h {
            for x in 0..w {
                if self.scene.mask.get(x, y) {
                    sum += angular_distance(
                        self.field.theta_at(x, y),
                        self.scene.truth.theta_at(x, y),
                    );
                    n += 1;
                }
            }
        }
        (sum / n.max(1) as f64).to_degrees()
    }

    /// One centred segment per grid cell: `[x0, y0, x1, y1, coherence]`.
    pub fn quiver(&self, spacing: u32) -> Vec<f64> {
        let spacing = spacing.max(2);
        let (w, h) = self.field.dims();
        let half = 0.4 * spacing as f64;
        let mut out = Vec::new();
        for y in (spacing / 2..h).step_by(spacing as usize) {
            for x in (spacing / 2..w).step_by(spacing as usize) {
                if !self.scene.mask.get(x, y) {
                    continue;
                }
                let t = self.field.theta_at(x, y);
                let (dx, dy) = (half * t.cos(), half * t.sin());
                let (cx, cy) = (x as f64, y as f64);
                out.extend([
                    cx - dx,
                    cy - dy,
                    cx + dx,
                    cy + dy,
                    self.field.coherence_at(x, y),
                ]);
            }
        }
        out
    }

    /// Flattened `x, y` pairs of a stroke, followed by its alignment with
    /// the true field (NaN for a single-point path).
    pub fn plan(&self, x: f64, y: f64, mesh: bool) -> hairflow_core::Result<Vec<f64>> {
        let start = PixelPoint::new(x, y);
        let out = if mesh {
            plan_on_graph(&self.graph, &self.goals, start)?
        } else {
            plan(&self.field, &self.scene.mask, start, &self.params.path)?
        };
        let m = metrics(&out.path, &self.scene.truth, out.terminated_by);
        let mut v: Vec<f64> = out.path.points.iter().flat_map(|p| [p.x, p.y]).collect();
        v.push(m.mean_alignment.unwrap_or(f64::NAN));
        Ok(v)
    }

    /// Greyscale RGBA with hair pixels tinted.
    pub fn rgba(&self) -> Vec<u8> {
        let (w, h) = self.image.dims();
        let mut out = Vec::with_capacity(4 * (w * h) as usize);
        for y in 0..h {
            for x in 0..w {
                let v = self.image.get(x, y).round().clamp(0.0, 255.0) as u8;
                if self.scene.mask.get(x, y) {
                    out.extend([v, (v / 4) * 3 + 40, v / 2, 255]);
                } else {
                    out.extend([v / 3, v / 3, v / 3, 255]);
                }
            }
        }
        out
    }
}

fn js_err(e: hairflow_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo(DemoState);

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, size: u32, noise: f64, seed: u64) -> Result<Demo, JsError> {
        let kind = scene_kind(kind, size)
            .ok_or_else(|| JsError::new(&format!("unknown scene kind {kind:?}")))?;
        DemoState::new(kind, size, noise, seed)
            .map(Demo)
            .map_err(js_err)
    }

    pub fn width(&self) -> u32 {
        self.0.image().width()
    }

    pub fn height(&self) -> u32 {
        self.0.image().height()
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.0.rgba()
    }

    pub fn filter(&mut self, iterations: usize, weickert: bool) -> Result<(), JsError> {
        let convention = if weickert {
            ConvexityConvention::Weickert
        } else {
            ConvexityConvention::AsWritten
        };
        self.0.filter(iterations, convention).map_err(js_err)
    }

    pub fn reset(&mut self) -> Result<(), JsError> {
        self.0.reset().map_err(js_err)
    }

    #[wasm_bindgen(js_name = errorDeg)]
    pub fn error_deg(&self) -> f64 {
        self.0.error_deg()
    }

    pub fn quiver(&self, spacing: u32) -> Vec<f64> {
        self.0.quiver(spacing)
    }

    pub fn plan(&self, x: f64, y: f64, mesh: bool) -> Result<Vec<f64>, JsError> {
        self.0.plan(x, y, mesh).map_err(js_err)
    }
}
