//! Side-by-side evaluation of the field planner and the mesh planner on a
//! synthetic scene, scored against the scene's true orientation.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mask::BinaryMask;
use crate::mesh::{build_graph, plan_on_graph, GoalSet, MeshParams};
use crate::orientation::{field_from_image, OrientationField, OrientationParams};
use crate::path::{metrics, plan, PathMetrics, PathParams, PlannedPath};
use crate::raster::{IntensityImage, OrganizedCloud, PixelPoint};
use crate::shock::CoherenceParams;
use crate::synth::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Planner {
    Field,
    Mesh,
}

impl Planner {
    pub fn as_str(self) -> &'static str {
        match self {
            Planner::Field => "field",
            Planner::Mesh => "mesh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchParams {
    pub coherence: CoherenceParams,
    pub orientation: OrientationParams,
    pub path: PathParams,
    pub mesh: MeshParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub planner: Planner,
    pub start: PixelPoint,
    pub metrics: PathMetrics,
    pub displacement: [f64; 2],
}

/// Picks `n` distinct hair pixels from the top `fraction` of the mask's
/// bounding box, keeping `inset` pixels away from its sides.
pub fn select_starts(
    mask: &BinaryMask,
    n: usize,
    fraction: f64,
    inset: u32,
    seed: u64,
) -> Result<Vec<PixelPoint>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid(
            "fraction",
            format!("must be in (0, 1], got {fraction}"),
        ));
    }
    let (x0, y0, x1, y1) = mask.bounding_box().ok_or(Error::EmptyMask)?;
    let band = ((y1 - y0 + 1) as f64 * fraction).ceil() as u32;
    let mut pool = Vec::new();
    for y in y0..(y0 + band).min(y1 + 1) {
        for x in x0.saturating_add(inset)..=x1.saturating_sub(inset) {
            if mask.get(x, y) {
                pool.push(PixelPoint::new(x as f64, y as f64));
            }
        }
    }
    if pool.len() < n {
        return Err(invalid(
            "starts",
            format!("requested {n} but only {} candidate pixels", pool.len()),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample(&mut rng, pool.len(), n)
        .into_iter()
        .map(|i| pool[i])
        .collect())
}

/// Runs both planners from every start and scores each path against
/// `truth`. Rows come out field-first, in start order.
pub fn compare_planners(
    image: &IntensityImage,
    truth: &OrientationField,
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    starts: &[PixelPoint],
    params: &BenchParams,
) -> Result<Vec<ComparisonRow>> {
    let field = field_from_image(image, &params.coherence, &params.orientation)?;
    let graph = build_graph(mask, cloud, params.mesh.edge_max_m)?;
    let goals = GoalSet::bottom(&graph, mask, params.mesh.goal_frac)?;
    let mut rows = Vec::with_capacity(2 * starts.len());
    for &start in starts {
        let out = plan(&field, mask, start, &params.path)?;
        rows.push(row(Planner::Field, start, out, truth));
    }
    for &start in starts {
        let out = plan_on_graph(&graph, &goals, start)?;
        rows.push(row(Planner::Mesh, start, out, truth));
    }
    Ok(rows)
}

pub fn compare_on_scene(
    scene: &Scene,
    starts: &[PixelPoint],
    params: &BenchParams,
) -> Result<Vec<ComparisonRow>> {
    compare_planners(
        &scene.image,
        &scene.truth,
        &scene.mask,
        &scene.cloud,
        starts,
        params,
    )
}

fn row(
    planner: Planner,
    start: PixelPoint,
    out: PlannedPath,
    truth: &OrientationField,
) -> ComparisonRow {
    let (dx, dy) = out.path.displacement();
    ComparisonRow {
        planner,
        start,
        metrics: metrics(&out.path, truth, out.terminated_by),
        displacement: [dx, dy],
    }
}

/// Mean alignment of one planner's rows, skipping single-point paths.
pub fn mean_alignment(rows: &[ComparisonRow], planner: Planner) -> Option<f64> {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.planner == planner)
        .filter_map(|r| r.metrics.mean_alignment)
        .collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// One-sided sign test: probability of at least `successes` heads in
/// `trials` fair coin flips.
pub fn sign_test_p(successes: usize, trials: usize) -> f64 {
    let mut p = 0.0;
    let mut choose = 1.0f64;
    for k in 0..=trials {
        if k > 0 {
            choose = choose * (trials - k + 1) as f64 / k as f64;
        }
        if k >= successes {
            p += choose;
        }
    }
    p / 2f64.powi(trials as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SceneKind, SyntheticSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sign_test_values() {
        assert_abs_diff_eq!(sign_test_p(0, 10), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sign_test_p(10, 10), 1.0 / 1024.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sign_test_p(9, 10), 11.0 / 1024.0, epsilon = 1e-15);
    }

    #[test]
    fn starts_are_distinct_and_in_band() {
        let mask = BinaryMask::from_fn(64, 64, |x, y| (4..60).contains(&x) && (4..60).contains(&y));
        let starts = select_starts(&mask, 20, 0.25, 6, 3).unwrap();
        assert_eq!(starts.len(), 20);
        for (i, a) in starts.iter().enumerate() {
            assert!(a.y >= 4.0 && a.y < 18.0 && a.x >= 10.0 && a.x <= 53.0);
            assert!(starts[i + 1..].iter().all(|b| b != a));
        }
        assert_eq!(starts, select_starts(&mask, 20, 0.25, 6, 3).unwrap());
        assert!(select_starts(&mask, 10_000, 0.25, 6, 3).is_err());
    }

    #[test]
    fn vertical_stripes_both_planners_go_down() {
        let scene = generate(&SyntheticSpec::new(
            SceneKind::Stripes {
                angle_rad: std::f64::consts::FRAC_PI_2,
            },
            64,
        ))
        .unwrap();
        let starts = select_starts(&scene.mask, 4, 0.2, 8, 1).unwrap();
        let rows = compare_on_scene(&scene, &starts, &BenchParams::default()).unwrap();
        assert_eq!(rows.len(), 8);
        for r in &rows {
            assert!(r.displacement[1] > 0.0, "{r:?}");
            assert!(r.metrics.mean_alignment.unwrap() >= 0.99, "{r:?}");
        }
    }
}
