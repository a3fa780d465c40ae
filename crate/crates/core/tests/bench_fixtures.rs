use hairflow_core::bench::{
    compare_on_scene, mean_alignment, select_starts, sign_test_p, BenchParams, Planner,
};
use hairflow_core::orientation::{angular_distance, field_without_filter, OrientationParams};
use hairflow_core::synth::{generate, SceneKind, SyntheticSpec};

fn median_error_deg(angle: f64, noise: f64) -> f64 {
    let spec =
        SyntheticSpec::new(SceneKind::Stripes { angle_rad: angle }, 128).with_noise(noise, 1);
    let scene = generate(&spec).unwrap();
    let field = field_without_filter(&scene.image, &OrientationParams::default()).unwrap();
    let mut errs: Vec<f64> = (8..120)
        .flat_map(|y| (8..120).map(move |x| (x, y)))
        .map(|(x, y)| angular_distance(field.theta_at(x, y), angle).to_degrees())
        .collect();
    errs.sort_by(f64::total_cmp);
    errs[errs.len() / 2]
}

#[test]
fn stripes_orientation_recovered() {
    for k in 0..12 {
        let a = (15.0 * k as f64).to_radians();
        assert!(median_error_deg(a, 0.0) < 2.0);
        assert!(median_error_deg(a, 8.0) < 5.0);
    }
}

#[test]
fn sideways_strands_split_the_planners() {
    let scene = generate(
        &SyntheticSpec::new(SceneKind::Stripes { angle_rad: 0.0 }, 128).with_noise(4.0, 5),
    )
    .unwrap();
    let starts = select_starts(&scene.mask, 10, 0.25, 12, 5).unwrap();
    let rows = compare_on_scene(&scene, &starts, &BenchParams::default()).unwrap();
    let sideways = rows
        .iter()
        .filter(|r| {
            r.planner == Planner::Field && r.displacement[0].abs() > r.displacement[1].abs()
        })
        .count();
    let downward = rows
        .iter()
        .filter(|r| r.planner == Planner::Mesh && r.displacement[1] > r.displacement[0].abs())
        .count();
    assert!(sign_test_p(sideways, 10) < 0.01);
    assert!(sign_test_p(downward, 10) < 0.01);
}

#[test]
fn waves_favour_the_field_planner() {
    let spec = SyntheticSpec::new(
        SceneKind::Waves {
            amplitude_px: 8.0,
            wavelength_px: 64.0,
        },
        128,
    );
    let scene = generate(&spec).unwrap();
    let starts = select_starts(&scene.mask, 10, 0.25, 12, 9).unwrap();
    let rows = compare_on_scene(&scene, &starts, &BenchParams::default()).unwrap();
    assert!(
        mean_alignment(&rows, Planner::Field).unwrap()
            > mean_alignment(&rows, Planner::Mesh).unwrap()
    );
}
