use std::f64::consts::PI;

use hairflow_core::formats::write_path_json;
use hairflow_core::orientation::{field_from_image, OrientationParams};
use hairflow_core::path::{plan, PathParams};
use hairflow_core::shock::CoherenceParams;
use hairflow_core::synth::{generate, SceneKind, SyntheticSpec};
use hairflow_core::{BinaryMask, OrientationField, PixelPoint};

#[test]
fn uniform_fields_give_identical_steps() {
    let mask = BinaryMask::filled(200, 200, true);
    for k in 0..12 {
        let theta = k as f64 * PI / 12.0;
        let field = OrientationField::uniform(200, 200, theta);
        let out = plan(
            &field,
            &mask,
            PixelPoint::new(100.0, 100.0),
            &PathParams::default(),
        )
        .unwrap();
        let pts = &out.path.points;
        assert!(pts.len() > 10);
        let first = (pts[1].x - pts[0].x, pts[1].y - pts[0].y);
        for w in pts.windows(2) {
            let step = (w[1].x - w[0].x, w[1].y - w[0].y);
            assert!((step.0 - first.0).abs() < 1e-9 && (step.1 - first.1).abs() < 1e-9);
            assert!((step.0.hypot(step.1) - 6.0).abs() <= 1e-9 * 6.0);
        }
    }
}

#[test]
fn circle_drift_stays_small() {
    let spec = SyntheticSpec::new(
        SceneKind::Circular {
            center: Some([224.0, 224.0]),
        },
        448,
    );
    let scene = generate(&spec).unwrap();
    let out = plan(
        &scene.truth,
        &scene.mask,
        PixelPoint::new(424.0, 224.0),
        &PathParams::default(),
    )
    .unwrap();
    let mut swept = 0.0;
    let mut prev = 0.0f64;
    let mut worst = 0.0f64;
    for p in &out.path.points {
        let a = (p.y - 224.0).atan2(p.x - 224.0);
        let mut d = a - prev;
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        swept += d;
        prev = a;
        worst = worst.max(((p.x - 224.0).hypot(p.y - 224.0) - 200.0).abs() / 200.0);
        if swept.abs() >= PI {
            break;
        }
    }
    assert!(swept.abs() >= PI, "stroke never completed half a turn");
    assert!(worst < 0.05, "drift {worst}");
}

#[test]
fn reruns_are_bit_identical() {
    let spec = SyntheticSpec::new(
        SceneKind::Waves {
            amplitude_px: 10.0,
            wavelength_px: 80.0,
        },
        128,
    )
    .with_noise(8.0, 3);
    let run = || {
        let scene = generate(&spec).unwrap();
        let field = field_from_image(
            &scene.image,
            &CoherenceParams::default(),
            &OrientationParams::default(),
        )
        .unwrap();
        let out = plan(
            &field,
            &scene.mask,
            PixelPoint::new(30.0, 40.0),
            &PathParams::default(),
        )
        .unwrap();
        write_path_json(&out.path)
    };
    assert_eq!(run(), run());
}

#[test]
fn horizontal_mirror_mirrors_the_path() {
    let spec = SyntheticSpec::new(
        SceneKind::Waves {
            amplitude_px: 12.0,
            wavelength_px: 70.0,
        },
        128,
    )
    .with_noise(6.0, 4);
    let scene = generate(&spec).unwrap();
    let field = field_from_image(
        &scene.image,
        &CoherenceParams::default(),
        &OrientationParams::default(),
    )
    .unwrap();
    let w = field.width();
    let flipped = OrientationField::from_fn(w, field.height(), |x, y| {
        (
            PI - field.theta_at(w - 1 - x, y),
            field.coherence_at(w - 1 - x, y),
        )
    });
    let mask = BinaryMask::from_fn(w, field.height(), |x, y| scene.mask.get(w - 1 - x, y));
    for (sx, sy) in [(30.0, 20.0), (70.0, 64.0), (100.0, 90.0)] {
        let a = plan(
            &field,
            &scene.mask,
            PixelPoint::new(sx, sy),
            &PathParams::default(),
        )
        .unwrap();
        let b = plan(
            &flipped,
            &mask,
            PixelPoint::new((w - 1) as f64 - sx, sy),
            &PathParams::default(),
        )
        .unwrap();
        assert_eq!(a.path.len(), b.path.len());
        assert_eq!(a.terminated_by, b.terminated_by);
        for (p, q) in a.path.points.iter().zip(&b.path.points) {
            assert!((p.x - ((w - 1) as f64 - q.x)).abs() < 1e-6 && (p.y - q.y).abs() < 1e-6);
        }
    }
}
