use hairflow_core::trajectory::{
    fit_plane_points, frames, quat_to_rotation, rotation_to_quat, HairPlane,
};
use nalgebra::{Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        if v.norm() > 0.1 && v.norm() <= 1.0 {
            return v.normalize();
        }
    }
}

#[test]
fn random_planes_and_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..1000 {
        let mut n = random_unit(&mut rng);
        if n.z > 0.0 {
            n = -n;
        }
        let centroid = Vector3::new(
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.5..2.0),
        );
        let a = n.cross(&random_unit(&mut rng)).normalize();
        let b = n.cross(&a);
        let pts: Vec<Vector3<f64>> = (0..30)
            .map(|_| centroid + a * rng.random_range(-0.2..0.2) + b * rng.random_range(-0.2..0.2))
            .collect();
        let plane = fit_plane_points(&pts).unwrap();
        assert!((plane.normal - n).norm() < 1e-9);

        let len = rng.random_range(3..20);
        let dir = a * rng.random_range(-1.0..1.0) + b * rng.random_range(-1.0..1.0);
        let wiggle = rng.random_range(0.0..0.01);
        let path: Vec<Vector3<f64>> = (0..len)
            .map(|i| {
                let t = i as f64 * 0.01;
                centroid
                    + dir * t
                    + b * (wiggle * (t * 40.0).sin())
                    + n * rng.random_range(-0.002..0.002)
            })
            .collect();
        let Ok(rots) = frames(&path, &plane) else {
            continue;
        };
        checked += 1;
        check_frames(&rots, &plane);
    }
    assert!(checked > 950);
}

fn check_frames(rots: &[nalgebra::Rotation3<f64>], plane: &HairPlane) {
    let h = plane.normal;
    for r in rots {
        let m = r.matrix();
        let e = m.transpose() * m - nalgebra::Matrix3::identity();
        assert!(e.abs().max() < 1e-9);
        assert!((m.determinant() - 1.0).abs() < 1e-9);
        assert!((m.column(2).dot(&h) + 1.0).abs() < 1e-9);
        assert!(m.column(1).dot(&h).abs() < 1e-9);
        let q = rotation_to_quat(r);
        assert!(q[0] >= 0.0);
        let back = quat_to_rotation(q);
        assert!((back.matrix() - m).abs().max() < 1e-9);
    }
}

#[test]
fn rotation_quaternion_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let axis = Unit::new_normalize(random_unit(&mut rng));
        let r = nalgebra::Rotation3::from_axis_angle(&axis, rng.random_range(-3.14..3.14));
        let back = quat_to_rotation(rotation_to_quat(&r));
        assert!((back.matrix() - r.matrix()).abs().max() < 1e-9);
    }
}
