use std::f64::consts::PI;

use nalgebra::Vector3;

use shapesphere::generate::{random_smooth, rigid_rotation, rigid_rotation_planar, RandomSmooth};
use shapesphere::planar::{reconstruct, swept_area, zero_j_lift, Pole, ShapeCurve, Target};
use shapesphere::shape::{configuration_from_fiber, FiberChart};
use shapesphere::spatial::{normal_track, reconstruct_spatial, reconstruct_spatial_with, SpatialOptions};
use shapesphere::sphere::rotation;
use shapesphere::{Dim, Error, MassTriple, ShapePoint, SpatialConfiguration, Trajectory};

fn m123() -> MassTriple {
    MassTriple::new(1.0, 2.0, 3.0).unwrap()
}

/// A closed loop around the `w3` axis at height `h`.
fn latitude_loop(h: f64, n: usize) -> ShapeCurve {
    let r = (0.25 - h * h).sqrt();
    let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let points: Vec<ShapePoint> = times
        .iter()
        .map(|&t| {
            let a = 2.0 * PI * t;
            ShapePoint::from_direction(Vector3::new(r * a.cos(), r * a.sin(), h))
        })
        .collect();
    ShapeCurve::new(times, &points, false).unwrap()
}

#[test]
fn zero_momentum_loop_rotates_by_twice_the_swept_area() {
    let curve = latitude_loop(0.2, 4001);
    let start = curve.points[0];
    let initial = configuration_from_fiber(&start, 0.4, FiberChart::Xi1, &m123()).unwrap();
    let lift = zero_j_lift(&curve, &initial, &m123()).unwrap();
    let report = reconstruct(&lift.trajectory, Target::Q1, true).unwrap();
    assert!(report.dynamic_term.abs() < 1e-12, "{}", report.dynamic_term);
    let sweep = swept_area(&curve, &Pole::C1.point());
    assert!((report.geometric_term - 2.0 * sweep.area).abs() < 1e-12);
    // chord areas converge at second order
    assert!((report.total - report.oracle.unwrap()).abs() < 1e-6, "{report:?}");
    assert!(report.total.abs() > 0.1);
}

#[test]
fn lift_rejects_a_start_off_the_curve() {
    let curve = latitude_loop(0.2, 101);
    let elsewhere = ShapePoint::from_direction(Vector3::new(0.0, 0.0, 0.5));
    let initial = configuration_from_fiber(&elsewhere, 0.0, FiberChart::Xi1, &m123()).unwrap();
    assert!(matches!(
        zero_j_lift(&curve, &initial, &m123()),
        Err(Error::ProjectionMismatch { .. })
    ));
}

#[test]
fn rigid_rotation_reconstructs_exactly() {
    let base = random_smooth(
        &m123(),
        &RandomSmooth {
            n: 2,
            ..RandomSmooth::default()
        },
    )
    .unwrap();
    let traj = rigid_rotation_planar(&base.planar(0), &m123(), 1.0, 1.0, 500).unwrap();
    let report = reconstruct(&traj, Target::Q1, true).unwrap();
    assert!((report.total - 1.0).abs() < 1e-8);
    assert!(report.geometric_term.abs() < 1e-12);
}

#[test]
fn both_targets_agree_with_their_oracles() {
    let traj = random_smooth(
        &m123(),
        &RandomSmooth {
            seed: 42,
            n: 4001,
            ..RandomSmooth::default()
        },
    )
    .unwrap();
    for target in [Target::Q1, Target::Z1] {
        let r = reconstruct(&traj, target, true).unwrap();
        assert!(r.oracle_error().unwrap() < 1e-6, "{target:?}: {r:?}");
    }
}

fn tilted_triangle() -> SpatialConfiguration {
    SpatialConfiguration::centered(
        [
            Vector3::new(1.0, 0.0, 0.2),
            Vector3::new(-0.4, 0.8, 0.0),
            Vector3::new(-0.3, -0.7, -0.1),
        ],
        &m123(),
    )
}

#[test]
fn normals_stay_continuous_and_face_e_at_the_start() {
    let e = Vector3::z();
    let traj = rigid_rotation(&tilted_triangle(), &m123(), &Vector3::new(1.0, 0.3, 0.0), 2.5, 2.0, 400).unwrap();
    let normals = normal_track(&traj, &e).unwrap();
    assert!(normals[0].dot(&e) >= 0.0);
    for w in normals.windows(2) {
        assert!(w[0].dot(&w[1]) > 0.9);
    }
}

#[test]
fn collinear_instants_are_bridged() {
    let m = m123();
    let e = Vector3::z();
    let flat = SpatialConfiguration::centered(
        [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-0.5, 0.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
        ],
        &m,
    );
    let a = tilted_triangle();
    let r = rotation(&Vector3::x(), 0.1);
    let positions = vec![a.q, flat.q, SpatialConfiguration::centered(a.q.map(|p| r * p), &m).q];
    let traj = Trajectory::new(m, Dim::Spatial, vec![0.0, 1.0, 2.0], positions, None, None).unwrap();
    let normals = normal_track(&traj, &e).unwrap();
    let mid = normals[1];
    assert!((mid.norm() - 1.0).abs() < 1e-12);
    assert!(mid.dot(&normals[0]) > 0.99 && mid.dot(&normals[2]) > 0.99);
}

#[test]
fn persistently_collinear_motion_has_no_orientation() {
    let m = m123();
    let line = SpatialConfiguration::centered(
        [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(-0.5, 0.0, 0.0),
            Vector3::new(-1.0, 0.0, 0.0),
        ],
        &m,
    );
    let traj = rigid_rotation(&line, &m, &Vector3::z(), 1.0, 1.0, 20).unwrap();
    assert_eq!(normal_track(&traj, &Vector3::z()), Err(Error::PersistentCollinearity));
    assert!(reconstruct_spatial(&traj, Some(Vector3::z())).is_err());
}

#[test]
fn spatial_rotation_about_e_is_recovered() {
    let traj = rigid_rotation(&tilted_triangle(), &m123(), &Vector3::z(), 0.7, 1.0, 1000).unwrap();
    let options = SpatialOptions {
        with_oracle: true,
        ..SpatialOptions::default()
    };
    let r = reconstruct_spatial_with(&traj, Some(Vector3::z()), options).unwrap();
    assert!((r.total - r.oracle.unwrap()).abs() < 1e-8, "{r:?}");
    assert!(r.certified);
}
