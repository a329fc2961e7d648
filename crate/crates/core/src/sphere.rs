//! Angle bookkeeping and signed area sweeps on spheres.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Smallest signed difference `a - b` modulo `2 pi`.
pub fn angle_diff_mod_2pi(a: f64, b: f64) -> f64 {
    wrap_angle(a - b)
}

/// Continues an unwound angle sequence with a new raw sample.
pub fn unwrap_next(prev_unwound: f64, raw: f64) -> f64 {
    prev_unwound + wrap_angle(raw - prev_unwound)
}

/// Signed spherical excess of the geodesic triangle `(p, a, b)` on the unit
/// sphere. Positive when `p, a, b` form a right-handed triple.
///
/// Inputs must be unit vectors. Near the antipode of `p` the usual
/// half-angle formula cancels catastrophically, so both terms are rewritten
/// in the offsets `a + p`, `b + p`.
pub fn triangle_excess(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let da = a + p;
    let db = b + p;
    let (num, den) = if da.norm() < 0.5 && db.norm() < 0.5 {
        (p.dot(&da.cross(&db)), da.dot(&db))
    } else {
        (p.dot(&a.cross(b)), 1.0 + p.dot(a) + a.dot(b) + b.dot(p))
    };
    2.0 * num.atan2(den)
}

/// Signed area swept between a polyline on a sphere of any radius and a
/// pole, i.e. `rho^2 * integral (1 - cos(phi)) d(psi)` with longitude `psi`
/// taken left-handed about the outward pole direction.
///
/// Each consecutive pair of points is joined by a great-circle arc, so the
/// result is exact for geodesic polygons.
pub fn swept_area_polyline(points: &[Vector3<f64>], pole: &Vector3<f64>) -> f64 {
    let p = pole.normalize();
    points
        .windows(2)
        .map(|w| {
            let (ra, rb) = (w[0].norm(), w[1].norm());
            if ra == 0.0 || rb == 0.0 {
                return 0.0;
            }
            let a = w[0] / ra;
            let b = w[1] / rb;
            -triangle_excess(&p, &a, &b) * ra * rb
        })
        .sum()
}

/// Signed solid angle swept by a path of unit vectors about `pole`,
/// i.e. `integral (1 - cos(phi)) d(eta)` with `eta` right-handed about the pole.
pub fn swept_solid_angle(points: &[Vector3<f64>], pole: &Vector3<f64>) -> f64 {
    let p = pole.normalize();
    points
        .windows(2)
        .map(|w| triangle_excess(&p, &w[0].normalize(), &w[1].normalize()))
        .sum()
}

/// Rotation matrix about a unit `axis` by `angle` (Rodrigues).
pub fn rotation(axis: &Vector3<f64>, angle: f64) -> nalgebra::Matrix3<f64> {
    nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle).into_inner()
}

/// An orthonormal pair `(u, v)` spanning the plane orthogonal to `axis`
/// with `u x v = axis`. Deterministic: `u` comes from the coordinate axis
/// least aligned with `axis`.
pub fn plane_basis(axis: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let a = axis.normalize();
    let mut best = 0;
    for i in 1..3 {
        if a[i].abs() < a[best].abs() {
            best = i;
        }
    }
    let mut seed = Vector3::zeros();
    seed[best] = 1.0;
    let u = (seed - a * a.dot(&seed)).normalize();
    let v = a.cross(&u);
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0);
        assert_relative_eq!(wrap_angle(0.25 + 4.0 * TAU), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn octant_triangle_has_excess_pi_over_two() {
        let x = Vector3::x();
        let y = Vector3::y();
        let z = Vector3::z();
        assert_relative_eq!(triangle_excess(&z, &x, &y), PI / 2.0, epsilon = 1e-14);
        assert_relative_eq!(triangle_excess(&z, &y, &x), -PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn antipodal_rewrite_agrees_with_direct_formula() {
        let p = Vector3::<f64>::z();
        let a = Vector3::new(0.3, 0.1, -1.0).normalize();
        let b = Vector3::new(-0.2, 0.35, -1.0).normalize();
        let direct = 2.0 * p.dot(&a.cross(&b)).atan2(1.0 + p.dot(&a) + a.dot(&b) + b.dot(&p));
        assert_relative_eq!(triangle_excess(&p, &a, &b), direct, epsilon = 1e-12);
    }

    #[test]
    fn cap_boundary_sweep_matches_closed_form() {
        // circle of colatitude phi about z traversed once clockwise (seen from +z)
        let phi: f64 = 0.7;
        let n = 4000;
        let pts: Vec<_> = (0..=n)
            .map(|k| {
                let psi = -TAU * k as f64 / n as f64;
                Vector3::new(phi.sin() * psi.cos(), phi.sin() * psi.sin(), phi.cos())
            })
            .collect();
        let area = swept_area_polyline(&pts, &Vector3::z());
        assert_relative_eq!(area, TAU * (1.0 - phi.cos()), epsilon = 1e-5);
        let solid = swept_solid_angle(&pts, &Vector3::z());
        assert_relative_eq!(solid, -TAU * (1.0 - phi.cos()), epsilon = 1e-5);
    }

    #[test]
    fn plane_basis_is_right_handed() {
        for axis in [Vector3::z(), Vector3::new(1.0, 2.0, -0.5)] {
            let (u, v) = plane_basis(&axis);
            assert_relative_eq!(u.cross(&v), axis.normalize(), epsilon = 1e-14);
        }
        let (u, v) = plane_basis(&Vector3::z());
        assert_eq!(u, Vector3::x());
        assert_eq!(v, Vector3::y());
    }
}
