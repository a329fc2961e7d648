//! Masses, centered configurations, normalized Jacobi coordinates and the
//! shape map onto `(w1, w2, w3, w4)`.
//!
//! Conventions: `Z1 = mu1 (q3 - q2)`, `Z2 = mu2 (q1 - c23)` with `c23` the
//! centroid of bodies 2 and 3; `w4 +/- w1 = |Z1|^2, |Z2|^2` and
//! `w2 + i w3 = conj(Z1) Z2`. The normalized shape sphere has `w4 = 1/2`.

use std::f64::consts::PI;

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::wrap_angle;

/// Relative tolerance for the centroid condition of a configuration.
pub const CENTROID_TOL: f64 = 1e-12;

/// Chart angles are declared undefined below `CHART_EPS * sqrt(I)`.
pub const CHART_EPS: f64 = 1e-13;

/// One of the three bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Body {
    One,
    Two,
    Three,
}

impl Body {
    pub const ALL: [Body; 3] = [Body::One, Body::Two, Body::Three];

    pub fn index(self) -> usize {
        match self {
            Body::One => 0,
            Body::Two => 1,
            Body::Three => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Body> {
        Body::ALL.get(i).copied()
    }

    /// The other two bodies in cyclic order: 1 -> (2, 3), 2 -> (3, 1), 3 -> (1, 2).
    pub fn cyclic_others(self) -> (Body, Body) {
        match self {
            Body::One => (Body::Two, Body::Three),
            Body::Two => (Body::Three, Body::One),
            Body::Three => (Body::One, Body::Two),
        }
    }
}

/// Three positive masses with their Jacobi scale factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MassTriple {
    m: [f64; 3],
    mu1: f64,
    mu2: f64,
    total: f64,
}

impl MassTriple {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        for (i, &m) in [m1, m2, m3].iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidMass { index: i + 1, value: m });
            }
        }
        let (mu1, mu2) = jacobi_scales([m1, m2, m3], Body::One);
        Ok(MassTriple {
            m: [m1, m2, m3],
            mu1,
            mu2,
            total: m1 + m2 + m3,
        })
    }

    pub fn equal() -> Self {
        MassTriple::new(1.0, 1.0, 1.0).expect("unit masses are valid")
    }

    pub fn m(&self, body: Body) -> f64 {
        self.m[body.index()]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.m
    }

    pub fn mu1(&self) -> f64 {
        self.mu1
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Weighted centroid of three vectors.
    pub fn centroid<const D: usize>(&self, q: &[nalgebra::SVector<f64, D>; 3]) -> nalgebra::SVector<f64, D> {
        (q[0] * self.m[0] + q[1] * self.m[1] + q[2] * self.m[2]) / self.total
    }

    /// Relative centroid offset `|sum m q| / sum m |q|` (zero for all-zero input).
    pub fn centroid_offset<const D: usize>(&self, q: &[nalgebra::SVector<f64, D>; 3]) -> f64 {
        let s = q[0] * self.m[0] + q[1] * self.m[1] + q[2] * self.m[2];
        let scale: f64 = (0..3).map(|i| self.m[i] * q[i].norm()).sum();
        if scale == 0.0 {
            0.0
        } else {
            s.norm() / scale
        }
    }
}

impl TryFrom<[f64; 3]> for MassTriple {
    type Error = Error;
    fn try_from(m: [f64; 3]) -> Result<Self> {
        MassTriple::new(m[0], m[1], m[2])
    }
}

impl From<MassTriple> for [f64; 3] {
    fn from(m: MassTriple) -> [f64; 3] {
        m.m
    }
}

/// Checked entry point for a mass triple.
pub fn derive_masses(m1: f64, m2: f64, m3: f64) -> Result<MassTriple> {
    MassTriple::new(m1, m2, m3)
}

/// `(mu1, mu2)` for the Jacobi system pivoted on `pivot` with the remaining
/// pair `(j, k)` in cyclic order.
fn jacobi_scales(m: [f64; 3], pivot: Body) -> (f64, f64) {
    let (j, k) = pivot.cyclic_others();
    let (mi, mj, mk) = (m[pivot.index()], m[j.index()], m[k.index()]);
    let mu1 = (1.0 / (1.0 / mj + 1.0 / mk)).sqrt();
    let mu2 = (1.0 / (1.0 / mi + 1.0 / (mj + mk))).sqrt();
    (mu1, mu2)
}

/// Three planar positions (or velocities) with the centroid at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanarConfiguration {
    pub q: [Vector2<f64>; 3],
}

impl PlanarConfiguration {
    /// Validates the centroid condition.
    pub fn new(q: [Vector2<f64>; 3], masses: &MassTriple) -> Result<Self> {
        let offset = masses.centroid_offset(&q);
        if offset > CENTROID_TOL {
            return Err(Error::NotCentered {
                offset,
                tol: CENTROID_TOL,
            });
        }
        Ok(PlanarConfiguration { q })
    }

    /// Subtracts the weighted centroid.
    pub fn centered(q: [Vector2<f64>; 3], masses: &MassTriple) -> Self {
        let c = masses.centroid(&q);
        PlanarConfiguration {
            q: [q[0] - c, q[1] - c, q[2] - c],
        }
    }

    pub fn from_xy(points: [[f64; 2]; 3], masses: &MassTriple) -> Result<Self> {
        Self::new(points.map(|p| Vector2::new(p[0], p[1])), masses)
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let r = nalgebra::Rotation2::new(angle);
        PlanarConfiguration {
            q: self.q.map(|p| r * p),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        PlanarConfiguration {
            q: self.q.map(|p| p * s),
        }
    }

    /// Embeds into 3-space with `z = 0`.
    pub fn embed(&self) -> SpatialConfiguration {
        SpatialConfiguration {
            q: self.q.map(|p| Vector3::new(p.x, p.y, 0.0)),
        }
    }

    pub fn moment_of_inertia(&self, masses: &MassTriple) -> f64 {
        (0..3).map(|i| masses.m[i] * self.q[i].norm_squared()).sum()
    }

    /// Signed area of the triangle `q1 q2 q3` (positive when counterclockwise).
    pub fn signed_area(&self) -> f64 {
        let a = self.q[1] - self.q[0];
        let b = self.q[2] - self.q[0];
        0.5 * (a.x * b.y - a.y * b.x)
    }
}

/// Angular momentum `sum m (x vy - y vx)` computed directly from positions
/// and velocities.
pub fn planar_angular_momentum(
    config: &PlanarConfiguration,
    velocity: &PlanarConfiguration,
    masses: &MassTriple,
) -> f64 {
    (0..3)
        .map(|i| {
            let (q, v) = (config.q[i], velocity.q[i]);
            masses.m[i] * (q.x * v.y - q.y * v.x)
        })
        .sum()
}

/// Three spatial positions with the centroid at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpatialConfiguration {
    pub q: [Vector3<f64>; 3],
}

impl SpatialConfiguration {
    pub fn new(q: [Vector3<f64>; 3], masses: &MassTriple) -> Result<Self> {
        let offset = masses.centroid_offset(&q);
        if offset > CENTROID_TOL {
            return Err(Error::NotCentered {
                offset,
                tol: CENTROID_TOL,
            });
        }
        Ok(SpatialConfiguration { q })
    }

    pub fn centered(q: [Vector3<f64>; 3], masses: &MassTriple) -> Self {
        let c = masses.centroid(&q);
        SpatialConfiguration {
            q: [q[0] - c, q[1] - c, q[2] - c],
        }
    }

    pub fn transformed(&self, m: &nalgebra::Matrix3<f64>) -> Self {
        SpatialConfiguration {
            q: self.q.map(|p| m * p),
        }
    }

    pub fn moment_of_inertia(&self, masses: &MassTriple) -> f64 {
        (0..3).map(|i| masses.m[i] * self.q[i].norm_squared()).sum()
    }

    /// Total angular momentum `sum m q x v`.
    pub fn angular_momentum(&self, velocity: &[Vector3<f64>; 3], masses: &MassTriple) -> Vector3<f64> {
        (0..3).map(|i| self.q[i].cross(&velocity[i]) * masses.m[i]).sum()
    }

    /// Unnormalized triangle normal `(q3 - q2) x (q1 - q2)`.
    pub fn raw_normal(&self) -> Vector3<f64> {
        (self.q[2] - self.q[1]).cross(&(self.q[0] - self.q[1]))
    }

    /// Coordinates in the plane spanned by the orthonormal pair `(u, v)`.
    pub fn in_plane(&self, u: &Vector3<f64>, v: &Vector3<f64>) -> PlanarConfiguration {
        PlanarConfiguration {
            q: self.q.map(|p| Vector2::new(p.dot(u), p.dot(v))),
        }
    }
}

/// Normalized Jacobi coordinates viewed as complex numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiPair {
    pub z1: Complex64,
    pub z2: Complex64,
}

fn c(v: Vector2<f64>) -> Complex64 {
    Complex64::new(v.x, v.y)
}

fn v2(z: Complex64) -> Vector2<f64> {
    Vector2::new(z.re, z.im)
}

/// Jacobi coordinates pivoted on body `pivot`: `Z1 = mu1 (q_k - q_j)`,
/// `Z2 = mu2 (q_i - c_jk)` with `(j, k)` the cyclic successors of `i`.
/// Linear, so it applies equally to velocities.
pub fn jacobi_with_pivot(config: &PlanarConfiguration, masses: &MassTriple, pivot: Body) -> JacobiPair {
    let (mu1, mu2) = jacobi_scales(masses.m, pivot);
    let (j, k) = pivot.cyclic_others();
    let (qi, qj, qk) = (config.q[pivot.index()], config.q[j.index()], config.q[k.index()]);
    let (mj, mk) = (masses.m(j), masses.m(k));
    let cjk = (qj * mj + qk * mk) / (mj + mk);
    JacobiPair {
        z1: c(qk - qj) * mu1,
        z2: c(qi - cjk) * mu2,
    }
}

/// Normalized Jacobi coordinates with respect to body 1.
pub fn jacobi(config: &PlanarConfiguration, masses: &MassTriple) -> JacobiPair {
    jacobi_with_pivot(config, masses, Body::One)
}

impl JacobiPair {
    /// Inverse of [`jacobi`]: the unique centered configuration.
    pub fn to_configuration(&self, masses: &MassTriple) -> PlanarConfiguration {
        let [m1, m2, m3] = masses.m;
        let a = v2(self.z1) / masses.mu1;
        let b = v2(self.z2) / masses.mu2;
        let c23 = b * (-m1 / masses.total);
        let q1 = b * ((m2 + m3) / masses.total);
        let q2 = c23 - a * (m3 / (m2 + m3));
        let q3 = c23 + a * (m2 / (m2 + m3));
        PlanarConfiguration { q: [q1, q2, q3] }
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }
}

/// Moment of inertia and angular momentum from Jacobi coordinates and their rates.
pub fn inertia_and_momentum(pair: &JacobiPair, rate: &JacobiPair) -> (f64, f64) {
    let i = pair.moment_of_inertia();
    let j = -(pair.z1 * rate.z1.conj() + pair.z2 * rate.z2.conj()).im;
    (i, j)
}

/// A point of shape space; `w4 = I / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapePoint {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl ShapePoint {
    pub fn new(w1: f64, w2: f64, w3: f64, w4: f64) -> Self {
        ShapePoint { w1, w2, w3, w4 }
    }

    /// The point on the normalized sphere in direction `(w1, w2, w3)`.
    pub fn from_direction(w: Vector3<f64>) -> Self {
        let d = w.normalize() * 0.5;
        ShapePoint::new(d.x, d.y, d.z, 0.5)
    }

    pub fn xyz(&self) -> Vector3<f64> {
        Vector3::new(self.w1, self.w2, self.w3)
    }

    /// Moment of inertia of any configuration projecting here.
    pub fn inertia(&self) -> f64 {
        2.0 * self.w4
    }

    /// `|Z1|` of any configuration projecting here.
    pub fn r1(&self) -> f64 {
        (self.w4 + self.w1).max(0.0).sqrt()
    }

    /// `|Z2|` of any configuration projecting here.
    pub fn r2(&self) -> f64 {
        (self.w4 - self.w1).max(0.0).sqrt()
    }

    /// Longitude about the `C1`–`O1` axis, `arg(w2 + i w3)`.
    pub fn xi(&self) -> f64 {
        self.w3.atan2(self.w2)
    }

    /// Reflection across the collinear plane `w3 = 0`.
    pub fn reflected(&self) -> Self {
        ShapePoint::new(self.w1, self.w2, -self.w3, self.w4)
    }

    /// Relative defect of the sphere identity `w1^2 + w2^2 + w3^2 = w4^2`.
    pub fn sphere_defect(&self) -> f64 {
        if self.w4 == 0.0 {
            return self.xyz().norm();
        }
        (self.xyz().norm() - self.w4).abs() / self.w4
    }

    pub fn distance(&self, other: &ShapePoint) -> f64 {
        (self.xyz() - other.xyz()).norm()
    }
}

/// The shape map `(Z1, Z2) -> (w1, w2, w3, w4)`.
pub fn shape_map(pair: &JacobiPair) -> ShapePoint {
    let a = pair.z1.norm_sqr();
    let b = pair.z2.norm_sqr();
    let w = pair.z1.conj() * pair.z2;
    ShapePoint::new(0.5 * (a - b), w.re, w.im, 0.5 * (a + b))
}

/// Shape point of a planar configuration.
pub fn project(config: &PlanarConfiguration, masses: &MassTriple) -> ShapePoint {
    shape_map(&jacobi(config, masses))
}

/// Rescales onto the sphere `w4 = 1/2`.
pub fn normalize_shape(p: &ShapePoint) -> Result<ShapePoint> {
    if !(p.w4 > 0.0) {
        return Err(Error::TripleCollision { sample: None });
    }
    let s = 0.5 / p.w4;
    Ok(ShapePoint::new(p.w1 * s, p.w2 * s, p.w3 * s, 0.5))
}

/// Polar data of the Jacobi pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChartAngles {
    pub r1: f64,
    pub r2: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Angle from `Z1` to `Z2` in `(-pi, pi]`; equals `arg(w2 + i w3)`.
    pub xi: f64,
    pub defined1: bool,
    pub defined2: bool,
}

pub fn chart_angles(pair: &JacobiPair) -> ChartAngles {
    let r1 = pair.z1.norm();
    let r2 = pair.z2.norm();
    let threshold = CHART_EPS * (r1 * r1 + r2 * r2).sqrt();
    let defined1 = r1 > threshold;
    let defined2 = r2 > threshold;
    let xi1 = if defined1 { pair.z1.arg() } else { 0.0 };
    let xi2 = if defined2 { pair.z2.arg() } else { 0.0 };
    let xi = if defined1 && defined2 {
        wrap_angle(xi2 - xi1)
    } else {
        0.0
    };
    ChartAngles {
        r1,
        r2,
        xi1,
        xi2,
        xi,
        defined1,
        defined2,
    }
}

/// Which polar angle fixes the fiber over a shape point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiberChart {
    /// `arg Z1`, singular at `C1`.
    Xi1,
    /// `arg Z2` (the polar angle of `q1`), singular at `O1`.
    Xi2,
}

impl FiberChart {
    pub fn other(self) -> FiberChart {
        match self {
            FiberChart::Xi1 => FiberChart::Xi2,
            FiberChart::Xi2 => FiberChart::Xi1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FiberChart::Xi1 => "xi1",
            FiberChart::Xi2 => "xi2",
        }
    }
}

/// Jacobi pair over `p` whose selected polar angle equals `angle`.
pub fn jacobi_from_fiber(p: &ShapePoint, angle: f64, which: FiberChart) -> Result<JacobiPair> {
    if !(p.w4 > 0.0) {
        return Err(Error::TripleCollision { sample: None });
    }
    let (r1, r2) = (p.r1(), p.r2());
    let floor = CHART_EPS * p.inertia().sqrt();
    let w = Complex64::new(p.w2, p.w3);
    let unit = Complex64::from_polar(1.0, angle);
    let pair = match which {
        FiberChart::Xi1 => {
            if r1 <= floor {
                return Err(Error::InvalidChart {
                    requested: which.name(),
                    other: which.other().name(),
                });
            }
            let z1 = unit * r1;
            // conj(Z1) Z2 = w
            JacobiPair { z1, z2: w / z1.conj() }
        }
        FiberChart::Xi2 => {
            if r2 <= floor {
                return Err(Error::InvalidChart {
                    requested: which.name(),
                    other: which.other().name(),
                });
            }
            let z2 = unit * r2;
            JacobiPair {
                z1: (w / z2).conj(),
                z2,
            }
        }
    };
    Ok(pair)
}

/// The configuration over `p` whose selected polar angle equals `angle`.
pub fn configuration_from_fiber(
    p: &ShapePoint,
    angle: f64,
    which: FiberChart,
    masses: &MassTriple,
) -> Result<PlanarConfiguration> {
    Ok(jacobi_from_fiber(p, angle, which)?.to_configuration(masses))
}

/// Equilateral configuration with labels 1, 2, 3 counterclockwise, scaled so
/// that `I = inertia`, first vertex on the positive x axis before centering.
pub fn equilateral(masses: &MassTriple, inertia: f64) -> PlanarConfiguration {
    let raw = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|a: f64| Vector2::new(a.cos(), a.sin()));
    let cfg = PlanarConfiguration::centered(raw, masses);
    let s = (inertia / cfg.moment_of_inertia(masses)).sqrt();
    cfg.scaled(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_equilateral() -> PlanarConfiguration {
        let h = 3f64.sqrt() / 2.0;
        PlanarConfiguration::from_xy([[1.0, 0.0], [-0.5, h], [-0.5, -h]], &MassTriple::equal()).unwrap()
    }

    #[test]
    fn masses_reject_nonpositive_and_nonfinite() {
        assert!(matches!(
            MassTriple::new(1.0, 0.0, 1.0),
            Err(Error::InvalidMass { index: 2, .. })
        ));
        assert!(MassTriple::new(-1.0, 1.0, 1.0).is_err());
        assert!(MassTriple::new(1.0, 1.0, f64::NAN).is_err());
        assert!(MassTriple::new(1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn derived_scales_for_reference_triples() {
        let m = derive_masses(1.0, 1.0, 1.0).unwrap();
        // 1/mu1^2 = 1 + 1, 1/mu2^2 = 1 + 1/2
        assert_relative_eq!(m.mu1(), 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.mu2(), (2.0f64 / 3.0).sqrt(), max_relative = 1e-15);
        assert_eq!(m.total(), 3.0);
        let m = derive_masses(2.0, 3.0, 6.0).unwrap();
        assert_relative_eq!(m.mu1(), 2f64.sqrt(), max_relative = 1e-15);
        // 1/mu2^2 = 1/2 + 1/9
        assert_relative_eq!(m.mu2(), (18.0f64 / 11.0).sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn equilateral_jacobi_and_shape() {
        let m = MassTriple::equal();
        let pair = jacobi(&unit_equilateral(), &m);
        let s = 1.5f64.sqrt();
        assert_relative_eq!(pair.z1.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pair.z1.im, -s, epsilon = 1e-15);
        assert_relative_eq!(pair.z2.re, s, epsilon = 1e-15);
        assert_relative_eq!(pair.z2.im, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pair.moment_of_inertia(), 3.0, epsilon = 1e-14);

        let w = shape_map(&pair);
        assert_relative_eq!(w.w1, 0.0, epsilon = 1e-14);
        assert_relative_eq!(w.w2, 0.0, epsilon = 1e-14);
        assert_relative_eq!(w.w3, 1.5, epsilon = 1e-14);
        assert_relative_eq!(w.w4, 1.5, epsilon = 1e-14);
        let n = normalize_shape(&w).unwrap();
        assert_relative_eq!(n.w3, 0.5, epsilon = 1e-15);

        let ch = chart_angles(&pair);
        assert!(ch.defined1 && ch.defined2);
        assert_relative_eq!(ch.xi, PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn collision_and_origin_points() {
        let m = MassTriple::equal();
        let c1 = PlanarConfiguration::centered(
            [Vector2::new(2.0, 1.0), Vector2::new(-1.0, 0.5), Vector2::new(-1.0, 0.5)],
            &m,
        );
        let pair = jacobi(&c1, &m);
        assert_eq!(pair.z1, Complex64::new(0.0, 0.0));
        let p = normalize_shape(&shape_map(&pair)).unwrap();
        assert_relative_eq!(p.xyz(), Vector3::new(-0.5, 0.0, 0.0), epsilon = 1e-15);
        assert!(!chart_angles(&pair).defined1);

        let o1 =
            PlanarConfiguration::centered([Vector2::zeros(), Vector2::new(1.0, 2.0), Vector2::new(-1.0, -2.0)], &m);
        let pair = jacobi(&o1, &m);
        assert_relative_eq!(pair.z2.norm(), 0.0, epsilon = 1e-15);
        let p = normalize_shape(&shape_map(&pair)).unwrap();
        assert_relative_eq!(p.xyz(), Vector3::new(0.5, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn collinear_configuration_lies_on_equator() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let cfg = PlanarConfiguration::centered(
            [Vector2::new(0.3, 0.6), Vector2::new(-1.0, -2.0), Vector2::new(2.0, 4.0)],
            &m,
        );
        assert_relative_eq!(project(&cfg, &m).w3, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn normalize_scales_and_rejects_origin() {
        let p = normalize_shape(&ShapePoint::new(0.0, 0.0, 1.5, 1.5)).unwrap();
        assert_eq!(p, ShapePoint::new(0.0, 0.0, 0.5, 0.5));
        let p = normalize_shape(&ShapePoint::new(-0.75, 0.0, 0.0, 0.75)).unwrap();
        assert_eq!(p, ShapePoint::new(-0.5, 0.0, 0.0, 0.5));
        assert_eq!(
            normalize_shape(&ShapePoint::new(0.0, 0.0, 0.0, 0.0)),
            Err(Error::TripleCollision { sample: None })
        );
    }

    #[test]
    fn equal_jacobi_vectors_sit_on_zero_meridian() {
        let z = Complex64::new(0.4, -0.7);
        let pair = JacobiPair { z1: z, z2: z };
        let ch = chart_angles(&pair);
        assert_eq!(ch.xi, 0.0);
        let w = shape_map(&pair);
        assert!(w.w2 > 0.0);
        assert_relative_eq!(w.w3, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn fiber_inversion_examples() {
        let m = MassTriple::equal();
        let c1 = ShapePoint::new(-0.5, 0.0, 0.0, 0.5);
        let cfg = configuration_from_fiber(&c1, 0.0, FiberChart::Xi2, &m).unwrap();
        assert!(cfg.q[0].x > 0.0);
        assert_relative_eq!(cfg.q[0].y, 0.0, epsilon = 1e-15);
        assert_relative_eq!(cfg.q[1], cfg.q[2], epsilon = 1e-15);
        assert!(matches!(
            configuration_from_fiber(&c1, 0.0, FiberChart::Xi1, &m),
            Err(Error::InvalidChart {
                requested: "xi1",
                other: "xi2"
            })
        ));

        // P1 scaled to I = 3 reproduces the unit equilateral triangle
        let p1 = ShapePoint::new(0.0, 0.0, 1.5, 1.5);
        let cfg = configuration_from_fiber(&p1, 0.0, FiberChart::Xi2, &m).unwrap();
        let expected = unit_equilateral();
        for i in 0..3 {
            assert_relative_eq!(cfg.q[i], expected.q[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn triple_collision_has_no_fiber() {
        let m = MassTriple::equal();
        let origin = ShapePoint::new(0.0, 0.0, 0.0, 0.0);
        assert!(configuration_from_fiber(&origin, 0.0, FiberChart::Xi2, &m).is_err());
    }

    #[test]
    fn equilateral_constructor_has_requested_inertia_and_orientation() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let cfg = equilateral(&m, 1.0);
        assert_relative_eq!(cfg.moment_of_inertia(&m), 1.0, epsilon = 1e-14);
        assert!(cfg.signed_area() > 0.0);
        assert!(m.centroid_offset(&cfg.q) < 1e-14);
        assert!(project(&cfg, &m).w3 > 0.0);
    }
}
