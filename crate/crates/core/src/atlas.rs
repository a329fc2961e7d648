//! Marked points of the shape sphere for a given mass triple.
//!
//! Binary collisions `Ci`, origin points `Oi`, Euler points `Ei`, Lagrange
//! points `L1`/`L2` and the poles `P1`/`P2`, all on the sphere of radius 1/2.
//! The equator points are additionally kept as angles measured from `O1`
//! counterclockwise in the `(w1, w2)` plane.

use std::f64::consts::{PI, TAU};

use nalgebra::{Vector2, Vector3};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::shape::{
    chart_angles, equilateral, jacobi, normalize_shape, project, Body, MassTriple, PlanarConfiguration, ShapePoint,
};

const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct MarkedAtlas {
    pub c: [ShapePoint; 3],
    pub o: [ShapePoint; 3],
    pub e: [ShapePoint; 3],
    pub l: [ShapePoint; 2],
    pub p: [ShapePoint; 2],
    /// Half-angles between consecutive binary collision points.
    pub alpha: [f64; 3],
    /// Angle from `Z1` to `Z2` at the Lagrange point `L1`, in `(-pi, pi]`.
    pub beta: f64,
}

/// Equator longitude measured from `O1` counterclockwise, in `[0, 2 pi)`.
pub fn equator_angle(p: &ShapePoint) -> f64 {
    p.w2.atan2(p.w1).rem_euclid(TAU)
}

/// `cos(alpha_i) = sqrt(m_j m_k / ((m_j + m_i)(m_k + m_i)))`.
pub fn alpha(masses: &MassTriple, i: Body) -> f64 {
    let (j, k) = i.cyclic_others();
    let (mi, mj, mk) = (masses.m(i), masses.m(j), masses.m(k));
    (mj * mk / ((mj + mi) * (mk + mi))).sqrt().acos()
}

fn collision_point(masses: &MassTriple, i: Body) -> ShapePoint {
    // q_j = q_k at the origin side, q_i at unit distance
    let (j, k) = i.cyclic_others();
    let mut q = [Vector2::zeros(); 3];
    q[i.index()] = Vector2::new(1.0, 0.0);
    q[j.index()] = Vector2::zeros();
    q[k.index()] = Vector2::zeros();
    let cfg = PlanarConfiguration::centered(q, masses);
    normalize_shape(&project(&cfg, masses)).expect("binary collision is not a triple collision")
}

fn origin_point(masses: &MassTriple, i: Body) -> ShapePoint {
    // q_i at the centroid, q_j and q_k balanced on either side
    let (j, k) = i.cyclic_others();
    let (mj, mk) = (masses.m(j), masses.m(k));
    let mut q = [Vector2::zeros(); 3];
    q[j.index()] = Vector2::new(mk, 0.0);
    q[k.index()] = Vector2::new(-mj, 0.0);
    let cfg = PlanarConfiguration { q };
    normalize_shape(&project(&cfg, masses)).expect("origin configuration is not a triple collision")
}

/// Euler's quintic for bodies `a, b, c` on a line with `b` in the middle and
/// `x = |bc| / |ab|`.
fn euler_quintic(ma: f64, mb: f64, mc: f64, x: f64) -> (f64, f64) {
    let coeffs = [
        ma + mb,
        3.0 * ma + 2.0 * mb,
        3.0 * ma + mb,
        -(mb + 3.0 * mc),
        -(2.0 * mb + 3.0 * mc),
        -(mb + mc),
    ];
    let mut f = 0.0;
    let mut df = 0.0;
    for &c in &coeffs {
        df = df * x + f;
        f = f * x + c;
    }
    (f, df)
}

/// Separation ratio `|bc| / |ab|` of the collinear central configuration,
/// the unique positive root of Euler's quintic.
pub fn euler_ratio(ma: f64, mb: f64, mc: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while euler_quintic(ma, mb, mc, hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence { iterations: 0 });
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ROOT_ITERATIONS {
        let (f, df) = euler_quintic(ma, mb, mc, x);
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        if (f / df).abs() <= 1e-16 * x {
            return Ok(newton);
        }
        x = if df > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ROOT_ITERATIONS,
    })
}

/// Collinear central configuration with body `i` between `j` and `k`,
/// laid out along the x axis and centered.
pub fn euler_configuration(masses: &MassTriple, i: Body) -> Result<PlanarConfiguration> {
    let (j, k) = i.cyclic_others();
    let x = euler_ratio(masses.m(j), masses.m(i), masses.m(k))?;
    let mut q = [Vector2::zeros(); 3];
    q[j.index()] = Vector2::new(0.0, 0.0);
    q[i.index()] = Vector2::new(1.0, 0.0);
    q[k.index()] = Vector2::new(1.0 + x, 0.0);
    Ok(PlanarConfiguration::centered(q, masses))
}

/// Normalized shape point of the Euler configuration with body `i` in the middle.
pub fn euler_collinear_point(masses: &MassTriple, i: Body) -> Result<ShapePoint> {
    let cfg = euler_configuration(masses, i)?;
    let mut p = normalize_shape(&project(&cfg, masses))?;
    p.w3 = 0.0;
    Ok(p)
}

pub fn atlas(masses: &MassTriple) -> Result<MarkedAtlas> {
    let c = Body::ALL.map(|b| collision_point(masses, b));
    let o = Body::ALL.map(|b| origin_point(masses, b));
    let e = [
        euler_collinear_point(masses, Body::One)?,
        euler_collinear_point(masses, Body::Two)?,
        euler_collinear_point(masses, Body::Three)?,
    ];
    let lagrange = equilateral(masses, 1.0);
    let l1 = normalize_shape(&project(&lagrange, masses))?;
    let beta = chart_angles(&jacobi(&lagrange, masses)).xi;
    Ok(MarkedAtlas {
        c,
        o,
        e,
        l: [l1, l1.reflected()],
        p: [
            ShapePoint::new(0.0, 0.0, 0.5, 0.5),
            ShapePoint::new(0.0, 0.0, -0.5, 0.5),
        ],
        alpha: Body::ALL.map(|b| alpha(masses, b)),
        beta,
    })
}

impl MarkedAtlas {
    /// Equator angles of `C1, O2, C3, O1, C2, O3` (the counterclockwise order).
    pub fn equator_sequence(&self) -> [(&'static str, f64); 6] {
        [
            ("C1", equator_angle(&self.c[0])),
            ("O2", equator_angle(&self.o[1])),
            ("C3", equator_angle(&self.c[2])),
            ("O1", equator_angle(&self.o[0])),
            ("C2", equator_angle(&self.c[1])),
            ("O3", equator_angle(&self.o[2])),
        ]
    }

    /// True when the six equator points appear counterclockwise in the
    /// expected order (total winding exactly one turn).
    pub fn equator_order_holds(&self) -> bool {
        let seq = self.equator_sequence();
        let mut total = 0.0;
        for k in 0..6 {
            let step = (seq[(k + 1) % 6].1 - seq[k].1).rem_euclid(TAU);
            if step <= 0.0 || step >= PI {
                return false;
            }
            total += step;
        }
        (total - TAU).abs() < 1e-9
    }

    pub fn named_points(&self) -> Vec<(&'static str, ShapePoint)> {
        vec![
            ("C1", self.c[0]),
            ("C2", self.c[1]),
            ("C3", self.c[2]),
            ("O1", self.o[0]),
            ("O2", self.o[1]),
            ("O3", self.o[2]),
            ("E1", self.e[0]),
            ("E2", self.e[1]),
            ("E3", self.e[2]),
            ("L1", self.l[0]),
            ("L2", self.l[1]),
            ("P1", self.p[0]),
            ("P2", self.p[1]),
        ]
    }
}

/// True when `x` lies strictly inside the shorter counterclockwise arc from
/// `from` to `to` (both angles in radians).
pub fn strictly_between(from: f64, x: f64, to: f64) -> bool {
    let span = (to - from).rem_euclid(TAU);
    let off = (x - from).rem_euclid(TAU);
    let (span, off) = if span > PI {
        (TAU - span, (from - x).rem_euclid(TAU))
    } else {
        (span, off)
    };
    off > 0.0 && off < span
}

impl Serialize for MarkedAtlas {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let points = self.named_points();
        let mut map = serializer.serialize_map(Some(points.len() + 2))?;
        for (name, p) in points {
            map.serialize_entry(name, &[p.w1, p.w2, p.w3])?;
        }
        map.serialize_entry("alpha", &self.alpha)?;
        map.serialize_entry("beta", &self.beta)?;
        map.end()
    }
}

/// Position on the equator as a unit-length direction in `(w1, w2, w3)`.
pub fn equator_direction(angle: f64) -> Vector3<f64> {
    Vector3::new(angle.cos(), angle.sin(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Accelerations of a collinear configuration under unit gravity.
    fn accelerations(x: [f64; 3], m: [f64; 3]) -> [f64; 3] {
        let mut a = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let d = x[j] - x[i];
                    a[i] += m[j] * d.signum() / (d * d);
                }
            }
        }
        a
    }

    #[test]
    fn euler_ratio_gives_central_configuration() {
        for (ma, mb, mc) in [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (5.0, 0.1, 2.0), (0.3, 7.0, 0.01)] {
            let x = euler_ratio(ma, mb, mc).unwrap();
            let m = [ma, mb, mc];
            let pos = [0.0, 1.0, 1.0 + x];
            let c = (ma * pos[0] + mb * pos[1] + mc * pos[2]) / (ma + mb + mc);
            let a = accelerations(pos, m);
            // central: a_i = -lambda (x_i - c) with one lambda for all bodies
            let lambda = -a[0] / (pos[0] - c);
            for i in 0..3 {
                assert_relative_eq!(a[i], -lambda * (pos[i] - c), max_relative = 1e-10, epsilon = 1e-12);
            }
        }
        assert_relative_eq!(euler_ratio(1.0, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn equal_masses_atlas() {
        let a = atlas(&MassTriple::equal()).unwrap();
        for k in 0..3 {
            assert_relative_eq!(a.alpha[k], PI / 3.0, epsilon = 1e-14);
            assert_relative_eq!(a.e[k].xyz(), a.o[k].xyz(), epsilon = 1e-12);
        }
        assert_relative_eq!(a.l[0].xyz(), Vector3::new(0.0, 0.0, 0.5), epsilon = 1e-14);
        assert_relative_eq!(a.l[1].xyz(), Vector3::new(0.0, 0.0, -0.5), epsilon = 1e-14);
        assert_relative_eq!(a.o[0].xyz(), Vector3::new(0.5, 0.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(a.c[0].xyz(), Vector3::new(-0.5, 0.0, 0.0), epsilon = 1e-15);
        assert_relative_eq!(a.beta, PI / 2.0, epsilon = 1e-14);
        assert!(a.equator_order_holds());
    }

    #[test]
    fn collision_arcs_match_alpha_formula() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let a = atlas(&m).unwrap();
        let ang = |p: &ShapePoint| equator_angle(p);
        assert_relative_eq!(
            (ang(&a.c[2]) - ang(&a.c[0])).rem_euclid(TAU),
            2.0 * a.alpha[1],
            epsilon = 1e-12
        );
        assert_relative_eq!(
            (ang(&a.c[1]) - ang(&a.c[2])).rem_euclid(TAU),
            2.0 * a.alpha[0],
            epsilon = 1e-12
        );
        assert_relative_eq!(
            (ang(&a.c[0]) - ang(&a.c[1])).rem_euclid(TAU),
            2.0 * a.alpha[2],
            epsilon = 1e-12
        );
        for k in 0..3 {
            assert_relative_eq!(a.c[k].xyz(), -a.o[k].xyz(), epsilon = 1e-14);
        }
    }

    #[test]
    fn ordered_masses_order_alphas_and_place_euler_points() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let a = atlas(&m).unwrap();
        assert!(a.alpha[0] < a.alpha[1] && a.alpha[1] < a.alpha[2]);
        assert!(a.equator_order_holds());
        for i in Body::ALL {
            let (j, k) = i.cyclic_others();
            let (heavy, light) = if m.m(j) > m.m(k) { (j, k) } else { (k, j) };
            let e = equator_angle(&a.e[i.index()]);
            let o = equator_angle(&a.o[i.index()]);
            assert!(strictly_between(equator_angle(&a.c[heavy.index()]), e, o));
            assert!(!strictly_between(equator_angle(&a.c[light.index()]), e, o));
        }
    }

    #[test]
    fn lagrange_points_are_reflections_with_l1_upper() {
        let m = MassTriple::new(2.0, 3.0, 6.0).unwrap();
        let a = atlas(&m).unwrap();
        assert!(a.l[0].w3 > 0.0);
        assert_eq!(a.l[1], a.l[0].reflected());
        assert_relative_eq!(a.l[0].xyz().norm(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(a.l[0].xi(), a.beta, epsilon = 1e-12);
    }

    #[test]
    fn betweenness_helper() {
        assert!(strictly_between(0.1, 0.2, 0.3));
        assert!(strictly_between(0.3, 0.2, 0.1));
        assert!(strictly_between(6.2, 0.01, 0.1));
        assert!(!strictly_between(0.1, 0.4, 0.3));
    }

    #[test]
    fn atlas_json_keys() {
        let json = serde_json::to_value(atlas(&MassTriple::equal()).unwrap()).unwrap();
        for key in [
            "C1", "C2", "C3", "O1", "O2", "O3", "E1", "E2", "E3", "L1", "L2", "P1", "P2",
        ] {
            assert_eq!(json[key].as_array().unwrap().len(), 3, "{key}");
        }
        assert_eq!(json["alpha"].as_array().unwrap().len(), 3);
        assert!(json["beta"].is_number());
    }
}
