//! Planar rotation reconstruction: the dynamic term `int J/I`, the signed
//! area swept on the shape sphere, the zero-angular-momentum lift of a shape
//! curve, and the direct angle-unwinding oracle.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector2, Vector3, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::shape::{
    inertia_and_momentum, jacobi, jacobi_from_fiber, normalize_shape, project, shape_map, FiberChart, JacobiPair,
    MassTriple, PlanarConfiguration, ShapePoint,
};
use crate::sphere::{swept_area_polyline, unwrap_next, wrap_angle};
use crate::trajectory::{lagrange_weights, stencil_start, Dim, Trajectory, Triple};

/// Distance (on the radius-1/2 sphere) below which a sample counts as sitting on a pole.
pub const POLE_TOL: f64 = 1e-9;

/// Endpoint vectors shorter than this times `sqrt(I)` are treated as at the origin.
pub const ENDPOINT_EPS: f64 = 1e-9;

/// Active fiber chart is abandoned when its radius drops below this times `sqrt(I)`.
pub const CHART_SWITCH: f64 = 0.1;
/// A chart may be re-entered only above `CHART_SWITCH + CHART_REENTRY_BAND`.
pub const CHART_REENTRY_BAND: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pole {
    C1,
    O1,
}

impl Pole {
    /// Position on the normalized sphere.
    pub fn point(self) -> Vector3<f64> {
        match self {
            Pole::C1 => Vector3::new(-0.5, 0.0, 0.0),
            Pole::O1 => Vector3::new(0.5, 0.0, 0.0),
        }
    }
}

/// Which planar vector's rotation is reconstructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// Position of body 1.
    Q1,
    /// The relative vector `q3 - q2`.
    Z1,
}

/// A time-stamped curve on the normalized shape sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeCurve {
    pub times: Vec<f64>,
    pub points: Vec<ShapePoint>,
    /// `w4` of the unnormalized points, when known.
    pub sizes: Option<Vec<f64>>,
    /// Longitude about the `C1`–`O1` axis, continued across samples.
    pub unwound_xi: Vec<f64>,
    pub pole_crossings: Vec<(usize, Pole)>,
}

impl ShapeCurve {
    /// Builds a curve from shape points of any size. `keep_sizes` records
    /// the original `w4` values.
    pub fn new(times: Vec<f64>, points: &[ShapePoint], keep_sizes: bool) -> Result<Self> {
        if times.len() != points.len() || times.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "{} times for {} shape points",
                times.len(),
                points.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "shape curve times must increase strictly".into(),
            ));
        }
        let normalized = points
            .iter()
            .enumerate()
            .map(|(k, p)| normalize_shape(p).map_err(|_| Error::TripleCollision { sample: Some(k) }))
            .collect::<Result<Vec<_>>>()?;
        let sizes = keep_sizes.then(|| points.iter().map(|p| p.w4).collect());

        let mut unwound = Vec::with_capacity(points.len());
        let mut crossings = Vec::new();
        let mut prev: Option<f64> = None;
        for (k, p) in normalized.iter().enumerate() {
            for pole in [Pole::C1, Pole::O1] {
                if (p.xyz() - pole.point()).norm() < POLE_TOL {
                    crossings.push((k, pole));
                }
            }
            let rho = p.w2.hypot(p.w3);
            let value = match prev {
                None => p.xi(),
                Some(last) if rho <= POLE_TOL => last,
                Some(last) => {
                    let next = unwrap_next(last, p.xi());
                    let step = (next - last).abs();
                    if step >= FRAC_PI_2 {
                        // A long chord passing close to the C1-O1 axis legitimately
                        // swings the longitude; anything else is undersampling.
                        let a = &normalized[k - 1];
                        let (u, v) = (Vector2::new(a.w2, a.w3), Vector2::new(p.w2, p.w3));
                        let chord = (v - u).norm();
                        let s = (-u.dot(&(v - u)) / (chord * chord)).clamp(0.0, 1.0);
                        let near = (u + (v - u) * s).norm();
                        if near < 0.25 * chord {
                            let pole = if p.w1 + a.w1 < 0.0 { Pole::C1 } else { Pole::O1 };
                            crossings.push((k, pole));
                        } else {
                            return Err(Error::CoarseSampling { index: k, step });
                        }
                    }
                    next
                }
            };
            unwound.push(value);
            prev = Some(value);
        }
        crossings.dedup();
        Ok(ShapeCurve {
            times,
            points: normalized,
            sizes,
            unwound_xi: unwound,
            pole_crossings: crossings,
        })
    }

    /// Projected curve of a planar trajectory.
    pub fn from_trajectory(traj: &Trajectory) -> Result<Self> {
        let points: Vec<ShapePoint> = (0..traj.len())
            .map(|k| project(&traj.planar(k), &traj.masses))
            .collect();
        Self::new(traj.times.clone(), &points, true)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn xyz(&self) -> Vec<Vector3<f64>> {
        self.points.iter().map(ShapePoint::xyz).collect()
    }
}

/// Result of an area sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sweep {
    pub area: f64,
    /// The curve touched the pole or its antipode; the area is then only
    /// meaningful up to the area of the whole sphere.
    pub pole_crossed: bool,
}

/// Signed area between the curve and `pole`, closed by the two meridian
/// arcs from the endpoints; `rho^2 int (1 - cos phi) d psi` with `psi`
/// left-handed about the pole. For pole `C1` this is `int r1^2 dxi / 2`.
pub fn swept_area(curve: &ShapeCurve, pole: &Vector3<f64>) -> Sweep {
    let pts = curve.xyz();
    let radius = 0.5;
    let p_hat = pole.normalize();
    let mut crossed = pts
        .iter()
        .any(|x| (x - p_hat * radius).norm() < POLE_TOL || (x + p_hat * radius).norm() < POLE_TOL);
    let on_axis = |q: Vector3<f64>| {
        (q.normalize() - Vector3::x()).norm() < 1e-12 || (q.normalize() + Vector3::x()).norm() < 1e-12
    };
    if on_axis(p_hat) && !curve.pole_crossings.is_empty() {
        crossed = true;
    }
    Sweep {
        area: swept_area_polyline(&pts, &p_hat),
        pole_crossed: crossed,
    }
}

/// Reconstruction outcome. `total = dynamic_term + geometric_term`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub dynamic_term: f64,
    pub geometric_term: f64,
    pub total: f64,
    pub total_mod_2pi: f64,
    pub oracle: Option<f64>,
    pub pole_crossed: bool,
    pub samples: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bad_set_measure: Option<f64>,
}

impl ReconstructionReport {
    pub fn new(dynamic_term: f64, geometric_term: f64, samples: usize) -> Self {
        let total = dynamic_term + geometric_term;
        ReconstructionReport {
            dynamic_term,
            geometric_term,
            total,
            total_mod_2pi: wrap_angle(total),
            oracle: None,
            pole_crossed: false,
            samples,
            certified: true,
            bad_set_measure: None,
        }
    }

    /// Formula-oracle discrepancy; taken modulo `2 pi` when a pole was crossed.
    pub fn oracle_error(&self) -> Option<f64> {
        self.oracle.map(|o| {
            if self.pole_crossed {
                wrap_angle(self.total - o).abs()
            } else {
                (self.total - o).abs()
            }
        })
    }

    /// Adds a later piece of a piecewise-smooth motion.
    pub fn append(&mut self, other: &ReconstructionReport) {
        self.dynamic_term += other.dynamic_term;
        self.geometric_term += other.geometric_term;
        self.total = self.dynamic_term + self.geometric_term;
        self.total_mod_2pi = wrap_angle(self.total);
        self.oracle = match (self.oracle, other.oracle) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        self.pole_crossed |= other.pole_crossed;
        self.samples += other.samples;
        self.certified &= other.certified;
        self.bad_set_measure = match (self.bad_set_measure, other.bad_set_measure) {
            (Some(a), Some(b)) => Some(a + b),
            (a, b) => a.or(b),
        };
    }
}

fn require_planar(traj: &Trajectory) -> Result<()> {
    if traj.dim != Dim::Planar {
        return Err(Error::InvalidParameter(
            "planar reconstruction needs a 2-d trajectory".into(),
        ));
    }
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: traj.len(),
        });
    }
    Ok(())
}

fn planar_of(t: &Triple) -> PlanarConfiguration {
    PlanarConfiguration {
        q: t.map(|v| Vector2::new(v.x, v.y)),
    }
}

/// Samples of `J / I` along a planar trajectory.
pub fn rotation_rate(traj: &Trajectory) -> Result<Vec<f64>> {
    let vel = traj.velocities_or_differences()?;
    (0..traj.len())
        .map(|k| {
            let pair = jacobi(&traj.planar(k), &traj.masses);
            let rate = jacobi(&planar_of(&vel[k]), &traj.masses);
            let (i, j) = inertia_and_momentum(&pair, &rate);
            if !(i > 0.0) {
                return Err(Error::TripleCollision { sample: Some(k) });
            }
            Ok(j / i)
        })
        .collect()
}

/// `int_0^T J/I dt`.
pub fn dynamic_term(traj: &Trajectory) -> Result<f64> {
    require_planar(traj)?;
    let rate = rotation_rate(traj)?;
    Ok(integrate(&traj.times, &rate))
}

fn target_vector(traj: &Trajectory, k: usize, target: Target) -> Vector2<f64> {
    let q = traj.planar(k).q;
    match target {
        Target::Q1 => q[0],
        Target::Z1 => q[2] - q[1],
    }
}

/// Continuously unwound polar angle change of the target vector.
pub fn oracle_rotation(traj: &Trajectory, target: Target) -> Result<f64> {
    let scale = |k: usize| traj.planar(k).moment_of_inertia(&traj.masses).sqrt();
    let mut first: Option<f64> = None;
    let mut current = 0.0;
    for k in 0..traj.len() {
        let v = target_vector(traj, k, target);
        if v.norm() <= 1e-12 * scale(k) {
            continue;
        }
        let raw = v.y.atan2(v.x);
        match first {
            None => {
                first = Some(raw);
                current = raw;
            }
            Some(_) => {
                let next = unwrap_next(current, raw);
                let step = (next - current).abs();
                if step >= FRAC_PI_2 {
                    return Err(Error::CoarseSampling { index: k, step });
                }
                current = next;
            }
        }
    }
    Ok(first.map_or(0.0, |f| current - f))
}

fn check_endpoints(traj: &Trajectory, target: Target) -> Result<()> {
    let what = match target {
        Target::Q1 => "q1",
        Target::Z1 => "Z1",
    };
    for (which, k) in [("initial", 0), ("final", traj.len() - 1)] {
        let cfg = traj.planar(k);
        let i = cfg.moment_of_inertia(&traj.masses);
        let pair = jacobi(&cfg, &traj.masses);
        let norm = match target {
            Target::Q1 => pair.z2.norm(),
            Target::Z1 => pair.z1.norm(),
        };
        if norm <= ENDPOINT_EPS * i.sqrt() {
            return Err(Error::EndpointAtOrigin { what, which, norm });
        }
    }
    Ok(())
}

/// Rotation of the target vector from `int J/I` plus twice the area swept
/// relative to `C1` (target `q1`) or `O1` (target `Z1`).
pub fn reconstruct(traj: &Trajectory, target: Target, with_oracle: bool) -> Result<ReconstructionReport> {
    require_planar(traj)?;
    check_endpoints(traj, target)?;
    let dynamic = dynamic_term(traj)?;
    let curve = ShapeCurve::from_trajectory(traj)?;
    let pole = match target {
        Target::Q1 => Pole::C1,
        Target::Z1 => Pole::O1,
    };
    let sweep = swept_area(&curve, &pole.point());
    let mut report = ReconstructionReport::new(dynamic, 2.0 * sweep.area, traj.len());
    report.pole_crossed = sweep.pole_crossed;
    if with_oracle {
        report.oracle = Some(oracle_rotation(traj, target)?);
    }
    Ok(report)
}

pub fn reconstruct_q1(traj: &Trajectory, with_oracle: bool) -> Result<ReconstructionReport> {
    reconstruct(traj, Target::Q1, with_oracle)
}

#[allow(non_snake_case)]
pub fn reconstruct_Z1(traj: &Trajectory, with_oracle: bool) -> Result<ReconstructionReport> {
    reconstruct(traj, Target::Z1, with_oracle)
}

/// Reconstruction of a piecewise-smooth motion given as consecutive pieces
/// sharing their junction samples.
pub fn reconstruct_pieces(pieces: &[Trajectory], target: Target, with_oracle: bool) -> Result<ReconstructionReport> {
    let (first, rest) = pieces
        .split_first()
        .ok_or_else(|| Error::InvalidParameter("no pieces".into()))?;
    let mut report = reconstruct(first, target, with_oracle)?;
    let mut prev = first;
    for piece in rest {
        let end = prev.positions[prev.len() - 1];
        let start = piece.positions[0];
        let gap = (0..3).map(|b| (end[b] - start[b]).norm()).fold(0.0, f64::max);
        let scale = prev.spatial(prev.len() - 1).moment_of_inertia(&prev.masses).sqrt();
        if gap > 1e-9 * scale.max(1.0) || prev.times[prev.len() - 1] != piece.times[0] {
            return Err(Error::InvalidParameter("pieces do not join continuously".into()));
        }
        report.append(&reconstruct(piece, target, with_oracle)?);
        prev = piece;
    }
    Ok(report)
}

/// A zero-angular-momentum lift together with its unwound fiber angles.
#[derive(Clone, Debug)]
pub struct Lift {
    pub trajectory: Trajectory,
    /// Unwound `arg Z1` per sample (NaN while undefined at `C1`).
    pub xi1: Vec<f64>,
    /// Unwound `arg Z2` per sample (NaN while undefined at `O1`).
    pub xi2: Vec<f64>,
    /// Chart in use on each step.
    pub charts: Vec<FiberChart>,
}

struct LocalCurve<'a> {
    times: &'a [f64],
    /// `(W1, W2, W3, w4)` with `W = I w_normalized`.
    pts: Vec<Vector4<f64>>,
}

impl LocalCurve<'_> {
    /// Cubic (4-point Lagrange) value and derivative of the curve at `t`.
    fn eval(&self, t: f64) -> (Vector4<f64>, Vector4<f64>) {
        let n = self.times.len();
        let width = n.min(4);
        let s = stencil_start(self.times, t);
        let nodes = &self.times[s..s + width];
        let w = lagrange_weights(nodes, t);
        let d = lagrange_derivative_weights(nodes, t);
        let mut value = Vector4::zeros();
        let mut deriv = Vector4::zeros();
        for i in 0..width {
            value += self.pts[s + i] * w[i];
            deriv += self.pts[s + i] * d[i];
        }
        (value, deriv)
    }

    /// Rate of the active fiber angle for a zero-angular-momentum motion.
    fn rate(&self, t: f64, chart: FiberChart) -> f64 {
        let (w, dw) = self.eval(t);
        fiber_rate(&w, &dw, chart)
    }
}

fn fiber_rate(w: &Vector4<f64>, dw: &Vector4<f64>, chart: FiberChart) -> f64 {
    let rho = w.xyz().norm();
    let cross = w.y * dw.z - w.z * dw.y;
    match chart {
        // d xi2 = r1^2 d xi / I
        FiberChart::Xi2 => cross / ((rho - w.x) * 2.0 * rho),
        // d xi1 = -r2^2 d xi / I
        FiberChart::Xi1 => -cross / ((rho + w.x) * 2.0 * rho),
    }
}

/// Derivatives of the Lagrange basis polynomials at `t`.
fn lagrange_derivative_weights(nodes: &[f64], t: f64) -> Vec<f64> {
    let width = nodes.len();
    (0..width)
        .map(|i| {
            let mut sum = 0.0;
            for m in (0..width).filter(|&m| m != i) {
                let mut prod = 1.0 / (nodes[i] - nodes[m]);
                for j in (0..width).filter(|&j| j != i && j != m) {
                    prod *= (t - nodes[j]) / (nodes[i] - nodes[j]);
                }
                sum += prod;
            }
            sum
        })
        .collect()
}

/// Jacobi pair over `w` with the chart angle `angle`, and its rate given the
/// curve rate `dw` and the chart angle rate.
fn pair_and_rate(
    w: &Vector4<f64>,
    dw: &Vector4<f64>,
    angle: f64,
    rate: f64,
    chart: FiberChart,
) -> Result<(JacobiPair, JacobiPair)> {
    let p = ShapePoint::new(w.x, w.y, w.z, w.w);
    let pair = jacobi_from_fiber(&p, angle, chart)?;
    let c = Complex64::new(w.y, w.z);
    let dc = Complex64::new(dw.y, dw.z);
    let i = Complex64::i();
    let rate_pair = match chart {
        FiberChart::Xi2 => {
            // r2^2 = w4 - w1
            let r2 = pair.z2.norm();
            let dr2 = (dw.w - dw.x) / (2.0 * r2);
            let dz2 = pair.z2 / r2 * (dr2 + i * r2 * rate);
            // Z1 = conj(c / Z2)
            let dz1 = ((dc * pair.z2 - c * dz2) / (pair.z2 * pair.z2)).conj();
            JacobiPair { z1: dz1, z2: dz2 }
        }
        FiberChart::Xi1 => {
            let r1 = pair.z1.norm();
            let dr1 = (dw.w + dw.x) / (2.0 * r1);
            let dz1 = pair.z1 / r1 * (dr1 + i * r1 * rate);
            // Z2 = c / conj(Z1)
            let z1c = pair.z1.conj();
            let dz2 = (dc * z1c - c * dz1.conj()) / (z1c * z1c);
            JacobiPair { z1: dz1, z2: dz2 }
        }
    };
    Ok((pair, rate_pair))
}

/// The unique zero-angular-momentum motion over `curve` starting at `initial`.
/// Velocities are emitted from the lift equations.
pub fn zero_j_lift(curve: &ShapeCurve, initial: &PlanarConfiguration, masses: &MassTriple) -> Result<Lift> {
    let n = curve.len();
    let start = project(initial, masses);
    let start_n = normalize_shape(&start)?;
    let distance = start_n.distance(&curve.points[0]);
    if distance > 1e-8 {
        return Err(Error::ProjectionMismatch { distance });
    }
    let inertia0 = start.inertia();
    let sizes: Vec<f64> = match &curve.sizes {
        Some(s) => {
            let rel = (2.0 * s[0] - inertia0).abs() / inertia0;
            if rel > 1e-8 {
                return Err(Error::ProjectionMismatch { distance: rel });
            }
            s.clone()
        }
        None => vec![0.5 * inertia0; n],
    };
    if let Some(k) = sizes.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::TripleCollision { sample: Some(k) });
    }

    let pts: Vec<Vector4<f64>> = curve
        .points
        .iter()
        .zip(&sizes)
        .map(|(p, &s)| {
            let w = p.xyz() * (2.0 * s);
            Vector4::new(w.x, w.y, w.z, s)
        })
        .collect();
    let local = LocalCurve {
        times: &curve.times,
        pts,
    };
    // radii relative to sqrt(I), read off the normalized sphere
    let radius = |p: &ShapePoint, chart: FiberChart| -> f64 {
        match chart {
            FiberChart::Xi1 => p.r1(),
            FiberChart::Xi2 => p.r2(),
        }
    };

    let pair0 = jacobi(initial, masses);
    let mut chart = if pair0.z2.norm() >= pair0.z1.norm() {
        FiberChart::Xi2
    } else {
        FiberChart::Xi1
    };
    let mut angle = match chart {
        FiberChart::Xi1 => pair0.z1.arg(),
        FiberChart::Xi2 => pair0.z2.arg(),
    };

    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    let mut xi1 = Vec::with_capacity(n);
    let mut xi2 = Vec::with_capacity(n);
    let mut charts = Vec::with_capacity(n.saturating_sub(1));
    let (mut last1, mut last2) = (pair0.z1.arg(), pair0.z2.arg());
    let lift3 = |c: PlanarConfiguration| c.q.map(|v| Vector3::new(v.x, v.y, 0.0));

    for k in 0..n {
        if k > 0 {
            let (t0, t1) = (curve.times[k - 1], curve.times[k]);
            let h = t1 - t0;
            let f0 = local.rate(t0, chart);
            let fm = local.rate(t0 + 0.5 * h, chart);
            let f1 = local.rate(t1, chart);
            angle += h / 6.0 * (f0 + 4.0 * fm + f1);
            charts.push(chart);
        }
        let w = local.pts[k];
        let dw = if n > 1 {
            local.eval(curve.times[k]).1
        } else {
            Vector4::zeros()
        };
        let rate = if n > 1 { fiber_rate(&w, &dw, chart) } else { 0.0 };
        let (pair, rate_pair) = pair_and_rate(&w, &dw, angle, rate, chart)?;
        positions.push(lift3(pair.to_configuration(masses)));
        velocities.push(lift3(rate_pair.to_configuration(masses)));

        let eps = crate::shape::CHART_EPS * (2.0 * w.w).sqrt();
        let a1 = if pair.z1.norm() > eps {
            last1 = unwrap_next(last1, pair.z1.arg());
            last1
        } else {
            f64::NAN
        };
        let a2 = if pair.z2.norm() > eps {
            last2 = unwrap_next(last2, pair.z2.arg());
            last2
        } else {
            f64::NAN
        };
        xi1.push(a1);
        xi2.push(a2);

        // handoff to the other chart when the active radius collapses
        let p = curve.points[k];
        let other = chart.other();
        if radius(&p, chart) < CHART_SWITCH && radius(&p, other) >= CHART_SWITCH + CHART_REENTRY_BAND {
            angle = match other {
                FiberChart::Xi1 => a1,
                FiberChart::Xi2 => a2,
            };
            chart = other;
        }
    }

    let trajectory = Trajectory::new(
        *masses,
        Dim::Planar,
        curve.times.clone(),
        positions,
        Some(velocities),
        None,
    )?;
    Ok(Lift {
        trajectory,
        xi1,
        xi2,
        charts,
    })
}

/// Shape point of a configuration given directly by its Jacobi pair.
pub fn shape_of(cfg: &PlanarConfiguration, masses: &MassTriple) -> ShapePoint {
    shape_map(&jacobi(cfg, masses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn curve_from_xyz(points: &[Vector3<f64>]) -> ShapeCurve {
        let times: Vec<f64> = (0..points.len()).map(|k| k as f64).collect();
        let pts: Vec<ShapePoint> = points.iter().map(|&p| ShapePoint::from_direction(p)).collect();
        ShapeCurve::new(times, &pts, false).unwrap()
    }

    #[test]
    fn constant_curve_sweeps_nothing() {
        let c = curve_from_xyz(&[Vector3::new(0.1, 0.2, 0.3); 5]);
        assert_eq!(swept_area(&c, &Pole::C1.point()).area, 0.0);
    }

    #[test]
    fn equator_turn_about_c1_is_a_hemisphere() {
        // great circle w1 = 0, one counterclockwise turn in xi
        let pts: Vec<_> = (0..=64)
            .map(|k| {
                let xi = TAU * k as f64 / 64.0;
                Vector3::new(0.0, xi.cos(), xi.sin())
            })
            .collect();
        let s = swept_area(&curve_from_xyz(&pts), &Pole::C1.point());
        assert_relative_eq!(s.area, PI / 2.0, epsilon = 1e-13);
        assert!(!s.pole_crossed);
    }

    #[test]
    fn figure_one_triangle_area() {
        // P1 -> C3 along a great circle; equal masses put C3 at longitude 300 deg
        let c3 = Vector3::new((5.0 * PI / 3.0).cos(), (5.0 * PI / 3.0).sin(), 0.0);
        let p1 = Vector3::z();
        let pts: Vec<_> = (0..=20)
            .map(|k| {
                let s = k as f64 / 20.0 * FRAC_PI_2;
                p1 * s.cos() + c3 * s.sin()
            })
            .collect();
        let s = swept_area(&curve_from_xyz(&pts), &Pole::C1.point());
        assert_relative_eq!(s.area, PI / 6.0, epsilon = 1e-13);
    }

    #[test]
    fn sweep_about_c1_equals_half_r1_squared_dxi() {
        // small circle w1 = const: r1^2 = 1/2 + w1 on the I = 1 sphere
        let w1: f64 = 0.2;
        let rho = (0.25 - w1 * w1).sqrt();
        let pts: Vec<_> = (0..=2000)
            .map(|k| {
                let xi = 1.3 * k as f64 / 2000.0;
                Vector3::new(w1, rho * xi.cos(), rho * xi.sin())
            })
            .collect();
        let s = swept_area(&curve_from_xyz(&pts), &Pole::C1.point());
        assert_relative_eq!(s.area, 0.5 * (0.5 + w1) * 1.3, epsilon = 1e-7);
        let s = swept_area(&curve_from_xyz(&pts), &Pole::O1.point());
        assert_relative_eq!(s.area, -0.5 * (0.5 - w1) * 1.3, epsilon = 1e-7);
    }

    #[test]
    fn coarse_curve_is_rejected_and_pole_passage_is_recorded() {
        let far = [Vector3::new(0.0, 1.0, 0.0), Vector3::new(0.0, -0.2, 1.0)];
        assert!(matches!(
            ShapeCurve::new(vec![0.0, 1.0], &far.map(ShapePoint::from_direction), false),
            Err(Error::CoarseSampling { index: 1, .. })
        ));
        let through = [Vector3::new(-1.0, 0.01, 0.0), Vector3::new(-1.0, -0.01, 0.001)];
        let c = ShapeCurve::new(vec![0.0, 1.0], &through.map(ShapePoint::from_direction), false).unwrap();
        assert_eq!(c.pole_crossings, vec![(1, Pole::C1)]);
    }

    #[test]
    fn report_total_is_sum_of_terms() {
        let r = ReconstructionReport::new(0.3, 1.1, 10);
        assert_eq!(r.total, 0.3 + 1.1);
        let mut a = ReconstructionReport::new(1.0, 3.0, 3);
        a.oracle = Some(4.0);
        let mut b = ReconstructionReport::new(0.5, 0.0, 2);
        b.oracle = Some(0.5);
        a.append(&b);
        assert_eq!(a.total, 4.5);
        assert_eq!(a.oracle, Some(4.5));
        assert_relative_eq!(a.total_mod_2pi, 4.5 - TAU);
    }

    #[test]
    fn lift_of_constant_curve_is_static() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let cfg = crate::shape::equilateral(&m, 2.0);
        let p = project(&cfg, &m);
        let curve = ShapeCurve::new(vec![0.0, 0.5, 1.0, 1.5], &[p; 4], true).unwrap();
        let lift = zero_j_lift(&curve, &cfg, &m).unwrap();
        for q in &lift.trajectory.positions {
            for (p, c) in q.iter().zip(&cfg.q) {
                assert_relative_eq!(p.xy(), *c, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lift_rejects_mismatched_start() {
        let m = MassTriple::equal();
        let cfg = crate::shape::equilateral(&m, 1.0);
        let other = ShapePoint::new(0.3, 0.0, 0.4, 0.5);
        let curve = ShapeCurve::new(vec![0.0, 1.0], &[other, other], false).unwrap();
        assert!(matches!(
            zero_j_lift(&curve, &cfg, &m),
            Err(Error::ProjectionMismatch { .. })
        ));
    }
}
