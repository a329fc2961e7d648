//! Spatial rotation reconstruction: the inertia map `sigma`, the
//! `{e^n, e, n}` decomposition of angular velocity, the projection of the
//! configuration plane onto the reference plane `X`, normal tracking and
//! bad-set diagnostics.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::planar::{swept_area, Pole, ReconstructionReport, ShapeCurve};
use crate::quadrature::integrate;
use crate::shape::{project, MassTriple, PlanarConfiguration, ShapePoint, SpatialConfiguration};
use crate::sphere::{plane_basis, rotation, swept_solid_angle, unwrap_next};
use crate::trajectory::{Trajectory, Triple};

/// Smallest eigenvalue of `sigma` below this times its trace marks a collinear configuration.
pub const COLLINEAR_TOL: f64 = 1e-8;
/// `sigma` condition numbers above this raise the ill-conditioning flag.
pub const CONDITION_LIMIT: f64 = 1e8;
/// `|e x n|` below this is treated as `n = +-e`.
pub const ALIGNED_TOL: f64 = 1e-10;
/// `|n + e|` below this counts as sitting on the antipodal singularity.
pub const ANTIPODAL_TOL: f64 = 1e-6;
/// Size of the sideways offset used to pick a side of the antipode.
pub const BRANCH_OFFSET: f64 = 1e-5;
/// `1 + e.n` below this switches the integral of `F` to the split route.
const SPLIT_ROUTE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaTensor {
    pub matrix: Matrix3<f64>,
    pub smallest_eigenvalue: f64,
    pub largest_eigenvalue: f64,
    /// Kernel direction when the configuration is collinear.
    pub axis: Option<Vector3<f64>>,
    /// `sum m |q|^2`.
    pub inertia: f64,
}

impl SigmaTensor {
    pub fn is_collinear(&self) -> bool {
        self.axis.is_some()
    }

    pub fn condition_number(&self) -> f64 {
        if self.smallest_eigenvalue > 0.0 {
            self.largest_eigenvalue / self.smallest_eigenvalue
        } else {
            f64::INFINITY
        }
    }
}

/// `sigma(a) = sum m_i q_i x (a x q_i)`, the map from angular velocity to angular momentum.
pub fn sigma_tensor(config: &SpatialConfiguration, masses: &MassTriple) -> SigmaTensor {
    let mut m = Matrix3::zeros();
    let mut inertia = 0.0;
    for i in 0..3 {
        let q = config.q[i];
        let mi = masses.as_array()[i];
        inertia += mi * q.norm_squared();
        m += (Matrix3::identity() * q.norm_squared() - q * q.transpose()) * mi;
    }
    let eig = SymmetricEigen::new(m);
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let smallest = eig.eigenvalues[order[0]];
    let largest = eig.eigenvalues[order[2]];
    let trace = m.trace();
    let axis = (smallest < COLLINEAR_TOL * trace).then(|| eig.eigenvectors.column(order[0]).normalize());
    SigmaTensor {
        matrix: m,
        smallest_eigenvalue: smallest,
        largest_eigenvalue: largest,
        axis,
        inertia,
    }
}

/// Angular velocity recovered from angular momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaSolve {
    pub w: Vector3<f64>,
    /// The collinear convention `w = J / I` was used.
    pub collinear: bool,
    pub ill_conditioned: bool,
}

pub fn sigma_inverse(t: &SigmaTensor, j: &Vector3<f64>, inertia: f64) -> SigmaSolve {
    if t.is_collinear() {
        return SigmaSolve {
            w: j / inertia,
            collinear: true,
            ill_conditioned: false,
        };
    }
    let w = t
        .matrix
        .cholesky()
        .map(|c| c.solve(j))
        .or_else(|| t.matrix.lu().solve(j))
        .unwrap_or_else(|| j / inertia);
    SigmaSolve {
        w,
        collinear: false,
        ill_conditioned: t.condition_number() > CONDITION_LIMIT,
    }
}

/// Coefficients of `w = sigma_e e + sigma_n n + sigma_wedge (e x n)`, with
/// `e x n` unnormalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnDecomposition {
    pub sigma_wedge: f64,
    pub sigma_e: f64,
    pub sigma_n: f64,
}

pub fn decompose_e_n(w: &Vector3<f64>, e: &Vector3<f64>, n: &Vector3<f64>) -> Result<EnDecomposition> {
    let wedge = e.cross(n);
    let s2 = wedge.norm_squared();
    if s2.sqrt() < ALIGNED_TOL {
        return Err(Error::DegenerateBasis { cross: s2.sqrt() });
    }
    let c = e.dot(n);
    let (we, wn) = (w.dot(e), w.dot(n));
    Ok(EnDecomposition {
        sigma_wedge: w.dot(&wedge) / s2,
        sigma_e: (we - c * wn) / s2,
        sigma_n: (wn - c * we) / s2,
    })
}

/// A spatial configuration with its normal, the reference axis, and the
/// angle chart `(phi_n, eta_n, theta1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedState {
    pub config: SpatialConfiguration,
    pub n: Vector3<f64>,
    pub e: Vector3<f64>,
    pub phi_n: f64,
    pub eta_n: f64,
    pub theta1: f64,
}

impl OrientedState {
    pub fn new(config: SpatialConfiguration, n: Vector3<f64>, e: Vector3<f64>) -> Self {
        let (n, e) = (n.normalize(), e.normalize());
        let (u, v) = plane_basis(&e);
        let phi_n = e.dot(&n).clamp(-1.0, 1.0).acos();
        let aligned = e.cross(&n).norm() < ALIGNED_TOL;
        let eta_n = if aligned { 0.0 } else { n.dot(&v).atan2(n.dot(&u)) };
        let theta1 = match project_point(&config.q[0], &n, &e, None) {
            Ok(x) => x.dot(&v).atan2(x.dot(&u)) - eta_n,
            Err(_) => f64::NAN,
        };
        OrientedState {
            config,
            n,
            e,
            phi_n,
            eta_n,
            theta1,
        }
    }
}

/// `F` for the angular velocity `w`: `sigma_e + sigma_n`, or `n.w` when
/// `n = +-e`. Uses `(w.e + w.n) / (1 + e.n)`, which equals `sigma_e + sigma_n`
/// and stays regular as `n -> e`.
pub fn f_of_w(w: &Vector3<f64>, e: &Vector3<f64>, n: &Vector3<f64>) -> f64 {
    if e.cross(n).norm() < ALIGNED_TOL {
        return n.dot(w);
    }
    (w.dot(e) + w.dot(n)) / (1.0 + e.dot(n))
}

/// `F(J)`: the rotation-part angular velocity of the projected body 1.
#[allow(non_snake_case)]
pub fn F_of_J(state: &OrientedState, j: &Vector3<f64>, inertia: f64, masses: &MassTriple) -> f64 {
    let t = sigma_tensor(&state.config, masses);
    let w = sigma_inverse(&t, j, inertia).w;
    f_of_w(&w, &state.e, &state.n)
}

/// Rotation taking `n` to `e` along the minimizing geodesic.
fn geodesic_rotation(n: &Vector3<f64>, e: &Vector3<f64>, fallback_axis: Option<&Vector3<f64>>) -> Result<Matrix3<f64>> {
    let axis = n.cross(e);
    let s = axis.norm();
    let c = n.dot(e);
    if s < ALIGNED_TOL {
        if c > 0.0 {
            return Ok(Matrix3::identity());
        }
        let a = fallback_axis.ok_or(Error::AntipodalNormal)?;
        let a = a - e * a.dot(e);
        if a.norm() < ALIGNED_TOL {
            return Err(Error::AntipodalNormal);
        }
        return Ok(rotation(&a, std::f64::consts::PI));
    }
    Ok(rotation(&(axis / s), s.atan2(c)))
}

fn project_point(
    q: &Vector3<f64>,
    n: &Vector3<f64>,
    e: &Vector3<f64>,
    fallback_axis: Option<&Vector3<f64>>,
) -> Result<Vector3<f64>> {
    Ok(geodesic_rotation(n, e, fallback_axis)? * q)
}

/// `P(q, n)`: rotates the configuration so that `n` goes to `e`, and returns
/// its coordinates in `X = e^perp` with the basis of [`plane_basis`].
#[allow(non_snake_case)]
pub fn project_P(config: &SpatialConfiguration, n: &Vector3<f64>, e: &Vector3<f64>) -> Result<PlanarConfiguration> {
    let (n, e) = (n.normalize(), e.normalize());
    if (n + e).norm() < ALIGNED_TOL {
        return Err(Error::AntipodalNormal);
    }
    let r = geodesic_rotation(&n, &e, None)?;
    let (u, v) = plane_basis(&e);
    Ok(config.transformed(&r).in_plane(&u, &v))
}

/// Shape point of a spatial configuration, oriented by `n`.
pub fn oriented_shape(config: &SpatialConfiguration, n: &Vector3<f64>, masses: &MassTriple) -> ShapePoint {
    let (u, v) = plane_basis(n);
    project(&config.in_plane(&u, &v), masses)
}

/// Unit normals along a spatial trajectory. Supplied normals are used as
/// given; otherwise they come from the triangle, continued by sign and by
/// spherical interpolation across collinear samples.
pub fn normal_track(traj: &Trajectory, e: &Vector3<f64>) -> Result<Vec<Vector3<f64>>> {
    if let Some(ns) = &traj.normals {
        return ns
            .iter()
            .enumerate()
            .map(|(k, n)| {
                let len = n.norm();
                if len > 0.0 && len.is_finite() {
                    Ok(n / len)
                } else {
                    Err(Error::InvalidParameter(format!("zero normal at sample {k}")))
                }
            })
            .collect();
    }
    let len = traj.len();
    let mut raw: Vec<Option<Vector3<f64>>> = (0..len)
        .map(|k| {
            let cfg = traj.spatial(k);
            if sigma_tensor(&cfg, &traj.masses).is_collinear() {
                None
            } else {
                Some(cfg.raw_normal().normalize())
            }
        })
        .collect();
    let first = raw
        .iter()
        .position(Option::is_some)
        .ok_or(Error::PersistentCollinearity)?;
    let mut prev = raw[first].unwrap();
    if prev.dot(e) < 0.0 {
        prev = -prev;
    }
    for n in raw.iter_mut().skip(first).flatten() {
        if n.dot(&prev) < 0.0 {
            *n = -*n;
        }
        prev = *n;
    }
    let known: Vec<usize> = (0..len).filter(|&k| raw[k].is_some()).collect();
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let n = match raw[k] {
            Some(n) => n,
            None => {
                let after = known.partition_point(|&i| i < k);
                match (after.checked_sub(1).map(|i| known[i]), known.get(after)) {
                    (Some(a), Some(&b)) => {
                        let s = (traj.times[k] - traj.times[a]) / (traj.times[b] - traj.times[a]);
                        slerp(&raw[a].unwrap(), &raw[b].unwrap(), s)
                    }
                    (Some(a), None) => raw[a].unwrap(),
                    (None, Some(&b)) => raw[b].unwrap(),
                    (None, None) => unreachable!(),
                }
            }
        };
        out.push(n);
    }
    Ok(out)
}

fn slerp(a: &Vector3<f64>, b: &Vector3<f64>, s: f64) -> Vector3<f64> {
    let axis = a.cross(b);
    if axis.norm() < 1e-15 {
        return *a;
    }
    let angle = axis.norm().atan2(a.dot(b));
    rotation(&axis, s * angle) * a
}

/// Samples and time spent where the configuration is collinear, the angular
/// momentum is nonzero and `e` is not orthogonal to the configuration axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSet {
    pub measure: f64,
    pub intervals: Vec<(f64, f64)>,
}

pub fn bad_set_measure(traj: &Trajectory, e: &Vector3<f64>) -> Result<BadSet> {
    let e = e.normalize();
    let vel = traj.velocities_or_differences()?;
    let n = traj.len();
    let span = traj.duration().max(f64::MIN_POSITIVE);
    let flagged: Vec<bool> = (0..n)
        .map(|k| {
            let cfg = traj.spatial(k);
            let t = sigma_tensor(&cfg, &traj.masses);
            let j = cfg.angular_momentum(&vel[k], &traj.masses);
            match t.axis {
                Some(axis) => j.norm() > 1e-12 * t.inertia / span && e.dot(&axis).abs() > 1e-8,
                None => false,
            }
        })
        .collect();
    let cell = |k: usize| -> (f64, f64) {
        let lo = if k == 0 {
            traj.times[0]
        } else {
            0.5 * (traj.times[k - 1] + traj.times[k])
        };
        let hi = if k + 1 == n {
            traj.times[n - 1]
        } else {
            0.5 * (traj.times[k] + traj.times[k + 1])
        };
        (lo, hi)
    };
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut measure = 0.0;
    for k in (0..n).filter(|&k| flagged[k]) {
        let (lo, hi) = cell(k);
        measure += hi - lo;
        match intervals.last_mut() {
            Some(last) if k > 0 && flagged[k - 1] => last.1 = hi,
            _ => intervals.push((lo, hi)),
        }
    }
    Ok(BadSet { measure, intervals })
}

/// Side of `-e` on which a path through the antipodal singularity is continued.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Left,
    Right,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Left => 1.0,
            Branch::Right => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpatialOptions {
    pub with_oracle: bool,
    pub branch: Branch,
}

/// Reference axis: the given one, else the direction of `J(0)`, else `z`.
pub fn default_axis(traj: &Trajectory) -> Result<Vector3<f64>> {
    let vel = traj.velocities_or_differences()?;
    let j = traj.spatial(0).angular_momentum(&vel[0], &traj.masses);
    Ok(if j.norm() > 0.0 { j.normalize() } else { Vector3::z() })
}

/// Normals with samples on the antipode of `e` pushed slightly to one side.
fn branch_normals(normals: &[Vector3<f64>], e: &Vector3<f64>, branch: Branch) -> Result<(Vec<Vector3<f64>>, bool)> {
    let mut out = normals.to_vec();
    let mut hit = false;
    for k in 0..normals.len() {
        if (normals[k] + e).norm() >= ANTIPODAL_TOL {
            continue;
        }
        hit = true;
        let a = normals[k.saturating_sub(1)];
        let b = normals[(k + 1).min(normals.len() - 1)];
        let d = b - a;
        if d.norm() < 1e-12 {
            return Err(Error::StationaryAntipodalNormal { index: k });
        }
        let side = normals[k].cross(&d).normalize();
        out[k] = (normals[k] + side * (branch.sign() * BRANCH_OFFSET)).normalize();
    }
    Ok((out, hit))
}

/// Rotation angle of `P(q1, n)` in `X`, unwound.
pub fn spatial_oracle(traj: &Trajectory, normals: &[Vector3<f64>], e: &Vector3<f64>) -> Result<f64> {
    let (u, v) = plane_basis(e);
    let mut first: Option<f64> = None;
    let mut current = 0.0;
    let mut fallback = u;
    for (k, &n) in normals.iter().enumerate().take(traj.len()) {
        let s = n.cross(e);
        if s.norm() >= ALIGNED_TOL {
            fallback = s;
        }
        let x = match project_point(&traj.spatial(k).q[0], &n, e, Some(&fallback)) {
            Ok(x) => x,
            Err(_) => continue,
        };
        let (a, b) = (x.dot(&u), x.dot(&v));
        if a.hypot(b) <= 1e-12 * traj.spatial(k).moment_of_inertia(&traj.masses).sqrt() {
            continue;
        }
        let raw = b.atan2(a);
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

/// Samples of `F(J(t))` and `n . sigma^-1(J)`.
fn rotation_rates(traj: &Trajectory, normals: &[Vector3<f64>], e: &Vector3<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let vel = traj.velocities_or_differences()?;
    let mut f = Vec::with_capacity(traj.len());
    let mut along_n = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let cfg = traj.spatial(k);
        let t = sigma_tensor(&cfg, &traj.masses);
        if !(t.inertia > 0.0) {
            return Err(Error::TripleCollision { sample: Some(k) });
        }
        let j = cfg.angular_momentum(&vel[k], &traj.masses);
        let w = sigma_inverse(&t, &j, t.inertia).w;
        let n = normals[k];
        along_n.push(n.dot(&w));
        f.push(if (n + e).norm() < ANTIPODAL_TOL {
            f64::NAN
        } else {
            f_of_w(&w, e, &n)
        });
    }
    Ok((f, along_n))
}

/// Rotation of body 1 as seen in `X` after moving the configuration plane
/// onto `X`: `int F(J) dt` plus twice the area swept on the shape sphere
/// relative to `C1`.
pub fn reconstruct_spatial(traj: &Trajectory, e: Option<Vector3<f64>>) -> Result<ReconstructionReport> {
    reconstruct_spatial_with(traj, e, SpatialOptions::default())
}

pub fn reconstruct_spatial_with(
    traj: &Trajectory,
    e: Option<Vector3<f64>>,
    options: SpatialOptions,
) -> Result<ReconstructionReport> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: traj.len(),
        });
    }
    let e = match e {
        Some(e) if e.norm() > 0.0 && e.iter().all(|x| x.is_finite()) => e.normalize(),
        Some(_) => {
            return Err(Error::InvalidParameter(
                "reference axis must be a nonzero vector".into(),
            ))
        }
        None => default_axis(traj)?,
    };
    for (which, k) in [("initial", 0), ("final", traj.len() - 1)] {
        let cfg = traj.spatial(k);
        let norm = cfg.q[0].norm();
        if norm <= crate::planar::ENDPOINT_EPS * cfg.moment_of_inertia(&traj.masses).sqrt() {
            return Err(Error::EndpointAtOrigin {
                what: "q1",
                which,
                norm,
            });
        }
    }

    let tracked = normal_track(traj, &e)?;
    let (normals, antipodal_hit) = branch_normals(&tracked, &e, options.branch)?;
    let (f, along_n) = rotation_rates(traj, &tracked, &e)?;
    let near_antipode = tracked.iter().any(|n| 1.0 + n.dot(&e) < SPLIT_ROUTE);
    let dynamic = if near_antipode {
        // F = n.w + (1 - cos phi_n) d(eta_n)/dt; the second part is the solid
        // angle swept by n about e
        integrate(&traj.times, &along_n) + swept_solid_angle(&normals, &e)
    } else {
        integrate(&traj.times, &f)
    };

    let points: Vec<ShapePoint> = (0..traj.len())
        .map(|k| oriented_shape(&traj.spatial(k), &tracked[k], &traj.masses))
        .collect();
    let curve = ShapeCurve::new(traj.times.clone(), &points, true)?;
    let sweep = swept_area(&curve, &Pole::C1.point());

    let mut report = ReconstructionReport::new(dynamic, 2.0 * sweep.area, traj.len());
    report.pole_crossed = sweep.pole_crossed || near_antipode || antipodal_hit;
    let bad = bad_set_measure(traj, &e)?;
    if bad.measure > 0.0 {
        report.certified = false;
        report.bad_set_measure = Some(bad.measure);
    }
    if options.with_oracle {
        report.oracle = Some(spatial_oracle(traj, &tracked, &e)?);
    }
    Ok(report)
}

/// Rigid and internal parts of a velocity: `v_R = w x q` with `w = sigma^-1(J)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocitySplit {
    pub rotational: Triple,
    pub internal: Triple,
    pub w: Vector3<f64>,
    pub collinear: bool,
}

pub fn velocity_decompose(
    config: &SpatialConfiguration,
    velocity: &Triple,
    masses: &MassTriple,
) -> Result<VelocitySplit> {
    let p: Vector3<f64> = (0..3).map(|i| velocity[i] * masses.as_array()[i]).sum();
    let scale: f64 = (0..3).map(|i| masses.as_array()[i] * velocity[i].norm()).sum();
    if p.norm() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParameter(
            "velocity carries nonzero linear momentum".into(),
        ));
    }
    let t = sigma_tensor(config, masses);
    let j = config.angular_momentum(velocity, masses);
    let solve = sigma_inverse(&t, &j, t.inertia);
    let rotational = config.q.map(|q| solve.w.cross(&q));
    let internal = [0, 1, 2].map(|i| velocity[i] - rotational[i]);
    Ok(VelocitySplit {
        rotational,
        internal,
        w: solve.w,
        collinear: solve.collinear,
    })
}
