//! Sampled three-body trajectories, finite differencing and resampling.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{MassTriple, PlanarConfiguration, SpatialConfiguration};

/// Centroid residuals below this (relative) are left untouched on ingest.
const SHIFT_FLOOR: f64 = 1e-14;

/// Relative tolerance for the centroid and linear-momentum invariants.
pub const TRAJECTORY_TOL: f64 = 1e-10;

pub type Triple = [Vector3<f64>; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dim {
    Planar,
    Spatial,
}

impl Dim {
    pub fn value(self) -> usize {
        match self {
            Dim::Planar => 2,
            Dim::Spatial => 3,
        }
    }
}

impl TryFrom<u8> for Dim {
    type Error = String;
    fn try_from(d: u8) -> std::result::Result<Self, String> {
        match d {
            2 => Ok(Dim::Planar),
            3 => Ok(Dim::Spatial),
            _ => Err(format!("dim must be 2 or 3, got {d}")),
        }
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.value() as u8
    }
}

/// A sampled motion. Planar trajectories keep `z = 0` in every vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub masses: MassTriple,
    pub dim: Dim,
    pub times: Vec<f64>,
    pub positions: Vec<Triple>,
    pub velocities: Option<Vec<Triple>>,
    pub normals: Option<Vec<Vector3<f64>>>,
    /// Centroid subtracted from every position sample on construction.
    pub centroid_shift: Vec<Vector3<f64>>,
}

fn is_finite(t: &Triple) -> bool {
    t.iter().all(|v| v.iter().all(|x| x.is_finite()))
}

impl Trajectory {
    /// Validates times and vector data and auto-centers positions and
    /// velocities. The applied position shift is kept in `centroid_shift`.
    pub fn new(
        masses: MassTriple,
        dim: Dim,
        times: Vec<f64>,
        mut positions: Vec<Triple>,
        mut velocities: Option<Vec<Triple>>,
        normals: Option<Vec<Vector3<f64>>>,
    ) -> Result<Self> {
        let n = times.len();
        if n == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        if positions.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} position samples for {n} times",
                positions.len()
            )));
        }
        for k in 0..n {
            if !times[k].is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite time at sample {k}")));
            }
            if k > 0 && times[k] <= times[k - 1] {
                return Err(Error::InvalidParameter(format!(
                    "time is not strictly increasing at sample {k}"
                )));
            }
            if !is_finite(&positions[k]) {
                return Err(Error::InvalidParameter(format!("non-finite position at sample {k}")));
            }
        }
        if dim == Dim::Planar && positions.iter().flatten().any(|v| v.z != 0.0) {
            return Err(Error::InvalidParameter("planar trajectory with nonzero z".into()));
        }
        let mut shifts = Vec::with_capacity(n);
        for q in positions.iter_mut() {
            shifts.push(center(q, &masses));
        }
        if let Some(v) = velocities.as_mut() {
            if v.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} velocity samples for {n} times",
                    v.len()
                )));
            }
            for (k, vk) in v.iter_mut().enumerate() {
                if !is_finite(vk) {
                    return Err(Error::InvalidParameter(format!("non-finite velocity at sample {k}")));
                }
                center(vk, &masses);
            }
        }
        if let Some(nm) = normals.as_ref() {
            if nm.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} normal samples for {n} times",
                    nm.len()
                )));
            }
            if dim == Dim::Planar {
                return Err(Error::InvalidParameter("normals are only meaningful in 3-space".into()));
            }
            if nm.iter().any(|v| !(v.norm() > 0.0) || !v.iter().all(|x| x.is_finite())) {
                return Err(Error::InvalidParameter("normals must be finite and nonzero".into()));
            }
        }
        // unit vectors are kept verbatim so that files round-trip exactly
        let normals = normals.map(|v| {
            v.into_iter()
                .map(|x| {
                    if (x.norm() - 1.0).abs() <= 4.0 * f64::EPSILON {
                        x
                    } else {
                        x.normalize()
                    }
                })
                .collect()
        });
        Ok(Trajectory {
            masses,
            dim,
            times,
            positions,
            velocities,
            normals,
            centroid_shift: shifts,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times[self.len() - 1] - self.times[0]
    }

    pub fn planar(&self, k: usize) -> PlanarConfiguration {
        PlanarConfiguration {
            q: self.positions[k].map(|v| Vector2::new(v.x, v.y)),
        }
    }

    pub fn spatial(&self, k: usize) -> SpatialConfiguration {
        SpatialConfiguration { q: self.positions[k] }
    }

    /// Largest centroid shift applied on construction, relative to the
    /// configuration scale.
    pub fn max_relative_shift(&self) -> f64 {
        self.centroid_shift
            .iter()
            .zip(&self.positions)
            .map(|(s, q)| {
                let scale: f64 = q.iter().map(|v| v.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
                s.norm() / scale
            })
            .fold(0.0, f64::max)
    }

    /// Velocities as stored, or second-order finite differences of positions.
    pub fn velocities_or_differences(&self) -> Result<std::borrow::Cow<'_, [Triple]>> {
        match &self.velocities {
            Some(v) => Ok(std::borrow::Cow::Borrowed(v)),
            None => Ok(std::borrow::Cow::Owned(
                finite_difference_velocities(self)?.velocities.expect("just computed"),
            )),
        }
    }

    /// True when consecutive time steps agree to a relative `1e-8`.
    pub fn is_uniform(&self) -> bool {
        is_uniform_grid(&self.times)
    }
}

/// Subtracts the weighted centroid when it exceeds the floor; returns the shift.
fn center(q: &mut Triple, masses: &MassTriple) -> Vector3<f64> {
    // a second pass mops up cancellation residue, so centered data re-ingests unchanged
    let mut total = Vector3::zeros();
    for _ in 0..4 {
        if masses.centroid_offset(q) <= SHIFT_FLOOR {
            break;
        }
        let c = masses.centroid(q);
        for v in q.iter_mut() {
            *v -= c;
        }
        total += c;
    }
    total
}

pub fn is_uniform_grid(times: &[f64]) -> bool {
    if times.len() < 3 {
        return true;
    }
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    times.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-8 * h)
}

/// Derivative weights of the quadratic through `(t0, t1, t2)` evaluated at `at`.
fn quadratic_derivative_weights(t: [f64; 3], at: f64) -> [f64; 3] {
    let [t0, t1, t2] = t;
    [
        ((at - t1) + (at - t2)) / ((t0 - t1) * (t0 - t2)),
        ((at - t0) + (at - t2)) / ((t1 - t0) * (t1 - t2)),
        ((at - t0) + (at - t1)) / ((t2 - t0) * (t2 - t1)),
    ]
}

/// Central differences in the interior, one-sided second-order stencils at
/// the ends. Exact for positions quadratic in time, on any grid.
pub fn finite_difference_velocities(traj: &Trajectory) -> Result<Trajectory> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let t = &traj.times;
    let q = &traj.positions;
    let vel: Vec<Triple> = (0..n)
        .map(|k| {
            let base = k.saturating_sub(1).min(n - 3);
            let w = quadratic_derivative_weights([t[base], t[base + 1], t[base + 2]], t[k]);
            [0, 1, 2].map(|b| q[base][b] * w[0] + q[base + 1][b] * w[1] + q[base + 2][b] * w[2])
        })
        .collect();
    let mut out = traj.clone();
    out.velocities = Some(vel);
    Ok(out)
}

/// Four-point Lagrange interpolation weights at `at` for nodes `t`.
pub(crate) fn lagrange_weights(t: &[f64], at: f64) -> Vec<f64> {
    (0..t.len())
        .map(|i| {
            (0..t.len())
                .filter(|&j| j != i)
                .map(|j| (at - t[j]) / (t[i] - t[j]))
                .product()
        })
        .collect()
}

/// Index of the first node of the local 4-point stencil around `at`.
pub(crate) fn stencil_start(times: &[f64], at: f64) -> usize {
    let n = times.len();
    let upper = times.partition_point(|&x| x <= at).clamp(1, n - 1);
    upper.saturating_sub(2).min(n.saturating_sub(4))
}

fn interpolate_triples(times: &[f64], data: &[Triple], at: f64) -> Triple {
    let n = times.len();
    if n == 1 {
        return data[0];
    }
    let width = n.min(4);
    let s = stencil_start(times, at);
    let w = lagrange_weights(&times[s..s + width], at);
    [0, 1, 2].map(|b| (0..width).map(|i| data[s + i][b] * w[i]).sum())
}

/// Piecewise-cubic resampling onto `n` uniform times spanning the original
/// interval. Endpoints are copied exactly.
pub fn resample(traj: &Trajectory, n: usize) -> Result<Trajectory> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("resample needs N >= 2, got {n}")));
    }
    if traj.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: traj.len(),
        });
    }
    let (t0, t1) = (traj.times[0], traj.times[traj.len() - 1]);
    let times: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => t0,
            k if k == n - 1 => t1,
            k => t0 + (t1 - t0) * k as f64 / (n - 1) as f64,
        })
        .collect();
    let last = traj.len() - 1;
    let pick = |data: &[Triple], k: usize, t: f64| -> Triple {
        if k == 0 {
            data[0]
        } else if k == n - 1 {
            data[last]
        } else {
            interpolate_triples(&traj.times, data, t)
        }
    };
    let positions: Vec<Triple> = times
        .iter()
        .enumerate()
        .map(|(k, &t)| pick(&traj.positions, k, t))
        .collect();
    let velocities = traj
        .velocities
        .as_ref()
        .map(|v| times.iter().enumerate().map(|(k, &t)| pick(v, k, t)).collect());
    let normals = traj.normals.as_ref().map(|nm| {
        let as_triples: Vec<Triple> = nm.iter().map(|v| [*v, Vector3::zeros(), Vector3::zeros()]).collect();
        times
            .iter()
            .enumerate()
            .map(|(k, &t)| pick(&as_triples, k, t)[0].normalize())
            .collect()
    });
    Trajectory::new(traj.masses, traj.dim, times, positions, velocities, normals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn masses() -> MassTriple {
        MassTriple::new(1.0, 2.0, 3.0).unwrap()
    }

    /// Polynomial motion `q_b(t) = a_b + b_b t + c_b t^2`, centered by construction.
    fn poly_traj(times: Vec<f64>, quad: f64) -> Trajectory {
        let m = masses();
        let coef = |b: usize| -> [Vector3<f64>; 3] {
            let s = [1.0, -0.5, 0.0][b];
            let r = [0.0, 0.0, 1.0 / 3.0][b];
            let base = Vector3::new(s + r, 2.0 * s - r, 0.0);
            [
                base,
                Vector3::new(0.3 * s, -0.7 * r, 0.0),
                Vector3::new(quad * s, quad * r, 0.0),
            ]
        };
        let pos: Vec<Triple> = times
            .iter()
            .map(|&t| {
                let raw: Triple = [0, 1, 2].map(|b| {
                    let c = coef(b);
                    c[0] + c[1] * t + c[2] * t * t
                });
                raw
            })
            .collect();
        Trajectory::new(m, Dim::Planar, times, pos, None, None).unwrap()
    }

    #[test]
    fn differences_are_exact_for_linear_and_quadratic_motion() {
        let times = vec![0.0, 0.1, 0.25, 0.3, 0.7, 1.0];
        for quad in [0.0, 1.7] {
            let tr = poly_traj(times.clone(), quad);
            let fd = finite_difference_velocities(&tr).unwrap();
            let v = fd.velocities.unwrap();
            for k in 0..times.len() {
                let t = times[k];
                let mut exact = [0, 1, 2].map(|b| {
                    let s = [1.0, -0.5, 0.0][b];
                    let r = [0.0, 0.0, 1.0 / 3.0][b];
                    Vector3::new(0.3 * s, -0.7 * r, 0.0) + Vector3::new(quad * s, quad * r, 0.0) * (2.0 * t)
                });
                center(&mut exact, &tr.masses);
                for b in 0..3 {
                    assert_relative_eq!(v[k][b], exact[b], epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn differences_need_three_samples() {
        let tr = poly_traj(vec![0.0, 1.0], 0.0);
        assert_eq!(
            finite_difference_velocities(&tr),
            Err(Error::TooFewSamples { needed: 3, got: 2 })
        );
    }

    fn sinusoid(n: usize) -> Trajectory {
        let m = MassTriple::equal();
        let times: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let pos = times
            .iter()
            .map(|&t| {
                let a = (std::f64::consts::TAU * t).sin();
                let b = (std::f64::consts::TAU * t).cos();
                [
                    Vector3::new(a, b, 0.0),
                    Vector3::new(-a, 0.5 * b, 0.0),
                    Vector3::new(0.0, -1.5 * b, 0.0),
                ]
            })
            .collect();
        Trajectory::new(m, Dim::Planar, times, pos, None, None).unwrap()
    }

    fn sinusoid_velocity_error(n: usize) -> f64 {
        let tr = sinusoid(n);
        let v = finite_difference_velocities(&tr).unwrap().velocities.unwrap();
        let w = std::f64::consts::TAU;
        tr.times
            .iter()
            .zip(&v)
            .map(|(&t, vk)| (vk[0].x - w * (w * t).cos()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn difference_error_is_second_order() {
        let e1 = sinusoid_velocity_error(1001);
        let e2 = sinusoid_velocity_error(2001);
        assert!(e1 < 1e-3);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn rejects_non_monotone_time() {
        let m = MassTriple::equal();
        let z = [Vector3::zeros(); 3];
        let err = Trajectory::new(m, Dim::Planar, vec![0.0, 1.0, 1.0], vec![z; 3], None, None).unwrap_err();
        assert!(err.to_string().contains("sample 2"), "{err}");
    }

    #[test]
    fn auto_centering_records_shift() {
        let m = MassTriple::equal();
        let q = [
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
            Vector3::new(3.0, 0.0, 0.0),
        ];
        let tr = Trajectory::new(m, Dim::Planar, vec![0.0], vec![q], None, None).unwrap();
        assert_relative_eq!(tr.centroid_shift[0], Vector3::new(2.0, 0.0, 0.0));
        assert_relative_eq!(tr.positions[0][0], Vector3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn resample_identity_and_linear_exactness() {
        let tr = sinusoid(101);
        let same = resample(&tr, 101).unwrap();
        for k in 0..tr.len() {
            for b in 0..3 {
                assert_relative_eq!(same.positions[k][b], tr.positions[k][b], epsilon = 1e-12);
            }
        }
        let lin = poly_traj(vec![0.0, 0.2, 0.5, 0.9, 1.0], 0.0);
        let r = resample(&lin, 37).unwrap();
        assert_eq!(r.positions[0], lin.positions[0]);
        assert_eq!(r.positions[36], lin.positions[4]);
        let reference = poly_traj(r.times.clone(), 0.0);
        for k in 0..r.len() {
            for b in 0..3 {
                assert_relative_eq!(r.positions[k][b], reference.positions[k][b], epsilon = 1e-13);
            }
        }
    }

    fn interpolation_error(n: usize) -> f64 {
        let coarse = sinusoid(n);
        let fine = resample(&coarse, 997).unwrap();
        let exact = sinusoid(997);
        fine.positions
            .iter()
            .zip(&exact.positions)
            .map(|(a, b)| (a[0] - b[0]).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn resample_error_falls_at_least_eightfold_when_doubling() {
        let e1 = interpolation_error(41);
        let e2 = interpolation_error(81);
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }
}
