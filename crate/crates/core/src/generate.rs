//! Motion generators: closed-form rigid and dilational motions, the
//! pinch motion from `P1` to a binary collision, a fixed-step RK4
//! three-body integrator, and seeded random smooth motions.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shape::{
    configuration_from_fiber, FiberChart, JacobiPair, MassTriple, PlanarConfiguration, ShapePoint, SpatialConfiguration,
};
use crate::sphere::rotation;
use crate::trajectory::{Dim, Trajectory, Triple};

/// `n` uniform times on `[0, duration]`.
pub fn uniform_times(duration: f64, n: usize) -> Result<Vec<f64>> {
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive, got {duration}"
        )));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    Ok((0..n)
        .map(|k| {
            if k == n - 1 {
                duration
            } else {
                duration * k as f64 / (n - 1) as f64
            }
        })
        .collect())
}

fn lift2(q: &[Vector2<f64>; 3]) -> Triple {
    q.map(|v| Vector3::new(v.x, v.y, 0.0))
}

/// Rotation of a planar configuration at constant `rate`.
pub fn rigid_rotation_planar(
    config: &PlanarConfiguration,
    masses: &MassTriple,
    rate: f64,
    duration: f64,
    n: usize,
) -> Result<Trajectory> {
    let times = uniform_times(duration, n)?;
    let mut pos = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    for &t in &times {
        let q = config.rotated(rate * t);
        pos.push(lift2(&q.q));
        vel.push(lift2(&q.q.map(|p| Vector2::new(-p.y, p.x) * rate)));
    }
    Trajectory::new(*masses, Dim::Planar, times, pos, Some(vel), None)
}

/// Rotation of a spatial configuration about a fixed `axis` at constant `rate`.
pub fn rigid_rotation(
    config: &SpatialConfiguration,
    masses: &MassTriple,
    axis: &Vector3<f64>,
    rate: f64,
    duration: f64,
    n: usize,
) -> Result<Trajectory> {
    if !(axis.norm() > 0.0) {
        return Err(Error::InvalidParameter("rotation axis must be nonzero".into()));
    }
    let a = axis.normalize();
    let times = uniform_times(duration, n)?;
    let mut pos = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    for &t in &times {
        let q = config.transformed(&rotation(&a, rate * t)).q;
        vel.push(q.map(|p| a.cross(&p) * rate));
        pos.push(q);
    }
    Trajectory::new(*masses, Dim::Spatial, times, pos, Some(vel), None)
}

/// Pure dilation `q(t) = exp(rate t) q(0)`.
pub fn homothety(
    config: &PlanarConfiguration,
    masses: &MassTriple,
    rate: f64,
    duration: f64,
    n: usize,
) -> Result<Trajectory> {
    let times = uniform_times(duration, n)?;
    let mut pos = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    for &t in &times {
        let q = config.scaled((rate * t).exp());
        pos.push(lift2(&q.q));
        vel.push(lift2(&q.q.map(|p| p * rate)));
    }
    Trajectory::new(*masses, Dim::Planar, times, pos, Some(vel), None)
}

/// The configuration over `P1` with `I = 1` and `q3` on the negative y axis.
pub fn p1_configuration(masses: &MassTriple) -> PlanarConfiguration {
    let p1 = ShapePoint::new(0.0, 0.0, 0.5, 0.5);
    let cfg = configuration_from_fiber(&p1, 0.0, FiberChart::Xi2, masses).expect("P1 is regular in both charts");
    let q3 = cfg.q[2];
    cfg.rotated(-std::f64::consts::FRAC_PI_2 - q3.y.atan2(q3.x))
}

/// Body 3 fixed at its `P1` position while bodies 1 and 2 move uniformly to
/// their common centroid, which they reach at `duration`. Sampling stops at
/// `stop_fraction * duration`.
pub fn figure1_pinch(masses: &MassTriple, duration: f64, n: usize, stop_fraction: f64) -> Result<Trajectory> {
    if !(stop_fraction > 0.0 && stop_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "stop fraction must lie in (0, 1], got {stop_fraction}"
        )));
    }
    if !(duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let start = p1_configuration(masses);
    let [m1, m2, m3] = masses.as_array();
    let c12 = start.q[2] * (-m3 / (m1 + m2));
    let v = [
        (c12 - start.q[0]) / duration,
        (c12 - start.q[1]) / duration,
        Vector2::zeros(),
    ];
    let times = uniform_times(stop_fraction * duration, n)?;
    let pos = times
        .iter()
        .map(|&t| lift2(&[0, 1, 2].map(|i| start.q[i] + v[i] * t)))
        .collect();
    let vel = vec![lift2(&v); n];
    Trajectory::new(*masses, Dim::Planar, times, pos, Some(vel), None)
}

fn accelerations(masses: &[f64; 3], q: &Triple, g: f64) -> Triple {
    let mut a = [Vector3::zeros(); 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let d = q[j] - q[i];
                a[i] += d * (g * masses[j] / d.norm().powi(3));
            }
        }
    }
    a
}

/// Kinetic plus potential energy.
pub fn energy(masses: &MassTriple, q: &Triple, v: &Triple, g: f64) -> f64 {
    let m = masses.as_array();
    let kinetic: f64 = (0..3).map(|i| 0.5 * m[i] * v[i].norm_squared()).sum();
    let potential: f64 = [(0, 1), (1, 2), (0, 2)]
        .iter()
        .map(|&(i, j)| -g * m[i] * m[j] / (q[i] - q[j]).norm())
        .sum();
    kinetic + potential
}

#[allow(clippy::too_many_arguments)]
/// Fixed-step RK4 of the Newtonian equations, `substeps` steps between
/// consecutive output samples.
pub fn newtonian(
    masses: &MassTriple,
    q0: Triple,
    v0: Triple,
    g: f64,
    duration: f64,
    n: usize,
    substeps: usize,
    dim: Dim,
) -> Result<Trajectory> {
    let times = uniform_times(duration, n)?;
    let substeps = substeps.max(1);
    let m = masses.as_array();
    let h = duration / ((n - 1) * substeps) as f64;
    let (mut q, mut v) = (q0, v0);
    let mut pos = vec![q];
    let mut vel = vec![v];
    let add = |x: &Triple, y: &Triple, s: f64| -> Triple { [0, 1, 2].map(|i| x[i] + y[i] * s) };
    for _ in 1..n {
        for _ in 0..substeps {
            let k1q = v;
            let k1v = accelerations(&m, &q, g);
            let k2q = add(&v, &k1v, 0.5 * h);
            let k2v = accelerations(&m, &add(&q, &k1q, 0.5 * h), g);
            let k3q = add(&v, &k2v, 0.5 * h);
            let k3v = accelerations(&m, &add(&q, &k2q, 0.5 * h), g);
            let k4q = add(&v, &k3v, h);
            let k4v = accelerations(&m, &add(&q, &k3q, h), g);
            for i in 0..3 {
                q[i] += (k1q[i] + k2q[i] * 2.0 + k3q[i] * 2.0 + k4q[i]) * (h / 6.0);
                v[i] += (k1v[i] + k2v[i] * 2.0 + k3v[i] * 2.0 + k4v[i]) * (h / 6.0);
            }
        }
        if q.iter().chain(v.iter()).any(|x| !x.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidParameter("integration blew up near a collision".into()));
        }
        pos.push(q);
        vel.push(v);
    }
    Trajectory::new(*masses, dim, times, pos, Some(vel), None)
}

/// The equal-mass figure-eight choreography (zero angular momentum).
pub fn figure_eight(duration: f64, n: usize) -> Result<Trajectory> {
    let q1 = Vector3::new(0.970_004_36, -0.243_087_53, 0.0);
    let v3 = Vector3::new(-0.932_407_37, -0.864_731_46, 0.0);
    newtonian(
        &MassTriple::equal(),
        [q1, -q1, Vector3::zeros()],
        [-v3 / 2.0, -v3 / 2.0, v3],
        1.0,
        duration,
        n,
        4,
        Dim::Planar,
    )
}

/// Rigidly rotating equilateral solution with its velocities scaled by
/// `1 + eps` and given a small radial kick.
pub fn perturbed_lagrange(masses: &MassTriple, eps: f64, duration: f64, n: usize) -> Result<Trajectory> {
    let cfg = crate::shape::equilateral(masses, 1.0);
    let side = (cfg.q[0] - cfg.q[1]).norm();
    let omega = (masses.total() / side.powi(3)).sqrt();
    let q = lift2(&cfg.q);
    let v = q.map(|p| (Vector3::new(-p.y, p.x, 0.0) * omega) * (1.0 + eps) + p * (0.5 * eps));
    newtonian(masses, q, v, 1.0, duration, n, 4, Dim::Planar)
}

/// Parameters of a seeded random smooth motion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSmooth {
    pub seed: u64,
    pub duration: f64,
    pub n: usize,
    /// Fourier amplitude relative to the base size.
    pub amplitude: f64,
    pub modes: usize,
    /// Mean rotation rate added on top of the Fourier part.
    pub spin: f64,
}

impl Default for RandomSmooth {
    fn default() -> Self {
        RandomSmooth {
            seed: 0,
            duration: 1.0,
            n: 1001,
            amplitude: 0.25,
            modes: 3,
            spin: 1.0,
        }
    }
}

struct Fourier {
    /// complex coefficients of cos and sin per mode
    cos: Vec<Complex64>,
    sin: Vec<Complex64>,
    period: f64,
}

impl Fourier {
    fn random(rng: &mut ChaCha8Rng, modes: usize, scale: f64, period: f64) -> Self {
        let mut draw = |k: usize| {
            let s = scale / (k * k) as f64;
            Complex64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
        };
        let cos = (1..=modes).map(&mut draw).collect();
        let sin = (1..=modes).map(&mut draw).collect();
        Fourier { cos, sin, period }
    }

    fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut rate = Complex64::new(0.0, 0.0);
        for k in 0..self.cos.len() {
            let w = TAU * (k + 1) as f64 / self.period;
            let (s, c) = (w * t).sin_cos();
            value += self.cos[k] * c + self.sin[k] * s;
            rate += (self.sin[k] * c - self.cos[k] * s) * w;
        }
        (value, rate)
    }
}

/// Sample times with the Jacobi pair and its rate at each.
type JacobiSamples = (Vec<f64>, Vec<(JacobiPair, JacobiPair)>);

/// Jacobi pairs and their rates for a random smooth planar motion.
fn random_jacobi(params: &RandomSmooth) -> Result<JacobiSamples> {
    if !(params.amplitude >= 0.0 && params.amplitude < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "amplitude must lie in [0, 0.5), got {}",
            params.amplitude
        )));
    }
    let times = uniform_times(params.duration, params.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let period = params.duration;
    let f1 = Fourier::random(&mut rng, params.modes, params.amplitude * r, period);
    let f2 = Fourier::random(&mut rng, params.modes, params.amplitude * r, period);
    let turn: Vec<(f64, f64)> = (0..params.modes)
        .map(|_| (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)))
        .collect();
    let base_angle = rng.gen_range(0.0..TAU);
    let samples = times
        .iter()
        .map(|&t| {
            let (d1, dd1) = f1.eval(t);
            let (d2, dd2) = f2.eval(t);
            let mut theta = base_angle + params.spin * t;
            let mut dtheta = params.spin;
            for (k, &(a, b)) in turn.iter().enumerate() {
                let w = TAU * (k + 1) as f64 / period;
                let (s, c) = (w * t).sin_cos();
                theta += (a * s + b * (c - 1.0)) / (k + 1) as f64;
                dtheta += (a * c - b * s) * w / (k + 1) as f64;
            }
            let rot = Complex64::from_polar(1.0, theta);
            let i = Complex64::i();
            // base point P1: Z1 = r, Z2 = i r
            let z1 = Complex64::new(r, 0.0) + d1;
            let z2 = i * r + d2;
            let pair = JacobiPair {
                z1: rot * z1,
                z2: rot * z2,
            };
            let rate = JacobiPair {
                z1: rot * (dd1 + i * dtheta * z1),
                z2: rot * (dd2 + i * dtheta * z2),
            };
            (pair, rate)
        })
        .collect();
    Ok((times, samples))
}

/// A seeded planar motion staying in the `w3 > 0` hemisphere.
pub fn random_smooth(masses: &MassTriple, params: &RandomSmooth) -> Result<Trajectory> {
    let (times, samples) = random_jacobi(params)?;
    let mut pos = Vec::with_capacity(times.len());
    let mut vel = Vec::with_capacity(times.len());
    for (pair, rate) in &samples {
        pos.push(lift2(&pair.to_configuration(masses).q));
        vel.push(lift2(&rate.to_configuration(masses).q));
    }
    Trajectory::new(*masses, Dim::Planar, times, pos, Some(vel), None)
}

/// Tilt profile for [`spatial_wobble`]: the configuration plane is turned
/// by `beta(t)` about `x` and then by `psi(t)` about `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub beta0: f64,
    pub beta_rate: f64,
    pub beta_amplitude: f64,
    pub psi_rate: f64,
}

impl Tilt {
    fn eval(&self, t: f64, period: f64) -> (f64, f64, f64, f64) {
        let w = TAU / period;
        let beta = self.beta0 + self.beta_rate * t + self.beta_amplitude * (w * t).sin();
        let dbeta = self.beta_rate + self.beta_amplitude * w * (w * t).cos();
        (beta, dbeta, self.psi_rate * t, self.psi_rate)
    }
}

fn hat(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// A random smooth planar motion carried through space by a time-dependent
/// rotation. Normals `R(t) z` are emitted with the samples.
pub fn spatial_wobble(masses: &MassTriple, params: &RandomSmooth, tilt: &Tilt) -> Result<Trajectory> {
    let (times, samples) = random_jacobi(params)?;
    let n = times.len();
    let mut pos = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for (k, (pair, rate)) in samples.iter().enumerate() {
        let (beta, dbeta, psi, dpsi) = tilt.eval(times[k], params.duration);
        let rz = rotation(&Vector3::z(), psi);
        let rx = rotation(&Vector3::x(), beta);
        let r = rz * rx;
        let dr = hat(&Vector3::z()) * r * dpsi + rz * hat(&Vector3::x()) * rx * dbeta;
        let p = lift2(&pair.to_configuration(masses).q);
        let dp = lift2(&rate.to_configuration(masses).q);
        pos.push(p.map(|x| r * x));
        vel.push([0, 1, 2].map(|i| dr * p[i] + r * dp[i]));
        normals.push(r * Vector3::z());
    }
    Trajectory::new(*masses, Dim::Spatial, times, pos, Some(vel), Some(normals))
}

/// Random positive masses, each in `[0.2, 5)`.
pub fn random_masses(rng: &mut ChaCha8Rng) -> MassTriple {
    MassTriple::new(
        rng.gen_range(0.2..5.0),
        rng.gen_range(0.2..5.0),
        rng.gen_range(0.2..5.0),
    )
    .expect("positive masses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pinch_starts_at_p1_and_ends_at_c3() {
        for m in [MassTriple::equal(), MassTriple::new(1.0, 2.0, 3.0).unwrap()] {
            let t = figure1_pinch(&m, 1.0, 11, 1.0).unwrap();
            let start = crate::shape::normalize_shape(&crate::shape::project(&t.planar(0), &m)).unwrap();
            assert_relative_eq!(start.xyz(), Vector3::new(0.0, 0.0, 0.5), epsilon = 1e-14);
            let end = t.planar(10);
            assert_relative_eq!(end.q[0], end.q[1], epsilon = 1e-14);
            assert!(t.max_relative_shift() < 1e-12);
        }
        assert!(figure1_pinch(&MassTriple::equal(), 0.0, 11, 1.0).is_err());
    }

    #[test]
    fn newtonian_conserves_energy_and_momentum() {
        // equal masses on a line, middle body at rest: circular Euler solution
        let m = MassTriple::equal();
        let a: f64 = 1.0;
        let omega = (1.25 / a.powi(3)).sqrt();
        let q = [Vector3::new(a, 0.0, 0.0), Vector3::zeros(), Vector3::new(-a, 0.0, 0.0)];
        let v = [
            Vector3::new(0.0, omega * a, 0.0),
            Vector3::zeros(),
            Vector3::new(0.0, -omega * a, 0.0),
        ];
        let period = TAU / omega;
        let t = newtonian(&m, q, v, 1.0, period, 10_001, 1, Dim::Planar).unwrap();
        let e0 = energy(&m, &t.positions[0], &t.velocities.as_ref().unwrap()[0], 1.0);
        let last = t.len() - 1;
        let e1 = energy(&m, &t.positions[last], &t.velocities.as_ref().unwrap()[last], 1.0);
        assert!((e1 - e0).abs() <= 1e-8 * e0.abs());
        assert_relative_eq!(t.positions[last][0], q[0], epsilon = 1e-8);
    }

    #[test]
    fn random_smooth_is_deterministic_and_centered() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let p = RandomSmooth {
            seed: 11,
            n: 101,
            ..RandomSmooth::default()
        };
        let a = random_smooth(&m, &p).unwrap();
        let b = random_smooth(&m, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.max_relative_shift() < 1e-12);
    }

    #[test]
    fn wobble_velocities_match_differences() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        let p = RandomSmooth {
            seed: 3,
            n: 2001,
            ..RandomSmooth::default()
        };
        let tilt = Tilt {
            beta0: 0.4,
            beta_rate: 0.3,
            beta_amplitude: 0.2,
            psi_rate: 0.7,
        };
        let t = spatial_wobble(&m, &p, &tilt).unwrap();
        let fd = crate::trajectory::finite_difference_velocities(&Trajectory {
            velocities: None,
            ..t.clone()
        })
        .unwrap();
        let (a, b) = (t.velocities.unwrap(), fd.velocities.unwrap());
        for k in [0, 500, 1000, 2000] {
            for i in 0..3 {
                assert_relative_eq!(a[k][i], b[k][i], epsilon = 1e-4);
            }
        }
    }
}
