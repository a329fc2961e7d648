//! Browser bindings for the shape-sphere library.
//!
//! Every export returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use shapesphere::atlas::atlas;
use shapesphere::generate::{figure1_pinch, random_smooth, RandomSmooth};
use shapesphere::planar::{reconstruct, ShapeCurve, Target};
use shapesphere::{MassTriple, Result, Trajectory};

/// Shape points are at most this many in a payload; the page draws polylines.
const MAX_POINTS: usize = 400;

fn respond(result: Result<Value>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn thin<T: Copy>(xs: &[T]) -> Vec<T> {
    let step = xs.len().div_ceil(MAX_POINTS).max(1);
    let mut out: Vec<T> = xs.iter().step_by(step).copied().collect();
    if !(xs.len() - 1).is_multiple_of(step) {
        out.push(xs[xs.len() - 1]);
    }
    out
}

fn motion_payload(traj: &Trajectory) -> Result<Value> {
    let curve = ShapeCurve::from_trajectory(traj)?;
    let report = reconstruct(traj, Target::Q1, true)?;
    let shape: Vec<[f64; 3]> = curve.points.iter().map(|p| [p.w1, p.w2, p.w3]).collect();
    let body1: Vec<[f64; 2]> = traj.positions.iter().map(|q| [q[0].x, q[0].y]).collect();
    let frames: Vec<[[f64; 2]; 3]> = traj.positions.iter().map(|q| q.map(|v| [v.x, v.y])).collect();
    Ok(json!({
        "shape": thin(&shape),
        "body1": thin(&body1),
        "frames": thin(&frames),
        "report": report,
    }))
}

/// Marked points and angles of the shape sphere.
#[wasm_bindgen]
pub fn atlas_json(m1: f64, m2: f64, m3: f64) -> String {
    respond(MassTriple::new(m1, m2, m3).and_then(|m| Ok(serde_json::to_value(atlas(&m)?).expect("atlas serializes"))))
}

/// The pinch motion from the maximal-area shape to a binary collision,
/// with its reconstructed rotation.
#[wasm_bindgen]
pub fn pinch_json(m1: f64, m2: f64, m3: f64, samples: usize) -> String {
    respond((|| {
        let m = MassTriple::new(m1, m2, m3)?;
        let traj = figure1_pinch(&m, 1.0, samples.max(8), 1.0)?;
        let mut payload = motion_payload(&traj)?;
        payload["alpha"] = json!(atlas(&m)?.alpha);
        Ok(payload)
    })())
}

/// A seeded random smooth motion with its reconstructed rotation.
#[wasm_bindgen]
pub fn random_motion_json(seed: u32, m1: f64, m2: f64, m3: f64, amplitude: f64, samples: usize) -> String {
    respond((|| {
        let m = MassTriple::new(m1, m2, m3)?;
        let params = RandomSmooth {
            seed: seed as u64,
            n: samples.max(8),
            amplitude,
            ..RandomSmooth::default()
        };
        motion_payload(&random_smooth(&m, &params)?)
    })())
}
