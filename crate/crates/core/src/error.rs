use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mass m{index} = {value}: masses must be positive and finite")]
    InvalidMass { index: usize, value: f64 },

    #[error("configuration centroid is off the origin by {offset:e} (relative), tolerance {tol:e}")]
    NotCentered { offset: f64, tol: f64 },

    #[error("triple collision: moment of inertia vanishes{}", at_sample(.sample))]
    TripleCollision { sample: Option<usize> },

    #[error("chart {requested} is undefined at this shape point; use {other}")]
    InvalidChart {
        requested: &'static str,
        other: &'static str,
    },

    #[error("{what} is too close to the origin at the {which} endpoint (|v| = {norm:e})")]
    EndpointAtOrigin {
        what: &'static str,
        which: &'static str,
        norm: f64,
    },

    #[error("sampling too coarse: angle step of {step:.3} rad at sample {index} exceeds pi/2; resample more densely")]
    CoarseSampling { index: usize, step: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("vectors e and n are (anti)parallel (|e x n| = {cross:e}); use the aligned branch")]
    DegenerateBasis { cross: f64 },

    #[error("normal n = -e cannot be mapped to e by a unique minimizing rotation")]
    AntipodalNormal,

    #[error("orientation undefined: every sample is collinear and no normals were supplied")]
    PersistentCollinearity,

    #[error("normal rate vanishes at sample {index} where n = -e")]
    StationaryAntipodalNormal { index: usize },

    #[error("trajectory needs at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("shape curve start does not match the initial configuration (distance {distance:e})")]
    ProjectionMismatch { distance: f64 },

    #[error("{0}")]
    InvalidParameter(String),

    #[error("{}{message}", line_prefix(.line))]
    Parse { line: u64, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

fn line_prefix(line: &u64) -> String {
    if *line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

fn at_sample(sample: &Option<usize>) -> String {
    match sample {
        Some(k) => format!(" at sample {k}"),
        None => String::new(),
    }
}

impl Error {
    /// True for errors raised while reading input data.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
