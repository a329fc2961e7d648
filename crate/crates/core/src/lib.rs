//! Shape-sphere geometry for three-body configurations and reconstruction
//! of the overall rotation of planar and spatial motions from their shape
//! curves and angular momentum.

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod error;
pub mod generate;
pub mod io;
pub mod planar;
pub mod quadrature;
pub mod shape;
pub mod spatial;
pub mod sphere;
pub mod trajectory;
pub mod verify;

pub use error::{Error, Result};
pub use shape::{MassTriple, PlanarConfiguration, ShapePoint, SpatialConfiguration};
pub use trajectory::{Dim, Trajectory};
