//! Strand-level 3D hair geometry: hybrid growth fields, two-stage parallel
//! strand growing, orientation maps, calibrated orbit rendering and
//! reconstruction metrics, with a procedural ground-truth generator.

pub mod camera;
pub mod cli;
pub mod depth;
pub mod error;
pub mod field;
pub mod geometry;
pub mod growth;
pub mod image2;
pub mod metrics;
pub mod orientation;
pub mod strand;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{Aabb, Vec3};
