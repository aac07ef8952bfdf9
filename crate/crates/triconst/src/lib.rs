//! Interpolation error constants on triangles: closed-form bounds, discrete
//! upper bounds via exactly assembled eigenvalue problems, verified
//! positive-definiteness certificates and exact identity checks.

pub mod cli;
pub mod eigen;
pub mod elements;
pub mod error;
pub mod geometry;
pub mod identities;
pub mod interval;
pub mod linalg;
pub mod mesh;
pub mod symbolic;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
