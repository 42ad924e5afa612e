//! Geometry of finite-dimensional real normed spaces: one-sided norm
//! derivatives, Birkhoff-James orthogonality, local ball-covering witnesses,
//! and certified ball-coverings of unit spheres and finite point sets.
//!
//! The core is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which is what the file formats and the CLI
//! use.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod covering;
pub mod derivatives;
pub mod error;
pub mod files;
pub mod linalg;
pub mod net;
pub mod orthogonality;
pub mod scalar;
pub mod search;
pub mod separation;
pub mod smoothapprox;
pub mod spaces;
pub mod vector;
pub mod witness;

pub use covering::{Ball, CoverageCertificate, Covering, TargetSet, UncoveredPoint};
pub use error::{Error, Result};
pub use net::{unit_sphere_net, NetOptions, SphereNet};
pub use scalar::{Scalar, Tolerances};
pub use spaces::{validate_space, Exponent, NormSpec, Space, ValidationReport};
pub use vector::{dual_pair, Functional, Vector};
pub use witness::{Witness, WitnessOutcome};

pub type Space64 = Space<f64>;
pub type Space32 = Space<f32>;
pub type Vector64 = Vector<f64>;
pub type Vector32 = Vector<f32>;
pub type Functional64 = Functional<f64>;
pub type Functional32 = Functional<f32>;
pub type SphereNet64 = SphereNet<f64>;
pub type Ball64 = Ball<f64>;
pub type Covering64 = Covering<f64>;
pub type TargetSet64 = TargetSet<f64>;
pub type Witness64 = Witness<f64>;
