//! Spectral action of sub-Dirac operators on foliations with spin leaves.
//!
//! The crate computes Seeley-deWitt heat coefficients of `D_F²` from pointwise
//! curvature data two independent ways: by exact traces in the Clifford word
//! algebra ([`clifford`]) fed into the generic Gilkey and Branson-Gilkey
//! integrands, and by the specialized closed forms in [`heat`]. An explicit
//! matrix representation ([`oracle`]) checks every symbolic trace numerically,
//! and the flat torus ([`torus`]) gives an exactly solvable spectrum.

pub mod clifford;
pub mod commands;
pub mod curvature;
pub mod cutoff;
pub mod error;
pub mod heat;
pub mod internal;
pub mod oracle;
pub mod report;
pub mod scalar;
pub mod torus;
pub mod verify;

pub use clifford::{Dims, Element, Generator, GeneratorKind, Word};
pub use error::{Error, Result};
pub use scalar::Scalar;
