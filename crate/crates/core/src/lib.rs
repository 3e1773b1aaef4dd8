//! Complex PT-symmetric supersymmetric partners of the infinite square well.
//!
//! The crate builds the complexified tangent/cotangent superpotential
//! families, their partner potentials and ground states in closed form, and
//! checks the claimed symmetries, factorizations and real spectra numerically.

pub mod closed_form;
pub mod domain;
pub mod error;
pub mod figures;
pub mod jet;
pub mod numerics;
pub mod operators;
pub mod susy;
pub mod symmetry;

pub use closed_form::{ClosedFormFunction, PoleSet};
pub use domain::{parity_decompose, quadrature, reflect, sample, ComplexGridFunction, Grid, GridMap, ParityParts};
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Library version, embedded in generated reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
