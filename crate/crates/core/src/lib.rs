//! Finite-dimensional quantum random walks built from Hochschild data.
//!
//! The pipeline runs from a matrix [`star_algebra::StarAlgebra`] and a
//! [`gns::LindbladGenerator`] through the GNS bimodule and the four-corner
//! module [`el_module::ElModule`], then solves the coefficient recursion in
//! [`coefficients`] with the cochain machinery of [`hochschild`], and finally
//! simulates the walk on a toy Fock space in [`toy_fock`].

pub mod bimodule;
pub mod coeff_file;
pub mod coefficients;
pub mod el_module;
pub mod exec;
pub mod gns;
pub mod hochschild;
pub mod linalg;
pub mod models;
pub mod star_algebra;
pub mod toy_fock;

pub use linalg::{c64, CMat};
