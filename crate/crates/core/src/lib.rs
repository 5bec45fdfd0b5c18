//! Numerical kernels for auditing eigenvector delocalization of random matrices.
//!
//! The crate is organized by subsystem:
//!
//! - [`ensembles`]: entry laws, matrix ensembles and seeded sampling.
//! - [`linalg`]: singular values, eigenpairs and the matrix-identity audits.
//! - [`deloc`]: no-gaps mass profiles, localization events and ensemble surveys.
//! - [`smallball`]: Lévy concentration, characteristic functions, Fourier-inversion
//!   densities and the small-ball / tensorization audits.
//! - [`graphs`]: G(n,p) sampling, normalized Laplacians, nodal domains and the
//!   Braess fraction of the spectral gap.
//!
//! Every random quantity is a pure function of a [`rng::Seed`]; parallel loops
//! reduce in trial order so results do not depend on the thread count.

pub mod deloc;
pub mod ensembles;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod smallball;
pub mod tolerances;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tolerances::Tolerances;
