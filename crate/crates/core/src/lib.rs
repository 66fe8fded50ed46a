//! Lagrange finite elements on triangles for the Poisson problem driven by a
//! point source.
//!
//! The crate is organised bottom-up:
//!
//! - [`meshkit`]: triangular meshes, generators, point location and subdomain checks
//! - [`femcore`]: `P_k` Lagrange spaces, quadrature, assembly and the CG solve
//! - [`singular_rhs`]: load vectors for the Dirac source and its ball regularisation
//! - [`exact`]: closed-form reference solutions
//! - [`norms`]: error measurement restricted to subdomains
//! - [`study`]: refinement studies, order fitting and the one-dimensional model

pub mod error;
pub mod exact;
pub mod femcore;
pub mod meshkit;
pub mod norms;
pub mod singular_rhs;
pub mod study;

pub use error::{Error, Result};
pub use meshkit::{Mesh, Point2};
