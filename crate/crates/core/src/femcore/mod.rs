//! `P_k` Lagrange spaces, quadrature, stiffness assembly, Dirichlet
//! elimination and the SPD solve.

mod assembly;
pub mod basis;
mod dirichlet;
pub mod quadrature;
mod space;
mod sparse;

pub use assembly::{assemble_load, assemble_stiffness, local_stiffness};
pub use dirichlet::{apply_dirichlet, ReducedSystem};
pub use quadrature::QuadratureRule;
pub use space::{DofVector, ElementGeometry, FeSpace};
pub use sparse::{solve_spd, CgOutcome, SparseSpd, DEFAULT_REL_TOL};

use crate::error::Result;
use crate::meshkit::Point2;

/// Solves `A u = b` with `u = g` on boundary dofs.
pub fn solve_with_boundary(
    space: &FeSpace,
    stiffness: &SparseSpd,
    load: &[f64],
    g: impl Fn(Point2) -> f64,
    rel_tol: f64,
) -> Result<(DofVector, CgOutcome)> {
    let reduced = apply_dirichlet(space, stiffness, load, g);
    let outcome = solve_spd(&reduced.matrix, &reduced.rhs, rel_tol)?;
    Ok((reduced.expand(&outcome.x), outcome))
}
