use super::{DofVector, FeSpace, SparseSpd};
use crate::meshkit::Point2;

/// Interior system `A_II x_I = b_I - A_IB g_B` plus the data needed to lift
/// its solution back to a full coefficient vector.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: SparseSpd,
    pub rhs: Vec<f64>,
    /// Global dof index of each reduced unknown.
    pub interior: Vec<usize>,
    /// Full-length vector holding `g_B` on boundary dofs and zero elsewhere.
    pub lifting: Vec<f64>,
}

impl ReducedSystem {
    /// Scatters interior values into a full vector whose boundary entries are
    /// exactly the sampled boundary data.
    pub fn expand(&self, interior_values: &[f64]) -> DofVector {
        let mut full = self.lifting.clone();
        for (&g, &v) in self.interior.iter().zip(interior_values) {
            full[g] = v;
        }
        DofVector(full)
    }
}

/// Eliminates boundary dofs, imposing `g` sampled at their coordinates.
pub fn apply_dirichlet(
    space: &FeSpace,
    a: &SparseSpd,
    b: &[f64],
    g: impl Fn(Point2) -> f64,
) -> ReducedSystem {
    let n = space.num_dofs();
    let mut lifting = vec![0.0; n];
    for &d in space.boundary_dofs() {
        lifting[d] = g(space.dof_coords()[d]);
    }
    let interior: Vec<usize> = (0..n).filter(|&i| !space.is_boundary(i)).collect();
    let rhs = interior
        .iter()
        .map(|&i| {
            let coupling: f64 = a
                .row(i)
                .filter(|&(j, _)| space.is_boundary(j))
                .map(|(j, v)| v * lifting[j])
                .sum();
            b[i] - coupling
        })
        .collect();
    ReducedSystem {
        matrix: a.restrict(&interior),
        rhs,
        interior,
        lifting,
    }
}
