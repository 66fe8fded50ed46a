use rayon::prelude::*;

use super::{FeSpace, QuadratureRule, SparseSpd};
use crate::meshkit::Point2;

/// Element stiffness matrix `∫_T ∇φ_i·∇φ_j`, row-major.
pub fn local_stiffness(space: &FeSpace, t: usize, rule: &QuadratureRule) -> Vec<f64> {
    let basis = space.basis();
    let n = basis.len();
    let geo = space.geometry(t);
    let mut d = vec![[0.0; 3]; n];
    let mut grads = vec![Point2::ORIGIN; n];
    let mut local = vec![0.0; n * n];
    for (lam, w) in rule.iter() {
        basis.lambda_derivatives(*lam, &mut d);
        for (g, di) in grads.iter_mut().zip(&d) {
            *g = geo.gradient(di);
        }
        let scale = w * geo.area;
        for i in 0..n {
            for j in i..n {
                local[i * n + j] += scale * grads[i].dot(grads[j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            local[i * n + j] = local[j * n + i];
        }
    }
    local
}

/// Global stiffness matrix. Element matrices are computed in parallel and
/// accumulated in element order, so the result does not depend on the
/// thread count.
pub fn assemble_stiffness(space: &FeSpace) -> SparseSpd {
    let rule = QuadratureRule::for_stiffness(space.order());
    let n_elem = space.mesh().num_triangles();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); space.num_dofs()];
    for t in 0..n_elem {
        let dofs = space.element_dofs(t);
        for &i in dofs {
            rows[i].extend_from_slice(dofs);
        }
    }
    let mut a = SparseSpd::from_pattern(rows);
    let locals: Vec<Vec<f64>> = (0..n_elem)
        .into_par_iter()
        .map(|t| local_stiffness(space, t, &rule))
        .collect();
    let n = space.dofs_per_element();
    for (t, local) in locals.iter().enumerate() {
        let dofs = space.element_dofs(t);
        for (li, &gi) in dofs.iter().enumerate() {
            for (lj, &gj) in dofs.iter().enumerate() {
                a.add(gi, gj, local[li * n + lj]);
            }
        }
    }
    a
}

/// Load vector `∫ f φ_i` with the error-integration rule.
pub fn assemble_load(space: &FeSpace, f: impl Fn(Point2) -> f64 + Sync) -> Vec<f64> {
    let rule = QuadratureRule::for_error(space.order());
    let n = space.dofs_per_element();
    let n_elem = space.mesh().num_triangles();
    let locals: Vec<Vec<f64>> = (0..n_elem)
        .into_par_iter()
        .map(|t| {
            let geo = space.geometry(t);
            let mut v = vec![0.0; n];
            let mut local = vec![0.0; n];
            for (lam, w) in rule.iter() {
                space.basis().values(*lam, &mut v);
                let fw = f(geo.point(lam)) * w * geo.area;
                for (l, vi) in local.iter_mut().zip(&v) {
                    *l += fw * vi;
                }
            }
            local
        })
        .collect();
    let mut b = vec![0.0; space.num_dofs()];
    for (t, local) in locals.iter().enumerate() {
        for (&g, v) in space.element_dofs(t).iter().zip(local) {
            b[g] += v;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshkit::{gen_disk, gen_square, Mesh, Rectangle};

    #[test]
    fn unit_right_triangle_p1() {
        let mesh = Mesh::new(
            vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let space = FeSpace::new(&mesh, 1).unwrap();
        let a = assemble_stiffness(&space);
        let expected = [[1.0, -0.5, -0.5], [-0.5, 0.5, 0.0], [-0.5, 0.0, 0.5]];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((a.get(i, j) - e).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn symmetric_with_constant_kernel() {
        let mesh = gen_disk(3, 1.0, Point2::new(0.1, 0.2)).unwrap();
        for k in 1..=4 {
            let a = assemble_stiffness(&FeSpace::new(&mesh, k).unwrap());
            assert!(a.asymmetry() < 1e-12, "k={k}");
            assert!(a.row_sums().iter().all(|s| s.abs() < 1e-12), "k={k}");
        }
    }

    #[test]
    fn scale_invariant() {
        let mesh = gen_square(3, Rectangle::UNIT).unwrap();
        let big = mesh.map_vertices(|p| 7.5 * p).unwrap();
        for k in 1..=4 {
            let a = assemble_stiffness(&FeSpace::new(&mesh, k).unwrap());
            let b = assemble_stiffness(&FeSpace::new(&big, k).unwrap());
            for i in 0..a.dim() {
                for (j, v) in a.row(i) {
                    assert!((v - b.get(i, j)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn energy_of_interpolated_quadratic() {
        // u = x² + y² has ∫|∇u|² = 8/3 on the unit square; exact for k ≥ 2
        let mesh = gen_square(4, Rectangle::UNIT).unwrap();
        for k in 2..=4 {
            let space = FeSpace::new(&mesh, k).unwrap();
            let u = space.interpolate(|p| p.x * p.x + p.y * p.y).unwrap();
            let au = assemble_stiffness(&space).mul_vec(&u);
            let energy: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
            assert!((energy - 8.0 / 3.0).abs() < 1e-12, "k={k}: {energy}");
        }
    }

    #[test]
    fn load_of_constant_is_mass() {
        let mesh = gen_disk(4, 1.0, Point2::ORIGIN).unwrap();
        let total_area: f64 = (0..mesh.num_triangles()).map(|t| mesh.area(t)).sum();
        for k in 1..=4 {
            let b = assemble_load(&FeSpace::new(&mesh, k).unwrap(), |_| 2.0);
            assert!((b.iter().sum::<f64>() - 2.0 * total_area).abs() < 1e-12);
        }
    }
}
