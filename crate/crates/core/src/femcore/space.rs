use std::collections::HashMap;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use super::basis::{LagrangeBasis, EDGES};
use crate::error::{Error, Result};
use crate::meshkit::{Mesh, Point2};

/// Affine map from the reference triangle onto one element.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub corners: [Point2; 3],
    pub area: f64,
    /// Gradients of the barycentric coordinates (constant on the element).
    pub grad_lambda: [Point2; 3],
}

impl ElementGeometry {
    pub fn new(corners: [Point2; 3]) -> Self {
        let [a, b, c] = corners;
        let two_area = (b - a).cross(c - a);
        let g = |p: Point2, q: Point2| Point2::new((p.y - q.y) / two_area, (q.x - p.x) / two_area);
        ElementGeometry {
            corners,
            area: 0.5 * two_area,
            grad_lambda: [g(b, c), g(c, a), g(a, b)],
        }
    }

    pub fn point(&self, lambda: &[f64; 3]) -> Point2 {
        let [a, b, c] = self.corners;
        Point2::new(
            lambda[0] * a.x + lambda[1] * b.x + lambda[2] * c.x,
            lambda[0] * a.y + lambda[1] * b.y + lambda[2] * c.y,
        )
    }

    /// Physical gradient from barycentric derivatives.
    pub fn gradient(&self, d_lambda: &[f64; 3]) -> Point2 {
        let g = &self.grad_lambda;
        Point2::new(
            d_lambda[0] * g[0].x + d_lambda[1] * g[1].x + d_lambda[2] * g[2].x,
            d_lambda[0] * g[0].y + d_lambda[1] * g[1].y + d_lambda[2] * g[2].y,
        )
    }
}

/// Continuous `P_k` Lagrange space on a mesh.
///
/// Global numbering: vertices first, then `k-1` dofs per edge (edges in
/// order of first appearance, dofs running from the lower to the higher
/// vertex index), then interior dofs element by element.
#[derive(Debug, Clone)]
pub struct FeSpace<'m> {
    mesh: &'m Mesh,
    basis: LagrangeBasis,
    dof_coords: Vec<Point2>,
    element_dofs: Vec<usize>,
    boundary_dofs: Vec<usize>,
    is_boundary: Vec<bool>,
    num_edges: usize,
}

impl<'m> FeSpace<'m> {
    pub fn new(mesh: &'m Mesh, order: usize) -> Result<Self> {
        let basis = LagrangeBasis::new(order)?;
        let k = order;
        let nv = mesh.num_vertices();
        let per_elem = basis.len();

        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_count: Vec<u8> = Vec::new();
        for tri in mesh.triangles() {
            for (a, b) in EDGES {
                let key = ordered(tri[a], tri[b]);
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edge_count.push(0);
                    edge_count.len() - 1
                });
                edge_count[id] += 1;
            }
        }
        let num_edges = edge_count.len();
        let interior_per_elem = basis.num_interior();
        let ndofs = nv + (k - 1) * num_edges + interior_per_elem * mesh.num_triangles();

        let mut dof_coords = vec![Point2::ORIGIN; ndofs];
        dof_coords[..nv].copy_from_slice(mesh.vertices());
        let mut element_dofs = Vec::with_capacity(per_elem * mesh.num_triangles());
        let mut is_boundary = vec![false; ndofs];

        for (t, tri) in mesh.triangles().iter().enumerate() {
            let geo = ElementGeometry::new(mesh.corners(t));
            let start = element_dofs.len();
            element_dofs.extend_from_slice(tri);
            for (a, b) in EDGES {
                let (lo, hi) = ordered(tri[a], tri[b]);
                let id = edge_ids[&(lo, hi)];
                let base = nv + (k - 1) * id;
                let forward = tri[a] == lo;
                for m in 1..k {
                    let slot = if forward { m - 1 } else { k - 1 - m };
                    element_dofs.push(base + slot);
                }
                if edge_count[id] == 1 {
                    is_boundary[tri[a]] = true;
                    is_boundary[tri[b]] = true;
                    for s in 0..k - 1 {
                        is_boundary[base + s] = true;
                    }
                }
            }
            let interior_base = nv + (k - 1) * num_edges + interior_per_elem * t;
            element_dofs.extend(interior_base..interior_base + interior_per_elem);
            for (i, &dof) in element_dofs[start..].iter().enumerate() {
                dof_coords[dof] = geo.point(&basis.node_barycentric(i));
            }
        }
        let boundary_dofs = (0..ndofs).filter(|&i| is_boundary[i]).collect();
        Ok(FeSpace {
            mesh,
            basis,
            dof_coords,
            element_dofs,
            boundary_dofs,
            is_boundary,
            num_edges,
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn dofs_per_element(&self) -> usize {
        self.basis.len()
    }

    pub fn dof_coords(&self) -> &[Point2] {
        &self.dof_coords
    }

    pub fn element_dofs(&self, t: usize) -> &[usize] {
        let n = self.basis.len();
        &self.element_dofs[t * n..(t + 1) * n]
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.is_boundary[dof]
    }

    pub fn geometry(&self, t: usize) -> ElementGeometry {
        ElementGeometry::new(self.mesh.corners(t))
    }

    /// Values of the element's basis functions at a point given in
    /// barycentric coordinates.
    pub fn basis_values(&self, lambda: [f64; 3]) -> Vec<f64> {
        let mut v = vec![0.0; self.basis.len()];
        self.basis.values(lambda, &mut v);
        v
    }

    /// Value and gradient of a discrete function at `lambda` in element `t`.
    pub fn eval_in(&self, u: &[f64], t: usize, lambda: [f64; 3]) -> (f64, Point2) {
        let n = self.basis.len();
        let mut v = vec![0.0; n];
        let mut d = vec![[0.0; 3]; n];
        self.basis.values(lambda, &mut v);
        self.basis.lambda_derivatives(lambda, &mut d);
        let geo = self.geometry(t);
        let dofs = self.element_dofs(t);
        let mut value = 0.0;
        let mut dl = [0.0; 3];
        for i in 0..n {
            let c = u[dofs[i]];
            value += c * v[i];
            for (acc, di) in dl.iter_mut().zip(&d[i]) {
                *acc += c * di;
            }
        }
        (value, geo.gradient(&dl))
    }

    /// Value and gradient of a discrete function at a physical point.
    pub fn eval(&self, u: &[f64], p: Point2) -> Result<(f64, Point2)> {
        let t = self.mesh.locate(p)?;
        Ok(self.eval_in(u, t, self.mesh.barycentric(t, p)))
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(&self, f: impl Fn(Point2) -> f64) -> Result<DofVector> {
        let mut values = Vec::with_capacity(self.num_dofs());
        for (index, &p) in self.dof_coords.iter().enumerate() {
            let v = f(p);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index });
            }
            values.push(v);
        }
        Ok(DofVector(values))
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Coefficients of a finite element function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DofVector(pub Vec<f64>);

impl DofVector {
    pub fn zeros(n: usize) -> Self {
        DofVector(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for DofVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for DofVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}
