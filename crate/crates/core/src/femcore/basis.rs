//! Equispaced Lagrange basis on the reference triangle, written in
//! barycentric coordinates.

use crate::error::{Error, Result};

/// Local node ordering: the three vertices, then `k-1` nodes on each edge
/// `(v0,v1)`, `(v1,v2)`, `(v2,v0)` running from the first endpoint to the
/// second, then the interior nodes.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    order: usize,
    /// Multi-index `α` with `|α| = k`; the node sits at `λ = α / k`.
    nodes: Vec<[usize; 3]>,
}

pub const EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

impl LagrangeBasis {
    pub fn new(order: usize) -> Result<Self> {
        if !(1..=4).contains(&order) {
            return Err(Error::UnsupportedOrder(order));
        }
        let k = order;
        let mut nodes = Vec::with_capacity((k + 1) * (k + 2) / 2);
        for v in 0..3 {
            let mut a = [0; 3];
            a[v] = k;
            nodes.push(a);
        }
        for (from, to) in EDGES {
            for m in 1..k {
                let mut a = [0; 3];
                a[from] = k - m;
                a[to] = m;
                nodes.push(a);
            }
        }
        for j in 1..k {
            for l in 1..k - j {
                nodes.push([k - j - l, j, l]);
            }
        }
        Ok(LagrangeBasis { order, nodes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_interior(&self) -> usize {
        let k = self.order;
        (k - 1) * (k.saturating_sub(2)) / 2
    }

    /// Barycentric coordinates of local node `i`.
    pub fn node_barycentric(&self, i: usize) -> [f64; 3] {
        self.nodes[i].map(|a| a as f64 / self.order as f64)
    }

    pub fn values(&self, lambda: [f64; 3], out: &mut [f64]) {
        for (o, alpha) in out.iter_mut().zip(&self.nodes) {
            *o = (0..3).map(|c| self.factor(alpha[c], lambda[c]).0).product();
        }
    }

    /// Derivatives with respect to each barycentric coordinate.
    pub fn lambda_derivatives(&self, lambda: [f64; 3], out: &mut [[f64; 3]]) {
        for (o, alpha) in out.iter_mut().zip(&self.nodes) {
            let f: [(f64, f64); 3] = std::array::from_fn(|c| self.factor(alpha[c], lambda[c]));
            *o = [
                f[0].1 * f[1].0 * f[2].0,
                f[0].0 * f[1].1 * f[2].0,
                f[0].0 * f[1].0 * f[2].1,
            ];
        }
    }

    /// `P_a(λ) = Π_{m<a} (kλ - m)/(m + 1)` and its derivative.
    fn factor(&self, a: usize, lambda: f64) -> (f64, f64) {
        let k = self.order as f64;
        let mut value = 1.0;
        let mut deriv = 0.0;
        for m in 0..a {
            let scale = 1.0 / (m as f64 + 1.0);
            let term = (k * lambda - m as f64) * scale;
            deriv = deriv * term + value * k * scale;
            value *= term;
        }
        (value, deriv)
    }
}
