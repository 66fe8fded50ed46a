//! Triangular meshes: data model, generators, point location and the
//! subdomain admissibility checks used by local error measurements.

mod generators;
pub mod io;
mod subdomain;

pub use generators::{gen_disk, gen_square, Rectangle};
pub use subdomain::{check_separation, element_inside, Separation, SubdomainSpec};

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on barycentric coordinates when deciding containment.
pub const BARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: Point2) -> f64 {
        (*self - other).norm()
    }

    pub fn dot(&self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

/// Twice the signed area of `(a, b, c)`; positive for counter-clockwise order.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub marker: i32,
}

/// Conforming triangulation with counter-clockwise elements.
///
/// Immutable once built. Boundary edges are the edges used by exactly one
/// triangle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawMesh", into = "RawMesh")]
pub struct Mesh {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    h_max: f64,
    h_min: f64,
}

#[derive(Serialize, Deserialize)]
struct RawMesh {
    vertices: Vec<Point2>,
    triangles: Vec<[usize; 3]>,
}

impl TryFrom<RawMesh> for Mesh {
    type Error = Error;
    fn try_from(raw: RawMesh) -> Result<Mesh> {
        Mesh::new(raw.vertices, raw.triangles)
    }
}

impl From<Mesh> for RawMesh {
    fn from(mesh: Mesh) -> RawMesh {
        RawMesh {
            vertices: mesh.vertices,
            triangles: mesh.triangles,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshMetrics {
    pub h_max: f64,
    pub h_min: f64,
    /// Smallest interior angle, in degrees.
    pub min_angle: f64,
    pub elements: usize,
}

impl Mesh {
    /// Builds a mesh, checking orientation and conformity. Boundary edges get
    /// marker 1.
    pub fn new(vertices: Vec<Point2>, triangles: Vec<[usize; 3]>) -> Result<Mesh> {
        Self::with_markers(vertices, triangles, |_, _| 1)
    }

    pub(crate) fn with_markers(
        vertices: Vec<Point2>,
        triangles: Vec<[usize; 3]>,
        marker: impl Fn(usize, usize) -> i32,
    ) -> Result<Mesh> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
        }
        let mut edge_use: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        let mut edge_order = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            if orient(a, b, c) <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} has non-positive signed area"
                )));
            }
            for (u, v) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                let key = (u.min(v), u.max(v));
                let entry = edge_use.entry(key).or_insert_with(|| {
                    edge_order.push(key);
                    (u, v, 0)
                });
                entry.2 += 1;
                if entry.2 == 2 && (entry.0, entry.1) != (v, u) {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({u}, {v}) is traversed twice in the same direction"
                    )));
                }
                if entry.2 > 2 {
                    return Err(Error::InvalidMesh(format!(
                        "edge ({u}, {v}) is shared by more than two triangles"
                    )));
                }
            }
        }
        let boundary_edges = edge_order
            .iter()
            .filter_map(|key| {
                let (a, b, count) = edge_use[key];
                (count == 1).then(|| BoundaryEdge {
                    a,
                    b,
                    marker: marker(a, b),
                })
            })
            .collect();

        let mut h_max = 0.0f64;
        let mut h_min = f64::INFINITY;
        for tri in &triangles {
            let d = diameter(tri.map(|v| vertices[v]));
            h_max = h_max.max(d);
            h_min = h_min.min(d);
        }
        Ok(Mesh {
            vertices,
            triangles,
            boundary_edges,
            h_max,
            h_min,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point2; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * orient(a, b, c)
    }

    pub fn barycenter(&self, t: usize) -> Point2 {
        let [a, b, c] = self.corners(t);
        Point2::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    /// Barycentric coordinates of `p` with respect to element `t`.
    pub fn barycentric(&self, t: usize, p: Point2) -> [f64; 3] {
        barycentric(self.corners(t), p)
    }

    /// Lowest-indexed element whose closed triangle contains `p`.
    pub fn locate(&self, p: Point2) -> Result<usize> {
        (0..self.triangles.len())
            .find(|&t| self.barycentric(t, p).iter().all(|&l| l >= -BARY_TOL))
            .ok_or(Error::PointOutsideMesh { x: p.x, y: p.y })
    }

    pub fn metrics(&self) -> MeshMetrics {
        let min_angle = (0..self.triangles.len())
            .map(|t| min_angle(self.corners(t)))
            .fold(f64::INFINITY, f64::min);
        MeshMetrics {
            h_max: self.h_max,
            h_min: self.h_min,
            min_angle,
            elements: self.triangles.len(),
        }
    }

    /// Same connectivity with every vertex moved by `f`.
    pub fn map_vertices(&self, f: impl Fn(Point2) -> Point2) -> Result<Mesh> {
        Mesh::new(
            self.vertices.iter().map(|&p| f(p)).collect(),
            self.triangles.clone(),
        )
    }
}

pub fn barycentric([a, b, c]: [Point2; 3], p: Point2) -> [f64; 3] {
    let area = orient(a, b, c);
    [
        orient(p, b, c) / area,
        orient(a, p, c) / area,
        orient(a, b, p) / area,
    ]
}

fn diameter([a, b, c]: [Point2; 3]) -> f64 {
    a.dist(b).max(b.dist(c)).max(c.dist(a))
}

fn min_angle(corners: [Point2; 3]) -> f64 {
    (0..3)
        .map(|i| {
            let o = corners[i];
            let u = corners[(i + 1) % 3] - o;
            let v = corners[(i + 2) % 3] - o;
            u.cross(v).abs().atan2(u.dot(v)).to_degrees()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance from an interior point to the boundary of a triangle.
pub fn dist_to_boundary(corners: [Point2; 3], p: Point2) -> f64 {
    (0..3)
        .map(|i| segment_distance(corners[i], corners[(i + 1) % 3], p))
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn segment_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.dot(ab)).clamp(0.0, 1.0);
    p.dist(a + t * ab)
}
