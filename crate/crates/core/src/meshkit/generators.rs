use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{orient, Mesh, Point2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rectangle {
    pub const UNIT: Rectangle = Rectangle {
        x_min: 0.0,
        x_max: 1.0,
        y_min: 0.0,
        y_max: 1.0,
    };

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// Structured triangulation of a rectangle: `n × n` cells, each split along
/// its SW–NE diagonal, giving `2n²` triangles and `(n+1)²` vertices.
pub fn gen_square(n: usize, bounds: Rectangle) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("square mesh needs n >= 1".into()));
    }
    let width = bounds.x_max - bounds.x_min;
    let height = bounds.y_max - bounds.y_min;
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::DegenerateBounds(format!(
            "rectangle {width} x {height}"
        )));
    }
    let coord = |i: usize, lo: f64, len: f64| {
        if i == n {
            lo + len
        } else {
            lo + len * i as f64 / n as f64
        }
    };
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point2::new(
                coord(i, bounds.x_min, width),
                coord(j, bounds.y_min, height),
            ));
        }
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let sw = idx(i, j);
            let se = idx(i + 1, j);
            let ne = idx(i + 1, j + 1);
            let nw = idx(i, j + 1);
            triangles.push([sw, se, ne]);
            triangles.push([sw, ne, nw]);
        }
    }
    Mesh::new(vertices, triangles)
}

/// Concentric-ring triangulation of a disk.
///
/// Ring `j` (1-based) has radius `j·radius/rings` and `6j` equally spaced
/// vertices; the first ring is a fan around the center. Each of the six
/// sectors of the strip between rings `j-1` and `j` holds `2j-1` triangles,
/// so the mesh has `1 + 3·rings·(rings+1)` vertices and `6·rings²` triangles.
pub fn gen_disk(rings: usize, radius: f64, center: Point2) -> Result<Mesh> {
    if rings == 0 {
        return Err(Error::InvalidArgument("disk mesh needs rings >= 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
        return Err(Error::DegenerateBounds(format!("disk radius {radius}")));
    }
    let ring_start = |j: usize| if j == 0 { 0 } else { 1 + 3 * j * (j - 1) };
    let ring_len = |j: usize| if j == 0 { 1 } else { 6 * j };
    let angle = |j: usize, m: usize| 2.0 * PI * m as f64 / (6 * j) as f64;

    let mut vertices = vec![center];
    for j in 1..=rings {
        let r = if j == rings {
            radius
        } else {
            radius * j as f64 / rings as f64
        };
        for m in 0..6 * j {
            let (s, c) = angle(j, m).sin_cos();
            vertices.push(Point2::new(center.x + r * c, center.y + r * s));
        }
    }
    let vid = |j: usize, m: usize| ring_start(j) + m % ring_len(j);

    let mut triangles = Vec::with_capacity(6 * rings * rings);
    let mut push = |tri: [usize; 3], vertices: &[Point2]| {
        let [a, b, c] = tri.map(|v| vertices[v]);
        if orient(a, b, c) > 0.0 {
            triangles.push(tri);
        } else {
            triangles.push([tri[0], tri[2], tri[1]]);
        }
    };
    for m in 0..6 {
        push([0, vid(1, m), vid(1, m + 1)], &vertices);
    }
    for j in 2..=rings {
        for s in 0..6 {
            // inner: j points, outer: j+1 points, both sweeping the sector
            let inner: Vec<(usize, f64)> = (0..j)
                .map(|t| {
                    let m = s * (j - 1) + t;
                    (vid(j - 1, m), angle(j - 1, m))
                })
                .collect();
            let outer: Vec<(usize, f64)> = (0..=j)
                .map(|t| {
                    let m = s * j + t;
                    (vid(j, m), angle(j, m))
                })
                .collect();
            let (mut p, mut q) = (0, 0);
            while p + 1 < inner.len() || q + 1 < outer.len() {
                let advance_outer = if p + 1 == inner.len() {
                    true
                } else if q + 1 == outer.len() {
                    false
                } else {
                    outer[q + 1].1 <= inner[p + 1].1
                };
                if advance_outer {
                    push([inner[p].0, outer[q].0, outer[q + 1].0], &vertices);
                    q += 1;
                } else {
                    push([inner[p].0, outer[q].0, inner[p + 1].0], &vertices);
                    p += 1;
                }
            }
        }
    }
    Mesh::new(vertices, triangles)
}
