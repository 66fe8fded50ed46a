use serde::{Deserialize, Serialize};

use super::{barycentric, segment_distance, Mesh, Point2, Rectangle};
use crate::error::{Error, Result};

/// Absolute slack on membership tests so vertices placed on a circle or a
/// rectangle side count as members.
const MEMBER_TOL: f64 = 1e-12;

/// Region used as `Ω0` (measurement) or `Ω1` (separation envelope).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubdomainSpec {
    /// `r_inner < |x - center| < r_outer`.
    Annulus {
        center: Point2,
        r_inner: f64,
        r_outer: f64,
    },
    /// Everything farther than `radius` from `center`.
    ExclusionBall { center: Point2, radius: f64 },
    Rectangle { bounds: Rectangle },
}

impl SubdomainSpec {
    pub fn annulus(center: Point2, r_inner: f64, r_outer: f64) -> Self {
        SubdomainSpec::Annulus {
            center,
            r_inner,
            r_outer,
        }
    }

    pub fn exclusion_ball(center: Point2, radius: f64) -> Self {
        SubdomainSpec::ExclusionBall { center, radius }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SubdomainSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => center.is_finite() && r_inner >= 0.0 && r_inner < r_outer,
            SubdomainSpec::ExclusionBall { center, radius } => {
                center.is_finite() && radius >= 0.0 && radius.is_finite()
            }
            SubdomainSpec::Rectangle { bounds } => {
                bounds.x_min < bounds.x_max && bounds.y_min < bounds.y_max
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("malformed subdomain {self:?}")))
        }
    }

    /// Closed membership test (with a small absolute slack).
    pub fn contains(&self, p: Point2) -> bool {
        match *self {
            SubdomainSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let r = p.dist(center);
                r >= r_inner - MEMBER_TOL && r <= r_outer + MEMBER_TOL
            }
            SubdomainSpec::ExclusionBall { center, radius } => {
                p.dist(center) >= radius - MEMBER_TOL
            }
            SubdomainSpec::Rectangle { bounds } => {
                p.x >= bounds.x_min - MEMBER_TOL
                    && p.x <= bounds.x_max + MEMBER_TOL
                    && p.y >= bounds.y_min - MEMBER_TOL
                    && p.y <= bounds.y_max + MEMBER_TOL
            }
        }
    }

    /// Whether the closed triangle intersects the open region.
    pub fn meets_triangle(&self, corners: [Point2; 3]) -> bool {
        match *self {
            SubdomainSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let d_max = corners.iter().map(|c| c.dist(center)).fold(0.0, f64::max);
                triangle_distance(corners, center) < r_outer && d_max > r_inner
            }
            SubdomainSpec::ExclusionBall { center, radius } => {
                corners.iter().any(|c| c.dist(center) > radius)
            }
            SubdomainSpec::Rectangle { bounds } => triangle_meets_open_rect(corners, bounds),
        }
    }
}

/// Element inclusion rule for measurement: all three vertices and the
/// barycenter belong to the region.
pub fn element_inside(mesh: &Mesh, t: usize, region: &SubdomainSpec) -> bool {
    mesh.corners(t).iter().all(|&p| region.contains(p)) && region.contains(mesh.barycenter(t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Separation {
    pub ok: bool,
    /// Elements meeting `Ω0` with a vertex outside `Ω1`.
    pub offending: Vec<usize>,
}

/// Checks that the union of closed elements meeting `omega0` stays inside
/// `omega1`.
pub fn check_separation(mesh: &Mesh, omega0: &SubdomainSpec, omega1: &SubdomainSpec) -> Separation {
    let offending: Vec<usize> = (0..mesh.num_triangles())
        .filter(|&t| {
            let corners = mesh.corners(t);
            omega0.meets_triangle(corners) && !corners.iter().all(|&p| omega1.contains(p))
        })
        .collect();
    Separation {
        ok: offending.is_empty(),
        offending,
    }
}

fn triangle_distance(corners: [Point2; 3], p: Point2) -> f64 {
    if barycentric(corners, p).iter().all(|&l| l >= 0.0) {
        return 0.0;
    }
    (0..3)
        .map(|i| segment_distance(corners[i], corners[(i + 1) % 3], p))
        .fold(f64::INFINITY, f64::min)
}

fn triangle_meets_open_rect(corners: [Point2; 3], r: Rectangle) -> bool {
    let rect = [
        Point2::new(r.x_min, r.y_min),
        Point2::new(r.x_max, r.y_min),
        Point2::new(r.x_max, r.y_max),
        Point2::new(r.x_min, r.y_max),
    ];
    let mut axes = vec![Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
    for i in 0..3 {
        let e = corners[(i + 1) % 3] - corners[i];
        axes.push(Point2::new(-e.y, e.x));
    }
    let project = |pts: &[Point2], axis: Point2| {
        pts.iter()
            .map(|p| p.dot(axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    axes.into_iter().all(|axis| {
        let (t_lo, t_hi) = project(&corners, axis);
        let (r_lo, r_hi) = project(&rect, axis);
        t_hi > r_lo && r_hi > t_lo
    })
}
