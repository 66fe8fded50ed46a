//! Load vectors for a point source and for its uniform-ball regularisation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::femcore::quadrature::gauss_legendre_unit;
use crate::femcore::{DofVector, FeSpace};
use crate::meshkit::{barycentric, dist_to_boundary, Mesh, Point2, BARY_TOL};

/// Radial Gauss points of the ball rule.
pub const BALL_RADIAL: usize = 8;
/// Angular trapezoid points of the ball rule.
pub const BALL_ANGULAR: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    Dirac,
    Ball,
}

/// A point source or its ball regularisation, bound to a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub x0: Point2,
    /// Ball radius; zero for a point source.
    pub epsilon: f64,
    /// Element returned by `locate(x0)`.
    pub t0: usize,
    /// Whether the closed ball lies inside the closed triangle `t0`.
    pub contained: bool,
}

impl SourceSpec {
    pub fn dirac(mesh: &Mesh, x0: Point2) -> Result<SourceSpec> {
        let t0 = mesh.locate(x0)?;
        Ok(SourceSpec {
            kind: SourceKind::Dirac,
            x0,
            epsilon: 0.0,
            t0,
            contained: true,
        })
    }

    pub fn ball(mesh: &Mesh, x0: Point2, epsilon: f64) -> Result<SourceSpec> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {epsilon}")));
        }
        let t0 = mesh.locate(x0)?;
        let contained = dist_to_boundary(mesh.corners(t0), x0) >= epsilon;
        Ok(SourceSpec {
            kind: SourceKind::Ball,
            x0,
            epsilon,
            t0,
            contained,
        })
    }

    /// Ball with the radius from [`choose_epsilon`].
    pub fn auto_ball(mesh: &Mesh, x0: Point2) -> Result<SourceSpec> {
        Self::ball(mesh, x0, choose_epsilon(mesh, x0)?)
    }

    pub fn assemble(&self, space: &FeSpace) -> Result<DofVector> {
        match self.kind {
            SourceKind::Dirac => assemble_dirac_rhs(space, self.x0),
            SourceKind::Ball => assemble_ball_rhs(space, self.x0, self.epsilon),
        }
    }
}

/// `b_i = φ_i(x0)`, supported on the dofs of `locate(x0)`.
pub fn assemble_dirac_rhs(space: &FeSpace, x0: Point2) -> Result<DofVector> {
    let mesh = space.mesh();
    let t = mesh.locate(x0)?;
    let values = space.basis_values(mesh.barycentric(t, x0));
    let mut b = DofVector::zeros(space.num_dofs());
    for (&g, v) in space.element_dofs(t).iter().zip(values) {
        b[g] += v;
    }
    Ok(b)
}

/// `min(h_max/10, 0.9·dist(x0, ∂T0))`, so that `B(x0, ε)` lies strictly in `T0`.
pub fn choose_epsilon(mesh: &Mesh, x0: Point2) -> Result<f64> {
    let t = mesh.locate(x0)?;
    let lambda = mesh.barycentric(t, x0);
    if lambda.iter().any(|&l| l <= BARY_TOL) {
        return Err(Error::OnElementBoundary {
            x: x0.x,
            y: x0.y,
            element: t,
        });
    }
    let d = dist_to_boundary(mesh.corners(t), x0);
    Ok((mesh.h_max() / 10.0).min(0.9 * d))
}

/// Parameter interval `[lo, hi]` of the ray `x0 + r·dir` inside a closed
/// triangle, if nonempty.
fn clip_ray(corners: [Point2; 3], x0: Point2, dir: Point2) -> Option<(f64, f64)> {
    let l0 = barycentric(corners, x0);
    let l1 = barycentric(corners, x0 + dir);
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for j in 0..3 {
        let slope = l1[j] - l0[j];
        if slope.abs() < 1e-300 {
            if l0[j] < -BARY_TOL {
                return None;
            }
        } else {
            let r = -l0[j] / slope;
            if slope > 0.0 {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// `b_i = (1/πε²) ∫_{B(x0,ε)} φ_i`.
///
/// Each of the angular rays is split at element boundaries and every piece is
/// integrated by radial Gauss with the polar weight `r`. The rule therefore
/// carries the exact mass for any position of the ball; when the ball lies in
/// one element it is the plain polar tensor rule, exact for affine `φ_i`.
pub fn assemble_ball_rhs(space: &FeSpace, x0: Point2, epsilon: f64) -> Result<DofVector> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {epsilon}")));
    }
    let mesh = space.mesh();
    let outside = || Error::BallOutsideDomain {
        x: x0.x,
        y: x0.y,
        epsilon,
    };
    let t0 = mesh.locate(x0).map_err(|_| outside())?;
    let candidates: Vec<usize> = if dist_to_boundary(mesh.corners(t0), x0) >= epsilon {
        vec![t0]
    } else {
        (0..mesh.num_triangles())
            .filter(|&t| triangle_distance(mesh.corners(t), x0) <= epsilon)
            .collect()
    };

    let (nodes, weights) = gauss_legendre_unit(BALL_RADIAL);
    let density = 1.0 / (PI * epsilon * epsilon);
    let dtheta = 2.0 * PI / BALL_ANGULAR as f64;
    let mut b = DofVector::zeros(space.num_dofs());
    let mut pieces: Vec<(f64, f64, usize)> = Vec::new();
    for m in 0..BALL_ANGULAR {
        let (s, c) = (dtheta * m as f64).sin_cos();
        let dir = Point2::new(c, s);
        pieces.clear();
        for &t in &candidates {
            if let Some((lo, hi)) = clip_ray(mesh.corners(t), x0, dir) {
                let (lo, hi) = (lo.max(0.0), hi.min(epsilon));
                if lo < hi {
                    pieces.push((lo, hi, t));
                }
            }
        }
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        // assign each stretch of the ray to exactly one element
        let mut covered = 0.0;
        for &(lo, hi, t) in &pieces {
            if hi <= covered {
                continue;
            }
            if lo > covered + BARY_TOL * epsilon {
                return Err(outside());
            }
            let lo = covered;
            let len = hi - lo;
            let corners = mesh.corners(t);
            let dofs = space.element_dofs(t);
            for (u, w) in nodes.iter().zip(&weights) {
                let r = lo + len * u;
                let values = space.basis_values(barycentric(corners, x0 + r * dir));
                let weight = density * dtheta * w * len * r;
                for (&g, v) in dofs.iter().zip(values) {
                    b[g] += weight * v;
                }
            }
            covered = hi;
        }
        if covered < epsilon * (1.0 - 1e-12) {
            return Err(outside());
        }
    }
    Ok(b)
}

fn triangle_distance(corners: [Point2; 3], p: Point2) -> f64 {
    if barycentric(corners, p).iter().all(|&l| l >= 0.0) {
        0.0
    } else {
        dist_to_boundary(corners, p)
    }
}

/// `|(f_ε * v)(x) - v(x)|` for the uniform ball density, by the polar rule.
pub fn mean_value_check(x: Point2, epsilon: f64, v: impl Fn(Point2) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre_unit(BALL_RADIAL);
    let dtheta = 2.0 * PI / BALL_ANGULAR as f64;
    let mut mean = 0.0;
    for (u, w) in nodes.iter().zip(&weights) {
        let r = epsilon * u;
        // (1/πε²)·ε·w·r·dθ
        let weight = w * u * dtheta / PI;
        for m in 0..BALL_ANGULAR {
            let (s, c) = (dtheta * m as f64).sin_cos();
            mean += weight * v(x + r * Point2::new(c, s));
        }
    }
    (mean - v(x)).abs()
}

/// Real and imaginary parts of `((x - c) + i(y - c))^n`.
pub fn harmonic_polynomial(n: u32, p: Point2) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..n {
        (re, im) = (re * p.x - im * p.y, re * p.y + im * p.x);
    }
    (re, im)
}

/// Outcome of the mean-value battery.
#[derive(Debug, Clone, Serialize)]
pub struct MeanValueBattery {
    pub cases: usize,
    pub max_residual: f64,
}

/// Harmonic polynomials of degree 0 to 6 at three centers and two radii.
pub fn mean_value_battery() -> MeanValueBattery {
    let centers = [Point2::ORIGIN, Point2::new(0.3, -0.2), Point2::new(1.5, 2.0)];
    let radii = [0.1, 0.05];
    let mut cases = 0;
    let mut max_residual = 0.0f64;
    for &c in &centers {
        for &eps in &radii {
            for n in 0..=6 {
                let re = mean_value_check(c, eps, |p| harmonic_polynomial(n, p).0);
                let im = mean_value_check(c, eps, |p| harmonic_polynomial(n, p).1);
                max_residual = max_residual.max(re).max(im);
                cases += 2;
            }
        }
    }
    MeanValueBattery {
        cases,
        max_residual,
    }
}
