//! Closed-form reference solutions.
//!
//! The reference configurations are chosen so the harmonic corrector of the
//! point-source problem is known: on the unit disk with the source at the
//! center it vanishes, and with Green boundary data on any polygon the exact
//! solution is the shifted Green function itself.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::femcore::quadrature::gauss_legendre_unit;
use crate::meshkit::Point2;

/// Exact solution with value and gradient.
pub trait ExactSolution: Sync {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> Point2;
    /// Point where the solution is singular, if any.
    fn singular_point(&self) -> Option<Point2> {
        None
    }
}

/// `G(x - x0) = -(1/2π) log|x - x0|` and its gradient.
pub fn green(x: Point2, x0: Point2) -> Result<(f64, Point2)> {
    let d = x - x0;
    let r2 = d.dot(d);
    if r2 == 0.0 {
        return Err(Error::AtSingularity { x: x.x, y: x.y });
    }
    let value = -r2.ln() / (4.0 * PI);
    let scale = -1.0 / (2.0 * PI * r2);
    Ok((value, scale * d))
}

/// `u(x) = -(1/4π) log(x1² + x2²)`: the point-source solution on the unit
/// disk with the source at the origin.
pub fn disk_exact(x: Point2) -> Result<(f64, Point2)> {
    let r2 = x.dot(x);
    if r2 == 0.0 {
        return Err(Error::AtSingularity { x: x.x, y: x.y });
    }
    let value = -(x.x * x.x + x.y * x.y).ln() / (4.0 * PI);
    Ok((value, (-1.0 / (2.0 * PI * r2)) * x))
}

/// Shifted Green function as an [`ExactSolution`].
#[derive(Debug, Clone, Copy)]
pub struct Green {
    pub source: Point2,
}

impl ExactSolution for Green {
    fn value(&self, p: Point2) -> f64 {
        green(p, self.source).map_or(f64::INFINITY, |(v, _)| v)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        green(p, self.source).map_or(Point2::new(f64::NAN, f64::NAN), |(_, g)| g)
    }
    fn singular_point(&self) -> Option<Point2> {
        Some(self.source)
    }
}

/// [`disk_exact`] as an [`ExactSolution`].
#[derive(Debug, Clone, Copy)]
pub struct DiskSolution;

impl ExactSolution for DiskSolution {
    fn value(&self, p: Point2) -> f64 {
        disk_exact(p).map_or(f64::INFINITY, |(v, _)| v)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        disk_exact(p).map_or(Point2::new(f64::NAN, f64::NAN), |(_, g)| g)
    }
    fn singular_point(&self) -> Option<Point2> {
        Some(Point2::ORIGIN)
    }
}

/// `sin(πx) sin(πy)`, with `-Δu = 2π² u` and zero trace on the unit square.
#[derive(Debug, Clone, Copy)]
pub struct SineProduct;

impl SineProduct {
    pub fn source(p: Point2) -> f64 {
        2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin()
    }
}

impl ExactSolution for SineProduct {
    fn value(&self, p: Point2) -> f64 {
        (PI * p.x).sin() * (PI * p.y).sin()
    }
    fn gradient(&self, p: Point2) -> Point2 {
        let (sx, cx) = (PI * p.x).sin_cos();
        let (sy, cy) = (PI * p.y).sin_cos();
        Point2::new(PI * cx * sy, PI * sx * cy)
    }
}

/// Adapter turning a pair of closures into an [`ExactSolution`].
pub struct FnSolution<F, G> {
    pub value: F,
    pub gradient: G,
    pub singular: Option<Point2>,
}

impl<F, G> FnSolution<F, G>
where
    F: Fn(Point2) -> f64 + Sync,
    G: Fn(Point2) -> Point2 + Sync,
{
    pub fn new(value: F, gradient: G) -> Self {
        FnSolution {
            value,
            gradient,
            singular: None,
        }
    }
}

impl<F, G> ExactSolution for FnSolution<F, G>
where
    F: Fn(Point2) -> f64 + Sync,
    G: Fn(Point2) -> Point2 + Sync,
{
    fn value(&self, p: Point2) -> f64 {
        (self.value)(p)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        (self.gradient)(p)
    }
    fn singular_point(&self) -> Option<Point2> {
        self.singular
    }
}

/// Solution on the unit disk of `-Δu = 1/(πε²)` on `B(0, ε)`, zero elsewhere,
/// with `u = 0` on the unit circle, at radius `r`.
///
/// Outside the ball it is the Green function; inside it is the quadratic
/// `-r²/(4πε²) + 1/(4π) - log(ε)/(2π)`, which matches value and slope at
/// `r = ε`.
pub fn radial_ball_exact(r: f64, epsilon: f64) -> f64 {
    debug_assert!(r >= 0.0 && epsilon > 0.0 && epsilon < 1.0);
    if r >= epsilon {
        -r.ln() / (2.0 * PI)
    } else {
        -r * r / (4.0 * PI * epsilon * epsilon) + 1.0 / (4.0 * PI) - epsilon.ln() / (2.0 * PI)
    }
}

/// Radial derivative of [`radial_ball_exact`].
pub fn radial_ball_slope(r: f64, epsilon: f64) -> f64 {
    if r >= epsilon {
        -1.0 / (2.0 * PI * r)
    } else {
        -r / (2.0 * PI * epsilon * epsilon)
    }
}

/// Point-source solution of `-u'' = δ_{x0}` on `(a, b)` with zero end values.
pub fn one_d_delta(a: f64, b: f64, x0: f64, x: f64) -> f64 {
    let len = b - a;
    if x <= x0 {
        (b - x0) / len * x - a * (b - x0) / len
    } else {
        -(x0 - a) / len * x + b * (x0 - a) / len
    }
}

/// Values of the point-source and the interval-regularised solutions at `x`,
/// for the source `1/(2ε)` on `[x0 - ε, x0 + ε]`.
pub fn one_d_exact(a: f64, b: f64, x0: f64, epsilon: f64, x: f64) -> Result<(f64, f64)> {
    if !(a < x0 - epsilon && x0 + epsilon < b && epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need a < x0 - eps and x0 + eps < b, got a={a} b={b} x0={x0} eps={epsilon}"
        )));
    }
    if !(a..=b).contains(&x) {
        return Err(Error::InvalidArgument(format!("x = {x} outside [{a}, {b}]")));
    }
    let u_delta = one_d_delta(a, b, x0, x);
    let len = b - a;
    let u_eps = if x < x0 - epsilon || x > x0 + epsilon {
        u_delta
    } else {
        -x * x / (4.0 * epsilon)
            + (x0 / (2.0 * epsilon) + (a + b - 2.0 * x0) / (2.0 * len)) * x
            + (a * (x0 - b) + b * (x0 - a)) / (2.0 * len)
            - (x0 * x0 + epsilon * epsilon) / (4.0 * epsilon)
    };
    Ok((u_delta, u_eps))
}

fn check_p(p: f64) -> Result<()> {
    if (1.0..2.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "W^(1,p) seminorm of the Green function needs 1 <= p < 2, got {p}"
        )))
    }
}

/// `|G|^p_{1,p}` over the annulus `a < |x| < 1`:
/// `(2π)^{1-p} (1 - a^{2-p}) / (2-p)`.
pub fn w1p_green_annulus(p: f64, a: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidArgument(format!("inner radius {a} outside [0, 1)")));
    }
    Ok((2.0 * PI).powf(1.0 - p) * (1.0 - a.powf(2.0 - p)) / (2.0 - p))
}

/// Leading behaviour `(2π)^{-1/2} (2-p)^{-1/2}` of `‖u‖_{1,p}` as `p → 2`.
pub fn w1p_blowup_asymptote(p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(1.0 / ((2.0 * PI).sqrt() * (2.0 - p).sqrt()))
}

/// `∫ |∇G|^p` over `a < |x| < 1` by a polar tensor rule (Gauss in `r`,
/// trapezoid in `θ`), using point evaluations of [`green`].
pub fn w1p_green_annulus_quadrature(p: f64, a: f64, n_radial: usize, n_angular: usize) -> Result<f64> {
    check_p(p)?;
    let (nodes, weights) = gauss_legendre_unit(n_radial);
    let mut total = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let r = a + (1.0 - a) * t;
        let wr = w * (1.0 - a) * r;
        for m in 0..n_angular {
            let theta = 2.0 * PI * m as f64 / n_angular as f64;
            let x = Point2::new(r * theta.cos(), r * theta.sin());
            let (_, g) = green(x, Point2::ORIGIN)?;
            total += wr * (2.0 * PI / n_angular as f64) * g.norm().powf(p);
        }
    }
    Ok(total)
}
