//! Quadrature on the reference triangle and on intervals.
//!
//! Triangle rules are stored in barycentric form with weights summing to one;
//! callers scale by the element area.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
    degree: usize,
}

// Symmetric rules; orbit parameters solved to full double precision.
const DEG4_A: f64 = 0.445_948_490_915_964_83;
const DEG4_WA: f64 = 0.223_381_589_678_011_36;
const DEG4_B: f64 = 0.091_576_213_509_770_76;
const DEG4_WB: f64 = 0.109_951_743_655_321_95;

const DEG6_A: f64 = 0.249_286_745_170_912_26;
const DEG6_WA: f64 = 0.116_786_275_726_377_44;
const DEG6_B: f64 = 0.063_089_014_491_502_05;
const DEG6_WB: f64 = 0.050_844_906_370_206_31;
const DEG6_C1: f64 = 0.053_145_049_844_817_64;
const DEG6_C2: f64 = 0.310_352_451_033_782_6;
const DEG6_WC: f64 = 0.082_851_075_618_374_79;

fn orbit21(a: f64) -> [[f64; 3]; 3] {
    let b = 1.0 - 2.0 * a;
    [[b, a, a], [a, b, a], [a, a, b]]
}

fn orbit111(a: f64, b: f64) -> [[f64; 3]; 6] {
    let c = 1.0 - a - b;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

impl QuadratureRule {
    /// Rule exact for polynomials of total degree `degree` on any triangle.
    ///
    /// Degrees up to 6 use fully symmetric rules (1, 3, 6 and 12 points);
    /// higher degrees use a collapsed Gauss–Legendre product rule.
    pub fn triangle(degree: usize) -> QuadratureRule {
        match degree {
            0 | 1 => QuadratureRule {
                points: vec![[1.0 / 3.0; 3]],
                weights: vec![1.0],
                degree: 1,
            },
            2 => QuadratureRule {
                points: orbit21(1.0 / 6.0).to_vec(),
                weights: vec![1.0 / 3.0; 3],
                degree: 2,
            },
            3 | 4 => {
                let mut points = orbit21(DEG4_A).to_vec();
                points.extend(orbit21(DEG4_B));
                let mut weights = vec![DEG4_WA; 3];
                weights.extend([DEG4_WB; 3]);
                QuadratureRule { points, weights, degree: 4 }
            }
            5 | 6 => {
                let mut points = orbit21(DEG6_A).to_vec();
                points.extend(orbit21(DEG6_B));
                points.extend(orbit111(DEG6_C1, DEG6_C2));
                let mut weights = vec![DEG6_WA; 3];
                weights.extend([DEG6_WB; 3]);
                weights.extend([DEG6_WC; 6]);
                QuadratureRule { points, weights, degree: 6 }
            }
            d => Self::collapsed(d),
        }
    }

    /// Duffy-collapsed tensor Gauss rule, exact to total degree `degree`.
    pub fn collapsed(degree: usize) -> QuadratureRule {
        let n = (degree + 3) / 2;
        let (nodes, w) = gauss_legendre_unit(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (s, ws) in nodes.iter().zip(&w) {
            for (t, wt) in nodes.iter().zip(&w) {
                let xi = *s;
                let eta = t * (1.0 - s);
                points.push([1.0 - xi - eta, xi, eta]);
                weights.push(2.0 * ws * wt * (1.0 - s));
            }
        }
        QuadratureRule { points, weights, degree }
    }

    /// Stiffness rule for order `k`: exact for the `2(k-1)` gradient products.
    pub fn for_stiffness(k: usize) -> QuadratureRule {
        Self::triangle(match k {
            1 => 1,
            2 => 2,
            3 => 4,
            _ => 6,
        })
    }

    /// Error-integration rule for order `k` (degree `2k + 4`).
    pub fn for_error(k: usize) -> QuadratureRule {
        Self::triangle(2 * k + 4)
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre on `[0, 1]` with weights summing to one.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| 0.5 * t).collect(),
    )
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
