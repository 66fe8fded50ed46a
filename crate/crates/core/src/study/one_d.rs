//! Piecewise-linear elements on an interval with a point source.

use serde::{Deserialize, Serialize};

use super::fit::{fit_order, OrderFit};
use crate::error::{Error, Result};
use crate::exact::one_d_delta;
use crate::femcore::quadrature::gauss_legendre_unit;

/// Uniform `P1` solution of `-u'' = δ_{x0}`, `u(a) = u(b) = 0`, with `n`
/// elements. Returns the nodal values, ends included.
pub fn solve_1d(a: f64, b: f64, x0: f64, n: usize) -> Result<Vec<f64>> {
    if !(a < x0 && x0 < b) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need a < x0 < b and n >= 2, got a={a} b={b} x0={x0} n={n}"
        )));
    }
    let h = (b - a) / n as f64;
    // load: hat functions of the element holding x0
    let mut rhs = vec![0.0; n + 1];
    let e = (((x0 - a) / h).floor() as usize).min(n - 1);
    let theta = (x0 - (a + e as f64 * h)) / h;
    rhs[e] += 1.0 - theta;
    rhs[e + 1] += theta;

    // Thomas algorithm on the interior nodes 1..n-1, matrix (1/h)·tridiag(-1, 2, -1)
    let m = n - 1;
    let mut diag = vec![2.0 / h; m];
    let off = -1.0 / h;
    let mut d: Vec<f64> = rhs[1..n].to_vec();
    for i in 1..m {
        let w = off / diag[i - 1];
        diag[i] -= w * off;
        d[i] -= w * d[i - 1];
    }
    let mut u = vec![0.0; n + 1];
    u[m] = d[m - 1] / diag[m - 1];
    for i in (1..m).rev() {
        u[i] = (d[i - 1] - off * u[i + 1]) / diag[i - 1];
    }
    Ok(u)
}

/// `L²` and `H¹`-seminorm errors of the nodal solution against the exact one.
fn errors_1d(a: f64, b: f64, x0: f64, u: &[f64]) -> (f64, f64) {
    let n = u.len() - 1;
    let h = (b - a) / n as f64;
    let (nodes, weights) = gauss_legendre_unit(4);
    let (mut l2, mut semi) = (0.0, 0.0);
    for e in 0..n {
        let (xl, xr) = (a + e as f64 * h, a + (e + 1) as f64 * h);
        let slope_h = (u[e + 1] - u[e]) / h;
        // split at the kink so each piece is polynomial
        let cuts: Vec<(f64, f64)> = if xl < x0 && x0 < xr {
            vec![(xl, x0), (x0, xr)]
        } else {
            vec![(xl, xr)]
        };
        for (lo, hi) in cuts {
            let len = hi - lo;
            let mid = 0.5 * (lo + hi);
            let slope = if mid < x0 {
                (b - x0) / (b - a)
            } else {
                -(x0 - a) / (b - a)
            };
            for (t, w) in nodes.iter().zip(&weights) {
                let x = lo + len * t;
                let uh = u[e] + slope_h * (x - xl);
                let err = one_d_delta(a, b, x0, x) - uh;
                l2 += w * len * err * err;
                semi += w * len * (slope - slope_h).powi(2);
            }
        }
    }
    (l2.sqrt(), semi.sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneDRow {
    pub elements: usize,
    pub h: f64,
    pub l2: f64,
    pub h1: f64,
    /// Largest nodal error.
    pub nodal_error: f64,
    /// Largest pointwise error on elements not holding `x0`.
    pub off_element_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OneDStudy {
    pub a: f64,
    pub b: f64,
    pub x0: f64,
    pub rows: Vec<OneDRow>,
    pub l2_fit: Option<OrderFit>,
    pub h1_fit: Option<OrderFit>,
    /// Source placed on a node of the finest grid.
    pub on_node_x0: f64,
    pub on_node_error: f64,
}

/// Refinement study over the element counts in `levels`.
///
/// `x0` must avoid the nodes of every level. The on-node check places the
/// source at the midpoint, which is a node of any even grid.
pub fn run_1d_study(a: f64, b: f64, x0: f64, levels: &[usize]) -> Result<OneDStudy> {
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("levels must increase strictly".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let h = (b - a) / n as f64;
        let s = (x0 - a) / h;
        if (s - s.round()).abs() < 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "x0 = {x0} sits on a node of the {n}-element grid"
            )));
        }
        let u = solve_1d(a, b, x0, n)?;
        let (l2, semi) = errors_1d(a, b, x0, &u);
        let e0 = s.floor() as usize;
        let mut nodal_error = 0.0f64;
        for (i, ui) in u.iter().enumerate() {
            nodal_error = nodal_error.max((one_d_delta(a, b, x0, a + i as f64 * h) - ui).abs());
        }
        let mut off_element_error = 0.0f64;
        for e in (0..n).filter(|&e| e != e0) {
            for t in [0.25, 0.5, 0.75] {
                let x = a + (e as f64 + t) * h;
                let uh = u[e] + t * (u[e + 1] - u[e]);
                off_element_error = off_element_error.max((one_d_delta(a, b, x0, x) - uh).abs());
            }
        }
        rows.push(OneDRow {
            elements: n,
            h,
            l2,
            h1: (l2 * l2 + semi * semi).sqrt(),
            nodal_error,
            off_element_error,
        });
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let fit = |e: Vec<f64>| if rows.len() >= 3 { fit_order(&hs, &e).ok() } else { None };
    let l2_fit = fit(rows.iter().map(|r| r.l2).collect());
    let h1_fit = fit(rows.iter().map(|r| r.h1).collect());

    let n_fine = levels.last().copied().unwrap_or(2).max(2);
    let n_even = n_fine + n_fine % 2;
    let on_node_x0 = 0.5 * (a + b);
    let u = solve_1d(a, b, on_node_x0, n_even)?;
    let h = (b - a) / n_even as f64;
    let on_node_error = u
        .iter()
        .enumerate()
        .map(|(i, ui)| (one_d_delta(a, b, on_node_x0, a + i as f64 * h) - ui).abs())
        .fold(0.0, f64::max);

    Ok(OneDStudy {
        a,
        b,
        x0,
        rows,
        l2_fit,
        h1_fit,
        on_node_x0,
        on_node_error,
    })
}

/// Samples of `u_δ` and `u_ε` at `samples` equispaced points of `[a, b]`.
pub fn demo_1d(a: f64, b: f64, x0: f64, epsilon: f64, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    (0..samples)
        .map(|i| {
            let x = if i + 1 == samples {
                b
            } else {
                a + (b - a) * i as f64 / (samples - 1) as f64
            };
            crate::exact::one_d_exact(a, b, x0, epsilon, x).map(|(d, e)| (x, d, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodally_exact() {
        let u = solve_1d(0.0, 1.0, 0.3, 10).unwrap();
        for (i, ui) in u.iter().enumerate() {
            let x = i as f64 / 10.0;
            assert!((ui - one_d_delta(0.0, 1.0, 0.3, x)).abs() < 1e-14);
        }
    }

    #[test]
    fn off_node_orders() {
        let s = run_1d_study(0.0, 1.0, 1.0 / 3.0, &[8, 16, 32, 64, 128]).unwrap();
        let l2 = s.l2_fit.unwrap().order;
        let h1 = s.h1_fit.unwrap().order;
        assert!((l2 - 1.5).abs() < 0.01, "{l2}");
        assert!((h1 - 0.5).abs() < 0.01, "{h1}");
        for r in &s.rows {
            assert!(r.nodal_error <= 1e-13);
            assert!(r.off_element_error <= 1e-13);
            assert!(r.l2 > 0.0);
        }
        assert!(s.on_node_error <= 1e-13);
    }

    #[test]
    fn rejects_node_hits() {
        assert!(run_1d_study(0.0, 1.0, 0.25, &[8, 16]).is_err());
        assert!(run_1d_study(0.0, 1.0, 0.3, &[16, 8]).is_err());
    }

    #[test]
    fn demo_samples() {
        let s = demo_1d(0.0, 1.0, 0.5, 0.1, 11).unwrap();
        assert_eq!(s.len(), 11);
        assert_eq!(s[10].0, 1.0);
        assert!((s[5].1 - 0.25).abs() < 1e-15);
        assert!(s[5].2 > s[5].1 - 0.1 && s[5].2 < s[5].1);
    }
}
