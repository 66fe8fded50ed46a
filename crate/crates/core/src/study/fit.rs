use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `log e` against `log h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub order: f64,
    /// Coefficient of determination of the fit.
    pub r2: f64,
    /// `log(e_{n-1}/e_n) / log(h_{n-1}/h_n)` of the last two rows.
    pub last_order: f64,
}

/// Fits `e ≈ C h^order` over at least three `(h, e)` pairs.
pub fn fit_order(h: &[f64], e: &[f64]) -> Result<OrderFit> {
    if h.len() != e.len() {
        return Err(Error::InvalidArgument("mesh sizes and errors differ in length".into()));
    }
    if h.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "order fit needs at least 3 rows, got {}",
            h.len()
        )));
    }
    if let Some(bad) = e.iter().chain(h).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "order fit needs positive finite values, got {bad}"
        )));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("order fit needs distinct mesh sizes".into()));
    }
    let order = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let k = x.len() - 1;
    let last_order = (y[k - 1] - y[k]) / (x[k - 1] - x[k]);
    Ok(OrderFit {
        order,
        r2,
        last_order,
    })
}
