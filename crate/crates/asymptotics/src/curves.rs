//! Coefficient curves `J_k(s)` at fixed angles, for plotting.

use amoeba_engine::AmoebaMetric;
use field_core::Result;
use rayon::prelude::*;

use crate::coeffs::{CoefficientSet, Method};

/// One sample of the coefficient curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub s: f64,
    pub alpha: f64,
    /// Factor already applied to `j1`, `j2`, `j3`.
    pub scale: f64,
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub method: Method,
}

/// `J_k(s, α)` on the product grid, multiplied by `(3/2)ν(s sin α)` when `scaled`.
///
/// The scaled values are the coefficients exactly as they enter the limit PDE.
pub fn coefficient_curves(metric: &AmoebaMetric, alphas: &[f64], s_grid: &[f64], scaled: bool) -> Result<Vec<CurveRow>> {
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| s_grid.iter().map(move |&s| (a, s))).collect();
    pairs
        .par_iter()
        .map(|&(alpha, s)| {
            let c = CoefficientSet::compute(metric, s, alpha)?;
            let scale = if scaled { 1.5 * metric.nu(s * alpha.sin()) } else { 1.0 };
            Ok(CurveRow { s, alpha, scale, j1: scale * c.j1, j2: scale * c.j2, j3: scale * c.j3, method: c.method })
        })
        .collect()
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
