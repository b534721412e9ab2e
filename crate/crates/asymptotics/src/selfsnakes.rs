//! Edge-stopping pair `(g, h)` of the self-snakes limit and its integral representation.

use amoeba_engine::{AmoebaMetric, MetricKind};
use field_core::{Error, Result};

use crate::coeffs::j_tilde;
use crate::quad::{brent, simpson, TOL};

/// `g(s) = 1 − (3/2) βs J̃1(βs)`.
pub fn selfsnakes_g(metric: &AmoebaMetric, s: f64) -> Result<f64> {
    let b = metric.beta;
    Ok(1.0 - 1.5 * b * s * j_tilde(metric, 1, b * s)?)
}

/// `h(s) = −(3/2) βs J̃3(βs)`.
pub fn selfsnakes_h(metric: &AmoebaMetric, s: f64) -> Result<f64> {
    let b = metric.beta;
    Ok(-1.5 * b * s * j_tilde(metric, 3, b * s)?)
}

/// `g′(s) = −(3/2) β J̃3(βs)`, the derivative of [`selfsnakes_g`].
pub fn selfsnakes_dg(metric: &AmoebaMetric, s: f64) -> Result<f64> {
    let b = metric.beta;
    Ok(-1.5 * b * j_tilde(metric, 3, b * s)?)
}

/// `ψ(q) = q ν(1/q)`.
fn psi(metric: &AmoebaMetric, q: f64) -> f64 {
    q * metric.nu(1.0 / q)
}

/// `ψ⁻¹(y)` on the branch `q ≥ q_lo`, where `ψ(q_lo) ≤ y`.
fn psi_inv(metric: &AmoebaMetric, y: f64, q_lo: f64) -> Result<f64> {
    if metric.kind == MetricKind::L2 {
        return Ok((y * y - 1.0).max(0.0).sqrt());
    }
    let target = |q: f64| psi(metric, q) - y;
    if target(q_lo) >= 0.0 {
        return Ok(q_lo);
    }
    let mut hi = 2.0 * q_lo.max(1e-3);
    let mut tries = 0;
    while target(hi) < 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numeric(format!("no bracket for the inverse of psi at {y}")));
        }
    }
    brent(target, q_lo, hi, 1e-12 * hi.max(1.0))
}

/// `g` through the integral `g = 3 I1 / (β²s² ψ(q0)³)` with `q0 = 1/(βs)` and
/// `I1 = ∫₀¹ ξ² √(ψ⁻¹(ψ(q0)/ξ)² − q0²) dξ`.
pub fn g_jmiv11(metric: &AmoebaMetric, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::invalid("s", format!("{s} is not positive")));
    }
    let bs = metric.beta * s;
    let q0 = 1.0 / bs;
    let p0 = psi(metric, q0);
    let failure = std::cell::RefCell::new(None);
    let integrand = |w: f64| {
        let xi = 1.0 - w * w;
        if xi <= 0.0 {
            return 0.0;
        }
        match psi_inv(metric, p0 / xi, q0) {
            Ok(q) => xi * xi * (q * q - q0 * q0).max(0.0).sqrt() * 2.0 * w,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let i1 = simpson(&integrand, 0.0, 1.0, TOL * 1e-2)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(3.0 * i1 / (bs * bs * p0.powi(3)))
}
