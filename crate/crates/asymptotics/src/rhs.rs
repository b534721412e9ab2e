//! Right-hand sides of the continuum-limit PDEs and the bias force terms.

use std::f64::consts::PI;

use amoeba_engine::{AmoebaMetric, BiasKind};
use field_core::{Error, LocalFrame, Result};

use crate::coeffs::{k_integral, CoefficientSet};
use crate::selfsnakes::{selfsnakes_dg, selfsnakes_g, selfsnakes_h};

fn f_hessian_vanishes(frame: &LocalFrame) -> bool {
    frame.f_zz == 0.0 && frame.f_zx == 0.0 && frame.f_xx == 0.0
}

fn kink_at_zero(metric: &AmoebaMetric) -> bool {
    metric.dnu_at_zero_from(1.0).abs() > 1e-12 || metric.dnu_at_zero_from(-1.0).abs() > 1e-12
}

/// Value at a critical point of `f`, where only the curvature term survives.
fn singular_f(metric: &AmoebaMetric, frame: &LocalFrame, what: &str) -> Result<f64> {
    if kink_at_zero(metric) && !f_hessian_vanishes(frame) {
        return Err(Error::SingularFrame(format!(
            "{what}: ∇f vanishes with a curved pilot image and ν′(0±) ≠ 0; the limit depends on the approach direction"
        )));
    }
    Ok(frame.u_xixi / metric.nu(0.0).powi(2))
}

/// `u_t = u_ξξ/ν(s sin α)² − (3/2) ν(s sin α) |∇u| (J1 f_ζζ + 2 J2 f_ζχ + J3 f_χχ)` for the
/// pilot image `βf`, with `s = β|∇f|`.
///
/// Returns `0` where `∇u` vanishes and `u_ξξ/ν(0)²` where `∇f` vanishes.
pub fn aac_rhs(metric: &AmoebaMetric, frame: &LocalFrame) -> Result<f64> {
    if frame.u_singular {
        return Ok(0.0);
    }
    if frame.f_singular {
        return singular_f(metric, frame, "aac_rhs");
    }
    let b = metric.beta;
    let s = b * frame.grad_f_mag;
    let j = CoefficientSet::compute(metric, s, frame.alpha)?;
    let nu_a = metric.nu(s * frame.alpha.sin());
    let coupling = j.j1 * frame.f_zz + 2.0 * j.j2 * frame.f_zx + j.j3 * frame.f_xx;
    Ok(frame.u_xixi / (nu_a * nu_a) - 1.5 * nu_a * frame.grad_u_mag * b * coupling)
}

/// The L² limit PDE written out directly in `s` and `α`, for the pilot image `βf`.
pub fn aac_rhs_l2(frame: &LocalFrame, beta: f64) -> Result<f64> {
    if frame.u_singular {
        return Ok(0.0);
    }
    if frame.f_singular {
        return Ok(frame.u_xixi);
    }
    let s = beta * frame.grad_f_mag;
    let (sn, cs) = frame.alpha.sin_cos();
    let (s2, sn2) = (s * s, sn * sn);
    let q = 1.0 + s2 * sn2;
    let p = 1.0 + s2;
    let coupling = frame.f_zz * cs.powi(3) / p
        + 2.0 * frame.f_zx * sn.powi(3)
        + frame.f_xx * cs * (2.0 + sn2 + 3.0 * s2 * sn2) / (p * p);
    Ok(frame.u_xixi / q - s * frame.grad_u_mag * beta * coupling / q)
}

/// Geodesic active contour `|∇u| div(g(|∇f|) ∇u/|∇u|)` with the self-snakes `g` of `metric`.
pub fn gac_rhs(metric: &AmoebaMetric, frame: &LocalFrame) -> Result<f64> {
    if frame.u_singular {
        return Ok(0.0);
    }
    if frame.f_singular {
        return singular_f(metric, frame, "gac_rhs");
    }
    let s = frame.grad_f_mag;
    let g = selfsnakes_g(metric, s)?;
    let dg = selfsnakes_dg(metric, s)?;
    let (sn, cs) = frame.alpha.sin_cos();
    Ok(g * frame.u_xixi + dg * frame.grad_u_mag * (cs * frame.f_xx + sn * frame.f_zx))
}

/// Self-snakes `g(|∇u|) u_ξξ + h(|∇u|) u_ηη`.
pub fn selfsnakes_rhs(metric: &AmoebaMetric, grad_u_mag: f64, u_xixi: f64, u_etaeta: f64) -> Result<f64> {
    Ok(selfsnakes_g(metric, grad_u_mag)? * u_xixi + selfsnakes_h(metric, grad_u_mag)? * u_etaeta)
}

/// Area offset `δA` of the selected rank for an amoeba of radius `rho` and area `area`.
///
/// The selected value splits the amoeba into `|A|/2 + δA` below and `|A|/2 − δA` above.
pub fn bias_delta_area(kind: BiasKind, gamma: f64, rho: f64, area: f64) -> f64 {
    match kind {
        BiasKind::None => 0.0,
        BiasKind::FixedOffset => gamma * rho.powi(3) / 3.0,
        BiasKind::Quantile => gamma * rho * area / (3.0 * PI),
        BiasKind::Quadratic => gamma * area * area / (3.0 * PI * PI * rho),
    }
}

/// Force summand of the limit PDE induced by a rank bias with coefficient `gamma`.
///
/// With `K = K(β|∇f|)` these are `γν|∇u|`, `γν(K/2π)|∇u|` and `γν(K/2π)²|∇u|` for the
/// fixed-offset, quantile and quadratic laws, where `ν = ν(β|∇f| sin α)`.
pub fn force_term(metric: &AmoebaMetric, kind: BiasKind, gamma: f64, frame: &LocalFrame) -> Result<f64> {
    if frame.u_singular {
        return Ok(0.0);
    }
    let s = metric.beta * frame.grad_f_mag;
    let nu_a = if frame.f_singular { metric.nu(0.0) } else { metric.nu(s * frame.alpha.sin()) };
    let base = gamma * nu_a * frame.grad_u_mag;
    Ok(match kind {
        BiasKind::None => 0.0,
        BiasKind::FixedOffset => base,
        BiasKind::Quantile => base * k_integral(metric, s)? / (2.0 * PI),
        BiasKind::Quadratic => base * (k_integral(metric, s)? / (2.0 * PI)).powi(2),
    })
}
