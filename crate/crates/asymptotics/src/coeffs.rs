//! The structural coefficients `J1`, `J2`, `J3` and the amoeba area factor `K`.
//!
//! `J_k(s, α) = ∫ ν′(s cos θ)/ν(s cos θ)⁴ · w_k(θ) dθ` over `[α − π/2, α + π/2]` with
//! `w_1 = sin²θ`, `w_2 = sin θ cos θ`, `w_3 = cos²θ`.

use std::f64::consts::{FRAC_PI_2, PI};

use amoeba_engine::{AmoebaMetric, MetricKind};
use field_core::{Error, Result};

use crate::quad::{simpson, simpson_split, TOL};

/// How a [`CoefficientSet`] was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedL2,
    ClosedL1,
    Quadrature,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::ClosedL2 => "closed_L2",
            Method::ClosedL1 => "closed_L1",
            Method::Quadrature => "quadrature",
        }
    }
}

/// `J1`, `J2`, `J3` at one `(s, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub method: Method,
}

impl CoefficientSet {
    /// Closed form for L¹ and L², quadrature otherwise.
    pub fn compute(metric: &AmoebaMetric, s: f64, alpha: f64) -> Result<Self> {
        check_s(s)?;
        Ok(match metric.kind {
            MetricKind::L2 => Self {
                j1: j_closed_l2(1, s, alpha),
                j2: j_closed_l2(2, s, alpha),
                j3: j_closed_l2(3, s, alpha),
                method: Method::ClosedL2,
            },
            MetricKind::L1 => Self {
                j1: j_closed_l1(1, s, alpha),
                j2: j_closed_l1(2, s, alpha),
                j3: j_closed_l1(3, s, alpha),
                method: Method::ClosedL1,
            },
            MetricKind::Custom { .. } => Self::by_quadrature(metric, s, alpha)?,
        })
    }

    pub fn by_quadrature(metric: &AmoebaMetric, s: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            j1: j_quadrature(metric, 1, s, alpha)?,
            j2: j_quadrature(metric, 2, s, alpha)?,
            j3: j_quadrature(metric, 3, s, alpha)?,
            method: Method::Quadrature,
        })
    }

    pub fn get(&self, k: u8) -> f64 {
        match k {
            1 => self.j1,
            2 => self.j2,
            _ => self.j3,
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("s", format!("{s} is not a nonnegative number")))
    }
}

fn check_k(k: u8) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::invalid("k", format!("{k} is not one of 1, 2, 3")))
    }
}

fn weight(k: u8, theta: f64) -> f64 {
    let (sn, cs) = theta.sin_cos();
    match k {
        1 => sn * sn,
        2 => sn * cs,
        _ => cs * cs,
    }
}

/// `ν′(x)` with the one-sided value from the side of `cos θ` at `x = 0`.
fn dnu_along(metric: &AmoebaMetric, x: f64, cos_theta: f64) -> f64 {
    if x == 0.0 {
        metric.dnu_at_zero_from(cos_theta)
    } else {
        metric.dnu(x)
    }
}

/// Breakpoints of `[α − π/2, α + π/2]` at the zeros of `cos θ`.
fn split_points(alpha: f64) -> Vec<f64> {
    let (a, b) = (alpha - FRAC_PI_2, alpha + FRAC_PI_2);
    let mut pts = vec![a];
    for k in -3..=3 {
        let z = k as f64 * FRAC_PI_2;
        if k % 2 != 0 && z > a + 1e-15 && z < b - 1e-15 {
            pts.push(z);
        }
    }
    pts.push(b);
    pts
}

/// `J_k(s, α)` by adaptive quadrature to absolute tolerance `1e−10`.
pub fn j_quadrature(metric: &AmoebaMetric, k: u8, s: f64, alpha: f64) -> Result<f64> {
    check_s(s)?;
    check_k(k)?;
    let pts = split_points(alpha);
    let total = pts[pts.len() - 1] - pts[0];
    let mut acc = 0.0;
    for w in pts.windows(2) {
        // `cos θ` keeps one sign per segment; pin it so endpoint round-off cannot flip `ν′`.
        let side = (0.5 * (w[0] + w[1])).cos().signum();
        let integrand = |theta: f64| {
            let c = side * theta.cos().abs();
            let x = s * c;
            dnu_along(metric, x, c) / metric.nu(x).powi(4) * weight(k, theta)
        };
        acc += simpson(&integrand, w[0], w[1], TOL * (w[1] - w[0]) / total)?;
    }
    Ok(acc)
}

/// Closed form of `J_k` for `ν(s) = √(1 + s²)`.
pub fn j_closed_l2(k: u8, s: f64, alpha: f64) -> f64 {
    let (sn, cs) = alpha.sin_cos();
    let s2 = s * s;
    let q = 1.0 + s2 * sn * sn;
    let q32 = q * q.sqrt();
    match k {
        1 => 2.0 / 3.0 * s * cs.powi(3) / ((1.0 + s2) * q32),
        2 => 2.0 / 3.0 * s * sn.powi(3) / q32,
        _ => {
            2.0 / 3.0 * s * cs * (2.0 + sn * sn + 3.0 * s2 * sn * sn) / ((1.0 + s2).powi(2) * q32)
        }
    }
}

/// Width of the band around `s = 1` where the L¹ forms are summed as a series in `s − 1`.
const SERIES_BAND: f64 = 0.25;

/// Closed form of `J_k` for `ν(s) = 1 + |s|`.
pub fn j_closed_l1(k: u8, s: f64, alpha: f64) -> f64 {
    let (sn, cs) = alpha.sin_cos();
    let sigma = sn.abs();
    if k == 2 {
        let d = 1.0 + s * sigma;
        return sn.signum() * sigma * sigma * (3.0 + s * sigma) / (3.0 * d * d * d);
    }
    let t = cs / (1.0 + sigma);
    if (s - 1.0).abs() < SERIES_BAND {
        return l1_series(k, s - 1.0, t);
    }
    let (a, b) = (1.0 + s, 1.0 - s);
    let den = a + b * t * t;
    let den3 = den * den * den;
    if k == 1 {
        let w = a * b;
        let t2 = t * t;
        let rational = t * (6.0 * b * b * t2 * t2 + 8.0 * a * b * t2 * (b - a) - 6.0 * a * a) / (3.0 * w * w * den3);
        let trans = if s < 1.0 {
            2.0 * (t * (b / a).sqrt()).atan() / (1.0 - s * s).powf(2.5)
        } else {
            2.0 * (t * (-b / a).sqrt()).atanh() / (s * s - 1.0).powf(2.5)
        };
        rational + trans
    } else {
        let p0 = -(5.0 * a.powi(3) - a * a * b - a * b * b - 11.0 * b.powi(3)) / (4.0 * a * b.powi(3));
        let p1 = -2.0 * (a - b) * (5.0 * a * a + 4.0 * a * b + 5.0 * b * b) / (3.0 * a * a * b * b);
        let p2 = -(11.0 * a.powi(3) + a * a * b + a * b * b - 5.0 * b.powi(3)) / (4.0 * a.powi(3) * b);
        let t2 = t * t;
        let rational = t * (p0 + p1 * t2 + p2 * t2 * t2) / den3;
        let c = 2.0 * (4.0 * s * s + 1.0);
        let trans = if s < 1.0 {
            c * (t * (b / a).sqrt()).atan() / (1.0 - s * s).powf(3.5)
        } else {
            -c * (t * (-b / a).sqrt()).atanh() / (s * s - 1.0).powf(3.5)
        };
        rational + trans
    }
}

/// `J1`, `J3` for L¹ as a power series in `ε = s − 1`.
///
/// Uses `A_n = ∫_{−T}^{T} (1 − t²)ⁿ dt`, generated by the forward recurrence
/// `(2n + 1) A_n = 2T(1 − T²)ⁿ + 2n A_{n−1}`.
fn l1_series(k: u8, eps: f64, t: f64) -> f64 {
    const MAX_TERMS: usize = 80;
    let w = 1.0 - t * t;
    let mut a = Vec::with_capacity(MAX_TERMS + 4);
    a.push(2.0 * t);
    let mut wn = 1.0;
    for n in 1..MAX_TERMS + 4 {
        wn *= w;
        let prev = a[n - 1];
        a.push((2.0 * t * wn + 2.0 * n as f64 * prev) / (2 * n + 1) as f64);
    }
    let x = -0.5 * eps;
    let mut pow = 1.0;
    let mut sum = 0.0;
    for n in 0..MAX_TERMS {
        let binom = ((n + 1) * (n + 2) * (n + 3)) as f64 / 6.0;
        let inner = if k == 1 {
            (2.0 * a[n] - 3.0 * a[n + 1] + a[n + 2]) / 2.0
        } else {
            (2.0 * a[n + 2] - a[n + 3]) / 8.0
        };
        let term = binom * pow * inner;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && n > 2 {
            break;
        }
        pow *= x;
    }
    sum
}

/// `J_k` by closed form for L¹ and L², by quadrature otherwise.
pub fn j_coefficient(metric: &AmoebaMetric, k: u8, s: f64, alpha: f64) -> Result<f64> {
    check_s(s)?;
    check_k(k)?;
    match metric.kind {
        MetricKind::L2 => Ok(j_closed_l2(k, s, alpha)),
        MetricKind::L1 => Ok(j_closed_l1(k, s, alpha)),
        MetricKind::Custom { .. } => j_quadrature(metric, k, s, alpha),
    }
}

/// `J̃_k(s) = J_k(s, 0)`.
pub fn j_tilde(metric: &AmoebaMetric, k: u8, s: f64) -> Result<f64> {
    j_coefficient(metric, k, s, 0.0)
}

/// `K(s) = ∫_{−π}^{π} dθ / ν(s cos θ)²`, so that an amoeba of radius `ρ` has area `ρ²K/2 + O(ρ³)`.
pub fn k_integral(metric: &AmoebaMetric, s: f64) -> Result<f64> {
    check_s(s)?;
    if metric.kind == MetricKind::L2 {
        return Ok(2.0 * PI / (1.0 + s * s).sqrt());
    }
    let integrand = |theta: f64| metric.nu(s * theta.cos()).powi(-2);
    simpson_split(&integrand, &[-PI, -FRAC_PI_2, 0.0, FRAC_PI_2, PI], TOL)
}
