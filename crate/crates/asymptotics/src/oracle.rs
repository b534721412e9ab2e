//! Continuous-domain amoeba median of an analytic `u` over an exact amoeba of an analytic `f`.
//!
//! In polar coordinates around `x0` the amoeba is `{t v(θ) : 0 ≤ t ≤ R(θ)}`, where `R(θ)`
//! solves `∫₀^R ν(β ∂_t f(x0 + t v)) dt = ρ`. Areas are `∫ Σ ½(b² − a²) dθ` over the
//! `t`-intervals of interest, with the crossings of `u` along each ray found in closed form.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use amoeba_engine::{AmoebaMetric, BiasKind};
use field_core::{Error, PolyField, PolyKind, Result, EPS_SING};

use crate::quad::{adaptive_gauss, brent, gauss20};
use crate::rhs::bias_delta_area;

/// Second-order radii `(z+, z−)` where the rays `±v` leave an amoeba of radius `rho`,
/// given the directional derivatives `f_v`, `f_vv` at the centre.
pub fn contour_radius(metric: &AmoebaMetric, rho: f64, f_v: f64, f_vv: f64) -> (f64, f64) {
    let b = metric.beta;
    let along = |slope: f64| {
        let x = b * slope;
        let n = metric.nu(x);
        let dn = if x == 0.0 { metric.dnu_at_zero_from(f_vv) } else { metric.dnu(x) };
        rho / n - rho * rho * dn * b * f_vv / (2.0 * n * n * n)
    };
    (along(f_v), along(-f_v))
}

/// Radius at which `∫₀^z ν(β f′(t)) dt = rho` for a 1D profile with derivative `slope`,
/// given the sorted sign changes `kinks` of `slope` on `(0, z_max)`.
pub fn arc_length_root<S: Fn(f64) -> f64>(
    metric: &AmoebaMetric,
    rho: f64,
    slope: S,
    kinks: &[f64],
    z_max: f64,
) -> Result<f64> {
    let nu = |t: f64| metric.nu(metric.beta * slope(t));
    let phi = |z: f64| {
        let mut acc = 0.0;
        let mut a = 0.0;
        for &k in kinks.iter().take_while(|&&k| k < z) {
            acc += gauss20(nu, a, k);
            a = k;
        }
        acc + gauss20(nu, a, z)
    };
    let (mut lo, mut hi) = (0.0, z_max);
    let mut z = (rho / nu(0.0)).min(z_max);
    for _ in 0..100 {
        let r = phi(z) - rho;
        if r > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let mut next = z - r / nu(z);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 1e-15 * rho || hi - lo <= 1e-15 * rho {
            return Ok(next);
        }
        z = next;
    }
    brent(|z| phi(z) - rho, 0.0, z_max, 1e-15 * rho)
}

/// Requested imbalance between the amoeba area below and above the selected value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaOffset {
    /// `δA` given directly.
    Exact(f64),
    /// `δA` from a bias law with coefficient `γ`, evaluated on the exact amoeba area.
    Law(BiasKind, f64),
}

/// Result of [`continuous_median_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    /// The selected value: the amoeba area with `u ≤ μ` is `|A|/2 + δA`.
    pub mu: f64,
    /// `|A|`.
    pub area: f64,
    pub delta_area: f64,
    /// Area imbalance across the line through `x0` orthogonal to `∇u(x0)`.
    pub delta1: f64,
    /// Remaining imbalance due to the curvature of the level lines of `u`.
    pub delta2: f64,
}

const GRID: usize = 4096;

struct Oracle<'a> {
    f: &'a PolyField,
    /// `u − u(x0)`.
    u: PolyField,
    metric: &'a AmoebaMetric,
    rho: f64,
    x0: [f64; 2],
    kinked: bool,
    cache: RefCell<HashMap<u64, f64>>,
    failure: RefCell<Option<Error>>,
}

impl Oracle<'_> {
    fn dir(theta: f64) -> [f64; 2] {
        let (s, c) = theta.sin_cos();
        [c, s]
    }

    fn t_max(&self) -> f64 {
        self.rho / self.metric.nu(0.0) * (1.0 + 1e-9)
    }

    fn radius(&self, theta: f64) -> f64 {
        if let Some(&r) = self.cache.borrow().get(&theta.to_bits()) {
            return r;
        }
        let v = Self::dir(theta);
        let t_max = self.t_max();
        let kinks = self.f.ray_slope_zeros(self.x0, v, t_max);
        let r = match arc_length_root(self.metric, self.rho, |t| self.f.ray_slope(self.x0, v, t), &kinks, t_max) {
            Ok(r) => r,
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        self.cache.borrow_mut().insert(theta.to_bits(), r);
        r
    }

    fn pilot_kinks(&self, theta: f64, r: f64) -> usize {
        if self.kinked {
            self.f.ray_slope_zeros(self.x0, Self::dir(theta), r).len()
        } else {
            0
        }
    }

    /// Sorted `t ∈ (0, r)` where `u − u(x0)` equals `mu` along direction `v`.
    fn crossings(&self, v: [f64; 2], mu: f64, r: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(4);
        let mut push = |t: f64| {
            if t > 0.0 && t < r && t.is_finite() {
                out.push(t);
            }
        };
        let quad_roots = |a: f64, b: f64, c: f64, push: &mut dyn FnMut(f64)| {
            if a == 0.0 {
                if b != 0.0 {
                    push(-c / b);
                }
                return;
            }
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return;
            }
            let q = -0.5 * (b + disc.sqrt().copysign(b));
            if q != 0.0 {
                push(q / a);
                push(c / q);
            } else {
                push(0.0);
            }
        };
        match self.u.kind {
            PolyKind::Cartesian => {
                let j = self.u.eval(self.x0);
                let g = j.gradient[0] * v[0] + j.gradient[1] * v[1];
                let h = j.hessian;
                let c = 0.5 * (v[0] * (h[0][0] * v[0] + h[0][1] * v[1]) + v[1] * (h[1][0] * v[0] + h[1][1] * v[1]));
                quad_roots(c, g, -mu, &mut push);
            }
            PolyKind::Radial => {
                let mut radii = Vec::with_capacity(2);
                quad_roots(self.u.c20, self.u.c10, self.u.c00 - mu, &mut |rr| radii.push(rr));
                if self.u.c20 == 0.0 && self.u.c10 == 0.0 {
                    radii.clear();
                }
                let p2 = self.x0[0] * self.x0[0] + self.x0[1] * self.x0[1];
                let pv = self.x0[0] * v[0] + self.x0[1] * v[1];
                for rr in radii.into_iter().filter(|&rr| rr >= 0.0) {
                    quad_roots(1.0, 2.0 * pv, p2 - rr * rr, &mut push);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    fn u_at(&self, v: [f64; 2], t: f64) -> f64 {
        self.u.value([self.x0[0] + t * v[0], self.x0[1] + t * v[1]])
    }

    /// `Σ ½(b² − a²)` over the parts of the ray where `u − u(x0) ≤ mu`.
    fn below_measure(&self, theta: f64, mu: f64) -> f64 {
        let r = self.radius(theta);
        let v = Self::dir(theta);
        let mut a = 0.0;
        let mut acc = 0.0;
        for b in self.crossings(v, mu, r).into_iter().chain(std::iter::once(r)) {
            if b > a && self.u_at(v, 0.5 * (a + b)) <= mu {
                acc += 0.5 * (b * b - a * a);
            }
            a = b;
        }
        acc
    }

    fn signature(&self, theta: f64, mu: Option<f64>) -> (usize, usize) {
        let r = self.radius(theta);
        let c = mu.map_or(0, |m| self.crossings(Self::dir(theta), m, r).len());
        (c, self.pilot_kinks(theta, r))
    }

    /// Breakpoints in `[−π, π]` where the ray structure changes, plus `extra`.
    fn breakpoints(&self, mu: Option<f64>, extra: &[f64]) -> Vec<f64> {
        let step = TAU / GRID as f64;
        let mut pts = vec![-PI, PI];
        let mut prev = self.signature(-PI, mu);
        for i in 1..=GRID {
            let th = -PI + i as f64 * step;
            let sig = self.signature(th, mu);
            if sig != prev {
                let (mut lo, mut hi) = (th - step, th);
                while hi - lo > 1e-13 {
                    let mid = 0.5 * (lo + hi);
                    if self.signature(mid, mu) == prev {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                pts.push(0.5 * (lo + hi));
            }
            prev = sig;
        }
        for &e in extra {
            let e = (e + PI).rem_euclid(TAU) - PI;
            pts.push(e);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        pts
    }

    fn integrate<F: Fn(f64) -> f64>(&self, g: F, pts: &[f64], tol: f64) -> Result<f64> {
        let mut acc = 0.0;
        for w in pts.windows(2) {
            acc += adaptive_gauss(&g, w[0], w[1], tol * (w[1] - w[0]) / TAU)?;
        }
        if let Some(e) = self.failure.borrow_mut().take() {
            return Err(e);
        }
        Ok(acc)
    }
}

/// The value `μ` of `u` that splits the exact amoeba around `x0` into `|A|/2 + δA` with
/// `u ≤ μ` and `|A|/2 − δA` above, together with the area diagnostics.
pub fn continuous_median_oracle(
    f: &PolyField,
    u: &PolyField,
    metric: &AmoebaMetric,
    rho: f64,
    x0: [f64; 2],
    offset: AreaOffset,
) -> Result<OracleResult> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid("rho", format!("{rho} is not positive")));
    }
    let ju = u.eval(x0);
    let gu = ju.gradient[0].hypot(ju.gradient[1]);
    if gu < EPS_SING {
        return Err(Error::SingularFrame("∇u vanishes at the amoeba centre".into()));
    }
    let mut shifted = *u;
    shifted.c00 -= ju.value;
    let oracle = Oracle {
        f,
        u: shifted,
        metric,
        rho,
        x0,
        kinked: metric.dnu_at_zero_from(1.0).abs() > 1e-12,
        cache: RefCell::new(HashMap::new()),
        failure: RefCell::new(None),
    };
    let tol = 1e-13 * rho * rho;
    let theta_eta = ju.gradient[1].atan2(ju.gradient[0]);

    let half_pts = oracle.breakpoints(None, &[theta_eta + 0.5 * PI, theta_eta - 0.5 * PI]);
    let area = oracle.integrate(|th| 0.5 * oracle.radius(th).powi(2), &half_pts, tol)?;
    let lower_pts: Vec<f64> = half_pts
        .windows(2)
        .filter(|w| (0.5 * (w[0] + w[1]) - theta_eta).cos() < 0.0)
        .flat_map(|w| [w[0], w[1]])
        .collect();
    let mut lower_half = 0.0;
    for w in lower_pts.chunks(2) {
        lower_half += oracle.integrate(|th| 0.5 * oracle.radius(th).powi(2), w, tol)?;
    }

    let below = |mu: f64| -> Result<f64> {
        let pts = oracle.breakpoints(Some(mu), &[]);
        oracle.integrate(|th| oracle.below_measure(th, mu), &pts, tol)
    };

    let delta_area = match offset {
        AreaOffset::Exact(d) => d,
        AreaOffset::Law(kind, gamma) => bias_delta_area(kind, gamma, rho, area),
    };
    let target = 0.5 * area + delta_area;
    if !(target > 0.0 && target < area) {
        return Err(Error::invalid("delta_area", format!("{delta_area} leaves no area on one side")));
    }

    let delta_total = area - 2.0 * below(0.0)?;
    let delta1 = (area - lower_half) - lower_half;

    let span = {
        let h = ju.hessian;
        let hn = h[0][0].abs() + h[0][1].abs() + h[1][0].abs() + h[1][1].abs();
        let t = oracle.t_max();
        gu * t + hn * t * t + 1e-300
    };
    let failure = RefCell::new(None);
    let residual = |mu: f64| match below(mu) {
        Ok(v) => v - target,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let mu = brent(residual, -span, span, 1e-14 * span)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(OracleResult {
        mu: ju.value + mu,
        area,
        delta_area,
        delta1,
        delta2: delta_total - delta1,
    })
}
