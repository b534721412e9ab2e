//! Adaptive quadrature and bracketed root finding.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use field_core::{Error, Result};
use gauss_quad::legendre::GaussLegendre;
use roots::{find_root_brent, Convergency};

/// Default absolute tolerance of the coefficient integrals.
pub const TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 50;

struct Simpson<'a, F> {
    f: &'a F,
    worst: f64,
    failed: bool,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, fa: f64, m: f64, fm: f64, b: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        let tol = tol.max(noise);
        if delta.abs() <= 15.0 * tol || depth >= MAX_DEPTH || (b - a).abs() < 8.0 * f64::EPSILON * a.abs().max(b.abs()) {
            if delta.abs() > 15.0 * tol {
                self.failed = true;
                self.worst = self.worst.max(delta.abs() / 15.0);
            }
            return left + right + delta / 15.0;
        }
        self.recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)
            + self.recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut s = Simpson { f, worst: 0.0, failed: false };
    let v = s.recurse(a, fa, m, fm, b, fb, whole, tol, 0);
    if s.failed || !v.is_finite() {
        return Err(Error::Numeric(format!(
            "adaptive Simpson on [{a}, {b}] reached error {:.3e} above tolerance {tol:.1e}",
            s.worst
        )));
    }
    Ok(v)
}

/// Adaptive Simpson over consecutive breakpoints, sharing `tol` in proportion to length.
pub fn simpson_split<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: f64) -> Result<f64> {
    let total = (points[points.len() - 1] - points[0]).abs();
    let mut acc = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            acc += simpson(f, w[0], w[1], tol * (w[1] - w[0]) / total)?;
        }
    }
    Ok(acc)
}

fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(20).unwrap()))
}

/// Twenty-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss20<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    gl20().integrate(a, b, f)
}

#[derive(PartialEq)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Eq for Panel {}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

const MAX_PANELS: usize = 20_000;

/// Globally adaptive 20-point Gauss-Legendre quadrature to absolute tolerance `tol`.
///
/// The panel with the largest error estimate is bisected until the summed estimate
/// drops below `tol`.
pub fn adaptive_gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let panel = |a: f64, b: f64, whole: f64| {
        let m = 0.5 * (a + b);
        let value = gauss20(f, a, m) + gauss20(f, m, b);
        Panel { a, b, value, error: (value - whole).abs() }
    };
    let first = panel(a, b, gauss20(f, a, b));
    let mut total_err = first.error;
    let mut heap = std::collections::BinaryHeap::from([first]);
    let mut count = 1;
    loop {
        if !total_err.is_finite() {
            return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        let top = heap.peek().expect("at least one panel");
        let floor = 16.0 * f64::EPSILON * top.a.abs().max(top.b.abs()).max(1.0);
        if total_err <= tol || top.b - top.a < floor {
            break;
        }
        if count >= MAX_PANELS {
            return Err(Error::Numeric(format!(
                "adaptive Gauss-Legendre on [{a}, {b}] reached error {total_err:.3e} above {tol:.1e}"
            )));
        }
        let p = heap.pop().expect("at least one panel");
        let m = 0.5 * (p.a + p.b);
        let (l, r) = (panel(p.a, m, gauss20(f, p.a, m)), panel(m, p.b, gauss20(f, m, p.b)));
        total_err += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
        count += 1;
    }
    let sum: f64 = heap.iter().map(|p| p.value).sum();
    Ok(sum)
}

struct XTol(f64);

impl Convergency<f64> for XTol {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= self.0
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 500
    }
}

/// Brent's method on a sign-changing bracket `[a, b]`, to abscissa tolerance `xtol`.
pub fn brent<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    find_root_brent(a, b, f, &mut XTol(xtol))
        .map_err(|e| Error::Numeric(format!("root bracket [{a}, {b}]: {e:?}")))
}
