//! Self-checking verification suites with tabular output.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use amoeba_engine::{AmoebaMetric, BiasKind, MetricKind};
use field_core::{Error, LocalFrame, PolyField, Result};
use rayon::prelude::*;

use crate::coeffs::{j_closed_l1, j_closed_l2, j_quadrature};
use crate::curves::linspace;
use crate::oracle::{continuous_median_oracle, AreaOffset};
use crate::rhs::force_term;
use crate::selfsnakes::{g_jmiv11, selfsnakes_g, selfsnakes_h};
use crate::theorem::{rotationally_symmetric, standard_fixtures, verify_theorem, Fixture, RHO_LIST, TOL_THEOREM};

/// `ν(s) = (1 + s⁴)^{1/4}`.
pub fn quartic_nu(s: f64) -> f64 {
    (1.0 + s.powi(4)).powf(0.25)
}

/// Derivative of [`quartic_nu`].
pub fn quartic_dnu(s: f64) -> f64 {
    s.powi(3) * (1.0 + s.powi(4)).powf(-0.75)
}

/// A smooth custom metric with `ν′(0) = 0`.
pub fn quartic_metric(beta: f64) -> AmoebaMetric {
    AmoebaMetric { kind: MetricKind::Custom { nu: quartic_nu, dnu: quartic_dnu }, beta }
}

fn metric_name(m: &AmoebaMetric) -> &'static str {
    match m.kind {
        MetricKind::L1 => "L1",
        MetricKind::L2 => "L2",
        MetricKind::Custom { .. } => "custom",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Coeffs,
    Selfsnakes,
    Jmiv,
    Theorem,
    Force,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Coeffs, Suite::Selfsnakes, Suite::Jmiv, Suite::Theorem, Suite::Force];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Coeffs => "coeffs",
            Suite::Selfsnakes => "selfsnakes",
            Suite::Jmiv => "jmiv",
            Suite::Theorem => "theorem",
            Suite::Force => "force",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(Suite::name).collect();
            Error::invalid("suite", format!("unknown suite '{s}'; valid suites: {}", names.join(", ")))
        })
    }
}

/// One tolerance check: `value ≤ tolerance` passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {:.3e} (tolerance {:.1e})", self.name, self.value, self.tolerance)
    }
}

/// Checks of a suite and the table behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Text columns prepended to each row.
    pub labels: Vec<Vec<String>>,
    pub label_header: Vec<&'static str>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs one suite.
pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    match suite {
        Suite::Coeffs => coeffs_suite(),
        Suite::Selfsnakes => selfsnakes_suite(),
        Suite::Jmiv => jmiv_suite(),
        Suite::Theorem => theorem_suite(),
        Suite::Force => force_suite(),
    }
}

/// The `(s, α)` grid of the coefficient comparison: 20 × 20 over `[0, 3] × [−π/2, π/2]`.
pub fn coefficient_grid() -> Vec<(f64, f64)> {
    let ss = linspace(0.0, 3.0, 20);
    let aa = linspace(-FRAC_PI_2, FRAC_PI_2, 20);
    ss.iter().flat_map(|&s| aa.iter().map(move |&a| (s, a))).collect()
}

fn coeffs_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for metric in [AmoebaMetric::l2(1.0), AmoebaMetric::l1(1.0)] {
        let closed = |k, s, a| if metric.kind == MetricKind::L2 { j_closed_l2(k, s, a) } else { j_closed_l1(k, s, a) };
        let table: Vec<(f64, f64, u8, f64, f64)> = coefficient_grid()
            .par_iter()
            .flat_map_iter(|&(s, a)| (1..=3u8).map(move |k| (s, a, k)))
            .map(|(s, a, k)| Ok((s, a, k, closed(k, s, a), j_quadrature(&metric, k, s, a)?)))
            .collect::<Result<_>>()?;
        let worst = table.iter().map(|r| (r.3 - r.4).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("{} closed form vs quadrature, max |diff|", metric_name(&metric)), worst, 1e-8));
        for (s, a, k, c, q) in table {
            labels.push(vec![metric_name(&metric).to_string()]);
            rows.push(vec![s, a, k as f64, c, q, (c - q).abs()]);
        }
    }
    Ok(SuiteReport {
        suite: Suite::Coeffs,
        checks,
        label_header: vec!["metric"],
        header: vec!["s", "alpha", "k", "closed", "quadrature", "abs_err"],
        labels,
        rows,
    })
}

fn selfsnakes_suite() -> Result<SuiteReport> {
    const STEP: f64 = 1e-5;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();

    let l2 = AmoebaMetric::l2(1.0);
    let mut worst = 0.0f64;
    for s in linspace(0.0, 3.0, 301) {
        let g = selfsnakes_g(&l2, s)?;
        worst = worst.max((g - 1.0 / (1.0 + s * s)).abs());
    }
    checks.push(Check::at_most("L2 g(s) vs 1/(1+s^2), max |diff|", worst, 1e-10));

    for metric in [AmoebaMetric::l1(1.0), l2, quartic_metric(1.0)] {
        let table: Vec<[f64; 4]> = linspace(0.1, 3.0, 59)
            .par_iter()
            .map(|&s| {
                let h = selfsnakes_h(&metric, s)?;
                let dg = (selfsnakes_g(&metric, s + STEP)? - selfsnakes_g(&metric, s - STEP)?) / (2.0 * STEP);
                Ok([s, h, s * dg, (h - s * dg).abs()])
            })
            .collect::<Result<_>>()?;
        let worst = table.iter().map(|r| r[3]).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("{} h(s) vs s g'(s), max |diff|", metric_name(&metric)), worst, 1e-6));
        for r in table {
            labels.push(vec![metric_name(&metric).to_string()]);
            rows.push(r.to_vec());
        }
    }
    Ok(SuiteReport {
        suite: Suite::Selfsnakes,
        checks,
        label_header: vec!["metric"],
        header: vec!["s", "h", "s_dg", "abs_err"],
        labels,
        rows,
    })
}

fn jmiv_suite() -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (metric, tol) in [(AmoebaMetric::l2(1.0), 1e-6), (AmoebaMetric::l1(1.0), 1e-5)] {
        let table: Vec<[f64; 4]> = linspace(0.1, 3.0, 30)
            .par_iter()
            .map(|&s| {
                let a = g_jmiv11(&metric, s)?;
                let b = selfsnakes_g(&metric, s)?;
                Ok([s, a, b, (a - b).abs()])
            })
            .collect::<Result<_>>()?;
        let worst = table.iter().map(|r| r[3]).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("{} integral g vs coefficient g, max |diff|", metric_name(&metric)), worst, tol));
        for r in table {
            labels.push(vec![metric_name(&metric).to_string()]);
            rows.push(r.to_vec());
        }
    }
    Ok(SuiteReport {
        suite: Suite::Jmiv,
        checks,
        label_header: vec!["metric"],
        header: vec!["s", "g_integral", "g_coefficient", "abs_err"],
        labels,
        rows,
    })
}

/// Fixtures and metrics of the convergence study.
pub fn theorem_cases() -> Vec<(Fixture, AmoebaMetric)> {
    let mut fixtures = standard_fixtures().to_vec();
    fixtures.push(rotationally_symmetric());
    fixtures
        .into_iter()
        .flat_map(|fx| [(fx, AmoebaMetric::l2(1.0)), (fx, AmoebaMetric::l1(1.0))])
        .collect()
}

fn theorem_suite() -> Result<SuiteReport> {
    let reports: Vec<_> = theorem_cases()
        .par_iter()
        .map(|(fx, m)| verify_theorem(&fx.f, &fx.u, m, fx.x0, &RHO_LIST).map(|r| (*fx, *m, r)))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (fx, m, r) in reports {
        let name = format!("{} {}", fx.name, metric_name(&m));
        checks.push(Check::at_most(format!("{name} relative error at rho={}", RHO_LIST[3]), r.relative_error(), TOL_THEOREM));
        let monotone = if r.errors_decrease() { 0.0 } else { 1.0 };
        checks.push(Check::at_most(format!("{name} errors decreasing (0 = yes)"), monotone, 0.0));
        for i in 0..r.rho_list.len() {
            labels.push(vec![fx.name.to_string(), metric_name(&m).to_string()]);
            let order = if i == 0 { f64::NAN } else { r.observed_order[i - 1] };
            rows.push(vec![r.rho_list[i], r.lhs_list[i], r.rhs, r.errors[i], order, r.delta1[i], r.delta2[i]]);
        }
    }
    Ok(SuiteReport {
        suite: Suite::Theorem,
        checks,
        label_header: vec!["fixture", "metric"],
        header: vec!["rho", "lhs", "rhs", "error", "observed_order", "delta1", "delta2"],
        labels,
        rows,
    })
}

/// Measured `6(μ − u(x0))/ρ²` for a flat pilot, a linear `u` and a bias law.
pub fn flat_force_step(metric: &AmoebaMetric, kind: BiasKind, gamma: f64, grad_u: [f64; 2], rho: f64) -> Result<f64> {
    let f = PolyField::constant(0.0);
    let u = PolyField::cartesian(0.0, grad_u[0], grad_u[1], 0.0, 0.0, 0.0);
    let r = continuous_median_oracle(&f, &u, metric, rho, [0.0, 0.0], AreaOffset::Law(kind, gamma))?;
    Ok(6.0 * r.mu / (rho * rho))
}

fn force_suite() -> Result<SuiteReport> {
    const RHO: f64 = 0.05;
    const GAMMA: f64 = 0.8;
    let grad_u = [0.6, 0.8];
    let frame = LocalFrame::from_poly(
        &PolyField::constant(0.0),
        &PolyField::cartesian(0.0, grad_u[0], grad_u[1], 0.0, 0.0, 0.0),
        [0.0, 0.0],
    );
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for metric in [AmoebaMetric::l2(1.0), AmoebaMetric::l1(1.0)] {
        for (kind, name) in [
            (BiasKind::FixedOffset, "fixed_offset"),
            (BiasKind::Quantile, "quantile"),
            (BiasKind::Quadratic, "quadratic"),
        ] {
            let lhs = flat_force_step(&metric, kind, GAMMA, grad_u, RHO)?;
            let expect = force_term(&metric, kind, GAMMA, &frame)?;
            let rel = (lhs - expect).abs() / expect.abs();
            checks.push(Check::at_most(format!("{} {name} relative error at rho={RHO}", metric_name(&metric)), rel, 0.05));
            labels.push(vec![metric_name(&metric).to_string(), name.to_string()]);
            rows.push(vec![RHO, GAMMA, lhs, expect, rel]);
        }
    }
    Ok(SuiteReport {
        suite: Suite::Force,
        checks,
        label_header: vec!["metric", "law"],
        header: vec!["rho", "gamma", "lhs", "force_term", "rel_err"],
        labels,
        rows,
    })
}
