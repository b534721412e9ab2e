//! Convergence of the amoeba median step to the limit PDE as the amoeba radius shrinks.

use std::f64::consts::PI;

use amoeba_engine::AmoebaMetric;
use field_core::{Error, LocalFrame, PolyField, Result, EPS_SING};
use rayon::prelude::*;

use crate::oracle::{continuous_median_oracle, AreaOffset};
use crate::rhs::aac_rhs;

/// Relative error allowed at the smallest radius.
pub const TOL_THEOREM: f64 = 0.05;

/// The radii of the standard convergence study.
pub const RHO_LIST: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// Measured step `6(μ − u(x0))/ρ²` against the PDE right-hand side, per radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rho_list: Vec<f64>,
    pub lhs_list: Vec<f64>,
    pub rhs: f64,
    pub errors: Vec<f64>,
    /// `log2(e_i / e_{i+1})` for consecutive radii.
    pub observed_order: Vec<f64>,
    pub delta1: Vec<f64>,
    pub delta2: Vec<f64>,
}

impl ConvergenceReport {
    /// Error at the smallest radius relative to `|rhs|`.
    pub fn relative_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(f64::NAN) / self.rhs.abs()
    }

    pub fn errors_decrease(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.errors.iter().all(|e| e.is_finite()) && self.errors_decrease() && self.relative_error() <= tol
    }
}

/// Runs the continuous median oracle for each radius and compares with [`aac_rhs`].
pub fn verify_theorem(
    f: &PolyField,
    u: &PolyField,
    metric: &AmoebaMetric,
    x0: [f64; 2],
    rho_list: &[f64],
) -> Result<ConvergenceReport> {
    if rho_list.len() < 3 {
        return Err(Error::invalid("rho_list", "needs at least three radii"));
    }
    if !rho_list.windows(2).all(|w| w[1] < w[0]) || rho_list.iter().any(|&r| r.is_nan() || r <= 0.0) {
        return Err(Error::invalid("rho_list", "must be positive and strictly decreasing"));
    }
    let frame = LocalFrame::from_poly(f, u, x0);
    if frame.grad_f_mag < EPS_SING || frame.grad_u_mag < EPS_SING {
        return Err(Error::SingularFrame("verify_theorem needs nonvanishing ∇f and ∇u at x0".into()));
    }
    let rhs = aac_rhs(metric, &frame)?;
    let u0 = u.value(x0);
    let runs: Vec<_> = rho_list
        .par_iter()
        .map(|&rho| continuous_median_oracle(f, u, metric, rho, x0, AreaOffset::Exact(0.0)))
        .collect::<Result<_>>()?;
    let lhs_list: Vec<f64> = runs.iter().zip(rho_list).map(|(r, rho)| 6.0 * (r.mu - u0) / (rho * rho)).collect();
    let errors: Vec<f64> = lhs_list.iter().map(|l| (l - rhs).abs()).collect();
    let observed_order = errors
        .windows(2)
        .zip(rho_list.windows(2))
        .map(|(e, r)| (e[0] / e[1]).ln() / (r[0] / r[1]).ln())
        .collect();
    Ok(ConvergenceReport {
        rho_list: rho_list.to_vec(),
        lhs_list,
        rhs,
        errors,
        observed_order,
        delta1: runs.iter().map(|r| r.delta1).collect(),
        delta2: runs.iter().map(|r| r.delta2).collect(),
    })
}

/// A pilot image and level-set function with the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub f: PolyField,
    pub u: PolyField,
    pub x0: [f64; 2],
}

const HESS_F: [[f64; 2]; 2] = [[0.6, 0.4], [0.4, -0.5]];
const HESS_U: [[f64; 2]; 2] = [[0.5, -0.3], [-0.3, 0.8]];

fn quadratic_pair(name: &'static str, alpha: f64) -> Fixture {
    let x0 = [0.0, 0.0];
    let f = PolyField::from_taylor(x0, 0.0, [0.8, 0.0], HESS_F);
    let u = PolyField::from_taylor(x0, 0.0, [alpha.cos(), alpha.sin()], HESS_U);
    Fixture { name, f, u, x0 }
}

/// Quadratic pair with parallel gradients.
pub fn aligned() -> Fixture {
    quadratic_pair("aligned", 0.0)
}

/// Quadratic pair with orthogonal gradients.
pub fn orthogonal() -> Fixture {
    quadratic_pair("orthogonal", 0.5 * PI)
}

/// Quadratic pair with gradients at an angle of `π/3`.
pub fn generic() -> Fixture {
    quadratic_pair("generic", PI / 3.0)
}

/// Both fields radial about the origin, evaluated off-centre.
pub fn rotationally_symmetric() -> Fixture {
    Fixture {
        name: "rotational",
        f: PolyField::radial(0.0, 0.6, 0.2),
        u: PolyField::radial(0.0, 1.0, -0.15),
        x0: [1.2, 0.5],
    }
}

/// The three quadratic fixtures of the convergence study.
pub fn standard_fixtures() -> [Fixture; 3] {
    [aligned(), orthogonal(), generic()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs::gac_rhs;

    #[test]
    fn linear_pair_has_zero_step() {
        let f = PolyField::cartesian(0.0, 0.5, -0.2, 0.0, 0.0, 0.0);
        let u = PolyField::cartesian(1.0, 0.3, 0.9, 0.0, 0.0, 0.0);
        for m in [AmoebaMetric::l1(1.0), AmoebaMetric::l2(1.0)] {
            let r = verify_theorem(&f, &u, &m, [0.0, 0.0], &[0.2, 0.1, 0.05]).unwrap();
            assert_eq!(r.rhs, 0.0);
            assert!(r.lhs_list.iter().all(|l| l.abs() < 1e-9), "{:?}", r.lhs_list);
        }
    }

    #[test]
    fn fixtures_have_the_stated_angles() {
        let angle = |fx: Fixture| LocalFrame::from_poly(&fx.f, &fx.u, fx.x0).alpha;
        assert_eq!(angle(aligned()), 0.0);
        assert!((angle(orthogonal()) - 0.5 * PI).abs() < 1e-15);
        assert!((angle(generic()) - PI / 3.0).abs() < 1e-15);
        assert!(angle(rotationally_symmetric()).abs() < 1e-15);
    }

    #[test]
    fn rotational_fixture_matches_gac() {
        let fx = rotationally_symmetric();
        let fr = LocalFrame::from_poly(&fx.f, &fx.u, fx.x0);
        let m = AmoebaMetric::l2(1.0);
        assert!((aac_rhs(&m, &fr).unwrap() - gac_rhs(&m, &fr).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_radii() {
        let fx = aligned();
        let m = AmoebaMetric::l2(1.0);
        assert!(verify_theorem(&fx.f, &fx.u, &m, fx.x0, &[0.1, 0.05]).is_err());
        assert!(verify_theorem(&fx.f, &fx.u, &m, fx.x0, &[0.1, 0.2, 0.05]).is_err());
    }
}
