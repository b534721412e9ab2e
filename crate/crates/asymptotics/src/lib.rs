//! Continuum limits of amoeba active contours: structural coefficients, PDE right-hand
//! sides, bias force terms and a continuous-domain amoeba median oracle.

pub mod coeffs;
pub mod curves;
pub mod oracle;
pub mod quad;
pub mod rhs;
pub mod selfsnakes;
pub mod theorem;
pub mod verify;

pub use coeffs::{j_closed_l1, j_closed_l2, j_coefficient, j_quadrature, j_tilde, k_integral, CoefficientSet, Method};
pub use rhs::{aac_rhs, aac_rhs_l2, bias_delta_area, force_term, gac_rhs, selfsnakes_rhs};
pub use selfsnakes::{g_jmiv11, selfsnakes_dg, selfsnakes_g, selfsnakes_h};
pub use oracle::{arc_length_root, continuous_median_oracle, contour_radius, AreaOffset, OracleResult};
pub use theorem::{verify_theorem, ConvergenceReport, Fixture, RHO_LIST, TOL_THEOREM};
pub use curves::{coefficient_curves, linspace, CurveRow};
pub use verify::{run_suite, Check, Suite, SuiteReport};
