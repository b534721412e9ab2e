//! Reference explicit finite-difference solvers for geodesic active contours and
//! self-snakes, with balloon, edge-modulated and soft-shrinkage force terms.

pub mod gac;

pub use gac::{
    edge_stop_field, edge_stop_g, gac_step, gaussian_smooth, self_snakes_step, soft_shrink, ForceMode, GacSolver,
    PdeParams, EPS_REG,
};
