//! Gauge-frame derivatives of a pilot image `f` and a level-set function `u`.
//!
//! `χ = ∇f/|∇f|` and `ζ = χ⊥` span the frame of `f`; `η = ∇u/|∇u|` and `ξ = η⊥` that of `u`.
//! `α` is the counter-clockwise angle from `χ` to `η`.

use crate::field::ScalarField;
use crate::poly::PolyField;

/// Gradient magnitudes below this are treated as vanishing.
pub const EPS_SING: f64 = 1e-8;

/// Local differential data of `(f, u)` at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub grad_f_mag: f64,
    pub grad_u_mag: f64,
    /// Angle from `∇f` to `∇u` in `(−π, π]`; zero when either gradient is singular.
    pub alpha: f64,
    pub f_zz: f64,
    pub f_zx: f64,
    pub f_xx: f64,
    pub u_xixi: f64,
    /// `|∇f| < EPS_SING`: `α` and the `f` frame are undefined.
    pub f_singular: bool,
    /// `|∇u| < EPS_SING`: `ξ` is undefined and `u_xixi` is reported as zero.
    pub u_singular: bool,
}

fn quad_form(h: &[[f64; 2]; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * (h[0][0] * b[0] + h[0][1] * b[1]) + a[1] * (h[1][0] * b[0] + h[1][1] * b[1])
}

impl LocalFrame {
    /// Builds the frame from Cartesian gradients and Hessians.
    pub fn from_derivatives(
        grad_f: [f64; 2],
        hess_f: [[f64; 2]; 2],
        grad_u: [f64; 2],
        hess_u: [[f64; 2]; 2],
    ) -> Self {
        let sf = grad_f[0].hypot(grad_f[1]);
        let su = grad_u[0].hypot(grad_u[1]);
        let f_singular = sf < EPS_SING;
        let u_singular = su < EPS_SING;

        let eta = if u_singular { [1.0, 0.0] } else { [grad_u[0] / su, grad_u[1] / su] };
        let xi = [-eta[1], eta[0]];
        let chi = if f_singular { eta } else { [grad_f[0] / sf, grad_f[1] / sf] };
        let zeta = [-chi[1], chi[0]];

        let alpha = if f_singular || u_singular {
            0.0
        } else {
            let cross = chi[0] * eta[1] - chi[1] * eta[0];
            let dot = chi[0] * eta[0] + chi[1] * eta[1];
            let a = cross.atan2(dot);
            if a == -std::f64::consts::PI {
                std::f64::consts::PI
            } else {
                a
            }
        };

        Self {
            grad_f_mag: sf,
            grad_u_mag: su,
            alpha,
            f_zz: quad_form(&hess_f, zeta, zeta),
            f_zx: quad_form(&hess_f, zeta, chi),
            f_xx: quad_form(&hess_f, chi, chi),
            u_xixi: if u_singular { 0.0 } else { quad_form(&hess_u, xi, xi) },
            f_singular,
            u_singular,
        }
    }

    /// Exact frame of two analytic fields at `p`.
    pub fn from_poly(f: &PolyField, u: &PolyField, p: [f64; 2]) -> Self {
        let jf = f.eval(p);
        let ju = u.eval(p);
        Self::from_derivatives(jf.gradient, jf.hessian, ju.gradient, ju.hessian)
    }

    /// Frame of two grid fields at pixel `(x, y)` by central differences.
    pub fn from_fields(f: &ScalarField, u: &ScalarField, x: usize, y: usize) -> Self {
        Self::from_derivatives(f.gradient(x, y), f.hessian(x, y), u.gradient(x, y), u.hessian(x, y))
    }

    pub fn is_singular(&self) -> bool {
        self.f_singular || self.u_singular
    }
}
