//! Explicit schemes for `u_t = |∇u| div(g ∇u/|∇u|) + F |∇u|`.
//!
//! The curvature part uses central differences, `⟨∇g, ∇u⟩` and the force term are
//! upwinded. Borders replicate (Neumann).

use field_core::{Error, Result, ScalarField};
use rayon::prelude::*;

/// Regulariser added to `|∇u|²` in the curvature term.
pub const EPS_REG: f64 = 1e-10;

/// How the balloon force `F` is formed from `k` and the edge-stopping function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceMode {
    None,
    /// `F = k`.
    Constant,
    /// `F = g k`.
    Modulated,
    /// `F = S_k̄(g k)` with the soft shrinkage `S_k̄(X) = sgn X · max(|X| − k̄, 0)`.
    Shrinkage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    /// Perona-Malik contrast parameter.
    pub lambda: f64,
    pub tau: f64,
    /// Force coefficient; positive dilates `{u > 0}`.
    pub k: f64,
    pub k_bar: f64,
    /// Gaussian pre-smoothing of the pilot image before taking its gradient.
    pub sigma: f64,
    pub force_mode: ForceMode,
}

impl Default for PdeParams {
    fn default() -> Self {
        Self { lambda: 1.0, tau: 0.25, k: 0.0, k_bar: 0.0, sigma: 0.0, force_mode: ForceMode::None }
    }
}

impl PdeParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} is not positive")))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("{v} is negative or not finite")))
            }
        };
        pos("lambda", self.lambda)?;
        pos("tau", self.tau)?;
        nonneg("k_bar", self.k_bar)?;
        nonneg("sigma", self.sigma)?;
        if !self.k.is_finite() {
            return Err(Error::invalid("k", "must be finite"));
        }
        Ok(())
    }
}

/// Perona-Malik edge-stopping function `1 / (1 + s²/λ²)` of the squared gradient `s2`.
pub fn edge_stop_g(s2: f64, lambda: f64) -> f64 {
    1.0 / (1.0 + s2 / (lambda * lambda))
}

pub fn soft_shrink(x: f64, threshold: f64) -> f64 {
    x.signum() * (x.abs() - threshold).max(0.0)
}

/// Separable convolution with a sampled Gaussian truncated at `3σ`, normalised to unit mass.
pub fn gaussian_smooth(f: &ScalarField, sigma: f64) -> Result<ScalarField> {
    let s = sigma / f.spacing();
    if s <= 0.0 {
        return Ok(f.clone());
    }
    let radius = (3.0 * s).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius).map(|i| (-(i * i) as f64 / (2.0 * s * s)).exp()).collect();
    let mass: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= mass);
    let (w, h) = (f.width(), f.height());
    let mut tmp = vec![0.0; w * h];
    tmp.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, out) in row.iter_mut().enumerate() {
            *out = (-radius..=radius)
                .zip(&kernel)
                .map(|(d, k)| k * f.get_clamped(x as isize + d, y as isize))
                .sum();
        }
    });
    let rows = ScalarField::new(w, h, f.spacing(), tmp)?;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            *o = (-radius..=radius)
                .zip(&kernel)
                .map(|(d, k)| k * rows.get_clamped(x as isize, y as isize + d))
                .sum();
        }
    });
    f.with_values(out)
}

/// `g(|∇f_σ|²)` on every pixel, with central differences.
pub fn edge_stop_field(f: &ScalarField, lambda: f64, sigma: f64) -> Result<ScalarField> {
    let fs = gaussian_smooth(f, sigma)?;
    let vals = (0..fs.len())
        .map(|i| {
            let (x, y) = fs.coords(i);
            let [gx, gy] = fs.gradient(x, y);
            edge_stop_g(gx * gx + gy * gy, lambda)
        })
        .collect();
    f.with_values(vals)
}

/// A geodesic active contour solver with its edge-stopping field precomputed.
#[derive(Debug, Clone)]
pub struct GacSolver {
    g: ScalarField,
    params: PdeParams,
}

impl GacSolver {
    pub fn new(f: &ScalarField, params: PdeParams) -> Result<Self> {
        params.validate()?;
        let g = edge_stop_field(f, params.lambda, params.sigma)?;
        let h = f.spacing();
        let gmax = g.min_max().1;
        if params.tau > 0.25 * h * h / gmax + 1e-15 {
            log::warn!("tau = {} exceeds the explicit stability bound {}", params.tau, 0.25 * h * h / gmax);
        }
        Ok(Self { g, params })
    }

    /// Uses a given edge-stopping field.
    pub fn with_edge_stop(g: ScalarField, params: PdeParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { g, params })
    }

    pub fn edge_stop(&self) -> &ScalarField {
        &self.g
    }

    pub fn params(&self) -> &PdeParams {
        &self.params
    }

    fn force(&self, g: f64) -> f64 {
        let p = &self.params;
        match p.force_mode {
            ForceMode::None => 0.0,
            ForceMode::Constant => p.k,
            ForceMode::Modulated => g * p.k,
            ForceMode::Shrinkage => soft_shrink(g * p.k, p.k_bar),
        }
    }

    /// One explicit Euler step.
    pub fn step(&self, u: &ScalarField) -> Result<ScalarField> {
        self.g.ensure_same_shape(u, "gac step")?;
        let w = u.width();
        let h = u.spacing();
        let tau = self.params.tau;
        let g = &self.g;
        let mut out = vec![0.0; u.len()];
        out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            let yi = y as isize;
            for (x, o) in row.iter_mut().enumerate() {
                let xi = x as isize;
                let c = u.get(x, y);
                let (e, wv) = (u.get_clamped(xi + 1, yi), u.get_clamped(xi - 1, yi));
                let (n, s) = (u.get_clamped(xi, yi + 1), u.get_clamped(xi, yi - 1));
                let dxp = (e - c) / h;
                let dxm = (c - wv) / h;
                let dyp = (n - c) / h;
                let dym = (c - s) / h;
                let ux = 0.5 * (dxp + dxm);
                let uy = 0.5 * (dyp + dym);
                let uxx = (dxp - dxm) / h;
                let uyy = (dyp - dym) / h;
                let uxy = (u.get_clamped(xi + 1, yi + 1) - u.get_clamped(xi + 1, yi - 1)
                    - u.get_clamped(xi - 1, yi + 1)
                    + u.get_clamped(xi - 1, yi - 1))
                    / (4.0 * h * h);
                let gc = g.get(x, y);
                let curv = gc * (uxx * uy * uy - 2.0 * uxy * ux * uy + uyy * ux * ux) / (ux * ux + uy * uy + EPS_REG);

                let gx = (g.get_clamped(xi + 1, yi) - g.get_clamped(xi - 1, yi)) / (2.0 * h);
                let gy = (g.get_clamped(xi, yi + 1) - g.get_clamped(xi, yi - 1)) / (2.0 * h);
                let adv = gx * if gx > 0.0 { dxp } else { dxm } + gy * if gy > 0.0 { dyp } else { dym };

                let f = self.force(gc);
                let grad = if f > 0.0 {
                    (dxp.max(0.0).powi(2) + dxm.min(0.0).powi(2) + dyp.max(0.0).powi(2) + dym.min(0.0).powi(2)).sqrt()
                } else if f < 0.0 {
                    (dxm.max(0.0).powi(2) + dxp.min(0.0).powi(2) + dym.max(0.0).powi(2) + dyp.min(0.0).powi(2)).sqrt()
                } else {
                    0.0
                };
                *o = c + tau * (curv + adv + f * grad);
            }
        });
        u.with_values(out)
    }

    /// Runs `iterations` steps, keeping every `snapshot_every`-th iterate and the last one.
    pub fn run(&self, u0: &ScalarField, iterations: usize, snapshot_every: usize) -> Result<Vec<(usize, ScalarField)>> {
        let mut snaps = Vec::new();
        let mut u = u0.clone();
        for k in 1..=iterations {
            u = self.step(&u)?;
            if k == iterations || (snapshot_every > 0 && k.is_multiple_of(snapshot_every)) {
                snaps.push((k, u.clone()));
            }
        }
        Ok(snaps)
    }
}

/// One GAC step steered by the pilot image `f`.
pub fn gac_step(u: &ScalarField, f: &ScalarField, params: &PdeParams) -> Result<ScalarField> {
    f.ensure_same_shape(u, "gac_step")?;
    GacSolver::new(f, *params)?.step(u)
}

/// One self-snakes step: GAC with the current iterate as its own pilot image and no force.
pub fn self_snakes_step(u: &ScalarField, params: &PdeParams) -> Result<ScalarField> {
    let p = PdeParams { force_mode: ForceMode::None, ..*params };
    GacSolver::new(u, p)?.step(u)
}
