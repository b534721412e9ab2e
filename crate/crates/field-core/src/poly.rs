//! Analytic bivariate fields of total degree two, used as exact test data.

/// How the coefficients of a [`PolyField`] are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyKind {
    /// `c00 + c10 x + c01 y + c20 x² + c11 x y + c02 y²`.
    Cartesian,
    /// `c00 + c10 r + c20 r²` with `r = |(x, y)|`; `c01`, `c11`, `c02` are ignored.
    Radial,
}

/// Value, gradient and Hessian of a field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: [f64; 2],
    pub hessian: [[f64; 2]; 2],
}

/// A quadratic polynomial in Cartesian coordinates or in the radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyField {
    pub c00: f64,
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c11: f64,
    pub c02: f64,
    pub kind: PolyKind,
}

impl PolyField {
    pub fn cartesian(c00: f64, c10: f64, c01: f64, c20: f64, c11: f64, c02: f64) -> Self {
        Self { c00, c10, c01, c20, c11, c02, kind: PolyKind::Cartesian }
    }

    pub fn radial(c00: f64, c10: f64, c20: f64) -> Self {
        Self { c00, c10, c01: 0.0, c20, c11: 0.0, c02: 0.0, kind: PolyKind::Radial }
    }

    pub fn constant(c: f64) -> Self {
        Self::cartesian(c, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The quadratic with the given value, gradient and Hessian at the point `at`.
    pub fn from_taylor(at: [f64; 2], value: f64, gradient: [f64; 2], hessian: [[f64; 2]; 2]) -> Self {
        let [a, b] = at;
        let (hxx, hxy, hyy) = (hessian[0][0], hessian[0][1], hessian[1][1]);
        let c10 = gradient[0] - hxx * a - hxy * b;
        let c01 = gradient[1] - hxy * a - hyy * b;
        let c00 = value - gradient[0] * a - gradient[1] * b
            + 0.5 * (hxx * a * a + 2.0 * hxy * a * b + hyy * b * b);
        Self::cartesian(c00, c10, c01, 0.5 * hxx, hxy, 0.5 * hyy)
    }

    pub fn value(&self, p: [f64; 2]) -> f64 {
        let [x, y] = p;
        match self.kind {
            PolyKind::Cartesian => {
                self.c00 + self.c10 * x + self.c01 * y + self.c20 * x * x + self.c11 * x * y + self.c02 * y * y
            }
            PolyKind::Radial => {
                let r = x.hypot(y);
                self.c00 + self.c10 * r + self.c20 * r * r
            }
        }
    }

    /// Exact value, gradient and Hessian. Radial fields with `c10 ≠ 0` are not differentiable at the origin.
    pub fn eval(&self, p: [f64; 2]) -> Jet {
        let [x, y] = p;
        match self.kind {
            PolyKind::Cartesian => Jet {
                value: self.value(p),
                gradient: [
                    self.c10 + 2.0 * self.c20 * x + self.c11 * y,
                    self.c01 + self.c11 * x + 2.0 * self.c02 * y,
                ],
                hessian: [[2.0 * self.c20, self.c11], [self.c11, 2.0 * self.c02]],
            },
            PolyKind::Radial => {
                let r = x.hypot(y);
                let k = self.c10 / r + 2.0 * self.c20;
                let q = self.c10 / (r * r * r);
                Jet {
                    value: self.value(p),
                    gradient: [k * x, k * y],
                    hessian: [[k - q * x * x, -q * x * y], [-q * x * y, k - q * y * y]],
                }
            }
        }
    }

    /// The same function seen in coordinates rotated by `theta`: `q(R x) = p(x)`.
    pub fn rotated(&self, theta: f64) -> Self {
        match self.kind {
            PolyKind::Radial => *self,
            PolyKind::Cartesian => {
                let (s, c) = theta.sin_cos();
                let g = [c * self.c10 - s * self.c01, s * self.c10 + c * self.c01];
                let h = [[2.0 * self.c20, self.c11], [self.c11, 2.0 * self.c02]];
                let r = [[c, -s], [s, c]];
                let mut rh = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                rh[i][j] += r[i][k] * h[k][l] * r[j][l];
                            }
                        }
                    }
                }
                Self::cartesian(self.c00, g[0], g[1], 0.5 * rh[0][0], rh[0][1], 0.5 * rh[1][1])
            }
        }
    }

    /// Directional derivative `d/dt p(origin + t v)`.
    pub fn ray_slope(&self, origin: [f64; 2], v: [f64; 2], t: f64) -> f64 {
        let g = self.eval([origin[0] + t * v[0], origin[1] + t * v[1]]).gradient;
        g[0] * v[0] + g[1] * v[1]
    }

    /// Parameters `t ∈ (0, t_max)` where the ray slope changes sign, ascending.
    pub fn ray_slope_zeros(&self, origin: [f64; 2], v: [f64; 2], t_max: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push = |t: f64| {
            if t > 0.0 && t < t_max && t.is_finite() {
                out.push(t);
            }
        };
        match self.kind {
            PolyKind::Cartesian => {
                let j = self.eval(origin);
                let a = j.gradient[0] * v[0] + j.gradient[1] * v[1];
                let h = j.hessian;
                let b = v[0] * (h[0][0] * v[0] + h[0][1] * v[1]) + v[1] * (h[1][0] * v[0] + h[1][1] * v[1]);
                if b != 0.0 {
                    push(-a / b);
                }
            }
            PolyKind::Radial => {
                let pv = origin[0] * v[0] + origin[1] * v[1];
                push(-pv);
                if self.c20 != 0.0 {
                    let r_star = -self.c10 / (2.0 * self.c20);
                    if r_star > 0.0 {
                        let p2 = origin[0] * origin[0] + origin[1] * origin[1];
                        let disc = pv * pv - (p2 - r_star * r_star);
                        if disc > 0.0 {
                            let sq = disc.sqrt();
                            push(-pv - sq);
                            push(-pv + sq);
                        }
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}
