//! Amoeba metrics `len · ν(β Δf / len)`.

use std::fmt;

/// The penaliser `ν` of an amoeba metric.
#[derive(Clone, Copy)]
pub enum MetricKind {
    /// `ν(s) = 1 + |s|`.
    L1,
    /// `ν(s) = √(1 + s²)`.
    L2,
    /// User-supplied even, nondecreasing `ν` with `ν(0) > 0`, and its derivative.
    Custom { nu: fn(f64) -> f64, dnu: fn(f64) -> f64 },
}

impl fmt::Debug for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::L1 => f.write_str("L1"),
            MetricKind::L2 => f.write_str("L2"),
            MetricKind::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl PartialEq for MetricKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (MetricKind::L1, MetricKind::L1) | (MetricKind::L2, MetricKind::L2) => true,
            (MetricKind::Custom { nu: a, dnu: da }, MetricKind::Custom { nu: b, dnu: db }) => {
                std::ptr::fn_addr_eq(*a, *b) && std::ptr::fn_addr_eq(*da, *db)
            }
            _ => false,
        }
    }
}

/// A metric kind together with its contrast scale `β > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmoebaMetric {
    pub kind: MetricKind,
    pub beta: f64,
}

impl AmoebaMetric {
    pub fn new(kind: MetricKind, beta: f64) -> field_core::Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(field_core::Error::invalid("beta", format!("{beta} is not positive")));
        }
        if let MetricKind::Custom { nu, .. } = kind {
            let n0 = nu(0.0);
            if !(n0.is_finite() && n0 > 0.0) {
                return Err(field_core::Error::invalid("nu", format!("nu(0) = {n0} is not positive")));
            }
        }
        Ok(Self { kind, beta })
    }

    pub fn l1(beta: f64) -> Self {
        Self { kind: MetricKind::L1, beta }
    }

    pub fn l2(beta: f64) -> Self {
        Self { kind: MetricKind::L2, beta }
    }

    /// `ν(s)`, without `β`.
    #[inline]
    pub fn nu(&self, s: f64) -> f64 {
        match self.kind {
            MetricKind::L1 => 1.0 + s.abs(),
            MetricKind::L2 => (1.0 + s * s).sqrt(),
            MetricKind::Custom { nu, .. } => nu(s),
        }
    }

    /// `ν′(s)`, without `β`; zero at the L¹ kink.
    #[inline]
    pub fn dnu(&self, s: f64) -> f64 {
        match self.kind {
            MetricKind::L1 => {
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            MetricKind::L2 => s / (1.0 + s * s).sqrt(),
            MetricKind::Custom { dnu, .. } => dnu(s),
        }
    }

    /// One-sided derivative `lim ν′(t)` as `t → 0` from the side of `sign`.
    pub fn dnu_at_zero_from(&self, sign: f64) -> f64 {
        let t = f64::MIN_POSITIVE.copysign(sign);
        self.dnu(t)
    }

    /// Cost of one graph edge of Euclidean length `spatial` across a grey-value step `df`.
    #[inline]
    pub fn edge_weight(&self, spatial: f64, df: f64) -> f64 {
        spatial * self.nu(self.beta * df / spatial)
    }
}
