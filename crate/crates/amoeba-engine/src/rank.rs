//! Median and biased rank selection.

use std::f64::consts::PI;

use field_core::{Error, Result};

/// Which rank the filter selects from the sorted amoeba values `v_0 ≤ … ≤ v_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiasKind {
    /// Lower median `v_{⌊p/2⌋}`.
    None,
    /// `v_{⌊p/2⌋ + b}`.
    FixedOffset,
    /// `v_{q p}`, rounding halves down so that `q = ½` is the lower median.
    Quantile,
    /// `v_{⌊p/2⌋ + r p²}`.
    Quadratic,
}

/// Rank bias of the amoeba filter.
///
/// `value` is `b`, `q` or `r` according to `kind`. In gamma mode it is instead the
/// force coefficient `γ` of the continuum limit, and the discrete parameter is
/// derived from the amoeba radius and grid spacing by [`BiasSpec::resolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSpec {
    pub kind: BiasKind,
    pub value: f64,
    pub gamma_mode: bool,
}

/// A bias with its discrete parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedBias {
    None,
    FixedOffset(f64),
    Quantile(f64),
    Quadratic(f64),
}

impl BiasSpec {
    pub const NONE: BiasSpec = BiasSpec { kind: BiasKind::None, value: 0.0, gamma_mode: false };

    pub fn fixed_offset(b: f64) -> Self {
        Self { kind: BiasKind::FixedOffset, value: b, gamma_mode: false }
    }

    pub fn quantile(q: f64) -> Self {
        Self { kind: BiasKind::Quantile, value: q, gamma_mode: false }
    }

    pub fn quadratic(r: f64) -> Self {
        Self { kind: BiasKind::Quadratic, value: r, gamma_mode: false }
    }

    pub fn gamma(kind: BiasKind, gamma: f64) -> Self {
        Self { kind, value: gamma, gamma_mode: true }
    }

    /// Converts to a discrete rank rule for amoebas of radius `rho` on a grid of spacing `h`.
    ///
    /// Gamma mode targets a selected-rank area offset `δA` of `γρ³/3` (fixed offset and
    /// quantile) or `γ|A|²/(3π²ρ)` (quadratic), counting one pixel per `h²` of area.
    pub fn resolve(&self, rho: f64, spacing: f64) -> Result<ResolvedBias> {
        if !self.value.is_finite() {
            return Err(Error::invalid("bias.value", "must be finite"));
        }
        let v = self.value;
        let hh = spacing * spacing;
        let r = match (self.kind, self.gamma_mode) {
            (BiasKind::None, _) => ResolvedBias::None,
            (BiasKind::FixedOffset, false) => ResolvedBias::FixedOffset(v),
            (BiasKind::FixedOffset, true) => ResolvedBias::FixedOffset(v * rho.powi(3) / (3.0 * hh)),
            (BiasKind::Quantile, false) => ResolvedBias::Quantile(v),
            (BiasKind::Quantile, true) => ResolvedBias::Quantile(0.5 + v * rho / (3.0 * PI)),
            (BiasKind::Quadratic, false) => ResolvedBias::Quadratic(v),
            (BiasKind::Quadratic, true) => ResolvedBias::Quadratic(v * hh / (3.0 * PI * PI * rho)),
        };
        if let ResolvedBias::Quantile(q) = r {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::invalid("bias.value", format!("quantile {q} outside (0, 1)")));
            }
        }
        Ok(r)
    }
}

impl ResolvedBias {
    /// Selected index into the ascending sort of `n ≥ 1` values, clamped to `[0, n−1]`.
    pub fn index(&self, n: usize) -> usize {
        debug_assert!(n > 0);
        let p = (n - 1) as i64;
        let mid = p / 2;
        let idx = match *self {
            ResolvedBias::None => mid,
            ResolvedBias::FixedOffset(b) => mid + b.round() as i64,
            ResolvedBias::Quantile(q) => (q * p as f64 - 0.5).ceil() as i64,
            ResolvedBias::Quadratic(r) => mid + (r * (p * p) as f64).round() as i64,
        };
        idx.clamp(0, p) as usize
    }

    /// Selects the biased rank of `values`, reordering them in place.
    pub fn select(&self, values: &mut [f64]) -> f64 {
        let k = self.index(values.len());
        *values.select_nth_unstable_by(k, f64::total_cmp).1
    }
}

/// Rank selection from a nonempty multiset.
pub fn rank_select(values: &[f64], bias: &ResolvedBias) -> f64 {
    let mut v = values.to_vec();
    bias.select(&mut v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_three() {
        assert_eq!(rank_select(&[3.0, 1.0, 2.0], &ResolvedBias::None), 2.0);
    }

    #[test]
    fn lower_median_for_even_counts() {
        assert_eq!(rank_select(&[4.0, 1.0, 3.0, 2.0], &ResolvedBias::None), 2.0);
    }

    #[test]
    fn fixed_offsets() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(rank_select(&v, &ResolvedBias::FixedOffset(2.0)), 5.0);
        assert_eq!(rank_select(&v, &ResolvedBias::FixedOffset(-2.0)), 1.0);
        assert_eq!(rank_select(&v, &ResolvedBias::FixedOffset(40.0)), 5.0);
        assert_eq!(rank_select(&v, &ResolvedBias::FixedOffset(0.5)), 4.0);
        assert_eq!(rank_select(&v, &ResolvedBias::FixedOffset(-0.5)), 2.0);
    }

    #[test]
    fn quantile_index() {
        let v: Vec<f64> = (1..=11).map(|k| 10.0 * k as f64).collect();
        assert_eq!(rank_select(&v, &ResolvedBias::Quantile(0.7)), 80.0);
        for n in 1..40 {
            assert_eq!(ResolvedBias::Quantile(0.5).index(n), ResolvedBias::None.index(n), "n = {n}");
        }
        assert_eq!(ResolvedBias::Quantile(0.25).index(3), 0);
    }

    #[test]
    fn quadratic_index() {
        assert_eq!(ResolvedBias::Quadratic(0.01).index(21), 10 + 4);
        assert_eq!(ResolvedBias::Quadratic(-1.0).index(21), 0);
    }

    #[test]
    fn gamma_resolution() {
        let b = BiasSpec::gamma(BiasKind::FixedOffset, 3.0).resolve(2.0, 1.0).unwrap();
        assert_eq!(b, ResolvedBias::FixedOffset(8.0));
        let q = BiasSpec::gamma(BiasKind::Quantile, 3.0 * PI).resolve(0.1, 1.0).unwrap();
        assert!(matches!(q, ResolvedBias::Quantile(x) if (x - 0.6).abs() < 1e-15));
        assert!(BiasSpec::quantile(1.0).resolve(1.0, 1.0).is_err());
        assert!(BiasSpec::quantile(0.0).resolve(1.0, 1.0).is_err());
        assert!(BiasSpec::fixed_offset(f64::NAN).resolve(1.0, 1.0).is_err());
    }
}
