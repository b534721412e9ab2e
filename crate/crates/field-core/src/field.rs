//! Row-major scalar grids with Neumann-replicated finite-difference stencils.

use crate::error::{Error, Result};

/// A real-valued image on a `width × height` grid with isotropic spacing `h`.
///
/// Values are stored row-major, index `y * width + x`. Every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    spacing: f64,
    values: Vec<f64>,
}

impl ScalarField {
    pub const MIN_SIDE: usize = 3;

    pub fn new(width: usize, height: usize, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if width < Self::MIN_SIDE || height < Self::MIN_SIDE {
            return Err(Error::invalid(
                "size",
                format!("{width}x{height} is smaller than {m}x{m}", m = Self::MIN_SIDE),
            ));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("spacing", format!("{spacing} is not a positive length")));
        }
        if values.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {width}x{height} grid",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite value at pixel ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self { width, height, spacing, values })
    }

    pub fn filled(width: usize, height: usize, spacing: f64, value: f64) -> Result<Self> {
        Self::new(width, height, spacing, vec![value; width * height])
    }

    /// Samples `f(x, y)` at pixel indices.
    pub fn from_fn(
        width: usize,
        height: usize,
        spacing: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, spacing, values)
    }

    /// A field of the same geometry holding `values`.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.width, self.height, self.spacing, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.width, index / self.width)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Value at signed indices, replicating the border (Neumann boundary).
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.values[yc * self.width + xc]
    }

    pub fn same_shape(&self, other: &ScalarField) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn ensure_same_shape(&self, other: &ScalarField, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Central-difference gradient `(f_x, f_y)`.
    pub fn gradient(&self, x: usize, y: usize) -> [f64; 2] {
        let (x, y) = (x as isize, y as isize);
        let h2 = 2.0 * self.spacing;
        [
            (self.get_clamped(x + 1, y) - self.get_clamped(x - 1, y)) / h2,
            (self.get_clamped(x, y + 1) - self.get_clamped(x, y - 1)) / h2,
        ]
    }

    /// Second-order Hessian `[[f_xx, f_xy], [f_xy, f_yy]]` from the 3×3 stencil.
    pub fn hessian(&self, x: usize, y: usize) -> [[f64; 2]; 2] {
        let (x, y) = (x as isize, y as isize);
        let hh = self.spacing * self.spacing;
        let c = self.get_clamped(x, y);
        let fxx = (self.get_clamped(x + 1, y) - 2.0 * c + self.get_clamped(x - 1, y)) / hh;
        let fyy = (self.get_clamped(x, y + 1) - 2.0 * c + self.get_clamped(x, y - 1)) / hh;
        let fxy = (self.get_clamped(x + 1, y + 1) - self.get_clamped(x + 1, y - 1)
            - self.get_clamped(x - 1, y + 1)
            + self.get_clamped(x - 1, y - 1))
            / (4.0 * hh);
        [[fxx, fxy], [fxy, fyy]]
    }
}
