//! Initial level-set functions from a PGM or a parametric contour.

use std::path::Path;

use anyhow::Context;
use field_core::io::pgm::load_pgm;
use field_core::levelset::{signed_distance, Shape};
use field_core::ScalarField;

use crate::error::UsageError;

/// A parsed `u0` specification.
#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Image(String),
    Shape(Shape),
}

fn numbers(key: &str, body: &str, n: usize) -> anyhow::Result<Vec<f64>> {
    let v: Vec<f64> = body
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("u0 `{key}:{body}`: expected {n} comma-separated numbers")))?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        return Err(UsageError(format!("u0 `{key}:{body}`: expected {n} finite numbers")).into());
    }
    Ok(v)
}

impl InitSpec {
    pub fn parse(spec: &str) -> anyhow::Result<Self> {
        if let Some(body) = spec.strip_prefix("circle:") {
            let v = numbers("circle", body, 3)?;
            if v[2] <= 0.0 {
                return Err(UsageError(format!("u0 circle radius {} is not positive", v[2])).into());
            }
            return Ok(Self::Shape(Shape::Circle { cx: v[0], cy: v[1], r: v[2] }));
        }
        if let Some(body) = spec.strip_prefix("rect:") {
            let v = numbers("rect", body, 4)?;
            return Ok(Self::Shape(Shape::Rect { x0: v[0], y0: v[1], x1: v[2], y1: v[3] }));
        }
        if spec.is_empty() {
            return Err(UsageError("u0 is empty".into()).into());
        }
        Ok(Self::Image(spec.to_string()))
    }

    /// The initial field on a `width × height` grid: the PGM values, or the signed
    /// chamfer distance to the contour, positive inside.
    pub fn build(&self, width: usize, height: usize, spacing: f64) -> anyhow::Result<ScalarField> {
        match self {
            Self::Image(p) => {
                let u = load_pgm(Path::new(p)).with_context(|| format!("loading u0 {p}"))?;
                if u.width() != width || u.height() != height {
                    return Err(field_core::Error::DimensionMismatch(format!(
                        "u0 is {}x{}, image is {width}x{height}",
                        u.width(),
                        u.height()
                    ))
                    .into());
                }
                Ok(u)
            }
            Self::Shape(s) => Ok(signed_distance(&s.mask(width, height), width, height, spacing)?),
        }
    }
}
