//! Level-set initialisation and zero-contour extraction.

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// A parametric initial contour in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

impl Shape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Circle { cx, cy, r } => (x - cx).hypot(y - cy) <= r,
            Shape::Rect { x0, y0, x1, y1 } => x >= x0.min(x1) && x <= x0.max(x1) && y >= y0.min(y1) && y <= y0.max(y1),
        }
    }

    pub fn mask(&self, width: usize, height: usize) -> Vec<bool> {
        (0..width * height)
            .map(|i| self.contains((i % width) as f64, (i / width) as f64))
            .collect()
    }
}

/// Two-pass 8-connected chamfer distance (steps 1 and √2) to the nearest `true` pixel.
fn chamfer_to(mask: &[bool], width: usize, height: usize) -> Vec<f64> {
    const D: f64 = std::f64::consts::SQRT_2;
    let mut d: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let at = |x: usize, y: usize| y * width + x;
    for y in 0..height {
        for x in 0..width {
            let mut v = d[at(x, y)];
            if x > 0 {
                v = v.min(d[at(x - 1, y)] + 1.0);
            }
            if y > 0 {
                v = v.min(d[at(x, y - 1)] + 1.0);
                if x > 0 {
                    v = v.min(d[at(x - 1, y - 1)] + D);
                }
                if x + 1 < width {
                    v = v.min(d[at(x + 1, y - 1)] + D);
                }
            }
            d[at(x, y)] = v;
        }
    }
    for y in (0..height).rev() {
        for x in (0..width).rev() {
            let mut v = d[at(x, y)];
            if x + 1 < width {
                v = v.min(d[at(x + 1, y)] + 1.0);
            }
            if y + 1 < height {
                v = v.min(d[at(x, y + 1)] + 1.0);
                if x + 1 < width {
                    v = v.min(d[at(x + 1, y + 1)] + D);
                }
                if x > 0 {
                    v = v.min(d[at(x - 1, y + 1)] + D);
                }
            }
            d[at(x, y)] = v;
        }
    }
    d
}

/// Signed chamfer distance to the mask boundary, positive inside.
///
/// The zero level runs half a step between boundary pixels, so inside pixels
/// hold `d − ½` and outside pixels `−(d − ½)`, scaled by the spacing.
pub fn signed_distance(mask: &[bool], width: usize, height: usize, spacing: f64) -> Result<ScalarField> {
    if mask.len() != width * height {
        return Err(Error::DimensionMismatch(format!("mask of {} for {width}x{height}", mask.len())));
    }
    let inside = mask.iter().filter(|&&m| m).count();
    if inside == 0 || inside == mask.len() {
        return Err(Error::invalid("u0", "initial contour must have both inside and outside pixels"));
    }
    let outside: Vec<bool> = mask.iter().map(|&m| !m).collect();
    let to_out = chamfer_to(&outside, width, height);
    let to_in = chamfer_to(mask, width, height);
    let values = (0..mask.len())
        .map(|i| if mask[i] { (to_out[i] - 0.5) * spacing } else { -(to_in[i] - 0.5) * spacing })
        .collect();
    ScalarField::new(width, height, spacing, values)
}

/// Sub-pixel points where `u` changes sign along horizontal and vertical pixel edges, in pixel units.
pub fn zero_crossings(u: &ScalarField) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    let (w, h) = (u.width(), u.height());
    let mut edge = |a: f64, b: f64, p: [f64; 2], dir: [f64; 2]| {
        if (a >= 0.0) != (b >= 0.0) {
            let t = a / (a - b);
            pts.push([p[0] + t * dir[0], p[1] + t * dir[1]]);
        }
    };
    for y in 0..h {
        for x in 0..w {
            let a = u.get(x, y);
            let p = [x as f64, y as f64];
            if x + 1 < w {
                edge(a, u.get(x + 1, y), p, [1.0, 0.0]);
            }
            if y + 1 < h {
                edge(a, u.get(x, y + 1), p, [0.0, 1.0]);
            }
        }
    }
    pts
}

/// Marks, for every sign-changing pixel edge, the endpoint whose value is closer to zero.
pub fn contour_mask(u: &ScalarField) -> Vec<bool> {
    let (w, h) = (u.width(), u.height());
    let mut mask = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = u.index(x, y);
            let a = u.values()[i];
            for j in [(x + 1 < w).then(|| i + 1), (y + 1 < h).then(|| i + w)].into_iter().flatten() {
                let b = u.values()[j];
                if (a >= 0.0) != (b >= 0.0) {
                    mask[if a.abs() <= b.abs() { i } else { j }] = true;
                }
            }
        }
    }
    mask
}

/// Symmetric Hausdorff distance between two point sets; infinite if either is empty.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let directed = |p: &[[f64; 2]], q: &[[f64; 2]]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x[0] - y[0]).hypot(x[1] - y[1])).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// `n` equally spaced points on a circle.
pub fn circle_points(cx: f64, cy: f64, r: f64, n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            [cx + r * t.cos(), cy + r * t.sin()]
        })
        .collect()
}
