//! Geodesic balls ("amoebas") on the 8-connected pixel graph.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use field_core::ScalarField;

use crate::metric::AmoebaMetric;

/// One structuring element: the pixels within geodesic distance `rho` of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Amoeba {
    pub center: usize,
    /// `(pixel index, distance)`, in the order Dijkstra settled them; the centre comes first.
    pub members: Vec<(usize, f64)>,
    pub rho: f64,
}

impl Amoeba {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.iter().any(|&(i, _)| i == index)
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    slot: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.slot.cmp(&self.slot))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBOURS: [(isize, isize, bool); 8] = [
    (1, 0, false),
    (-1, 0, false),
    (0, 1, false),
    (0, -1, false),
    (1, 1, true),
    (1, -1, true),
    (-1, 1, true),
    (-1, -1, true),
];

/// Reusable scratch space for repeated amoeba construction with a fixed radius.
///
/// Every edge costs at least one grid step, so an amoeba of radius `ρ` fits in the
/// square window of half-width `⌊ρ/h⌋` around its centre.
pub struct AmoebaBuilder {
    half: usize,
    side: usize,
    dist: Vec<f64>,
    touched: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl AmoebaBuilder {
    pub fn new(rho: f64, spacing: f64) -> Self {
        let half = (rho / spacing).floor().max(0.0) as usize;
        let side = 2 * half + 1;
        Self {
            half,
            side,
            dist: vec![f64::INFINITY; side * side],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Runs Dijkstra from `center` and appends `(pixel, distance)` pairs to `out`.
    pub fn build_into(
        &mut self,
        f: &ScalarField,
        metric: &AmoebaMetric,
        rho: f64,
        center: usize,
        out: &mut Vec<(usize, f64)>,
    ) {
        debug_assert!(((rho / f.spacing()).floor().max(0.0) as usize) <= self.half);
        let (w, h) = (f.width() as isize, f.height() as isize);
        let (cx, cy) = f.coords(center);
        let (cx, cy) = (cx as isize, cy as isize);
        let half = self.half as isize;
        let side = self.side as isize;
        let step = f.spacing();
        let diag = step * std::f64::consts::SQRT_2;
        let vals = f.values();

        let slot_of = |x: isize, y: isize| ((y - cy + half) * side + (x - cx + half)) as usize;
        let start = slot_of(cx, cy);
        self.dist[start] = 0.0;
        self.touched.push(start);
        self.heap.push(Entry { dist: 0.0, slot: start });

        while let Some(Entry { dist, slot }) = self.heap.pop() {
            if dist > rho {
                break;
            }
            if dist > self.dist[slot] {
                continue;
            }
            let x = cx - half + (slot as isize % side);
            let y = cy - half + (slot as isize / side);
            let here = (y * w + x) as usize;
            out.push((here, dist));
            let v = vals[here];
            for &(dx, dy, is_diag) in &NEIGHBOURS {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h || (nx - cx).abs() > half || (ny - cy).abs() > half {
                    continue;
                }
                let nslot = slot_of(nx, ny);
                let len = if is_diag { diag } else { step };
                let nd = dist + metric.edge_weight(len, vals[(ny * w + nx) as usize] - v);
                if nd <= rho && nd < self.dist[nslot] {
                    if self.dist[nslot].is_infinite() {
                        self.touched.push(nslot);
                    }
                    self.dist[nslot] = nd;
                    self.heap.push(Entry { dist: nd, slot: nslot });
                }
            }
        }

        for &s in &self.touched {
            self.dist[s] = f64::INFINITY;
        }
        self.touched.clear();
        self.heap.clear();
    }
}

/// The amoeba of radius `rho` around pixel `center` of the pilot image `f`.
pub fn compute_amoeba(f: &ScalarField, metric: &AmoebaMetric, rho: f64, center: usize) -> Amoeba {
    let mut builder = AmoebaBuilder::new(rho, f.spacing());
    let mut members = Vec::new();
    builder.build_into(f, metric, rho, center, &mut members);
    Amoeba { center, members, rho }
}
