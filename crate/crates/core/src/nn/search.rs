//! Exact nearest-neighbor queries over a uniform cell grid.
//!
//! The grid only prunes candidates; every distance is computed with the same
//! expression an all-pairs scan would use, so results (including the
//! lowest-index tie rule) match the O(n^2) scan exactly.

use crate::points::{Point, Rect};

/// Distance rule used by the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Metric {
    Planar,
    /// Wrap-around distance on a rectangle; equivalent to searching the
    /// eight translated copies of the region.
    Torus {
        region: Rect,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Hit {
    pub index: usize,
    pub dist2: f64,
    /// Translation applied to the neighbor's coordinates (non-zero only
    /// when the neighbor is a toroidal copy).
    pub offset: Point,
}

impl Hit {
    fn beats(&self, other: &Hit) -> bool {
        self.dist2 < other.dist2 || (self.dist2 == other.dist2 && self.index < other.index)
    }
}

/// Signed displacement from `from` to the closest image of `to` along one
/// axis, together with the translation that produced it. Candidates are
/// tried in the order 0, -period, +period.
#[inline]
pub(crate) fn wrap_delta(from: f64, to: f64, lo_period: f64) -> (f64, f64) {
    let mut best = (to - from, 0.0);
    for shift in [-lo_period, lo_period] {
        let d = (to + shift) - from;
        if d.abs() < best.0.abs() {
            best = (d, shift);
        }
    }
    best
}

impl Metric {
    #[inline]
    pub(crate) fn displacement(&self, from: &Point, to: &Point) -> (f64, f64, Point) {
        match self {
            Metric::Planar => (to.x - from.x, to.y - from.y, Point::new(0.0, 0.0)),
            Metric::Torus { region } => {
                let (dx, ox) = wrap_delta(from.x, to.x, region.width());
                let (dy, oy) = wrap_delta(from.y, to.y, region.height());
                (dx, dy, Point::new(ox, oy))
            }
        }
    }
}

pub(crate) struct GridIndex<'a> {
    coords: &'a [Point],
    metric: Metric,
    x0: f64,
    y0: f64,
    hx: f64,
    hy: f64,
    gx: usize,
    gy: usize,
    cell_start: Vec<usize>,
    members: Vec<usize>,
}

const MAX_CELLS_PER_AXIS: usize = 2048;

impl<'a> GridIndex<'a> {
    /// Indexes every point with `dest[i] == true`.
    pub(crate) fn new(coords: &'a [Point], dest: &[bool], metric: Metric) -> Self {
        let dest_pts: Vec<usize> = (0..coords.len()).filter(|&i| dest[i]).collect();
        let bounds = match metric {
            Metric::Torus { region } => region,
            Metric::Planar => {
                let pts: Vec<Point> = dest_pts.iter().map(|&i| coords[i]).collect();
                Rect::bounding(&pts).unwrap_or(Rect::unit())
            }
        };
        let (w, h) = (bounds.width(), bounds.height());
        let m = dest_pts.len().max(1) as f64;
        let (gx, gy) = if w > 0.0 && h > 0.0 {
            (
                ((m * w / h).sqrt().round() as usize).clamp(1, MAX_CELLS_PER_AXIS),
                ((m * h / w).sqrt().round() as usize).clamp(1, MAX_CELLS_PER_AXIS),
            )
        } else if w > 0.0 {
            ((m as usize).clamp(1, MAX_CELLS_PER_AXIS), 1)
        } else if h > 0.0 {
            (1, (m as usize).clamp(1, MAX_CELLS_PER_AXIS))
        } else {
            (1, 1)
        };
        let hx = if gx > 1 { w / gx as f64 } else { f64::INFINITY };
        let hy = if gy > 1 { h / gy as f64 } else { f64::INFINITY };

        let mut grid = GridIndex {
            coords,
            metric,
            x0: bounds.xmin,
            y0: bounds.ymin,
            hx,
            hy,
            gx,
            gy,
            cell_start: Vec::new(),
            members: Vec::new(),
        };
        let cells: Vec<usize> = dest_pts
            .iter()
            .map(|&i| {
                let (cx, cy) = grid.cell_of(&coords[i]);
                cy * gx + cx
            })
            .collect();
        let mut start = vec![0usize; gx * gy + 1];
        for &c in &cells {
            start[c + 1] += 1;
        }
        for c in 0..gx * gy {
            start[c + 1] += start[c];
        }
        let mut fill = start.clone();
        let mut members = vec![0usize; dest_pts.len()];
        for (&i, &c) in dest_pts.iter().zip(&cells) {
            members[fill[c]] = i;
            fill[c] += 1;
        }
        grid.cell_start = start;
        grid.members = members;
        grid
    }

    fn cell_of(&self, p: &Point) -> (usize, usize) {
        let axis = |v: f64, v0: f64, h: f64, g: usize| -> usize {
            if g == 1 {
                return 0;
            }
            let c = ((v - v0) / h).floor();
            if c <= 0.0 {
                0
            } else {
                (c as usize).min(g - 1)
            }
        };
        (
            axis(p.x, self.x0, self.hx, self.gx),
            axis(p.y, self.y0, self.hy, self.gy),
        )
    }

    fn scan_cell(&self, cell: usize, query: usize, best: &mut Option<Hit>) {
        let from = &self.coords[query];
        for &l in &self.members[self.cell_start[cell]..self.cell_start[cell + 1]] {
            if l == query {
                continue;
            }
            let (dx, dy, offset) = self.metric.displacement(from, &self.coords[l]);
            let hit = Hit {
                index: l,
                dist2: dx * dx + dy * dy,
                offset,
            };
            if best.as_ref().is_none_or(|b| hit.beats(b)) {
                *best = Some(hit);
            }
        }
    }

    /// Nearest indexed point to `coords[query]`, excluding `query` itself
    /// (and, on the torus, its own copies).
    pub(crate) fn nearest(&self, query: usize) -> Option<Hit> {
        let (cx, cy) = self.cell_of(&self.coords[query]);
        let (cx, cy) = (cx as isize, cy as isize);
        let (gx, gy) = (self.gx as isize, self.gy as isize);
        let torus = matches!(self.metric, Metric::Torus { .. });
        let max_ring = if torus {
            // Rings past half the grid only revisit cells.
            (gx.max(gy)) / 2 + 1
        } else {
            cx.max(gx - 1 - cx).max(cy).max(gy - 1 - cy)
        };
        let hmin = self.hx.min(self.hy);
        let mut best: Option<Hit> = None;

        for r in 0..=max_ring {
            let mut visit = |ix: isize, iy: isize| {
                let (ix, iy) = if torus {
                    (ix.rem_euclid(gx), iy.rem_euclid(gy))
                } else if ix < 0 || iy < 0 || ix >= gx || iy >= gy {
                    return;
                } else {
                    (ix, iy)
                };
                self.scan_cell((iy * gx + ix) as usize, query, &mut best);
            };
            if r == 0 {
                visit(cx, cy);
            } else {
                for ix in (cx - r)..=(cx + r) {
                    visit(ix, cy - r);
                    visit(ix, cy + r);
                }
                for iy in (cy - r + 1)..=(cy + r - 1) {
                    visit(cx - r, iy);
                    visit(cx + r, iy);
                }
            }
            if let Some(b) = &best {
                // Anything outside rings 0..=r is at least r * h away; the
                // slack absorbs rounding in cell assignment.
                let bound = r as f64 * hmin * (1.0 - 1e-9);
                if bound.is_finite() && bound * bound > b.dist2 {
                    break;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute(coords: &[Point], dest: &[bool], k: usize, metric: Metric) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for l in 0..coords.len() {
            if l == k || !dest[l] {
                continue;
            }
            let (dx, dy, offset) = metric.displacement(&coords[k], &coords[l]);
            let hit = Hit {
                index: l,
                dist2: dx * dx + dy * dy,
                offset,
            };
            if best.as_ref().is_none_or(|b| hit.beats(b)) {
                best = Some(hit);
            }
        }
        best
    }

    #[test]
    fn grid_matches_scan_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = 2 + trial * 7;
            let coords: Vec<Point> = (0..n)
                .map(|_| Point::new(rng.random::<f64>() * 3.0, rng.random::<f64>()))
                .collect();
            let dest: Vec<bool> = (0..n).map(|i| trial % 3 != 0 || i % 4 != 1).collect();
            let region = Rect::new(0.0, 0.0, 3.0, 1.0).unwrap();
            for metric in [Metric::Planar, Metric::Torus { region }] {
                let grid = GridIndex::new(&coords, &dest, metric);
                for k in 0..n {
                    assert_eq!(grid.nearest(k), brute(&coords, &dest, k, metric));
                }
            }
        }
    }

    #[test]
    fn wrap_delta_picks_closest_image() {
        assert_eq!(wrap_delta(0.1, 0.9, 1.0).1, -1.0);
        assert_eq!(wrap_delta(0.9, 0.1, 1.0).1, 1.0);
        assert_eq!(wrap_delta(0.4, 0.6, 1.0), (0.6 - 0.4, 0.0));
    }

    #[test]
    fn degenerate_axis_grid() {
        let coords: Vec<Point> = [0.0, 1.0, 3.0, 7.0, 7.5].iter().map(|&x| Point::new(x, 0.0)).collect();
        let dest = vec![true; coords.len()];
        let grid = GridIndex::new(&coords, &dest, Metric::Planar);
        let nn: Vec<usize> = (0..coords.len()).map(|k| grid.nearest(k).unwrap().index).collect();
        assert_eq!(nn, vec![1, 0, 1, 4, 3]);
    }
}
