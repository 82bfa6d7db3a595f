//! Labeled planar point sets and their rectangular study regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = other.x - self.x;
        let dy = other.y - self.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
///
/// Zero width or height is allowed so that collinear data can still be
/// analysed without edge correction; operations that need an area call
/// [`Rect::require_proper`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        if ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateRegion("non-finite bound".into()));
        }
        if xmin > xmax || ymin > ymax {
            return Err(Error::DegenerateRegion(format!(
                "inverted bounds ({xmin}, {ymin}, {xmax}, {ymax})"
            )));
        }
        Ok(Rect { xmin, ymin, xmax, ymax })
    }

    pub fn unit() -> Self {
        Rect {
            xmin: 0.0,
            ymin: 0.0,
            xmax: 1.0,
            ymax: 1.0,
        }
    }

    /// Smallest rectangle containing every point.
    pub fn bounding(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or(Error::TooFewPoints { required: 1, got: 0 })?;
        let mut r = Rect {
            xmin: first.x,
            ymin: first.y,
            xmax: first.x,
            ymax: first.y,
        };
        for p in points {
            r.xmin = r.xmin.min(p.x);
            r.ymin = r.ymin.min(p.y);
            r.xmax = r.xmax.max(p.x);
            r.ymax = r.ymax.max(p.y);
        }
        Rect::new(r.xmin, r.ymin, r.xmax, r.ymax)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn is_proper(&self) -> bool {
        self.width() > 0.0 && self.height() > 0.0
    }

    pub fn require_proper(&self) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::DegenerateRegion(format!(
                "zero width or height ({} x {})",
                self.width(),
                self.height()
            )))
        }
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.xmin >= self.xmin && other.xmax <= self.xmax && other.ymin >= self.ymin && other.ymax <= self.ymax
    }

    /// Distance from an interior point to the nearest side.
    pub fn distance_to_boundary(&self, p: &Point) -> f64 {
        (p.x - self.xmin)
            .min(self.xmax - p.x)
            .min(p.y - self.ymin)
            .min(self.ymax - p.y)
    }

    pub fn shrink(&self, by: f64) -> Result<Rect> {
        Rect::new(self.xmin + by, self.ymin + by, self.xmax - by, self.ymax - by)
    }
}

/// Planar coordinates with class labels `0..q` inside a study region.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    coords: Vec<Point>,
    labels: Vec<usize>,
    region: Rect,
    class_sizes: Vec<usize>,
}

impl PointSet {
    /// Builds a point set whose class count is `max(label) + 1`.
    pub fn new(coords: Vec<Point>, labels: Vec<usize>, region: Rect) -> Result<Self> {
        let q = labels.iter().max().map_or(1, |m| m + 1);
        Self::with_classes(coords, labels, q, region)
    }

    /// Builds a point set with an explicit class count; classes without
    /// members keep a zero entry in `class_sizes`.
    pub fn with_classes(coords: Vec<Point>, labels: Vec<usize>, num_classes: usize, region: Rect) -> Result<Self> {
        if coords.len() != labels.len() {
            return Err(Error::LengthMismatch {
                coords: coords.len(),
                labels: labels.len(),
            });
        }
        if coords.len() < 2 {
            return Err(Error::TooFewPoints {
                required: 2,
                got: coords.len(),
            });
        }
        for (index, p) in coords.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if !region.contains(p) {
                return Err(Error::OutsideRegion { index, x: p.x, y: p.y });
            }
        }
        check_distinct(&coords)?;
        let class_sizes = count_classes(&labels, num_classes)?;
        Ok(PointSet {
            coords,
            labels,
            region,
            class_sizes,
        })
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn region(&self) -> &Rect {
        &self.region
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    /// Same locations with a new labeling; the class count is preserved.
    pub fn relabeled(&self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.coords.len() {
            return Err(Error::LengthMismatch {
                coords: self.coords.len(),
                labels: labels.len(),
            });
        }
        let class_sizes = count_classes(&labels, self.num_classes())?;
        Ok(PointSet {
            coords: self.coords.clone(),
            labels,
            region: self.region,
            class_sizes,
        })
    }

    /// Points of a single class, in their original order.
    pub fn class_points(&self, class: usize) -> Vec<Point> {
        self.coords
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == class)
            .map(|(p, _)| *p)
            .collect()
    }
}

fn count_classes(labels: &[usize], num_classes: usize) -> Result<Vec<usize>> {
    let mut sizes = vec![0usize; num_classes];
    for (index, &label) in labels.iter().enumerate() {
        match sizes.get_mut(label) {
            Some(s) => *s += 1,
            None => {
                return Err(Error::LabelOutOfRange {
                    index,
                    label,
                    classes: num_classes,
                })
            }
        }
    }
    Ok(sizes)
}

fn check_distinct(coords: &[Point]) -> Result<()> {
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| {
        coords[a]
            .x
            .total_cmp(&coords[b].x)
            .then(coords[a].y.total_cmp(&coords[b].y))
    });
    for w in order.windows(2) {
        let (a, b) = (coords[w[0]], coords[w[1]]);
        if a.x == b.x && a.y == b.y {
            return Err(Error::DuplicatePoint {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
                x: a.x,
                y: a.y,
            });
        }
    }
    Ok(())
}
