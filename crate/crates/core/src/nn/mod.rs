//! Nearest-neighbor digraphs over labeled point sets, with buffer-zone and
//! toroidal edge corrections.
//!
//! Every base point gets exactly one nearest neighbor among the
//! destination-eligible points. Ties go to the lowest point index.

mod qr;
mod search;

pub use qr::{compute_qr, QrStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::points::{Point, PointSet, Rect};
use search::{GridIndex, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeCorrection {
    None,
    Toroidal,
    OuterBuffer,
    InnerBuffer,
}

impl std::fmt::Display for EdgeCorrection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EdgeCorrection::None => "none",
            EdgeCorrection::Toroidal => "toroidal",
            EdgeCorrection::OuterBuffer => "outer-buffer",
            EdgeCorrection::InnerBuffer => "inner-buffer",
        })
    }
}

/// Directed nearest-neighbor relation (base -> destination).
#[derive(Debug, Clone, PartialEq)]
pub struct NnGraph {
    nn_index: Vec<Option<usize>>,
    base_mask: Vec<bool>,
    dest_mask: Vec<bool>,
    distances: Vec<f64>,
    offsets: Vec<Point>,
    correction: EdgeCorrection,
}

impl NnGraph {
    pub fn len(&self) -> usize {
        self.nn_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nn_index.is_empty()
    }

    /// Nearest neighbor of point `k`, or `None` when `k` is not a base.
    pub fn nn(&self, k: usize) -> Option<usize> {
        self.nn_index[k]
    }

    pub fn nn_indices(&self) -> &[Option<usize>] {
        &self.nn_index
    }

    /// NN distance of a base point (NaN for non-base points).
    pub fn distance(&self, k: usize) -> f64 {
        self.distances[k]
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Translation applied to the neighbor of `k`; non-zero only when the
    /// neighbor was found in a toroidal copy.
    pub fn offset(&self, k: usize) -> Point {
        self.offsets[k]
    }

    pub fn is_base(&self, k: usize) -> bool {
        self.base_mask[k]
    }

    pub fn is_dest(&self, k: usize) -> bool {
        self.dest_mask[k]
    }

    pub fn base_mask(&self) -> &[bool] {
        &self.base_mask
    }

    pub fn dest_mask(&self) -> &[bool] {
        &self.dest_mask
    }

    pub fn correction(&self) -> EdgeCorrection {
        self.correction
    }

    pub fn num_bases(&self) -> usize {
        self.base_mask.iter().filter(|&&b| b).count()
    }

    /// `(base, neighbor)` pairs in base order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.nn_index
            .iter()
            .enumerate()
            .filter_map(|(k, nn)| nn.map(|l| (k, l)))
    }
}

/// Graph builder for a fixed point set and fixed masks.
fn build(
    points: &PointSet,
    base_mask: Vec<bool>,
    dest_mask: Vec<bool>,
    metric: Metric,
    correction: EdgeCorrection,
) -> Result<NnGraph> {
    let coords = points.coords();
    let bases: Vec<usize> = (0..coords.len()).filter(|&k| base_mask[k]).collect();
    if bases.is_empty() {
        return Err(Error::NoBasePoints);
    }
    let grid = GridIndex::new(coords, &dest_mask, metric);
    let hits = crate::exec::map_items(crate::exec::auto_for(bases.len()), &bases, |&k| grid.nearest(k));

    let n = coords.len();
    let mut nn_index = vec![None; n];
    let mut distances = vec![f64::NAN; n];
    let mut offsets = vec![Point::new(0.0, 0.0); n];
    for (&k, hit) in bases.iter().zip(hits) {
        // A base without any eligible destination only happens with a
        // single indexed point, which the point-set invariants exclude.
        let hit = hit.ok_or(Error::TooFewPoints { required: 2, got: 1 })?;
        nn_index[k] = Some(hit.index);
        distances[k] = hit.dist2.sqrt();
        offsets[k] = hit.offset;
    }
    Ok(NnGraph {
        nn_index,
        base_mask,
        dest_mask,
        distances,
        offsets,
        correction,
    })
}

/// Euclidean nearest-neighbor graph with every point as base and
/// destination.
pub fn build_nn_graph(points: &PointSet) -> Result<NnGraph> {
    let n = points.len();
    build(
        points,
        vec![true; n],
        vec![true; n],
        Metric::Planar,
        EdgeCorrection::None,
    )
}

/// Nearest neighbors on the torus obtained by surrounding the region with
/// its eight translated copies. Copies act only as destinations and are
/// reported by the index of the original point; a point's own copies are
/// never its neighbor.
pub fn apply_toroidal(points: &PointSet) -> Result<NnGraph> {
    let region = *points.region();
    region.require_proper()?;
    let n = points.len();
    build(
        points,
        vec![true; n],
        vec![true; n],
        Metric::Torus { region },
        EdgeCorrection::Toroidal,
    )
}

/// Outer buffer-zone correction: only points inside `core` act as bases,
/// every point (core or guard area) may be a destination.
pub fn apply_outer_buffer(points_extended: &PointSet, core: &Rect) -> Result<NnGraph> {
    if !points_extended.region().contains_rect(core) {
        return Err(Error::DegenerateRegion(
            "core region is not inside the sampled region".into(),
        ));
    }
    let base_mask: Vec<bool> = points_extended.coords().iter().map(|p| core.contains(p)).collect();
    build(
        points_extended,
        base_mask,
        vec![true; points_extended.len()],
        Metric::Planar,
        EdgeCorrection::OuterBuffer,
    )
}

/// Inner buffer-zone correction: points closer than `width` to the region
/// boundary act only as destinations.
pub fn apply_inner_buffer(points: &PointSet, width: f64) -> Result<NnGraph> {
    let region = points.region();
    let limit = region.width().min(region.height()) / 2.0;
    if !(width >= 0.0 && width < limit) {
        return Err(Error::InvalidBufferWidth { width, limit });
    }
    let base_mask: Vec<bool> = points
        .coords()
        .iter()
        .map(|p| region.distance_to_boundary(p) >= width)
        .collect();
    build(
        points,
        base_mask,
        vec![true; points.len()],
        Metric::Planar,
        EdgeCorrection::InnerBuffer,
    )
}

/// Buffer width `E[W] + k sd(W)` where `W` is the nearest-neighbor
/// distance of a Poisson process with intensity `lambda_hat`:
/// `E[W] = 1 / (2 sqrt(lambda))`, `Var[W] = (4 - pi) / (4 pi lambda)`.
pub fn inner_buffer_width(lambda_hat: f64, k: u32) -> Result<f64> {
    if !(lambda_hat > 0.0 && lambda_hat.is_finite()) {
        return Err(Error::NonPositiveIntensity(lambda_hat));
    }
    let mean = 1.0 / (2.0 * lambda_hat.sqrt());
    let var = (4.0 - std::f64::consts::PI) / (4.0 * std::f64::consts::PI * lambda_hat);
    Ok(mean + k as f64 * var.sqrt())
}

/// Builds the graph for a correction mode. `core` is required for the
/// outer buffer and `inner_width` for the inner buffer.
pub fn graph_for(
    points: &PointSet,
    correction: EdgeCorrection,
    core: Option<&Rect>,
    inner_width: Option<f64>,
) -> Result<NnGraph> {
    match correction {
        EdgeCorrection::None => build_nn_graph(points),
        EdgeCorrection::Toroidal => apply_toroidal(points),
        EdgeCorrection::OuterBuffer => {
            let core = core.ok_or_else(|| Error::InvalidSpec("outer buffer correction needs a core region".into()))?;
            apply_outer_buffer(points, core)
        }
        EdgeCorrection::InnerBuffer => {
            let w = inner_width.ok_or_else(|| Error::InvalidSpec("inner buffer correction needs a width".into()))?;
            apply_inner_buffer(points, w)
        }
    }
}
