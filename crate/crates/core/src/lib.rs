//! Nearest-neighbor contingency table (NNCT) tests of spatial segregation.
//!
//! The pipeline: a labeled [`PointSet`] goes through an NN graph
//! ([`nn::build_nn_graph`] or one of the edge-corrected variants), becomes
//! an [`Nnct`], and is tested with Pielou's or Dixon's statistics. The
//! [`null`] module generates null patterns and runs Monte Carlo studies;
//! [`ripley`] adds L-function curves with simulation envelopes.
//!
//! ```
//! use segstat::{Nnct, QrStats, dixon, pielou};
//!
//! let table = Nnct::from_counts(vec![vec![149, 33], vec![43, 48]]).unwrap();
//! let qr = QrStats::from_counts(178.0, 156.0);
//! let m = dixon::dixon_moments_for(&table, &qr).unwrap();
//! let overall = dixon::dixon_overall_test(&table, &m).unwrap();
//! assert!((overall.statistic - 23.77).abs() < 0.01);
//! let x = pielou::pielou_chisq(&table, false).unwrap();
//! assert!((x.statistic - 34.84).abs() < 0.01);
//! ```

pub mod dist;
pub mod dixon;
pub mod error;
pub mod exec;
pub mod nn;
pub mod nnct;
pub mod null;
pub mod pielou;
pub mod points;
pub mod ripley;
pub mod seed;

pub use dist::{Direction, Reference, TestResult};
pub use error::{Error, Result};
pub use exec::Execution;
pub use nn::{EdgeCorrection, NnGraph, QrStats};
pub use nnct::{build_nnct, Nnct};
pub use points::{Point, PointSet, Rect};
