//! Reference distributions and the common test-result record.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur};

use crate::error::{Error, Result};

/// Upper tail `P(chi2_df >= x)` via the regularized upper incomplete gamma
/// function `Q(df / 2, x / 2)`.
pub fn chisq_sf(x: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::InvalidDegreesOfFreedom);
    }
    if x.is_nan() {
        return Ok(f64::NAN);
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(df as f64 / 2.0, x / 2.0).clamp(0.0, 1.0))
}

/// Standard normal upper tail `1 - Phi(z)`, written through the incomplete
/// gamma function (`P(|Z| >= z) = Q(1/2, z^2/2)`), which is more accurate
/// here than the available `erfc`.
pub fn normal_sf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == 0.0 {
        return 0.5;
    }
    if z.is_infinite() {
        return if z > 0.0 { 0.0 } else { 1.0 };
    }
    let h = z * z / 2.0;
    if z >= 0.0 {
        0.5 * gamma_ur(0.5, h)
    } else {
        0.5 + 0.5 * gamma_lr(0.5, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    StdNormal,
    ChiSquare,
}

/// Which way a significant statistic points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Segregation,
    Association,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub distribution: Reference,
    /// Degrees of freedom (chi-square only).
    pub df: Option<u32>,
    pub p_two_sided: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub direction_hint: Direction,
}

impl TestResult {
    /// Standard-normal result. `positive` names what a large positive
    /// statistic indicates.
    pub fn normal(z: f64, positive: Direction) -> Self {
        let p_right = normal_sf(z);
        let p_left = normal_sf(-z);
        let direction_hint = if z > 0.0 {
            positive
        } else if z < 0.0 {
            match positive {
                Direction::Segregation => Direction::Association,
                Direction::Association => Direction::Segregation,
                Direction::None => Direction::None,
            }
        } else {
            Direction::None
        };
        TestResult {
            statistic: z,
            distribution: Reference::StdNormal,
            df: None,
            p_two_sided: (2.0 * p_left.min(p_right)).min(1.0),
            p_left,
            p_right,
            direction_hint,
        }
    }

    pub fn chi_square(x: f64, df: u32) -> Result<Self> {
        let p = chisq_sf(x, df)?;
        Ok(TestResult {
            statistic: x,
            distribution: Reference::ChiSquare,
            df: Some(df),
            p_two_sided: p,
            p_left: 1.0 - p,
            p_right: p,
            direction_hint: Direction::None,
        })
    }
}
