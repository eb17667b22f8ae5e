// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Synthetic rectangle datasets.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{GlinError, Result};
use crate::geometry::Geometry;
use crate::index::GeomId;

/// Where rectangle centers are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform over the whole lon/lat domain.
    Uniform,
    /// Along the line from (-180, -90) to (180, 90), with Gaussian
    /// jitter perpendicular to it.
    Diagonal,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform => "uniform",
            Distribution::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Distribution {
    type Err = GlinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(Distribution::Uniform),
            "diagonal" => Ok(Distribution::Diagonal),
            other => Err(GlinError::InvalidParam(format!("unknown distribution `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    /// Rectangle side lengths are uniform in `[min_side, max_side]` degrees.
    pub min_side: f64,
    pub max_side: f64,
    /// Standard deviation of the perpendicular offset for diagonal data.
    pub sigma: f64,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 100_000,
            min_side: 1e-4,
            max_side: 1e-3,
            sigma: 0.5,
            seed: 42,
        }
    }
}

/// Unit normal to the diagonal direction (360, 180).
pub const DIAGONAL_NORMAL: (f64, f64) = (-0.447_213_595_499_958, 0.894_427_190_999_916);

/// Perpendicular distance (degrees) of a point from the diagonal.
pub fn diagonal_offset(lon: f64, lat: f64) -> f64 {
    (lon + 180.0) * DIAGONAL_NORMAL.0 + (lat + 90.0) * DIAGONAL_NORMAL.1
}

/// `n` axis-aligned rectangles with ids `0..n`. Same seed, same output.
pub fn generate(kind: Distribution, p: &GenParams) -> Result<Vec<(Geometry, GeomId)>> {
    if p.n == 0 {
        return Err(GlinError::InvalidParam("n must be at least 1".into()));
    }
    if !(p.min_side > 0.0 && p.min_side <= p.max_side && p.max_side < 1.0) {
        return Err(GlinError::InvalidParam(format!(
            "side lengths need 0 < min ({}) <= max ({}) < 1",
            p.min_side, p.max_side
        )));
    }
    if !(p.sigma >= 0.0 && p.sigma.is_finite()) {
        return Err(GlinError::InvalidParam(format!(
            "sigma {} must be non-negative",
            p.sigma
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let jitter = Normal::new(0.0, p.sigma).map_err(|e| GlinError::InvalidParam(e.to_string()))?;
    let mut out = Vec::with_capacity(p.n);
    for id in 0..p.n {
        let w = rng.random_range(p.min_side..=p.max_side);
        let h = rng.random_range(p.min_side..=p.max_side);
        let (cx, cy) = match kind {
            Distribution::Uniform => (rng.random_range(-180.0..=180.0), rng.random_range(-90.0..=90.0)),
            Distribution::Diagonal => {
                let t: f64 = rng.random();
                let d = jitter.sample(&mut rng);
                (
                    -180.0 + 360.0 * t + d * DIAGONAL_NORMAL.0,
                    -90.0 + 180.0 * t + d * DIAGONAL_NORMAL.1,
                )
            }
        };
        let cx = cx.clamp(-180.0 + w / 2.0, 180.0 - w / 2.0);
        let cy = cy.clamp(-90.0 + h / 2.0, 90.0 - h / 2.0);
        let g = Geometry::rect(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)?;
        out.push((g, id as GeomId));
    }
    Ok(out)
}
