// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Selectivity-targeted query windows.
//!
//! Each window is the MBR of the `K = selectivity * n` records whose MBR
//! centers are nearest (Euclidean, in degrees) to the center of a randomly
//! drawn record.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dataset::QueryWindow;
use crate::error::{GlinError, Result};
use crate::geometry::{Geometry, Mbr};
use crate::index::{GeomId, Relationship};

/// Neighbour count for a selectivity over `n` records.
pub fn knn_size(selectivity: f64, n: usize) -> Result<usize> {
    if !(selectivity > 0.0 && selectivity <= 1.0) {
        return Err(GlinError::InvalidParam(format!(
            "selectivity {selectivity} outside (0, 1]"
        )));
    }
    let k = (selectivity * n as f64).round() as usize;
    if k < 1 {
        return Err(GlinError::InvalidParam(format!(
            "selectivity {selectivity} selects no record out of {n}"
        )));
    }
    Ok(k.min(n))
}

/// MBR of the `k` records nearest to `records[seed]` by center distance.
pub fn knn_window(records: &[(Geometry, GeomId)], centers: &[(f64, f64)], seed: usize, k: usize) -> Mbr {
    let (sx, sy) = centers[seed];
    let mut d: Vec<(f64, usize)> = centers
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| ((x - sx).powi(2) + (y - sy).powi(2), i))
        .collect();
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }
    d[..k]
        .iter()
        .map(|&(_, i)| records[i].0.mbr())
        .reduce(|a, b| a.union(&b))
        .expect("k >= 1")
}

/// `count` windows at `selectivity`, reproducible per seed.
pub fn make_queries(
    records: &[(Geometry, GeomId)],
    selectivity: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<QueryWindow>> {
    if records.is_empty() {
        return Err(GlinError::EmptyInput);
    }
    let k = knn_size(selectivity, records.len())?;
    let centers: Vec<(f64, f64)> = records
        .iter()
        .map(|(g, _)| {
            let c = g.mbr().center();
            (c.lon, c.lat)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let s = rng.random_range(0..records.len());
            let m = knn_window(records, &centers, s, k);
            Ok(QueryWindow {
                selectivity,
                window: m.to_polygon(),
            })
        })
        .collect()
}

/// Fraction of `records` intersecting `window`.
pub fn achieved_selectivity(records: &[(Geometry, GeomId)], window: &Geometry) -> f64 {
    let wm = window.mbr();
    let hits = records
        .iter()
        .filter(|(g, _)| g.mbr().intersects(&wm) && Relationship::Intersects.holds(window, g))
        .count();
    hits as f64 / records.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::datagen::{generate, Distribution, GenParams};

    #[test]
    fn k_of_one_is_seed_mbr() {
        let data = generate(
            Distribution::Uniform,
            &GenParams {
                n: 1000,
                ..Default::default()
            },
        )
        .unwrap();
        let qs = make_queries(&data, 0.001, 5, 3).unwrap();
        for q in &qs {
            let m = q.window.mbr();
            assert!(data.iter().any(|(g, _)| g.mbr() == m));
        }
    }

    #[test]
    fn full_selectivity_covers_dataset() {
        let data = generate(
            Distribution::Uniform,
            &GenParams {
                n: 300,
                ..Default::default()
            },
        )
        .unwrap();
        let q = &make_queries(&data, 1.0, 1, 1).unwrap()[0];
        let all = data.iter().map(|(g, _)| g.mbr()).reduce(|a, b| a.union(&b)).unwrap();
        assert_eq!(q.window.mbr(), all);
    }

    #[test]
    fn too_small_selectivity_rejected() {
        let data = generate(
            Distribution::Uniform,
            &GenParams {
                n: 100,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(make_queries(&data, 0.001, 1, 1).is_err());
        assert!(make_queries(&data, 0.0, 1, 1).is_err());
    }

    #[test]
    fn deterministic() {
        let data = generate(
            Distribution::Diagonal,
            &GenParams {
                n: 2000,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            make_queries(&data, 0.01, 4, 9).unwrap(),
            make_queries(&data, 0.01, 4, 9).unwrap()
        );
    }
}
