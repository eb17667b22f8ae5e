// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Piecewise function used to widen Intersects queries.
//!
//! The index is keyed on each geometry's `zmin`, so a geometry whose interval
//! starts before the query's `zmin` but reaches into it would never be
//! scanned. The piecewise function partitions the `zmax` domain into pieces
//! and remembers the smallest `zmin` in each; lowering the scan start to the
//! smallest `zmin` among all pieces whose `zmax` range can reach the query
//! recovers those records.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::zcurve::{ZAddress, ZInterval};

pub const DEFAULT_PIECE_LIMITATION: usize = 10_000;

/// Aggregates over the records whose `zmax` falls into
/// `(previous.zmax_end, zmax_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub zmax_end: ZAddress,
    /// Lower bound on the member `zmin`s; never raised by deletions.
    pub min_zmin: ZAddress,
    pub sum_zmin: u128,
    pub count: u64,
}

impl Piece {
    pub fn avg_zmin(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum_zmin as f64 / self.count as f64
        }
    }
}

/// Outcome of a maintenance call, mostly for tests and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Update {
    /// An existing piece absorbed the change.
    Updated(usize),
    /// A new piece was appended (out-of-bound insert into a full last piece).
    Appended,
    /// The piece reached zero records and was dropped.
    Removed(usize),
    /// No piece covers the deleted `zmax`.
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
    /// `suffix_min[i]` = min of `min_zmin` over `pieces[i..]`.
    suffix_min: Vec<ZAddress>,
    piece_limitation: usize,
}

impl PiecewiseFunction {
    pub fn empty(piece_limitation: usize) -> Self {
        assert!(piece_limitation >= 1, "piece_limitation must be at least 1");
        Self {
            pieces: Vec::new(),
            suffix_min: Vec::new(),
            piece_limitation,
        }
    }

    /// Sorts `(zmin, zmax)` pairs by `zmax` and summarizes every
    /// `piece_limitation` consecutive records into one piece.
    ///
    /// Records sharing a `zmax` are never split across pieces, so a piece may
    /// exceed the limit when a run of equal `zmax` values straddles a group
    /// boundary.
    pub fn build(records: impl IntoIterator<Item = (ZAddress, ZAddress)>, piece_limitation: usize) -> Self {
        let mut pw = Self::empty(piece_limitation);
        let mut sorted: Vec<(ZAddress, ZAddress)> = records.into_iter().collect();
        sorted.sort_unstable_by_key(|&(zmin, zmax)| (zmax, zmin));

        let mut i = 0;
        while i < sorted.len() {
            let mut end = (i + piece_limitation).min(sorted.len());
            while end < sorted.len() && sorted[end].1 == sorted[end - 1].1 {
                end += 1;
            }
            let group = &sorted[i..end];
            pw.pieces.push(Piece {
                zmax_end: group[group.len() - 1].1,
                min_zmin: group.iter().map(|r| r.0).min().expect("non-empty group"),
                sum_zmin: group.iter().map(|r| r.0 .0 as u128).sum(),
                count: group.len() as u64,
            });
            i = end;
        }
        pw.refresh_suffix_min();
        pw
    }

    /// Builds from explicit pieces, e.g. a deserialized snapshot.
    ///
    /// Panics if `zmax_end` is not strictly increasing.
    pub fn from_pieces(pieces: Vec<Piece>, piece_limitation: usize) -> Self {
        assert!(
            pieces.windows(2).all(|w| w[0].zmax_end < w[1].zmax_end),
            "piece ends must be strictly increasing"
        );
        let mut pw = Self::empty(piece_limitation);
        pw.pieces = pieces;
        pw.refresh_suffix_min();
        pw
    }

    /// Same as [`build`](Self::build) over the current live records.
    pub fn rebuild(&self, records: impl IntoIterator<Item = (ZAddress, ZAddress)>) -> Self {
        Self::build(records, self.piece_limitation)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece_limitation(&self) -> usize {
        self.piece_limitation
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn record_count(&self) -> u64 {
        self.pieces.iter().map(|p| p.count).sum()
    }

    fn refresh_suffix_min(&mut self) {
        self.suffix_min.clear();
        self.suffix_min.resize(self.pieces.len(), ZAddress::MAX);
        let mut acc = ZAddress::MAX;
        for (i, p) in self.pieces.iter().enumerate().rev() {
            acc = acc.min(p.min_zmin);
            self.suffix_min[i] = acc;
        }
    }

    /// Index of the first piece with `zmax_end >= z`.
    fn covering(&self, z: ZAddress) -> usize {
        self.pieces.partition_point(|p| p.zmax_end < z)
    }

    /// Lowers `q.zmin` so the scan reaches every record with
    /// `zmax >= q.zmin`. Never raises `zmin`; `zmax` is unchanged.
    pub fn augment(&self, q: ZInterval) -> ZInterval {
        let i = self.covering(q.zmin);
        match self.suffix_min.get(i) {
            Some(&m) => ZInterval {
                zmin: q.zmin.min(m),
                zmax: q.zmax,
            },
            None => q,
        }
    }

    /// Reference form of [`augment`](Self::augment): linear walk over the
    /// pieces from the covering one to the end.
    pub fn augment_linear(&self, q: ZInterval) -> ZInterval {
        let start = self.covering(q.zmin);
        let mut m = ZAddress::MAX;
        for p in &self.pieces[start..] {
            m = m.min(p.min_zmin);
        }
        ZInterval {
            zmin: q.zmin.min(m),
            zmax: q.zmax,
        }
    }

    /// Folds a newly inserted record into the function.
    pub fn on_insert(&mut self, zmin: ZAddress, zmax: ZAddress) -> Update {
        let last_end = match self.pieces.last() {
            Some(p) => p.zmax_end,
            None => {
                self.push_piece(zmin, zmax);
                return Update::Appended;
            }
        };
        if zmax <= last_end {
            let i = self.covering(zmax);
            self.absorb(i, zmin);
            return Update::Updated(i);
        }
        let i = self.pieces.len() - 1;
        if (self.pieces[i].count as usize) < self.piece_limitation {
            self.pieces[i].zmax_end = zmax;
            self.absorb(i, zmin);
            Update::Updated(i)
        } else {
            self.push_piece(zmin, zmax);
            Update::Appended
        }
    }

    fn push_piece(&mut self, zmin: ZAddress, zmax: ZAddress) {
        self.pieces.push(Piece {
            zmax_end: zmax,
            min_zmin: zmin,
            sum_zmin: zmin.0 as u128,
            count: 1,
        });
        self.suffix_min.push(zmin);
        if self.suffix_min.len() >= 2 {
            self.lower_suffix(self.suffix_min.len() - 2, zmin);
        }
    }

    fn absorb(&mut self, i: usize, zmin: ZAddress) {
        let p = &mut self.pieces[i];
        p.sum_zmin += zmin.0 as u128;
        p.count += 1;
        if zmin < p.min_zmin {
            p.min_zmin = zmin;
            self.lower_suffix(i, zmin);
        }
    }

    fn lower_suffix(&mut self, upto: usize, zmin: ZAddress) {
        for j in (0..=upto).rev() {
            if self.suffix_min[j] <= zmin {
                break;
            }
            self.suffix_min[j] = zmin;
        }
    }

    /// Removes a record's contribution. `min_zmin` stays as a stale lower
    /// bound; a piece whose count reaches zero is dropped.
    pub fn on_delete(&mut self, zmin: ZAddress, zmax: ZAddress) -> Update {
        let i = self.covering(zmax);
        let Some(p) = self.pieces.get_mut(i) else {
            warn!("piecewise delete: no piece covers zmax {}", zmax.0);
            return Update::NotFound;
        };
        p.sum_zmin = p.sum_zmin.saturating_sub(zmin.0 as u128);
        p.count = p.count.saturating_sub(1);
        if p.count == 0 {
            self.pieces.remove(i);
            self.refresh_suffix_min();
            Update::Removed(i)
        } else {
            Update::Updated(i)
        }
    }

    /// Mean relative gap between each piece's `min_zmin` and its average
    /// `zmin`. Grows as in-bound inserts or stale minima degrade pieces.
    pub fn avg_diff(&self) -> f64 {
        if self.pieces.is_empty() {
            return 0.0;
        }
        let total: f64 = self
            .pieces
            .iter()
            .map(|p| {
                let avg = p.avg_zmin();
                if avg > 0.0 {
                    (p.min_zmin.0 as f64 - avg).abs() / avg
                } else {
                    0.0
                }
            })
            .sum();
        total / self.pieces.len() as f64
    }

    /// Bytes used under the fixed 8-bytes-per-number accounting (the sum
    /// aggregate takes 16).
    pub fn size_bytes(&self) -> usize {
        8 + self.pieces.len() * (8 + 8 + 16 + 8)
    }

    /// Internal consistency: strictly increasing ends, live counts, and a
    /// correct suffix-min cache.
    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, w) in self.pieces.windows(2).enumerate() {
            if w[0].zmax_end >= w[1].zmax_end {
                return Err(format!("piece {i} end {} not below next", w[0].zmax_end.0));
            }
        }
        if let Some(i) = self.pieces.iter().position(|p| p.count == 0) {
            return Err(format!("piece {i} has zero count"));
        }
        let mut expected = self.clone();
        expected.refresh_suffix_min();
        if expected.suffix_min != self.suffix_min {
            return Err("stale suffix-min cache".into());
        }
        Ok(())
    }
}
