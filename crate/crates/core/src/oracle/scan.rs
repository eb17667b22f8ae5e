// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

use std::collections::HashMap;

use crate::error::{GlinError, Result};
use crate::geometry::{Geometry, Mbr};
use crate::index::{GeomId, Relationship};

/// Records in insertion order, queried by full scan.
#[derive(Debug, Clone, Default)]
pub struct FlatStore {
    entries: Vec<(GeomId, Geometry, Mbr)>,
    /// Position of each id in `entries`.
    ids: HashMap<GeomId, usize>,
}

impl FlatStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails on a repeated id.
    pub fn from_records(records: impl IntoIterator<Item = (Geometry, GeomId)>) -> Result<Self> {
        let mut store = Self::new();
        for (g, id) in records {
            store.insert(g, id)?;
        }
        Ok(store)
    }

    pub fn insert(&mut self, g: Geometry, id: GeomId) -> Result<()> {
        if self.ids.contains_key(&id) {
            return Err(GlinError::InvalidParam(format!("duplicate geometry id {id}")));
        }
        let mbr = g.mbr();
        self.ids.insert(id, self.entries.len());
        self.entries.push((id, g, mbr));
        Ok(())
    }

    /// Removes the record with `id`, returning its geometry.
    pub fn remove(&mut self, id: GeomId) -> Option<Geometry> {
        let pos = self.ids.remove(&id)?;
        let removed = self.entries.swap_remove(pos);
        if let Some(moved) = self.entries.get(pos) {
            self.ids.insert(moved.0, pos);
        }
        Some(removed.1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (GeomId, &Geometry)> + '_ {
        self.entries.iter().map(|(id, g, _)| (*id, g))
    }

    /// Bounding box of every record.
    pub fn extent(&self) -> Option<Mbr> {
        self.entries.iter().map(|e| e.2).reduce(|a, b| a.union(&b))
    }

    pub fn query(&self, q: &Geometry, rel: Relationship) -> Vec<GeomId> {
        self.entries
            .iter()
            .filter(|(_, g, _)| rel.holds(q, g))
            .map(|(id, _, _)| *id)
            .collect()
    }

    /// Number of records intersecting `q`'s MBR, a cheap selectivity proxy.
    pub fn count_mbr_hits(&self, q: &Mbr) -> usize {
        self.entries.iter().filter(|e| e.2.intersects(q)).count()
    }
}
