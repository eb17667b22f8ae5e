// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Line-oriented dataset and query files.
//!
//! Dataset: `id<TAB>WKT` per line. Queries: `selectivity<TAB>WKT` per line.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use crate::error::{GlinError, Result};
use crate::geometry::{parse_wkt, Geometry};
use crate::index::GeomId;

/// One query window and the selectivity it was generated for.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryWindow {
    pub selectivity: f64,
    pub window: Geometry,
}

fn dataset_err(line: usize, message: impl Into<String>) -> GlinError {
    GlinError::Dataset {
        line,
        message: message.into(),
    }
}

fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Err(e) => Some(Err(e.into())),
        Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
        Ok(l) => Some(Ok((i + 1, l))),
    })
}

pub fn write_dataset<'a>(mut w: impl Write, records: impl IntoIterator<Item = &'a (Geometry, GeomId)>) -> Result<()> {
    for (g, id) in records {
        writeln!(w, "{id}\t{g}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a dataset file. Ids must be unique.
pub fn read_dataset(r: impl BufRead) -> Result<Vec<(Geometry, GeomId)>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        let (id, wkt) = text
            .split_once('\t')
            .ok_or_else(|| dataset_err(line, "expected `id<TAB>WKT`"))?;
        let id: GeomId = id
            .trim()
            .parse()
            .map_err(|_| dataset_err(line, format!("bad id `{id}`")))?;
        if !seen.insert(id) {
            return Err(dataset_err(line, format!("duplicate id {id}")));
        }
        let g = parse_wkt(wkt).map_err(|e| dataset_err(line, e.to_string()))?;
        out.push((g, id));
    }
    Ok(out)
}

/// Reads bare WKT, one geometry per line, numbering records from 0 in file
/// order.
pub fn read_wkt_lines(r: impl BufRead) -> Result<Vec<(Geometry, GeomId)>> {
    let mut out = Vec::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        let g = parse_wkt(&text).map_err(|e| dataset_err(line, e.to_string()))?;
        out.push((g, out.len() as GeomId));
    }
    Ok(out)
}

pub fn write_queries<'a>(mut w: impl Write, queries: impl IntoIterator<Item = &'a QueryWindow>) -> Result<()> {
    for q in queries {
        writeln!(w, "{}\t{}", q.selectivity, q.window)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_queries(r: impl BufRead) -> Result<Vec<QueryWindow>> {
    let mut out = Vec::new();
    for item in content_lines(r) {
        let (line, text) = item?;
        let (sel, wkt) = text
            .split_once('\t')
            .ok_or_else(|| dataset_err(line, "expected `selectivity<TAB>WKT`"))?;
        let selectivity: f64 = sel
            .trim()
            .parse()
            .map_err(|_| dataset_err(line, format!("bad selectivity `{sel}`")))?;
        if !(selectivity > 0.0 && selectivity <= 1.0) {
            return Err(dataset_err(line, format!("selectivity {selectivity} outside (0, 1]")));
        }
        let window = parse_wkt(wkt).map_err(|e| dataset_err(line, e.to_string()))?;
        out.push(QueryWindow { selectivity, window });
    }
    Ok(out)
}
