// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Text snapshot of an index.
//!
//! ```text
//! GLIN-SNAPSHOT 1
//! cell_size 5e-7
//! params <fanout> <max_leaf_records> <max_model_error> <upper> <lower>
//! piecewise <piece_limitation> <piece count>      (or `piecewise none`)
//! piece <zmax_end> <min_zmin> <sum_zmin> <count>  (one per piece)
//! leaves <leaf count>
//! leaf <record count>
//! <zmin>\t<zmax>\t<geom_id>\t<WKT>                 (one per record)
//! ```
//!
//! Leaves are written in key order. Loading re-partitions the records and
//! refits every model; the piecewise function is restored piece for piece.

use std::io::{BufRead, Write};

use super::{BuildParams, GlinIndex};
use crate::augment::{Piece, PiecewiseFunction};
use crate::error::{GlinError, Result};
use crate::geometry::parse_wkt;
use crate::zcurve::{CurveConfig, ZAddress};

const MAGIC: &str = "GLIN-SNAPSHOT 1";

impl GlinIndex {
    pub fn save_snapshot(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "cell_size {}", self.cfg.cell_size())?;
        let p = &self.params;
        writeln!(
            w,
            "params {} {} {} {} {}",
            p.fanout, p.max_leaf_records, p.max_model_error, p.upper_density, p.lower_density
        )?;
        match &self.piecewise {
            None => writeln!(w, "piecewise none")?,
            Some(pw) => {
                writeln!(w, "piecewise {} {}", pw.piece_limitation(), pw.len())?;
                for piece in pw.pieces() {
                    writeln!(
                        w,
                        "piece {} {} {} {}",
                        piece.zmax_end.0, piece.min_zmin.0, piece.sum_zmin, piece.count
                    )?;
                }
            }
        }
        let leaves: Vec<_> = self.leaf_chain().collect();
        writeln!(w, "leaves {}", leaves.len())?;
        for id in leaves {
            let leaf = self.leaf(id);
            writeln!(w, "leaf {}", leaf.count)?;
            for slot in leaf.occupied() {
                let r = self.record(leaf.slots[slot]);
                writeln!(w, "{}\t{}\t{}\t{}", r.key.0, r.zmax.0, r.id, r.geometry)?;
            }
        }
        Ok(())
    }

    pub fn load_snapshot(r: impl BufRead) -> Result<Self> {
        let mut lines = Lines {
            inner: r.lines(),
            line: 0,
        };
        if lines.next_line()? != MAGIC {
            return Err(lines.err("missing snapshot header"));
        }
        let f = lines.tagged("cell_size", 1)?;
        let cell_size: f64 = lines.num(&f[0])?;
        let cfg = CurveConfig::new(cell_size)?;
        let f = lines.tagged("params", 5)?;
        let params = BuildParams {
            fanout: lines.num(&f[0])?,
            max_leaf_records: lines.num(&f[1])?,
            max_model_error: lines.num(&f[2])?,
            upper_density: lines.num(&f[3])?,
            lower_density: lines.num(&f[4])?,
        };
        let head = lines.next_line()?;
        let parts: Vec<&str> = head.split_whitespace().collect();
        let piecewise = match parts.as_slice() {
            ["piecewise", "none"] => None,
            ["piecewise", limit, n] => {
                let limit: usize = lines.num(limit)?;
                let n: usize = lines.num(n)?;
                let mut pieces = Vec::with_capacity(n);
                let mut last_end = None;
                for _ in 0..n {
                    let f = lines.tagged("piece", 4)?;
                    let piece = Piece {
                        zmax_end: ZAddress(lines.num(&f[0])?),
                        min_zmin: ZAddress(lines.num(&f[1])?),
                        sum_zmin: lines.num(&f[2])?,
                        count: lines.num(&f[3])?,
                    };
                    if last_end.is_some_and(|e| e >= piece.zmax_end) {
                        return Err(lines.err("piece ends not increasing"));
                    }
                    last_end = Some(piece.zmax_end);
                    pieces.push(piece);
                }
                Some(PiecewiseFunction::from_pieces(pieces, limit))
            }
            _ => return Err(lines.err("expected piecewise line")),
        };
        let f = lines.tagged("leaves", 1)?;
        let n_leaves: usize = lines.num(&f[0])?;
        let mut idx = Self::new(cfg, params)?;
        let mut records = Vec::new();
        for _ in 0..n_leaves {
            let f = lines.tagged("leaf", 1)?;
            let n: usize = lines.num(&f[0])?;
            for _ in 0..n {
                let line = lines.next_line()?;
                let mut it = line.splitn(4, '\t');
                let (Some(zmin), Some(zmax), Some(id), Some(wkt)) = (it.next(), it.next(), it.next(), it.next()) else {
                    return Err(lines.err("record needs four tab-separated fields"));
                };
                let zmin: u64 = lines.num(zmin)?;
                let zmax: u64 = lines.num(zmax)?;
                let id: u64 = lines.num(id)?;
                let g = parse_wkt(wkt).map_err(|e| lines.err(&e.to_string()))?;
                let z = crate::zcurve::zitvl(&g, &cfg)?;
                if z.zmin.0 != zmin || z.zmax.0 != zmax {
                    return Err(lines.err("stored interval does not match geometry"));
                }
                records.push((g, id));
            }
        }
        if lines.inner.next().transpose()?.is_some_and(|l| !l.trim().is_empty()) {
            return Err(lines.err("trailing data"));
        }
        if !records.is_empty() {
            idx = Self::bulk_load(records, cfg, params)?;
        }
        idx.set_piecewise(piecewise);
        Ok(idx)
    }
}

struct Lines<B> {
    inner: std::io::Lines<B>,
    line: usize,
}

impl<B: BufRead> Lines<B> {
    fn err(&self, message: &str) -> GlinError {
        GlinError::Snapshot {
            line: self.line,
            message: message.to_string(),
        }
    }

    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of snapshot")),
        }
    }

    fn tagged(&mut self, tag: &str, fields: usize) -> Result<Vec<String>> {
        let line = self.next_line()?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some(tag) {
            return Err(self.err(&format!("expected `{tag}`")));
        }
        let rest: Vec<String> = parts.map(str::to_string).collect();
        if rest.len() != fields {
            return Err(self.err(&format!("`{tag}` takes {fields} fields")));
        }
        Ok(rest)
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(&format!("bad number `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;

    #[test]
    fn truncated_snapshot_reports_line() {
        let err = GlinIndex::load_snapshot("GLIN-SNAPSHOT 1\ncell_size 0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GlinError::Snapshot { line: 3, .. }), "{err}");
    }

    #[test]
    fn round_trip_small() {
        let recs = vec![
            (Geometry::rect(1.0, 1.0, 2.0, 2.0).unwrap(), 1),
            (Geometry::point(-5.5, 7.25).unwrap(), 2),
        ];
        let idx = GlinIndex::bulk_load_with_piecewise(recs, CurveConfig::default(), BuildParams::default(), 1).unwrap();
        let mut buf = Vec::new();
        idx.save_snapshot(&mut buf).unwrap();
        let back = GlinIndex::load_snapshot(buf.as_slice()).unwrap();
        back.audit().unwrap();
        assert_eq!(back.piecewise(), idx.piecewise());
        let a: Vec<_> = idx.iter().map(|r| (r.id, r.geometry.clone())).collect();
        let b: Vec<_> = back.iter().map(|r| (r.id, r.geometry.clone())).collect();
        assert_eq!(a, b);
    }
}
