// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! How geometries map to Z-address intervals.

use glin::geometry::Geometry;
use glin::zcurve::{coord_to_cell, morton_decode, morton_encode, zitvl, CellCoord, CurveConfig};

fn main() -> glin::Result<()> {
    for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 3), (3, 3)] {
        let z = morton_encode(CellCoord::new(x, y));
        println!("cell ({x},{y}) -> {} -> {:?}", z.0, morton_decode(z));
    }

    let cfg = CurveConfig::new(1.0)?;
    let g = Geometry::rect(-179.8, -88.8, -178.2, -86.2)?;
    let mbr = g.mbr();
    println!(
        "p_min cell {:?}, p_max cell {:?}",
        coord_to_cell(mbr.p_min(), &cfg)?,
        coord_to_cell(mbr.p_max(), &cfg)?
    );
    println!("interval {:?}", zitvl(&g, &cfg)?);
    Ok(())
}
