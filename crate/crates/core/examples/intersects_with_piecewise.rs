// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Intersects queries need the piecewise function: a geometry can start
//! (in Z order) well before the window and still overlap it.

use glin::prelude::*;

fn main() -> Result<()> {
    let cfg = CurveConfig::new(1.0)?;
    let rect = |x0: f64, y0: f64, x1: f64, y1: f64| Geometry::rect(x0 - 180.0, y0 - 90.0, x1 - 180.0, y1 - 90.0);
    let records = vec![
        (rect(0.4, 1.4, 0.6, 1.6)?, 1),
        (rect(0.1, 0.1, 0.5, 1.5)?, 2),
        (rect(0.05, 0.05, 1.95, 3.95)?, 3),
        (rect(3.2, 3.2, 3.8, 3.8)?, 4),
    ];
    let window = rect(0.2, 1.2, 1.8, 3.8)?;
    let mut index = GlinIndex::bulk_load(records, cfg, BuildParams::default())?;

    let plain = QueryOptions {
        augment: false,
        ..Default::default()
    };
    let (ids, stats) = index.search(&window, Relationship::Intersects, plain)?;
    println!("plain scan [{}, {}] -> {ids:?}", stats.scan_zmin, stats.scan_zmax);

    index.attach_piecewise(2);
    let (ids, stats) = index.search(&window, Relationship::Intersects, QueryOptions::default())?;
    println!("augmented scan [{}, {}] -> {ids:?}", stats.scan_zmin, stats.scan_zmax);
    Ok(())
}
