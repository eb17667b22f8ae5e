// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Build an index over a few shapes and run a Contains query.
//!
//! `cargo run --example quickstart`

use glin::prelude::*;

fn main() -> Result<()> {
    let shapes = [
        "POLYGON ((10 10, 12 10, 12 12, 10 12, 10 10))",
        "LINESTRING (10.5 10.5, 11.5 11.0)",
        "POINT (11 11)",
        "POLYGON ((30 30, 31 30, 31 31, 30 31, 30 30))",
    ];
    let records = shapes
        .iter()
        .zip(1..)
        .map(|(wkt, id)| parse_wkt(wkt).map(|g| (g, id)))
        .collect::<Result<Vec<_>>>()?;

    let index = GlinIndex::bulk_load(records, CurveConfig::default(), BuildParams::default())?;
    let window = parse_wkt("POLYGON ((9 9, 13 9, 13 13, 9 13, 9 9))")?;
    let hits = index.range_query(&window, Relationship::Contains)?;
    println!("window contains {hits:?}");
    println!("{:?}", index.stats());
    Ok(())
}
