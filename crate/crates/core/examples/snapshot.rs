// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Save an index to a text snapshot and load it back.

use std::io::BufReader;

use glin::bench::{generate, Distribution, GenParams};
use glin::prelude::*;

fn main() -> Result<()> {
    let data = generate(
        Distribution::Diagonal,
        &GenParams {
            n: 10_000,
            ..Default::default()
        },
    )?;
    let index = GlinIndex::bulk_load_with_piecewise(data, CurveConfig::default(), BuildParams::default(), 500)?;

    let path = std::env::temp_dir().join("glin-example.snapshot");
    index.save_snapshot(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    let restored = GlinIndex::load_snapshot(BufReader::new(std::fs::File::open(&path)?))?;
    restored.audit()?;
    println!("{} records restored from {}", restored.len(), path.display());
    println!("{:?}", restored.stats());
    Ok(())
}
