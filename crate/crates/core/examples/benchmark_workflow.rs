// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! The library side of `glin bench`: generate data, derive windows, verify
//! every engine against the scan and print the report as JSON.

use glin::bench::{self, BenchConfig, Distribution, Engine, GenParams};
use glin::prelude::*;

fn main() -> Result<()> {
    let data = bench::generate(
        Distribution::Uniform,
        &GenParams {
            n: 20_000,
            ..Default::default()
        },
    )?;
    let windows = bench::make_queries(&data, 0.001, 50, 7)?;
    let cfg = BenchConfig {
        repetitions: 3,
        ..Default::default()
    };
    let engines = Engine::defaults_for(Relationship::Intersects);
    let report = bench::bench(&data, &windows, &engines, Relationship::Intersects, &cfg)?;
    report.write_json(std::io::stdout().lock())?;
    Ok(())
}
