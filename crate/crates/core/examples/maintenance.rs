// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Inserts and deletes on a live index, with the structure audited after
//! each phase.

use glin::bench::{generate, Distribution, GenParams};
use glin::prelude::*;

fn main() -> Result<()> {
    let data = generate(
        Distribution::Uniform,
        &GenParams {
            n: 50_000,
            ..Default::default()
        },
    )?;
    let (initial, later) = data.split_at(25_000);
    let mut index =
        GlinIndex::bulk_load_with_piecewise(initial.to_vec(), CurveConfig::default(), BuildParams::default(), 1_000)?;
    println!("loaded: {:?}", index.stats());

    for (g, id) in later {
        index.insert(g.clone(), *id)?;
    }
    index.audit()?;
    println!("after inserts: {:?}", index.stats());

    let mut removed = 0;
    for (g, _) in data.iter().step_by(2) {
        removed += index.delete(g)?;
    }
    index.audit()?;
    println!("removed {removed}; now {:?}", index.stats());
    Ok(())
}
