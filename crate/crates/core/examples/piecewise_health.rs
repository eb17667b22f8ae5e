// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Watch the piecewise function degrade under skewed inserts, then rebuild.

use glin::bench::{generate, Distribution, GenParams};
use glin::prelude::*;

fn main() -> Result<()> {
    let data = generate(
        Distribution::Uniform,
        &GenParams {
            n: 40_000,
            ..Default::default()
        },
    )?;
    let (initial, later) = data.split_at(20_000);
    let mut index =
        GlinIndex::bulk_load_with_piecewise(initial.to_vec(), CurveConfig::default(), BuildParams::default(), 2_000)?;
    let report = |label: &str, pw: &PiecewiseFunction| {
        let largest = pw.pieces().iter().map(|p| p.count).max().unwrap_or(0);
        println!(
            "{label}: {} pieces, largest {largest}, avg_diff {:.4}",
            pw.len(),
            pw.avg_diff()
        );
    };
    report("fresh", index.piecewise().expect("attached"));

    // stretch each new rectangle down and to the left so its interval starts earlier
    for (g, id) in later {
        let m = g.mbr();
        let stretched = Geometry::rect((m.xmin - 5.0).max(-180.0), (m.ymin - 5.0).max(-90.0), m.xmax, m.ymax)?;
        index.insert(stretched, *id)?;
    }
    report("after inserts", index.piecewise().expect("attached"));

    index.rebuild_piecewise();
    report("rebuilt", index.piecewise().expect("attached"));
    Ok(())
}
