// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright The glin-rs Authors

//! Compare candidate counts and metadata size with the STR R-tree.

use glin::bench::{generate, make_queries, Distribution, GenParams};
use glin::oracle::{StrRTree, DEFAULT_RTREE_FANOUT};
use glin::prelude::*;

fn main() -> Result<()> {
    let data = generate(
        Distribution::Diagonal,
        &GenParams {
            n: 100_000,
            ..Default::default()
        },
    )?;
    let index = GlinIndex::bulk_load(data.iter().cloned(), CurveConfig::default(), BuildParams::default())?;
    let tree = StrRTree::bulk_load(data.iter().cloned(), DEFAULT_RTREE_FANOUT)?;

    let (mut glin_cands, mut tree_cands) = (0, 0);
    for q in make_queries(&data, 0.001, 100, 1)? {
        let (_, s) = index.search(&q.window, Relationship::Contains, QueryOptions::default())?;
        glin_cands += s.candidates;
        tree_cands += tree.query(&q.window, Relationship::Contains).1;
    }
    println!("candidates: glin {glin_cands}, rtree {tree_cands}");
    println!(
        "metadata bytes: glin {}, rtree {}",
        index.stats().metadata_bytes,
        tree.stats().metadata_bytes
    );
    Ok(())
}
