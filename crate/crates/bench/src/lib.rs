//! Instances shared by the criterion benchmarks.

use shareq_core::bench::bench_instance;
use shareq_core::generators::Family;
use shareq_core::{LamGraph, Query};

/// Sizes `2^lo ..= 2^hi`.
pub fn powers_of_two(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

/// One instance per size, with its element count `|N| + |E| + |Q|`.
pub fn instances(family: Family, sizes: &[usize], seed: u64) -> Vec<(usize, LamGraph, Query)> {
    sizes
        .iter()
        .map(|&n| {
            let (g, q) = bench_instance(family, n, seed).expect("benchmark sizes are in range");
            (n, g, q)
        })
        .collect()
}

pub fn element_count(g: &LamGraph, q: &Query) -> u64 {
    (g.node_count() + g.edge_count() + q.len()) as u64
}
