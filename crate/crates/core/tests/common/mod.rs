#![allow(dead_code)]

use bcdpf::consensus::LogBeliefTable;
use bcdpf::topology::NetworkGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn line_positions(n: usize) -> Vec<[f64; 2]> {
    (0..n).map(|i| [i as f64, 0.0]).collect()
}

/// Uniform random recursive tree: node `k` attaches to a uniform earlier node.
pub fn random_tree(n: usize, seed: u64) -> NetworkGraph {
    let mut r = rng(seed);
    let edges: Vec<(usize, usize)> = (1..n).map(|k| (r.random_range(0..k), k)).collect();
    NetworkGraph::from_edges(line_positions(n), 1.0, 0.0, &edges).unwrap()
}

/// Random tree plus `extra` random chords (duplicates collapse).
pub fn random_connected(n: usize, extra: usize, seed: u64) -> NetworkGraph {
    let mut r = rng(seed);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|k| (r.random_range(0..k), k)).collect();
    if n >= 3 {
        for _ in 0..extra {
            let a = r.random_range(0..n);
            let b = r.random_range(0..n);
            if a != b {
                edges.push((a, b));
            }
        }
    }
    NetworkGraph::from_edges(line_positions(n), 1.0, 0.0, &edges).unwrap()
}

/// Connected graph with at least one cycle.
pub fn random_loopy(n: usize, extra: usize, seed: u64) -> NetworkGraph {
    assert!(n >= 3);
    for k in 0.. {
        let g = random_connected(n, extra.max(1), seed.wrapping_add(k));
        if g.edge_count() >= n {
            return g;
        }
    }
    unreachable!()
}

pub fn random_table(nodes: usize, particles: usize, lo: f64, hi: f64, seed: u64) -> LogBeliefTable {
    let mut r = rng(seed);
    let values = (0..nodes * particles).map(|_| r.random_range(lo..hi)).collect();
    LogBeliefTable::from_rows(nodes, particles, values).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
