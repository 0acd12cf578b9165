//! Seeded random connected graphs for cross-validation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub const MAX_ESSENTIAL: usize = 8;
pub const MAX_BETA1: usize = 6;

/// Edges of the core a random graph grows from: nothing, K(3,3) or K5.
fn core(rng: &mut impl Rng) -> (usize, Vec<(usize, usize)>) {
    match rng.gen_range(0..6) {
        0 | 1 => (6, (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect()),
        2 => (5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect()),
        _ => (1, vec![]),
    }
}

/// A connected multigraph without loops, with 1..=8 essential vertices and β₁ ≤ 6.
/// Half the draws contain a K(3,3) or K5 core, so non-planar graphs are common.
pub fn random_graph(rng: &mut impl Rng) -> Graph {
    loop {
        let (c, mut edges) = core(rng);
        let nv = c + rng.gen_range(if c == 1 { 1..=6 } else { 0..=2 });
        edges.extend((c..nv).map(|i| (rng.gen_range(0..i), i)));
        let beta1 = edges.len() + 1 - nv;
        for _ in 0..rng.gen_range(0..=MAX_BETA1 - beta1) {
            let (a, b) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
            if a != b {
                edges.push((a, b));
            }
        }
        let mut count = nv;
        for _ in 0..rng.gen_range(0..=2) {
            edges.push((rng.gen_range(0..nv), count));
            count += 1;
        }
        let mut deg = vec![0usize; count];
        for &(a, b) in &edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        let essential = deg.iter().filter(|&&d| d >= 3).count();
        if essential == 0 || essential > MAX_ESSENTIAL {
            continue;
        }
        let names: Vec<String> = (0..count).map(|i| format!("v{i}")).collect();
        let pairs: Vec<(String, String)> = edges.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect();
        return Graph::new(&names, &pairs).expect("generated graph is valid");
    }
}

pub fn corpus(seed: u64, count: usize) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_graph(&mut rng)).collect()
}
