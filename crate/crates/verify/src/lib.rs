//! Shared fixtures and independent oracles for the integration suites.

use std::collections::BTreeSet;

use psicoord::triangulation::samples;
use psicoord::{build_complex, IdealTriangulation, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The three test complexes with 2, 4 and 6 hexagons.
pub fn complexes() -> Vec<(&'static str, IdealTriangulation)> {
    vec![
        ("h2", build_complex(&samples::pair_of_pants()).unwrap()),
        ("h4", build_complex(&samples::tetrahedral()).unwrap()),
        ("h6", build_complex(&samples::bipartite_six()).unwrap()),
    ]
}

/// Lengths drawn uniformly from [0.2, 3].
pub fn random_metric(rng: &mut impl Rng, edges: usize) -> Metric {
    Metric::new((0..edges).map(|_| rng.gen_range(0.2..3.0)).collect()).unwrap()
}

/// Exhaustive enumeration of every alternating sequence, no memoization.
/// Returns (path vectors, cycle vectors).
pub fn brute_force_vectors(
    c: &IdealTriangulation,
    allow_backtrack: bool,
) -> (BTreeSet<Vec<u8>>, BTreeSet<Vec<u8>>) {
    let mut walk = Walk {
        c,
        allow_backtrack,
        start: 0,
        seq: Vec::new(),
        counts: vec![0; c.edge_count()],
        paths: BTreeSet::new(),
        cycles: BTreeSet::new(),
    };
    for start in 0..c.hexagon_count() {
        walk.start = start;
        walk.go(start);
    }
    (walk.paths, walk.cycles)
}

struct Walk<'a> {
    c: &'a IdealTriangulation,
    allow_backtrack: bool,
    start: usize,
    seq: Vec<usize>,
    counts: Vec<u8>,
    paths: BTreeSet<Vec<u8>>,
    cycles: BTreeSet<Vec<u8>>,
}

impl Walk<'_> {
    fn go(&mut self, at: usize) {
        for (e, edge) in self.c.edges().iter().enumerate() {
            let [a, b] = edge.ends;
            if a.hexagon == b.hexagon || self.counts[e] == 2 {
                continue;
            }
            let next = if a.hexagon == at {
                b.hexagon
            } else if b.hexagon == at {
                a.hexagon
            } else {
                continue;
            };
            if !self.allow_backtrack && self.seq.last() == Some(&e) {
                continue;
            }
            self.seq.push(e);
            self.counts[e] += 1;
            self.paths.insert(self.counts.clone());
            if next == self.start && (self.allow_backtrack || self.seq[0] != e) {
                self.cycles.insert(self.counts.clone());
            }
            self.go(next);
            self.counts[e] -= 1;
            self.seq.pop();
        }
    }
}
