//! Enumeration of fundamental edge paths and edge cycles.
//!
//! An edge path alternates hexagons and edges, `(H0, e1, H1, ..., en, Hn)`,
//! with `H(i-1) != H(i)` both carrying `e(i)`. It is fundamental when no
//! edge occurs more than twice, and a cycle when `H0 == Hn`.
//!
//! Only the edge multiplicities of a path enter the polytope, so the
//! enumerators return one witness per distinct multiplicity vector. The
//! search memoizes on `(hexagon, entry slot, multiplicities)`; a state that
//! has been expanded once cannot produce anything new.
//!
//! By default a path may not leave a hexagon through the slot it entered
//! by ([`Traversal::NoBacktrack`]), and a cycle may not close through the
//! slot it started from. The inequality attached to a path needs, inside
//! every intermediate hexagon, the A-arc between the entry and exit edge,
//! which only exists when the two differ. [`Traversal::AllowBacktrack`]
//! drops that restriction and enumerates the bare definition.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::triangulation::{IdealTriangulation, Slot};

pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Traversal {
    #[default]
    NoBacktrack,
    AllowBacktrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Budget of search steps; reaching it sets [`Enumeration::truncated`].
    pub cap: usize,
    pub traversal: Traversal,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            traversal: Traversal::NoBacktrack,
        }
    }
}

impl EnumerationOptions {
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("path has no edges")]
    Empty,
    #[error("path has {hexagons} hexagons for {edges} edges")]
    Shape { hexagons: usize, edges: usize },
    #[error("step {step}: edge {edge} does not join hexagons {from} and {to}")]
    NotIncident {
        step: usize,
        edge: usize,
        from: usize,
        to: usize,
    },
    #[error("step {step}: consecutive hexagons coincide")]
    RepeatedHexagon { step: usize },
    #[error("step {step}: path turns back through edge {edge}")]
    Backtrack { step: usize, edge: usize },
    #[error("edge {0} occurs more than twice")]
    NotFundamental(usize),
    #[error("edge {0} is out of range")]
    UnknownEdge(usize),
}

/// `(H0, e1, H1, ..., en, Hn)` stored as `n + 1` hexagons and `n` edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePath {
    pub hexagons: Vec<usize>,
    pub edges: Vec<usize>,
}

impl EdgePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_cycle(&self) -> bool {
        !self.edges.is_empty() && self.hexagons.first() == self.hexagons.last()
    }

    pub fn multiplicities(&self, edge_count: usize) -> Vec<u8> {
        let mut m = vec![0u8; edge_count];
        for &e in &self.edges {
            m[e] = m[e].saturating_add(1);
        }
        m
    }

    /// Checks the alternating-incidence and fundamental conditions, and under
    /// [`Traversal::NoBacktrack`] the turning condition (including closure
    /// for cycles).
    pub fn validate(
        &self,
        complex: &IdealTriangulation,
        traversal: Traversal,
    ) -> Result<(), PathError> {
        let n = self.edges.len();
        if n == 0 {
            return Err(PathError::Empty);
        }
        if self.hexagons.len() != n + 1 {
            return Err(PathError::Shape {
                hexagons: self.hexagons.len(),
                edges: n,
            });
        }
        let mut counts = HashMap::new();
        for (i, &e) in self.edges.iter().enumerate() {
            let edge = complex.edge(e).ok_or(PathError::UnknownEdge(e))?;
            let (from, to) = (self.hexagons[i], self.hexagons[i + 1]);
            if from == to {
                return Err(PathError::RepeatedHexagon { step: i + 1 });
            }
            let ends = [edge.ends[0].hexagon, edge.ends[1].hexagon];
            if !(ends == [from, to] || ends == [to, from]) {
                return Err(PathError::NotIncident {
                    step: i + 1,
                    edge: e,
                    from,
                    to,
                });
            }
            let c = counts.entry(e).or_insert(0u8);
            *c += 1;
            if *c > 2 {
                return Err(PathError::NotFundamental(e));
            }
        }
        if traversal == Traversal::NoBacktrack {
            for i in 1..n {
                if self.edges[i] == self.edges[i - 1] {
                    return Err(PathError::Backtrack {
                        step: i + 1,
                        edge: self.edges[i],
                    });
                }
            }
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate), additionally requiring closure
    /// and, without backtracking, distinct first and last edges.
    pub fn validate_cycle(
        &self,
        complex: &IdealTriangulation,
        traversal: Traversal,
    ) -> Result<(), PathError> {
        self.validate(complex, traversal)?;
        if !self.is_cycle() {
            return Err(PathError::Shape {
                hexagons: self.hexagons.len(),
                edges: self.edges.len(),
            });
        }
        let n = self.edges.len();
        if traversal == Traversal::NoBacktrack && self.edges[0] == self.edges[n - 1] {
            return Err(PathError::Backtrack {
                step: 1,
                edge: self.edges[0],
            });
        }
        Ok(())
    }
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.hexagons[0])?;
        for (e, h) in self.edges.iter().zip(&self.hexagons[1..]) {
            write!(f, " e{e} H{h}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// One witness per multiplicity vector, ordered by total length then
    /// lexicographically by multiplicities.
    pub items: Vec<EdgePath>,
    pub truncated: bool,
    /// Search steps taken.
    pub explored: usize,
}

impl Enumeration {
    pub fn multiplicity_vectors(&self, edge_count: usize) -> Vec<Vec<u8>> {
        self.items
            .iter()
            .map(|p| p.multiplicities(edge_count))
            .collect()
    }
}

const NO_SLOT: u8 = 3;

struct Search<'a> {
    complex: &'a IdealTriangulation,
    traversal: Traversal,
    cap: usize,
    explored: usize,
    truncated: bool,
    counts: Vec<u8>,
    hexagons: Vec<usize>,
    edges: Vec<usize>,
    visited: HashSet<(usize, u8, Vec<u8>)>,
    found: HashMap<Vec<u8>, EdgePath>,
}

impl<'a> Search<'a> {
    fn new(complex: &'a IdealTriangulation, opts: &EnumerationOptions) -> Self {
        Self {
            complex,
            traversal: opts.traversal,
            cap: opts.cap,
            explored: 0,
            truncated: false,
            counts: vec![0; complex.edge_count()],
            hexagons: Vec::new(),
            edges: Vec::new(),
            visited: HashSet::new(),
            found: HashMap::new(),
        }
    }

    fn entry_key(&self, entry: u8) -> u8 {
        match self.traversal {
            Traversal::NoBacktrack => entry,
            Traversal::AllowBacktrack => NO_SLOT,
        }
    }

    /// Steps out of `hexagon` (entered through `entry`) that respect the
    /// multiplicity and turning rules: `(exit slot, edge, next slot)`.
    fn moves(&self, hexagon: usize, entry: u8) -> Vec<(u8, usize, Slot)> {
        let mut out = Vec::with_capacity(3);
        for slot in 0..3u8 {
            if self.traversal == Traversal::NoBacktrack && slot == entry {
                continue;
            }
            let e = self.complex.edge_at(hexagon, slot as usize);
            let edge = &self.complex.edges()[e];
            if edge.is_self_glued() || self.counts[e] >= 2 {
                continue;
            }
            let next = edge
                .other_end(Slot::new(hexagon, slot as usize))
                .expect("incidence is consistent");
            out.push((slot, e, next));
        }
        out
    }

    fn record(&mut self) {
        if !self.found.contains_key(&self.counts) {
            self.found.insert(
                self.counts.clone(),
                EdgePath {
                    hexagons: self.hexagons.clone(),
                    edges: self.edges.clone(),
                },
            );
        }
    }

    fn budget_left(&mut self) -> bool {
        if self.explored >= self.cap {
            self.truncated = true;
            return false;
        }
        self.explored += 1;
        true
    }

    fn walk_paths(&mut self, hexagon: usize, entry: u8) {
        for (_, e, next) in self.moves(hexagon, entry) {
            if !self.budget_left() {
                return;
            }
            self.counts[e] += 1;
            self.edges.push(e);
            self.hexagons.push(next.hexagon);
            self.record();
            let key = (
                next.hexagon,
                self.entry_key(next.slot as u8),
                self.counts.clone(),
            );
            if self.visited.insert(key) {
                self.walk_paths(next.hexagon, next.slot as u8);
            }
            self.hexagons.pop();
            self.edges.pop();
            self.counts[e] -= 1;
        }
    }

    /// Cycles are rooted at their smallest hexagon, so the walk never
    /// enters a hexagon below `root`.
    fn walk_cycles(&mut self, root: usize, first_exit: u8, hexagon: usize, entry: u8) {
        for (_, e, next) in self.moves(hexagon, entry) {
            if next.hexagon < root {
                continue;
            }
            if !self.budget_left() {
                return;
            }
            self.counts[e] += 1;
            self.edges.push(e);
            self.hexagons.push(next.hexagon);
            if next.hexagon == root
                && (self.traversal == Traversal::AllowBacktrack || next.slot as u8 != first_exit)
            {
                self.record();
            }
            let key = (
                next.hexagon,
                self.entry_key(next.slot as u8),
                self.counts.clone(),
            );
            if self.visited.insert(key) {
                self.walk_cycles(root, first_exit, next.hexagon, next.slot as u8);
            }
            self.hexagons.pop();
            self.edges.pop();
            self.counts[e] -= 1;
        }
    }

    fn finish(self) -> Enumeration {
        let m = self.complex.edge_count();
        let mut items: Vec<(Vec<u8>, EdgePath)> = self.found.into_iter().collect();
        items.sort_by(|(a, _), (b, _)| {
            let la: u32 = a.iter().map(|&x| x as u32).sum();
            let lb: u32 = b.iter().map(|&x| x as u32).sum();
            la.cmp(&lb).then_with(|| a.cmp(b))
        });
        debug_assert!(items.iter().all(|(v, p)| p.multiplicities(m) == *v));
        Enumeration {
            items: items.into_iter().map(|(_, p)| p).collect(),
            truncated: self.truncated,
            explored: self.explored,
        }
    }
}

pub fn enumerate_fundamental_paths(complex: &IdealTriangulation, cap: usize) -> Enumeration {
    enumerate_fundamental_paths_with(complex, &EnumerationOptions::with_cap(cap))
}

pub fn enumerate_fundamental_paths_with(
    complex: &IdealTriangulation,
    opts: &EnumerationOptions,
) -> Enumeration {
    let mut search = Search::new(complex, opts);
    for start in 0..complex.hexagon_count() {
        if search.truncated {
            break;
        }
        search.hexagons.push(start);
        let key = (start, search.entry_key(NO_SLOT), search.counts.clone());
        if search.visited.insert(key) {
            search.walk_paths(start, NO_SLOT);
        }
        search.hexagons.pop();
    }
    search.finish()
}

pub fn enumerate_fundamental_cycles(complex: &IdealTriangulation, cap: usize) -> Enumeration {
    enumerate_fundamental_cycles_with(complex, &EnumerationOptions::with_cap(cap))
}

pub fn enumerate_fundamental_cycles_with(
    complex: &IdealTriangulation,
    opts: &EnumerationOptions,
) -> Enumeration {
    let mut search = Search::new(complex, opts);
    'roots: for root in 0..complex.hexagon_count() {
        for first in 0..3u8 {
            if search.truncated {
                break 'roots;
            }
            let e = complex.edge_at(root, first as usize);
            let edge = &complex.edges()[e];
            if edge.is_self_glued() {
                continue;
            }
            let next = edge
                .other_end(Slot::new(root, first as usize))
                .expect("incidence is consistent");
            if next.hexagon < root || !search.budget_left() {
                continue;
            }
            search.visited.clear();
            search.hexagons.push(root);
            search.counts[e] += 1;
            search.edges.push(e);
            search.hexagons.push(next.hexagon);
            search.walk_cycles(root, first, next.hexagon, next.slot as u8);
            search.hexagons.clear();
            search.edges.clear();
            search.counts[e] -= 1;
        }
    }
    search.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{build_complex, samples};

    fn pants() -> IdealTriangulation {
        build_complex(&samples::pair_of_pants()).unwrap()
    }

    fn literal() -> EnumerationOptions {
        EnumerationOptions {
            cap: DEFAULT_CAP,
            traversal: Traversal::AllowBacktrack,
        }
    }

    #[test]
    fn pants_literal_counts() {
        let c = pants();
        let paths = enumerate_fundamental_paths_with(&c, &literal());
        let cycles = enumerate_fundamental_cycles_with(&c, &literal());
        assert_eq!(paths.items.len(), 26);
        assert_eq!(cycles.items.len(), 13);
        assert!(!paths.truncated && !cycles.truncated);
    }

    #[test]
    fn pants_reduced_counts() {
        let c = pants();
        let paths = enumerate_fundamental_paths(&c, DEFAULT_CAP);
        let cycles = enumerate_fundamental_cycles(&c, DEFAULT_CAP);
        // every nonzero vector in {0,1,2}^3 except the three (2,0,0) types
        assert_eq!(paths.items.len(), 23);
        // even-sum vectors minus the (2,0,0) types
        assert_eq!(cycles.items.len(), 10);
    }

    #[test]
    fn ordering_is_length_then_lex() {
        let c = pants();
        let v = enumerate_fundamental_paths(&c, DEFAULT_CAP).multiplicity_vectors(3);
        assert_eq!(v[0], vec![0, 0, 1]);
        assert_eq!(v[1], vec![0, 1, 0]);
        assert_eq!(v[2], vec![1, 0, 0]);
        assert_eq!(v.last().unwrap(), &vec![2, 2, 2]);
    }

    #[test]
    fn every_single_edge_is_a_path() {
        let c = build_complex(&samples::tetrahedral()).unwrap();
        let v = enumerate_fundamental_paths(&c, DEFAULT_CAP).multiplicity_vectors(6);
        for e in 0..6 {
            let mut unit = vec![0; 6];
            unit[e] = 1;
            assert!(v.contains(&unit));
        }
    }

    #[test]
    fn witnesses_validate() {
        for spec in [samples::pair_of_pants(), samples::tetrahedral()] {
            let c = build_complex(&spec).unwrap();
            for p in enumerate_fundamental_paths(&c, DEFAULT_CAP).items {
                p.validate(&c, Traversal::NoBacktrack).unwrap();
            }
            for p in enumerate_fundamental_cycles(&c, DEFAULT_CAP).items {
                p.validate_cycle(&c, Traversal::NoBacktrack).unwrap();
            }
        }
    }

    #[test]
    fn self_glued_edges_are_never_traversed() {
        let c = build_complex(&samples::self_glued_pair()).unwrap();
        for opts in [EnumerationOptions::default(), literal()] {
            let paths = enumerate_fundamental_paths_with(&c, &opts);
            assert!(paths
                .items
                .iter()
                .all(|p| !p.edges.contains(&0) && !p.edges.contains(&2)));
            // only edge 1 is traversable
            assert!(paths.items.iter().all(|p| p.edges.iter().all(|&e| e == 1)));
        }
        // no closed walk without turning back
        assert!(enumerate_fundamental_cycles(&c, DEFAULT_CAP)
            .items
            .is_empty());
        let lit = enumerate_fundamental_cycles_with(&c, &literal());
        assert_eq!(lit.multiplicity_vectors(3), vec![vec![0, 2, 0]]);
    }

    #[test]
    fn backtracking_two_cycle_is_fundamental_literally() {
        let c = pants();
        let p = EdgePath {
            hexagons: vec![0, 1, 0],
            edges: vec![0, 0],
        };
        p.validate_cycle(&c, Traversal::AllowBacktrack).unwrap();
        assert!(matches!(
            p.validate_cycle(&c, Traversal::NoBacktrack),
            Err(PathError::Backtrack { .. })
        ));
    }

    #[test]
    fn cap_sets_truncation_flag() {
        let c = build_complex(&samples::tetrahedral()).unwrap();
        let e = enumerate_fundamental_paths(&c, 10);
        assert!(e.truncated);
        assert_eq!(e.explored, 10);
        let full = enumerate_fundamental_cycles(&c, DEFAULT_CAP);
        assert!(!full.truncated);
    }

    #[test]
    fn deterministic() {
        let c = build_complex(&samples::bipartite_six()).unwrap();
        let a = enumerate_fundamental_cycles(&c, DEFAULT_CAP);
        let b = enumerate_fundamental_cycles(&c, DEFAULT_CAP);
        assert_eq!(a, b);
    }

    #[test]
    fn display_witness() {
        let p = EdgePath {
            hexagons: vec![0, 1, 0],
            edges: vec![0, 1],
        };
        assert_eq!(p.to_string(), "H0 e0 H1 e1 H0");
    }

    #[test]
    fn validation_errors() {
        let c = pants();
        let bad = EdgePath {
            hexagons: vec![0, 0],
            edges: vec![0],
        };
        assert_eq!(
            bad.validate(&c, Traversal::NoBacktrack),
            Err(PathError::RepeatedHexagon { step: 1 })
        );
        let thrice = EdgePath {
            hexagons: vec![0, 1, 0, 1],
            edges: vec![0, 0, 0],
        };
        assert_eq!(
            thrice.validate(&c, Traversal::AllowBacktrack),
            Err(PathError::NotFundamental(0))
        );
    }
}
