//! Combinatorics of ideal triangulations built from colored hexagons.
//!
//! Every hexagon has three red slots, numbered in cyclic order. A
//! [`GluingSpec`] pairs all slots up; each pair becomes one edge of the
//! triangulation, numbered by its position in the gluing list.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("hexagon count must be even and at least 2, got {0}")]
    OddHexagonCount(usize),
    #[error("slot ({hexagon}, {slot}) is out of range")]
    SlotOutOfRange { hexagon: usize, slot: usize },
    #[error("slot ({hexagon}, {slot}) is glued more than once")]
    DuplicateSlot { hexagon: usize, slot: usize },
    #[error("slot ({hexagon}, {slot}) is not glued")]
    UnmatchedSlot { hexagon: usize, slot: usize },
    #[error("gluing graph is disconnected")]
    Disconnected,
}

/// A red slot of a hexagon. Serialized as `[hexagon, slot]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Slot {
    pub hexagon: usize,
    pub slot: usize,
}

impl Slot {
    pub fn new(hexagon: usize, slot: usize) -> Self {
        Self { hexagon, slot }
    }
}

impl From<(usize, usize)> for Slot {
    fn from((hexagon, slot): (usize, usize)) -> Self {
        Self { hexagon, slot }
    }
}

impl From<Slot> for (usize, usize) {
    fn from(s: Slot) -> Self {
        (s.hexagon, s.slot)
    }
}

/// Raw gluing data, in the on-disk layout
/// `{"hexagons": 2, "gluings": [[[0,0],[1,0]], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingSpec {
    #[serde(rename = "hexagons")]
    pub hexagon_count: usize,
    pub gluings: Vec<[Slot; 2]>,
}

impl GluingSpec {
    pub fn new(hexagon_count: usize, gluings: Vec<[(usize, usize); 2]>) -> Self {
        Self {
            hexagon_count,
            gluings: gluings
                .into_iter()
                .map(|[a, b]| [a.into(), b.into()])
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub ends: [Slot; 2],
}

impl Edge {
    pub fn is_self_glued(&self) -> bool {
        self.ends[0].hexagon == self.ends[1].hexagon
    }

    /// The end opposite the given slot, if the slot belongs to this edge.
    pub fn other_end(&self, from: Slot) -> Option<Slot> {
        if self.ends[0] == from {
            Some(self.ends[1])
        } else if self.ends[1] == from {
            Some(self.ends[0])
        } else {
            None
        }
    }
}

/// Validated complex of hexagons glued along red edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealTriangulation {
    hexagon_count: usize,
    edges: Vec<Edge>,
    incidence: Vec<[usize; 3]>,
}

impl IdealTriangulation {
    pub fn hexagon_count(&self) -> usize {
        self.hexagon_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Option<&Edge> {
        self.edges.get(e)
    }

    /// Edge glued into `slot` of `hexagon`.
    pub fn edge_at(&self, hexagon: usize, slot: usize) -> usize {
        self.incidence[hexagon][slot]
    }

    /// Edges in slot order.
    pub fn hexagon_edges(&self, hexagon: usize) -> [usize; 3] {
        self.incidence[hexagon]
    }

    pub fn euler_characteristic(&self) -> i64 {
        -(self.hexagon_count as i64) / 2
    }

    /// True when some hexagon carries both edges.
    pub fn edges_share_hexagon(&self, e: usize, f: usize) -> bool {
        self.edges[e]
            .ends
            .iter()
            .any(|a| self.incidence[a.hexagon].contains(&f))
    }

    pub fn to_spec(&self) -> GluingSpec {
        GluingSpec {
            hexagon_count: self.hexagon_count,
            gluings: self.edges.iter().map(|e| e.ends).collect(),
        }
    }
}

pub fn build_complex(spec: &GluingSpec) -> Result<IdealTriangulation, TriangulationError> {
    let h = spec.hexagon_count;
    if h < 2 || h % 2 == 1 {
        return Err(TriangulationError::OddHexagonCount(h));
    }
    let mut incidence: Vec<[Option<usize>; 3]> = vec![[None; 3]; h];
    for (e, pair) in spec.gluings.iter().enumerate() {
        for s in pair {
            if s.hexagon >= h || s.slot >= 3 {
                return Err(TriangulationError::SlotOutOfRange {
                    hexagon: s.hexagon,
                    slot: s.slot,
                });
            }
            let cell = &mut incidence[s.hexagon][s.slot];
            if cell.is_some() {
                return Err(TriangulationError::DuplicateSlot {
                    hexagon: s.hexagon,
                    slot: s.slot,
                });
            }
            *cell = Some(e);
        }
    }
    let incidence: Vec<[usize; 3]> = incidence
        .iter()
        .enumerate()
        .map(|(hexagon, row)| {
            let mut out = [0; 3];
            for (slot, cell) in row.iter().enumerate() {
                out[slot] = cell.ok_or(TriangulationError::UnmatchedSlot { hexagon, slot })?;
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let edges: Vec<Edge> = spec.gluings.iter().map(|&ends| Edge { ends }).collect();

    let mut seen = vec![false; h];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &e in &incidence[x] {
            for end in edges[e].ends {
                if !seen[end.hexagon] {
                    seen[end.hexagon] = true;
                    queue.push_back(end.hexagon);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(TriangulationError::Disconnected);
    }

    debug_assert_eq!(edges.len() * 2, 3 * h);
    Ok(IdealTriangulation {
        hexagon_count: h,
        edges,
        incidence,
    })
}

/// Standard complexes used by tests and examples.
pub mod samples {
    use super::GluingSpec;

    /// Two hexagons glued slot-to-slot: the three-holed sphere.
    pub fn pair_of_pants() -> GluingSpec {
        GluingSpec::new(
            2,
            vec![[(0, 0), (1, 0)], [(0, 1), (1, 1)], [(0, 2), (1, 2)]],
        )
    }

    /// Four hexagons whose dual graph is the complete graph on four vertices.
    pub fn tetrahedral() -> GluingSpec {
        GluingSpec::new(
            4,
            vec![
                [(0, 0), (1, 0)],
                [(0, 1), (2, 0)],
                [(0, 2), (3, 0)],
                [(1, 1), (2, 1)],
                [(1, 2), (3, 1)],
                [(2, 2), (3, 2)],
            ],
        )
    }

    /// Six hexagons whose dual graph is the complete bipartite graph K(3,3).
    pub fn bipartite_six() -> GluingSpec {
        let mut gluings = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                gluings.push([(a, b), (3 + b, a)]);
            }
        }
        GluingSpec::new(6, gluings)
    }

    /// Two hexagons where each carries one self-glued edge.
    pub fn self_glued_pair() -> GluingSpec {
        GluingSpec::new(
            2,
            vec![[(0, 0), (0, 1)], [(0, 2), (1, 0)], [(1, 1), (1, 2)]],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_of_pants_has_three_edges() {
        let c = build_complex(&samples::pair_of_pants()).unwrap();
        assert_eq!(c.edge_count(), 3);
        assert_eq!(c.euler_characteristic(), -1);
        assert_eq!(c.hexagon_edges(1), [0, 1, 2]);
        assert!(c.edges().iter().all(|e| !e.is_self_glued()));
    }

    #[test]
    fn edge_count_is_three_halves_hexagons() {
        for spec in [
            samples::pair_of_pants(),
            samples::tetrahedral(),
            samples::bipartite_six(),
            samples::self_glued_pair(),
        ] {
            let c = build_complex(&spec).unwrap();
            assert_eq!(2 * c.edge_count(), 3 * c.hexagon_count());
            assert!(c.euler_characteristic() < 0);
            assert_eq!(c.to_spec(), spec);
        }
    }

    #[test]
    fn missing_slot_is_rejected() {
        let spec = GluingSpec::new(2, vec![[(0, 0), (1, 0)], [(0, 1), (1, 1)]]);
        assert_eq!(
            build_complex(&spec),
            Err(TriangulationError::UnmatchedSlot {
                hexagon: 0,
                slot: 2
            })
        );
    }

    #[test]
    fn duplicate_slot_is_rejected() {
        let spec = GluingSpec::new(
            2,
            vec![[(0, 0), (1, 0)], [(0, 0), (1, 1)], [(0, 2), (1, 2)]],
        );
        assert_eq!(
            build_complex(&spec),
            Err(TriangulationError::DuplicateSlot {
                hexagon: 0,
                slot: 0
            })
        );
    }

    #[test]
    fn disconnected_blocks_are_rejected() {
        let mut g = vec![];
        for base in [0, 2] {
            for s in 0..3 {
                g.push([(base, s), (base + 1, s)]);
            }
        }
        assert_eq!(
            build_complex(&GluingSpec::new(4, g)),
            Err(TriangulationError::Disconnected)
        );
    }

    #[test]
    fn odd_and_empty_counts_are_rejected() {
        assert_eq!(
            build_complex(&GluingSpec::new(3, vec![])),
            Err(TriangulationError::OddHexagonCount(3))
        );
        assert_eq!(
            build_complex(&GluingSpec::new(0, vec![])),
            Err(TriangulationError::OddHexagonCount(0))
        );
        let spec = GluingSpec::new(2, vec![[(0, 3), (1, 0)]]);
        assert!(matches!(
            build_complex(&spec),
            Err(TriangulationError::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn json_layout() {
        let json = r#"{"hexagons": 2, "gluings": [[[0,0],[1,0]], [[0,1],[1,1]], [[0,2],[1,2]]]}"#;
        let spec: GluingSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec, samples::pair_of_pants());
        let back = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            back,
            r#"{"hexagons":2,"gluings":[[[0,0],[1,0]],[[0,1],[1,1]],[[0,2],[1,2]]]}"#
        );
    }

    #[test]
    fn locality() {
        let c = build_complex(&samples::bipartite_six()).unwrap();
        // edge 0 = (0,0)-(3,0), edge 4 = (1,1)-(4,1): no common hexagon
        assert!(!c.edges_share_hexagon(0, 4));
        assert!(c.edges_share_hexagon(0, 1));
    }
}
