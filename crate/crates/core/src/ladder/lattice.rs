//! The dependency-ordered lattice of `(S, D)` nodes.

use std::collections::HashMap;

use serde::Serialize;

use crate::model::{DebtorSet, Model};

/// Number of ladder equations for `s` free debtors of which `b` are
/// systemic: `2^{s−b}·3^b`, which is `3^s` when all are systemic.
///
/// # Panics
/// If `b > s`.
pub fn count_equations(s: usize, b: usize) -> u64 {
    assert!(b <= s, "b = {b} exceeds s = {s}");
    2u64.pow((s - b) as u32) * 3u64.pow(b as u32)
}

/// One `ℓ^{S|D}` unknown; `c = N − S` are the debtors whose joint survival it
/// describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LadderNode {
    pub s: DebtorSet,
    pub d: DebtorSet,
    pub c: DebtorSet,
}

/// References of a node to the nodes it depends on, for one `j ∈ S − D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub j: usize,
    /// Index of `(S − j, D)`.
    pub down: usize,
    /// Index of `(S, D ∪ j)`; absent when `j` is not systemic.
    pub up: Option<usize>,
}

/// All `(S, D)` with `S ⊆ N − target` and `D ⊆ S ∩ systemic`, ordered by
/// ascending `|S|` (then mask) and, within one `S`, by descending `|D|` (then
/// mask), so every node follows the nodes it references.
#[derive(Debug, Clone)]
pub struct Ladder {
    n: usize,
    target: DebtorSet,
    nodes: Vec<LadderNode>,
    edges: Vec<Vec<Edge>>,
    index: HashMap<(DebtorSet, DebtorSet), usize>,
}

impl Ladder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> DebtorSet {
        self.target
    }

    pub fn nodes(&self) -> &[LadderNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self, node: usize) -> &[Edge] {
        &self.edges[node]
    }

    /// Index of `(s, d)`, if it is part of the ladder.
    pub fn find(&self, s: DebtorSet, d: DebtorSet) -> Option<usize> {
        self.index.get(&(s, d)).copied()
    }

    /// Index of the top node `(N − target, d)`.
    pub fn top(&self, d: DebtorSet) -> Option<usize> {
        self.find(self.target.complement(self.n), d)
    }
}

/// Builds the ladder for the survival of `target`.
///
/// # Panics
/// If `target` names a debtor outside the model.
pub fn build_ladder(model: &Model, target: DebtorSet) -> Ladder {
    let n = model.n();
    assert!(target.is_subset(model.all()), "target {target} outside 0..{n}");
    let free = target.complement(n);
    let systemic = model.systemic();

    let mut sets: Vec<DebtorSet> = free.subsets().collect();
    sets.sort();
    let mut nodes = Vec::new();
    for s in sets {
        let mut ds: Vec<DebtorSet> = s.intersection(systemic).subsets().collect();
        ds.sort_by(|a, b| b.len().cmp(&a.len()).then(a.mask().cmp(&b.mask())));
        nodes.extend(ds.into_iter().map(|d| LadderNode {
            s,
            d,
            c: s.complement(n),
        }));
    }
    let index: HashMap<_, _> = nodes.iter().enumerate().map(|(i, nd)| ((nd.s, nd.d), i)).collect();
    let edges = nodes
        .iter()
        .map(|nd| {
            nd.s.difference(nd.d)
                .iter()
                .map(|j| Edge {
                    j,
                    down: index[&(nd.s.remove(j), nd.d)],
                    up: systemic
                        .contains(j)
                        .then(|| index[&(nd.s, nd.d.insert(j))]),
                })
                .collect()
        })
        .collect();
    Ladder {
        n,
        target,
        nodes,
        edges,
        index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_spec, ModelSpec};

    fn model(n: usize, systemic: &[usize]) -> Model {
        let mut spec = ModelSpec::uniform(n, 1.0, 0.1, 0.5);
        for &k in systemic {
            spec.p0[k] = 0.1;
        }
        validate_spec(spec).unwrap()
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_equations(2, 2), 9);
        assert_eq!(count_equations(3, 1), 12);
        assert_eq!(count_equations(0, 0), 1);
        assert_eq!(count_equations(12, 12), 531_441);
    }

    #[test]
    fn full_target_has_one_node() {
        let m = model(3, &[0, 1]);
        let l = build_ladder(&m, m.all());
        assert_eq!(l.nodes(), &[LadderNode { s: DebtorSet::EMPTY, d: DebtorSet::EMPTY, c: m.all() }]);
    }

    #[test]
    fn two_debtor_ladder() {
        let m = model(2, &[1]);
        let l = build_ladder(&m, DebtorSet::singleton(0));
        let one = DebtorSet::singleton(1);
        let got: Vec<_> = l.nodes().iter().map(|nd| (nd.s, nd.d)).collect();
        assert_eq!(
            got,
            vec![(DebtorSet::EMPTY, DebtorSet::EMPTY), (one, one), (one, DebtorSet::EMPTY)]
        );
        assert_eq!(l.edges(2), &[Edge { j: 1, down: 0, up: Some(1) }]);
        assert!(l.edges(1).is_empty());
        assert_eq!(l.top(DebtorSet::EMPTY), Some(2));
    }

    #[test]
    fn three_debtor_ladder_counts() {
        let m = model(3, &[1, 2]);
        let l = build_ladder(&m, DebtorSet::singleton(0));
        assert_eq!(l.len(), 9);
        assert_eq!(l.len() as u64, count_equations(2, 2));
    }

    #[test]
    fn references_precede_referrers() {
        let m = model(5, &[0, 2, 3]);
        for target in m.all().subsets() {
            let l = build_ladder(&m, target);
            for (i, edges) in (0..l.len()).map(|i| (i, l.edges(i))) {
                for e in edges {
                    assert!(e.down < i);
                    if let Some(u) = e.up {
                        assert!(u < i);
                    }
                }
            }
        }
    }

    #[test]
    fn non_systemic_d_is_pruned() {
        let m = model(4, &[1]);
        let l = build_ladder(&m, DebtorSet::singleton(0));
        assert!(l.nodes().iter().all(|nd| nd.d.is_subset(m.systemic())));
        assert_eq!(l.len() as u64, count_equations(3, 1));
        assert!(l.find(DebtorSet::from_mask(0b1100), DebtorSet::singleton(2)).is_none());
    }
}
