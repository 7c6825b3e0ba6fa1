//! Partition-crossover masks, the PX-like linkage tree and top-down mask
//! selection bounded by half the parents' Hamming distance.

use std::collections::VecDeque;
use std::fmt;

use crate::dependency::Vig;
use crate::sll::tree::{agglomerate, Linkage};
use crate::sll::{Dsm, LinkageTree};
use crate::solution::Solution;

/// A non-empty, sorted set of variable indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mask(Vec<usize>);

impl Mask {
    pub fn new(mut indices: Vec<usize>) -> Self {
        assert!(!indices.is_empty(), "a mask must not be empty");
        indices.sort_unstable();
        indices.dedup();
        Mask(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl fmt::Debug for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.0).finish()
    }
}

impl fmt::Display for Mask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Indices at which the two parents differ.
pub fn differing(p1: &Solution, p2: &Solution) -> Vec<usize> {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    (0..p1.len()).filter(|&i| p1.get(i) != p2.get(i)).collect()
}

/// Connected components of `vig` restricted to the differing positions,
/// ordered by smallest member.
pub fn px_masks(vig: &Vig, p1: &Solution, p2: &Solution) -> Vec<Mask> {
    assert_eq!(vig.n(), p1.len(), "graph and parents differ in size");
    let diff = differing(p1, p2);
    let mut is_diff = vec![false; p1.len()];
    for &i in &diff {
        is_diff[i] = true;
    }
    let mut seen = vec![false; p1.len()];
    let mut masks = Vec::new();
    for &start in &diff {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut component = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in vig.neighbours(v) {
                if is_diff[w] && !seen[w] {
                    seen[w] = true;
                    component.push(w);
                    queue.push_back(w);
                }
            }
        }
        masks.push(Mask::new(component));
    }
    masks
}

/// Max-linkage tree over the positions where the parents differ. `None`
/// when the parents are identical.
pub fn build_px_lt(dsm: &Dsm, p1: &Solution, p2: &Solution) -> Option<LinkageTree> {
    assert_eq!(dsm.n(), p1.len(), "matrix and parents differ in size");
    let diff = differing(p1, p2);
    if diff.is_empty() {
        return None;
    }
    Some(agglomerate(dsm, &diff, Linkage::Max))
}

/// Top-down selection from the root's children: a node is taken when it
/// has more than one member and at most `diff_count / 2`; larger nodes are
/// split into their children, leaves are dropped.
pub fn ltop_ws(tree: &LinkageTree, diff_count: usize) -> Vec<Mask> {
    let mut masks = Vec::new();
    let Some(root) = tree.root() else { return masks };
    let Some((a, b)) = root.children else { return masks };
    let mut stack = vec![b, a];
    while let Some(id) = stack.pop() {
        let node = &tree.nodes()[id];
        let Some((l, r)) = node.children else { continue };
        if 2 * node.len() <= diff_count {
            masks.push(Mask::new(node.members.clone()));
        } else {
            stack.push(r);
            stack.push(l);
        }
    }
    masks
}

/// Every internal node except the root.
pub fn all_internal_masks(tree: &LinkageTree) -> Vec<Mask> {
    tree.non_root()
        .iter()
        .filter(|n| !n.is_leaf())
        .map(|n| Mask::new(n.members.clone()))
        .collect()
}
