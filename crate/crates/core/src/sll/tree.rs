use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::Dsm;

/// One cluster of variables. Leaves have no children and no strength.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// Sorted variable indices.
    pub members: Vec<usize>,
    pub children: Option<(usize, usize)>,
    /// Inter-cluster strength at which the node was created.
    pub strength: Option<f64>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Agglomerative hierarchy. Leaves come first, internal nodes follow in
/// creation order, and the last node is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkageTree {
    n: usize,
    nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Linkage {
    /// Mean over cross pairs.
    Average,
    /// Maximum over cross pairs.
    Max,
}

const TIE: f64 = 1e-12;

fn cmp_union(a: &[usize], b: &[usize], c: &[usize], d: &[usize]) -> Ordering {
    fn merged<'x>(p: &'x [usize], q: &'x [usize]) -> impl Iterator<Item = usize> + 'x {
        let (mut i, mut j) = (0, 0);
        std::iter::from_fn(move || match (p.get(i), q.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                Some(x)
            }
            (Some(_), Some(&y)) => {
                j += 1;
                Some(y)
            }
            (Some(&x), None) => {
                i += 1;
                Some(x)
            }
            (None, Some(&y)) => {
                j += 1;
                Some(y)
            }
            (None, None) => None,
        })
    }
    merged(a, b).cmp(merged(c, d))
}

/// Merges the most strongly linked pair of clusters until one remains.
/// Ties go to the pair whose union is lexicographically smallest.
pub(crate) fn agglomerate(dsm: &Dsm, leaves: &[usize], linkage: Linkage) -> LinkageTree {
    let m = leaves.len();
    let mut nodes: Vec<TreeNode> = leaves
        .iter()
        .map(|&i| TreeNode {
            members: vec![i],
            children: None,
            strength: None,
        })
        .collect();
    if m == 0 {
        return LinkageTree { n: dsm.n(), nodes };
    }
    let total = 2 * m - 1;
    let mut sim = vec![0.0; total * total];
    for a in 0..m {
        for b in a + 1..m {
            let v = dsm.get(leaves[a], leaves[b]);
            sim[a * total + b] = v;
            sim[b * total + a] = v;
        }
    }
    let mut active: Vec<usize> = (0..m).collect();
    while active.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for (ia, &a) in active.iter().enumerate() {
            for &b in &active[ia + 1..] {
                let s = sim[a * total + b];
                let take = match best {
                    None => true,
                    Some((ba, bb, bs)) => {
                        if s > bs + TIE {
                            true
                        } else if s < bs - TIE {
                            false
                        } else {
                            cmp_union(
                                &nodes[a].members,
                                &nodes[b].members,
                                &nodes[ba].members,
                                &nodes[bb].members,
                            ) == Ordering::Less
                        }
                    }
                };
                if take {
                    best = Some((a, b, s));
                }
            }
        }
        let (a, b, s) = best.expect("at least two active clusters");
        let id = nodes.len();
        let (wa, wb) = (nodes[a].len() as f64, nodes[b].len() as f64);
        for &c in &active {
            if c == a || c == b {
                continue;
            }
            let (sa, sb) = (sim[a * total + c], sim[b * total + c]);
            let v = match linkage {
                Linkage::Average => (wa * sa + wb * sb) / (wa + wb),
                Linkage::Max => sa.max(sb),
            };
            sim[id * total + c] = v;
            sim[c * total + id] = v;
        }
        let mut members = [nodes[a].members.as_slice(), nodes[b].members.as_slice()].concat();
        members.sort_unstable();
        let children = if nodes[a].members < nodes[b].members {
            (a, b)
        } else {
            (b, a)
        };
        nodes.push(TreeNode {
            members,
            children: Some(children),
            strength: Some(s),
        });
        active.retain(|&c| c != a && c != b);
        active.push(id);
    }
    LinkageTree { n: dsm.n(), nodes }
}

/// Average-linkage tree over all variables of `dsm`.
pub fn build_lt(dsm: &Dsm) -> LinkageTree {
    assert!(dsm.n() >= 1, "tree needs at least one variable");
    let leaves: Vec<usize> = (0..dsm.n()).collect();
    agglomerate(dsm, &leaves, Linkage::Average)
}

impl LinkageTree {
    /// Builds a tree from its leaves and a list of merges `(a, b, strength)`
    /// referring to earlier node ids.
    pub fn from_merges(n: usize, leaves: &[usize], merges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut nodes: Vec<TreeNode> = Vec::new();
        for &i in leaves {
            if i >= n || nodes.iter().any(|l| l.members[0] == i) {
                return Err(Error::InvalidParameter(format!("bad leaf {i}")));
            }
            nodes.push(TreeNode {
                members: vec![i],
                children: None,
                strength: None,
            });
        }
        let mut used = vec![false; leaves.len() + merges.len()];
        for &(a, b, s) in merges {
            if a == b || a >= nodes.len() || b >= nodes.len() || used[a] || used[b] {
                return Err(Error::InvalidParameter(format!("bad merge ({a}, {b})")));
            }
            used[a] = true;
            used[b] = true;
            let mut members = [nodes[a].members.as_slice(), nodes[b].members.as_slice()].concat();
            members.sort_unstable();
            nodes.push(TreeNode {
                members,
                children: Some((a, b)),
                strength: Some(s),
            });
        }
        Ok(LinkageTree { n, nodes })
    }

    /// Number of variables of the problem, not of the tree.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_index(&self) -> Option<usize> {
        self.nodes.len().checked_sub(1)
    }

    pub fn root(&self) -> Option<&TreeNode> {
        self.nodes.last()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    /// Internal nodes in creation order, root last.
    pub fn merges(&self) -> impl Iterator<Item = &TreeNode> {
        self.nodes.iter().filter(|n| !n.is_leaf())
    }

    /// Every node except the root.
    pub fn non_root(&self) -> &[TreeNode] {
        &self.nodes[..self.nodes.len().saturating_sub(1)]
    }

    /// Whether some node has exactly these (sorted) members.
    pub fn contains(&self, members: &[usize]) -> bool {
        self.nodes.iter().any(|n| n.members == members)
    }

    /// One tab-separated line per node: id, children (`a,b`) or `leaf:i`,
    /// strength or `-`, space-separated members.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            let kids = match node.children {
                Some((a, b)) => format!("{a},{b}"),
                None => format!("leaf:{}", node.members[0]),
            };
            let strength = node.strength.map_or("-".to_string(), |s| format!("{s:.6}"));
            let members: Vec<String> = node.members.iter().map(|m| m.to_string()).collect();
            let _ = writeln!(out, "{id}\t{kids}\t{strength}\t{}", members.join(" "));
        }
        out
    }

    pub fn parse(text: &str, n: usize, path: &str) -> Result<Self> {
        let mut nodes: Vec<TreeNode> = Vec::new();
        for (ln, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let err = |col: usize, msg: &str| Error::parse(path, ln + 1, col, msg);
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(err(1, "expected four tab-separated fields"));
            }
            if fields[0].trim().parse::<usize>().ok() != Some(nodes.len()) {
                return Err(err(1, "node ids must count up from 0"));
            }
            let col2 = fields[0].len() + 2;
            let members: Vec<usize> = fields[3]
                .split_whitespace()
                .map(|t| t.parse().ok().filter(|&v: &usize| v < n))
                .collect::<Option<_>>()
                .ok_or_else(|| err(col2 + fields[1].len() + fields[2].len() + 2, "bad member list"))?;
            let node = if let Some(leaf) = fields[1].strip_prefix("leaf:") {
                let i: usize = leaf.parse().map_err(|_| err(col2, "bad leaf index"))?;
                if members != [i] {
                    return Err(err(col2, "leaf members must be its index"));
                }
                TreeNode {
                    members,
                    children: None,
                    strength: None,
                }
            } else {
                let (a, b) = fields[1]
                    .split_once(',')
                    .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                    .filter(|&(a, b)| a < nodes.len() && b < nodes.len() && a != b)
                    .ok_or_else(|| err(col2, "bad child ids"))?;
                let s: f64 = fields[2]
                    .parse()
                    .map_err(|_| err(col2 + fields[1].len() + 1, "bad strength"))?;
                let mut union = [nodes[a].members.as_slice(), nodes[b].members.as_slice()].concat();
                union.sort_unstable();
                if union != members {
                    return Err(err(col2, "children do not partition the node"));
                }
                TreeNode {
                    members,
                    children: Some((a, b)),
                    strength: Some(s),
                }
            };
            nodes.push(node);
        }
        Ok(LinkageTree { n, nodes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sll::fe1_perfect_dsm;
    use proptest::prelude::*;

    fn one_based(node: &TreeNode) -> Vec<usize> {
        node.members.iter().map(|i| i + 1).collect()
    }

    #[test]
    fn reference_matrix_merge_order() {
        let lt = build_lt(&fe1_perfect_dsm());
        let merges: Vec<&TreeNode> = lt.merges().collect();
        assert_eq!(one_based(merges[0]), [1, 2]);
        assert_eq!(one_based(merges[1]), [3, 4]);
        assert_eq!(one_based(merges[2]), [7, 8]);
        for m in &merges[..3] {
            assert!((m.strength.unwrap() - 0.99).abs() < 1e-12);
        }
        assert_eq!(one_based(merges[3]), [3, 4, 6]);
        assert!((merges[3].strength.unwrap() - 0.74).abs() < 1e-12);
        assert!(!lt.contains(&[4, 5, 7]));
        assert_eq!(lt.len(), 17);
    }

    #[test]
    fn single_variable_is_a_leaf() {
        let lt = build_lt(&Dsm::new(1));
        assert_eq!(lt.len(), 1);
        assert!(lt.root().unwrap().is_leaf());
    }

    #[test]
    fn ties_prefer_smallest_union() {
        let lt = build_lt(&Dsm::new(4));
        let merges: Vec<Vec<usize>> = lt.merges().map(|n| n.members.clone()).collect();
        assert_eq!(merges, vec![vec![0, 1], vec![0, 1, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn text_round_trip() {
        let lt = build_lt(&fe1_perfect_dsm());
        let back = LinkageTree::parse(&lt.to_text(), 9, "mem").unwrap();
        assert_eq!(back.to_text(), lt.to_text());
        assert!(LinkageTree::parse("0\tleaf:1\t-\t0\n", 9, "mem").is_err());
    }

    fn ultrametric(n: usize, heights: &[f64]) -> Dsm {
        // nested blocks: pair (i, j) strength depends on the highest bit
        // where i and j differ
        let mut d = Dsm::new(n);
        for i in 0..n {
            for j in i + 1..n {
                let level = (usize::BITS - (i ^ j).leading_zeros()) as usize - 1;
                d.set(i, j, heights[level]);
            }
        }
        d
    }

    #[test]
    fn ultrametric_strengths_do_not_increase_towards_the_root() {
        let lt = build_lt(&ultrametric(16, &[0.9, 0.7, 0.4, 0.1]));
        for node in lt.merges() {
            let (a, b) = node.children.unwrap();
            for child in [a, b] {
                if let Some(cs) = lt.nodes()[child].strength {
                    assert!(cs >= node.strength.unwrap() - 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn tree_shape(n in 1usize..12, vals in prop::collection::vec(0.0f64..=1.0, 66)) {
            let mut d = Dsm::new(n);
            let mut it = vals.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    d.set(i, j, it.next().unwrap());
                }
            }
            let lt = build_lt(&d);
            prop_assert_eq!(lt.len(), 2 * n - 1);
            prop_assert_eq!(lt.root().unwrap().len(), n);
            for node in lt.merges() {
                let (a, b) = node.children.unwrap();
                let mut u = [lt.nodes()[a].members.clone(), lt.nodes()[b].members.clone()].concat();
                u.sort_unstable();
                prop_assert_eq!(&u, &node.members);
            }
            let mut sets: Vec<&Vec<usize>> = lt.nodes().iter().map(|n| &n.members).collect();
            sets.sort();
            sets.dedup();
            prop_assert_eq!(sets.len(), lt.len());
        }
    }
}
