//! Direct dependency checks, variable interaction graphs and hill climbers.

mod checks;
mod fihc;

pub use checks::{
    exhaustive_vig, nonlinear_pattern, nonlinearity_check, nonmonotone_pattern, nonmonotonicity_check, CheckKind,
    EXHAUSTIVE_LIMIT,
};
pub use fihc::{fihc, fihc_with_ll};

use std::fmt;

/// Symmetric boolean variable interaction graph without self-loops.
#[derive(Clone, PartialEq, Eq)]
pub struct Vig {
    n: usize,
    adj: Vec<bool>,
}

impl Vig {
    pub fn new(n: usize) -> Self {
        Vig {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Vig::new(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Links every pair inside each group.
    pub fn from_cliques(n: usize, groups: &[Vec<usize>]) -> Self {
        let mut g = Vig::new(n);
        for group in groups {
            for (i, &a) in group.iter().enumerate() {
                for &b in &group[i + 1..] {
                    if a != b {
                        g.add_edge(a, b);
                    }
                }
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Vig::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loop on variable {a}");
        assert!(a < self.n && b < self.n, "edge ({a}, {b}) out of range {}", self.n);
        self.adj[a * self.n + b] = true;
        self.adj[b * self.n + a] = true;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[a * self.n + b]
    }

    pub fn neighbours(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.adj[a * self.n..(a + 1) * self.n];
        row.iter().enumerate().filter(|(_, &e)| e).map(|(b, _)| b)
    }

    /// Edges as `(a, b)` with `a < b`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| {
            (a + 1..self.n)
                .filter(move |&b| self.has_edge(a, b))
                .map(move |b| (a, b))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Fraction of variable pairs that are linked.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        self.edge_count() as f64 / (self.n * (self.n - 1) / 2) as f64
    }

    pub fn is_subgraph_of(&self, other: &Vig) -> bool {
        self.n == other.n && self.adj.iter().zip(&other.adj).all(|(&a, &b)| !a || b)
    }

    /// Number of edges with both ends inside `members`.
    pub fn internal_edges(&self, members: &[usize]) -> usize {
        let mut count = 0;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if self.has_edge(a, b) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Rows of `0`/`1`, one per variable.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.n * (self.n + 1));
        for a in 0..self.n {
            for b in 0..self.n {
                out.push(if self.has_edge(a, b) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Vig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<_> = self.edges().collect();
        write!(f, "Vig(n={}, edges={:?})", self.n, edges)
    }
}
