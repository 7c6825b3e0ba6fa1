//! Statistical linkage learning: pairwise dependency strengths estimated
//! from a population and the average-linkage tree built over them.

pub(crate) mod tree;

pub use tree::{build_lt, LinkageTree, TreeNode};

use std::fmt::Write as _;

use crate::dependency::Vig;
use crate::error::{Error, Result};
use crate::problems::nk::Tokens;
use crate::solution::Solution;

/// Symmetric matrix of dependency strengths in `[0, 1]`. The diagonal is
/// stored as zero and never read.
#[derive(Clone, PartialEq)]
pub struct Dsm {
    n: usize,
    values: Vec<f64>,
}

impl Dsm {
    pub fn new(n: usize) -> Self {
        Dsm {
            n,
            values: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from the upper triangle, row-major, `i < j`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "expected {expected} upper-triangle entries, got {}",
                upper.len()
            )));
        }
        let mut d = Dsm::new(n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                d.set(i, j, *it.next().unwrap());
            }
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.n + b]
    }

    pub fn set(&mut self, a: usize, b: usize, value: f64) {
        assert!(a != b, "the diagonal is not stored");
        assert!(value.is_finite(), "dependency strength must be finite");
        self.values[a * self.n + b] = value;
        self.values[b * self.n + a] = value;
    }

    /// The `1 - D` distance.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        1.0 - self.get(a, b)
    }

    pub fn max_entry(&self) -> f64 {
        self.pairs().map(|(_, _, v)| v).fold(0.0, f64::max)
    }

    /// `(i, j, D)` for `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    /// `n` on the first line, then one line per row of the upper triangle.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (i + 1..self.n).map(|j| format!("{:.6}", self.get(i, j))).collect();
            if !row.is_empty() {
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut tokens = Tokens::new(text, path);
        let n: usize = tokens.next_parsed("matrix size")?;
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for _ in 0..n * n.saturating_sub(1) / 2 {
            let v: f64 = tokens.next_parsed("dependency strength")?;
            if !(0.0..=1.0).contains(&v) {
                return Err(tokens.error("dependency strength outside [0, 1]".into()));
            }
            upper.push(v);
        }
        if tokens.peek_raw().is_some() {
            return Err(tokens.error("trailing data after matrix".into()));
        }
        Dsm::from_upper(n, &upper)
    }
}

impl std::fmt::Debug for Dsm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Dsm({})", self.to_text().trim_end().replace('\n', "; "))
    }
}

fn entropy(ps: &[f64]) -> f64 {
    ps.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `I(X,Y) / H(X,Y)` for the joint distribution `[p00, p01, p10, p11]`
/// (first index is X). A constant pair yields 0.
pub fn normalized_information(joint: [f64; 4]) -> f64 {
    let h_xy = entropy(&joint);
    if h_xy <= 1e-12 {
        return 0.0;
    }
    let h_x = entropy(&[joint[0] + joint[1], joint[2] + joint[3]]);
    let h_y = entropy(&[joint[0] + joint[2], joint[1] + joint[3]]);
    ((h_x + h_y - h_xy) / h_xy).clamp(0.0, 1.0)
}

/// Pairwise joint frequencies of a population, updated one solution at a
/// time.
#[derive(Debug, Clone)]
pub struct PairCounts {
    n: usize,
    total: u64,
    counts: Vec<[u32; 4]>,
}

impl PairCounts {
    pub fn new(n: usize) -> Self {
        PairCounts {
            n,
            total: 0,
            counts: vec![[0; 4]; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn add(&mut self, s: &Solution) {
        assert_eq!(s.len(), self.n, "solution length does not match the counts");
        let bits = s.bits();
        for i in 0..self.n {
            let row = &mut self.counts[i * self.n..(i + 1) * self.n];
            let hi = (bits[i] as usize) << 1;
            for j in i + 1..self.n {
                row[j][hi | bits[j] as usize] += 1;
            }
        }
        self.total += 1;
    }

    pub fn joint(&self, a: usize, b: usize) -> [f64; 4] {
        let (i, j, swap) = if a < b { (a, b, false) } else { (b, a, true) };
        let c = self.counts[i * self.n + j];
        let t = self.total.max(1) as f64;
        let mut p = [c[0] as f64 / t, c[1] as f64 / t, c[2] as f64 / t, c[3] as f64 / t];
        if swap {
            p.swap(1, 2);
        }
        p
    }

    pub fn dsm(&self) -> Dsm {
        let mut d = Dsm::new(self.n);
        if self.total == 0 {
            return d;
        }
        for i in 0..self.n {
            for j in i + 1..self.n {
                d.set(i, j, normalized_information(self.joint(i, j)));
            }
        }
        d
    }
}

/// Normalized mutual information of every variable pair over `population`.
pub fn estimate_dsm(population: &[Solution]) -> Dsm {
    assert!(!population.is_empty(), "population must not be empty");
    let mut counts = PairCounts::new(population[0].len());
    for s in population {
        counts.add(s);
    }
    counts.dsm()
}

/// A threshold separating every dependent pair of `vig` (strictly above)
/// from every independent pair (at or below), if one exists.
pub fn is_perfect(dsm: &Dsm, vig: &Vig) -> Option<f64> {
    assert_eq!(dsm.n(), vig.n(), "matrix and graph sizes differ");
    let mut min_dep: Option<f64> = None;
    let mut max_indep: Option<f64> = None;
    for (i, j, v) in dsm.pairs() {
        if vig.has_edge(i, j) {
            min_dep = Some(min_dep.map_or(v, |m| m.min(v)));
        } else {
            max_indep = Some(max_indep.map_or(v, |m| m.max(v)));
        }
    }
    match (min_dep, max_indep) {
        (Some(lo), Some(hi)) if lo > hi => Some((lo + hi) / 2.0),
        (Some(_), Some(_)) => None,
        (None, Some(hi)) => Some((hi + 1.0) / 2.0),
        (Some(lo), None) => Some(lo / 2.0 - if lo > 0.0 { 0.0 } else { 0.5 }),
        (None, None) => Some(0.5),
    }
}

/// A perfect matrix for the three overlapping `bim_4` blocks of `f_e1`.
/// The one asymmetric published cell (variables 3 and 7, zero-based) takes
/// its upper-triangle value.
pub fn fe1_perfect_dsm() -> Dsm {
    #[rustfmt::skip]
    let upper = [
        0.99, 0.51, 0.51, 0.25, 0.25, 0.25, 0.25, 0.25,
              0.51, 0.51, 0.25, 0.25, 0.25, 0.25, 0.25,
                    0.99, 0.49, 0.50, 0.50, 0.50, 0.50,
                          0.60, 0.98, 0.73, 0.50, 0.50,
                                0.60, 0.60, 0.49, 0.50,
                                      0.73, 0.73, 0.55,
                                            0.99, 0.55,
                                                  0.55,
    ];
    Dsm::from_upper(9, &upper).expect("fixture has 36 entries")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::fixtures::fe1_layout;
    use proptest::prelude::*;

    fn pop(rows: &[&str]) -> Vec<Solution> {
        rows.iter().map(|r| Solution::from_str_bits(r).unwrap()).collect()
    }

    #[test]
    fn identical_columns_are_fully_dependent() {
        let d = estimate_dsm(&pop(&["00", "11", "00", "11", "11"]));
        assert!((d.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_pairs_are_independent() {
        let d = estimate_dsm(&pop(&["00", "01", "10", "11"]));
        assert!(d.get(0, 1).abs() < 1e-12);
    }

    #[test]
    fn constant_pair_is_zero() {
        let d = estimate_dsm(&pop(&["01", "01"]));
        assert_eq!(d.get(0, 1), 0.0);
        let d = estimate_dsm(&pop(&["01", "00"]));
        assert_eq!(d.get(0, 1), 0.0);
    }

    #[test]
    fn normalized_information_of_a_noisy_copy() {
        // X uniform, Y = X with probability 3/4
        let p = [0.375, 0.125, 0.125, 0.375];
        let h_xy = -(2.0 * 0.375 * 0.375f64.log2() + 2.0 * 0.125 * 0.125f64.log2());
        let i = 2.0 - h_xy;
        assert!((normalized_information(p) - i / h_xy).abs() < 1e-12);
    }

    #[test]
    fn reference_matrix_is_perfect_for_fe1() {
        let d = fe1_perfect_dsm();
        let theta = is_perfect(&d, &fe1_layout().vig()).unwrap();
        assert!(theta > 0.50 && theta < 0.51, "theta {theta}");
        assert_eq!(d.get(3, 7), 0.50);
    }

    #[test]
    fn violated_order_has_no_threshold() {
        let mut d = Dsm::new(3);
        d.set(0, 1, 0.3);
        d.set(0, 2, 0.4);
        assert_eq!(is_perfect(&d, &Vig::from_edges(3, &[(0, 1)])), None);
    }

    #[test]
    fn vacuous_sides_have_thresholds() {
        let d = fe1_perfect_dsm();
        let t = is_perfect(&d, &Vig::new(9)).unwrap();
        assert!(t >= d.max_entry());
        let t = is_perfect(&d, &Vig::complete(9)).unwrap();
        assert!(d.pairs().all(|(_, _, v)| v > t));
    }

    #[test]
    fn text_round_trip() {
        let d = fe1_perfect_dsm();
        let back = Dsm::parse(&d.to_text(), "mem").unwrap();
        assert_eq!(back, d);
        assert!(Dsm::parse("2\n1.5\n", "mem").is_err());
        assert!(Dsm::parse("3\n0.1 0.2\n", "mem").is_err());
    }

    #[test]
    fn incremental_counts_match_batch() {
        let p = pop(&["0110", "1010", "1111", "0000", "0011"]);
        let mut c = PairCounts::new(4);
        for s in &p {
            c.add(s);
        }
        assert_eq!(c.dsm(), estimate_dsm(&p));
        assert_eq!(c.joint(1, 0), [0.4, 0.2, 0.2, 0.2]);
    }

    proptest! {
        #[test]
        fn estimated_matrix_is_symmetric_and_bounded(
            rows in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..40)
        ) {
            let p: Vec<Solution> = rows.into_iter().map(Solution::new).collect();
            let d = estimate_dsm(&p);
            for i in 0..6 {
                for j in 0..6 {
                    if i != j {
                        let v = d.get(i, j);
                        prop_assert_eq!(v, d.get(j, i));
                        prop_assert!((0.0..=1.0).contains(&v));
                    }
                }
            }
        }
    }
}
