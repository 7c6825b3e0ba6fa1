//! Deceptive and bimodal trap blocks over (possibly overlapping) layouts.

use serde::{Deserialize, Serialize};

use crate::dependency::Vig;
use crate::error::{Error, Result};

/// Standard deceptive trap of order `k`: `k` at full unitation, `k - 1 - u` otherwise.
pub fn dec(u: usize, k: usize) -> f64 {
    assert!(u <= k, "unitation {u} exceeds order {k}");
    if u == k {
        k as f64
    } else {
        (k - 1 - u) as f64
    }
}

/// Bimodal deceptive trap of even order `k`, optimal at `u = 0` and `u = k`.
pub fn bim(u: usize, k: usize) -> f64 {
    assert!(u <= k, "unitation {u} exceeds order {k}");
    assert!(k.is_multiple_of(2), "bimodal trap needs an even order, got {k}");
    let half = k as f64 / 2.0;
    if u == 0 || u == k {
        half
    } else {
        half - (u as f64 - half).abs() - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockFn {
    Dec(usize),
    Bim(usize),
}

impl BlockFn {
    pub fn order(self) -> usize {
        match self {
            BlockFn::Dec(k) | BlockFn::Bim(k) => k,
        }
    }

    pub fn value(self, u: usize) -> f64 {
        match self {
            BlockFn::Dec(k) => dec(u, k),
            BlockFn::Bim(k) => bim(u, k),
        }
    }

    pub fn max_value(self) -> f64 {
        match self {
            BlockFn::Dec(k) => k as f64,
            BlockFn::Bim(k) => k as f64 / 2.0,
        }
    }
}

/// How block values are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combine {
    Sum,
    /// Product of `(block value + 1)` factors.
    ShiftedProduct,
}

/// Placement of equally sized blocks over `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapLayout {
    n: usize,
    blocks: Vec<Vec<usize>>,
    block_order: usize,
    overlap: Option<usize>,
    cyclic: bool,
}

impl OverlapLayout {
    /// `count` blocks of `order` consecutive variables, each sharing
    /// `overlap` variables with its successor. A cyclic layout wraps the
    /// last block onto the first, giving `n = count * (order - overlap)`;
    /// otherwise `n = count * (order - overlap) + overlap`.
    pub fn regular(order: usize, overlap: usize, count: usize, cyclic: bool) -> Result<Self> {
        if order == 0 || count == 0 {
            return Err(Error::InvalidParameter("block order and count must be positive".into()));
        }
        if overlap >= order {
            return Err(Error::InvalidParameter(format!(
                "overlap {overlap} must be smaller than block order {order}"
            )));
        }
        if 2 * overlap > order {
            return Err(Error::InvalidParameter(format!(
                "overlap {overlap} larger than half the block order {order} makes non-neighbouring blocks overlap"
            )));
        }
        let step = order - overlap;
        let n = if cyclic { count * step } else { count * step + overlap };
        if cyclic && overlap > 0 && n < 2 * order - overlap {
            return Err(Error::InvalidParameter(format!(
                "{count} cyclic blocks of order {order} with overlap {overlap} wrap onto themselves"
            )));
        }
        let blocks = (0..count)
            .map(|b| (0..order).map(|j| (b * step + j) % n).collect())
            .collect();
        Ok(OverlapLayout {
            n,
            blocks,
            block_order: order,
            overlap: Some(overlap),
            cyclic,
        })
    }

    /// Explicit block lists. All blocks must have the same size.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let order = blocks.first().map_or(0, |b| b.len());
        for b in &blocks {
            if b.len() != order {
                return Err(Error::InvalidParameter("blocks must share one order".into()));
            }
            if let Some(&i) = b.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidParameter(format!("block index {i} out of range {n}")));
            }
        }
        Ok(OverlapLayout {
            n,
            blocks,
            block_order: order,
            overlap: None,
            cyclic: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_order(&self) -> usize {
        self.block_order
    }

    pub fn overlap(&self) -> Option<usize> {
        self.overlap
    }

    pub fn cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Every pair of variables sharing a block is linked.
    pub fn vig(&self) -> Vig {
        Vig::from_cliques(self.n, &self.blocks)
    }

    fn unitations<'a>(&'a self, bits: &'a [bool]) -> impl Iterator<Item = usize> + 'a {
        self.blocks.iter().map(move |b| b.iter().filter(|&&i| bits[i]).count())
    }
}

/// Sum of block values over a layout.
pub fn evaluate_overlapping_sum(layout: &OverlapLayout, base: BlockFn, bits: &[bool]) -> f64 {
    assert_eq!(bits.len(), layout.n, "layout does not match solution length");
    layout.unitations(bits).map(|u| base.value(u)).sum()
}

/// Product of `(block value + 1)` over a layout.
pub fn evaluate_overlapping_product(layout: &OverlapLayout, base: BlockFn, bits: &[bool]) -> f64 {
    assert_eq!(bits.len(), layout.n, "layout does not match solution length");
    layout.unitations(bits).map(|u| base.value(u) + 1.0).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockProblem {
    pub layout: OverlapLayout,
    pub base: BlockFn,
    pub combine: Combine,
}

impl BlockProblem {
    pub fn value(&self, bits: &[bool]) -> f64 {
        match self.combine {
            Combine::Sum => evaluate_overlapping_sum(&self.layout, self.base, bits),
            Combine::ShiftedProduct => evaluate_overlapping_product(&self.layout, self.base, bits),
        }
    }

    /// All-ones reaches every block maximum for both trap kinds.
    pub fn optimum(&self) -> f64 {
        let m = self.base.max_value();
        let b = self.layout.block_count() as i32;
        match self.combine {
            Combine::Sum => m * b as f64,
            Combine::ShiftedProduct => (m + 1.0).powi(b),
        }
    }

    /// Value of the best solution whose blocks all sit at the deceptive
    /// attractor (all zeros for `dec`, half unitation for `bim`) when the
    /// layout is disjoint; for overlapping layouts the all-zeros value.
    pub fn attractor_value(&self) -> f64 {
        let zeros = vec![false; self.layout.n];
        match self.base {
            BlockFn::Dec(_) => self.value(&zeros),
            BlockFn::Bim(k) => {
                let per = bim(k / 2, k);
                let b = self.layout.block_count() as i32;
                match self.combine {
                    Combine::Sum => per * b as f64,
                    Combine::ShiftedProduct => (per + 1.0).powi(b),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| *c != ' ').map(|c| c == '1').collect()
    }

    #[test]
    fn dec_values() {
        assert_eq!(dec(5, 5), 5.0);
        assert_eq!(dec(0, 5), 4.0);
        assert_eq!(dec(3, 4), 0.0);
    }

    #[test]
    fn bim_values() {
        assert_eq!(bim(0, 4), 2.0);
        assert_eq!(bim(4, 4), 2.0);
        assert_eq!(bim(2, 4), 1.0);
        assert_eq!(bim(5, 10), 4.0);
        assert_eq!(bim(1, 4), 0.0);
    }

    #[test]
    #[should_panic]
    fn dec_rejects_out_of_range() {
        dec(6, 5);
    }

    #[test]
    fn regular_layouts() {
        let l = OverlapLayout::regular(5, 1, 50, true).unwrap();
        assert_eq!(l.n(), 200);
        let l = OverlapLayout::regular(5, 2, 67, true).unwrap();
        assert_eq!(l.n(), 201);
        let l = OverlapLayout::regular(3, 1, 3, true).unwrap();
        assert_eq!(l.blocks(), &[vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]]);
        let l = OverlapLayout::regular(4, 1, 3, false).unwrap();
        assert_eq!(l.n(), 10);
        assert!(OverlapLayout::regular(4, 4, 3, false).is_err());
        assert!(OverlapLayout::regular(4, 3, 3, true).is_err());
    }

    #[test]
    fn cyclic_neighbours_share_exactly_overlap() {
        for &(k, o, b) in &[(5usize, 1usize, 6usize), (10, 2, 5), (10, 3, 4), (5, 2, 4)] {
            let l = OverlapLayout::regular(k, o, b, true).unwrap();
            assert_eq!(l.n(), b * (k - o));
            for i in 0..b {
                let next = &l.blocks()[(i + 1) % b];
                let shared = l.blocks()[i].iter().filter(|v| next.contains(v)).count();
                assert_eq!(shared, o, "k={k} o={o} block {i}");
            }
        }
    }

    #[test]
    fn dec3_ring_hybrid_value() {
        let l = OverlapLayout::regular(3, 1, 3, true).unwrap();
        // blocks (x0 x1 x2), (x2 x3 x4), (x4 x5 x0) see 111, 100 and 001
        let v = evaluate_overlapping_sum(&l, BlockFn::Dec(3), &bits("111000"));
        assert_eq!(v, dec(3, 3) + dec(1, 3) + dec(1, 3));
        assert_eq!(v, 5.0);
    }

    #[test]
    fn dec5_concatenation() {
        let p = BlockProblem {
            layout: OverlapLayout::regular(5, 0, 2, false).unwrap(),
            base: BlockFn::Dec(5),
            combine: Combine::Sum,
        };
        assert_eq!(p.value(&[true; 10]), 10.0);
        assert_eq!(p.value(&[false; 10]), 8.0);
        assert_eq!(p.optimum(), 10.0);
        assert_eq!(p.attractor_value(), 8.0);
    }
}
