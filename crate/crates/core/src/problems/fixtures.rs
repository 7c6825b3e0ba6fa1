//! Small named functions used as worked examples and test fixtures.

use super::blocks::{dec, BlockFn, BlockProblem, Combine, OverlapLayout};

/// Three `bim_4` blocks over nine variables: `{0..3}`, `{3..6}`, `{5..8}`.
/// The first pair of blocks shares one variable, the second pair two.
pub fn fe1_layout() -> OverlapLayout {
    OverlapLayout::from_blocks(9, vec![vec![0, 1, 2, 3], vec![3, 4, 5, 6], vec![5, 6, 7, 8]]).expect("static layout")
}

pub fn fe1() -> BlockProblem {
    BlockProblem {
        layout: fe1_layout(),
        base: BlockFn::Bim(4),
        combine: Combine::Sum,
    }
}

/// Same layout as [`fe1`], combined as a product of `bim_4 + 1` factors.
pub fn fe4() -> BlockProblem {
    BlockProblem {
        layout: fe1_layout(),
        base: BlockFn::Bim(4),
        combine: Combine::ShiftedProduct,
    }
}

/// `dec_3` ring over six variables, neighbouring blocks sharing one gene.
pub fn dec3_ring() -> BlockProblem {
    BlockProblem {
        layout: OverlapLayout::regular(3, 1, 3, true).expect("static layout"),
        base: BlockFn::Dec(3),
        combine: Combine::Sum,
    }
}

/// `dec_4` ring over nine variables, neighbouring blocks sharing one gene.
pub fn dec4_ring() -> BlockProblem {
    BlockProblem {
        layout: OverlapLayout::regular(4, 1, 3, true).expect("static layout"),
        base: BlockFn::Dec(4),
        combine: Combine::Sum,
    }
}

pub fn onemax(bits: &[bool]) -> f64 {
    bits.iter().filter(|&&b| b).count() as f64
}

pub fn onemax_squared(bits: &[bool]) -> f64 {
    onemax(bits).powi(2)
}

/// Two `dec_4` blocks with one point, `0110 0000`, lifted to 5.5.
pub fn fe6(bits: &[bool]) -> f64 {
    assert_eq!(bits.len(), 8, "fe6 is defined over eight variables");
    const LIFTED: [bool; 8] = [false, true, true, false, false, false, false, false];
    if bits == LIFTED {
        return 5.5;
    }
    fe6_true(bits)
}

/// The undisturbed part of [`fe6`].
pub fn fe6_true(bits: &[bool]) -> f64 {
    assert_eq!(bits.len(), 8, "fe6 is defined over eight variables");
    let u1 = bits[..4].iter().filter(|&&b| b).count();
    let u2 = bits[4..].iter().filter(|&&b| b).count();
    dec(u1, 4) + dec(u2, 4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().filter(|c| *c != ' ').map(|c| c == '1').collect()
    }

    #[test]
    fn fe1_extremes() {
        assert_eq!(fe1().value(&[true; 9]), 6.0);
        assert_eq!(fe1().value(&[false; 9]), 6.0);
    }

    #[test]
    fn fe4_extremes() {
        assert_eq!(fe4().value(&[true; 9]), 27.0);
        assert_eq!(fe4().value(&[false; 9]), 27.0);
    }

    #[test]
    fn fe4_mixed_point_matches_factor_enumeration() {
        // Independent recomputation block by block with the bimodal formula
        // written out: u -> 2 - |u - 2| - 1 inside, 2 at the ends.
        let x = bits("1111 0010 0");
        let b = |u: i32| {
            if u == 0 || u == 4 {
                2.0
            } else {
                1.0 - (u - 2).abs() as f64
            }
        };
        let blocks = [[0, 1, 2, 3], [3, 4, 5, 6], [5, 6, 7, 8]];
        let expected: f64 = blocks
            .iter()
            .map(|blk| b(blk.iter().filter(|&&i| x[i]).count() as i32) + 1.0)
            .product();
        assert_eq!(fe4().value(&x), expected);
        assert_eq!(expected, 6.0);
    }

    #[test]
    fn fe6_points() {
        assert_eq!(fe6(&bits("0110 0000")), 5.5);
        assert_eq!(fe6(&bits("1111 1111")), 8.0);
        assert_eq!(fe6(&bits("0000 0000")), 6.0);
        assert_eq!(fe6_true(&bits("0110 0000")), 4.0);
    }
}
