use std::fmt;

use rand::Rng;

use crate::pxlt::Mask;

/// Number of ones in a bit vector.
pub fn unitation(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// A bit vector with its cached fitness. Any mutation drops the cache.
#[derive(Clone, PartialEq)]
pub struct Solution {
    bits: Vec<bool>,
    fitness: Option<f64>,
}

impl Solution {
    pub fn new(bits: Vec<bool>) -> Self {
        Solution { bits, fitness: None }
    }

    pub fn zeros(n: usize) -> Self {
        Solution::new(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Solution::new(vec![true; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Solution::new((0..n).map(|_| rng.gen::<bool>()).collect())
    }

    /// Parses a string of `0`/`1` characters; spaces are ignored.
    pub fn from_str_bits(s: &str) -> Option<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | '_' => {}
                _ => return None,
            }
        }
        Some(Solution::new(bits))
    }

    /// Decodes the low `n` bits of `index`; bit `i` of the integer is variable `i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Solution::new((0..n).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn to_index(&self) -> u64 {
        bits_to_index(&self.bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub(crate) fn set_fitness(&mut self, value: f64) {
        self.fitness = Some(value);
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
        self.fitness = None;
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.bits[i] != value {
            self.bits[i] = value;
            self.fitness = None;
        }
    }

    /// Undoes a flip whose fitness before the flip is known.
    pub(crate) fn revert_flip(&mut self, i: usize, fitness: Option<f64>) {
        self.bits[i] = !self.bits[i];
        self.fitness = fitness;
    }

    /// Copies the donor's genes at the mask positions. The cache is dropped
    /// only when at least one bit actually changes.
    pub fn copy_from(&mut self, donor: &Solution, mask: &Mask) {
        for &i in mask.indices() {
            self.set(i, donor.bits[i]);
        }
    }

    /// Returns `true` when the two solutions differ at some mask position.
    pub fn differs_within(&self, other: &Solution, mask: &Mask) -> bool {
        mask.indices().iter().any(|&i| self.bits[i] != other.bits[i])
    }

    pub fn hamming(&self, other: &Solution) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    pub fn same_bits(&self, other: &Solution) -> bool {
        self.bits == other.bits
    }

    pub fn unitation(&self) -> usize {
        unitation(&self.bits)
    }
}

pub(crate) fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.fitness {
            Some(v) => write!(f, "Solution({self}, f={v})"),
            None => write!(f, "Solution({self})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitation_counts_ones() {
        assert_eq!(unitation(&[false; 4]), 0);
        assert_eq!(unitation(&[true; 4]), 4);
        assert_eq!(unitation(&[false, true, true, false]), 2);
    }

    #[test]
    fn mutation_drops_cache() {
        let mut s = Solution::zeros(3);
        s.set_fitness(1.0);
        s.set(0, false);
        assert_eq!(s.fitness(), Some(1.0));
        s.flip(1);
        assert_eq!(s.fitness(), None);
        s.set_fitness(2.0);
        s.copy_from(&Solution::ones(3), &Mask::new(vec![2]));
        assert_eq!(s.fitness(), None);
    }

    #[test]
    fn index_round_trip() {
        let s = Solution::from_str_bits("1101").unwrap();
        assert_eq!(s.to_index(), 0b1011);
        assert_eq!(Solution::from_index(0b1011, 4), s);
        assert_eq!(s.to_string(), "1101");
    }
}
