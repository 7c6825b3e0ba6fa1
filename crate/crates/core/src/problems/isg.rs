//! Ising spin glass on a two-dimensional toroidal lattice with ±1 couplings.
//!
//! The fitness is the negated energy `sum J_ij s_i s_j` over lattice edges
//! with spins `s = 2x - 1`, so the solver maximizes.
//!
//! File format: a header line `L`, then one line `i j J` per edge.

use rand::Rng;

use crate::dependency::Vig;
use crate::error::{Error, Result};
use crate::problems::nk::Tokens;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinGlass {
    side: usize,
    edges: Vec<(usize, usize, i8)>,
}

impl SpinGlass {
    /// Random ±J couplings on the `side x side` torus.
    pub fn generate(side: usize, seed: u64) -> Result<Self> {
        if side < 3 {
            return Err(Error::InvalidParameter(format!(
                "lattice side must be at least 3, got {side}"
            )));
        }
        let mut rng = RngStream::new(seed);
        let mut edges = Vec::with_capacity(2 * side * side);
        for r in 0..side {
            for c in 0..side {
                let i = r * side + c;
                let right = r * side + (c + 1) % side;
                let down = ((r + 1) % side) * side + c;
                for j in [right, down] {
                    let coupling = if rng.gen::<bool>() { 1 } else { -1 };
                    edges.push((i, j, coupling));
                }
            }
        }
        Ok(SpinGlass { side, edges })
    }

    pub fn n(&self) -> usize {
        self.side * self.side
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn edges(&self) -> &[(usize, usize, i8)] {
        &self.edges
    }

    pub fn value(&self, bits: &[bool]) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j, c)| if bits[i] == bits[j] { c as i64 } else { -(c as i64) })
            .sum::<i64>() as f64
    }

    pub fn vig(&self) -> Vig {
        let mut g = Vig::new(self.n());
        for &(i, j, _) in &self.edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.side);
        for &(i, j, c) in &self.edges {
            out.push_str(&format!("{i} {j} {c}\n"));
        }
        out
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut tokens = Tokens::new(text, path);
        let side: usize = tokens.next_parsed("lattice side")?;
        if side == 0 {
            return Err(tokens.error("lattice side must be positive".into()));
        }
        let n = side * side;
        let mut edges = Vec::new();
        while tokens.peek_raw().is_some() {
            let i: usize = tokens.next_parsed("edge endpoint")?;
            let j: usize = tokens.next_parsed("edge endpoint")?;
            let c: i8 = tokens.next_parsed("coupling")?;
            if i >= n || j >= n || i == j {
                return Err(tokens.error(format!("invalid edge {i} {j} for {n} spins")));
            }
            if c != 1 && c != -1 {
                return Err(tokens.error(format!("coupling must be -1 or +1, got {c}")));
            }
            edges.push((i, j, c));
        }
        Ok(SpinGlass { side, edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ferromagnet_ground_state() {
        let text = "3\n0 1 1\n1 2 1\n2 0 1\n";
        let g = SpinGlass::parse(text, "mem").unwrap();
        assert_eq!(g.value(&[true; 9]), 3.0);
        assert_eq!(g.value(&[false; 9]), 3.0);
        let mut mixed = [false; 9];
        mixed[0] = true;
        assert_eq!(g.value(&mixed), -1.0);
    }

    #[test]
    fn generated_torus_has_two_edges_per_spin() {
        let g = SpinGlass::generate(5, 1).unwrap();
        assert_eq!(g.edges().len(), 50);
        let back = SpinGlass::parse(&g.to_text(), "mem").unwrap();
        assert_eq!(g, back);
        let vig = g.vig();
        for i in 0..25 {
            assert_eq!(vig.neighbours(i).count(), 4);
        }
    }

    #[test]
    fn rejects_bad_coupling() {
        let err = SpinGlass::parse("3\n0 1 2\n", "x.isg").unwrap_err();
        assert!(err.to_string().contains("x.isg:2"), "{err}");
    }
}
