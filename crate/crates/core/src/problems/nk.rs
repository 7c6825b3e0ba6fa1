//! NK-landscapes with random neighbourhoods.
//!
//! Position `i` owns a table of `2^(k+1)` values indexed by the bits of
//! `i` followed by its `k` neighbours, `x_i` being the most significant bit.
//!
//! File format (whitespace separated): a header `n k seed`, then for every
//! position its `k` neighbour indices followed by its `2^(k+1)` table values.

use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::Rng;

use crate::dependency::Vig;
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    seed: u64,
    neighbours: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

impl NkLandscape {
    pub fn generate(n: usize, k: usize, seed: u64) -> Result<Self> {
        if n == 0 || k >= n {
            return Err(Error::InvalidParameter(format!("NK needs 0 <= k < n, got n={n} k={k}")));
        }
        let mut rng = RngStream::new(seed);
        let mut neighbours = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let picks = sample(&mut rng, n - 1, k);
            let nb: Vec<usize> = picks.iter().map(|j| if j >= i { j + 1 } else { j }).collect();
            neighbours.push(nb);
            tables.push((0..1usize << (k + 1)).map(|_| rng.gen::<f64>()).collect());
        }
        Ok(NkLandscape {
            n,
            k,
            seed,
            neighbours,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i]
    }

    pub fn table_index(&self, i: usize, bits: &[bool]) -> usize {
        self.neighbours[i]
            .iter()
            .fold(bits[i] as usize, |acc, &j| (acc << 1) | bits[j] as usize)
    }

    pub fn value(&self, bits: &[bool]) -> f64 {
        (0..self.n).map(|i| self.tables[i][self.table_index(i, bits)]).sum()
    }

    pub fn vig(&self) -> Vig {
        let groups: Vec<Vec<usize>> = (0..self.n)
            .map(|i| std::iter::once(i).chain(self.neighbours[i].iter().copied()).collect())
            .collect();
        Vig::from_cliques(self.n, &groups)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.k, self.seed);
        for i in 0..self.n {
            let fields: Vec<String> = self.neighbours[i]
                .iter()
                .map(|j| j.to_string())
                .chain(self.tables[i].iter().map(|v| format!("{v:?}")))
                .collect();
            let _ = writeln!(out, "{}", fields.join(" "));
        }
        out
    }

    pub fn parse(text: &str, path: &str) -> Result<Self> {
        let mut tokens = Tokens::new(text, path);
        let n: usize = tokens.next_parsed("n")?;
        let k: usize = tokens.next_parsed("k")?;
        let seed: u64 = tokens.next_parsed("seed")?;
        if n == 0 || k >= n {
            return Err(tokens.error(format!("NK header needs 0 <= k < n, got n={n} k={k}")));
        }
        let mut neighbours = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            let mut nb = Vec::with_capacity(k);
            for _ in 0..k {
                let j: usize = tokens.next_parsed("neighbour index")?;
                if j >= n || j == i {
                    return Err(tokens.error(format!("invalid neighbour {j} for position {i}")));
                }
                nb.push(j);
            }
            let table = (0..1usize << (k + 1))
                .map(|_| tokens.next_parsed::<f64>("table value"))
                .collect::<Result<Vec<_>>>()?;
            neighbours.push(nb);
            tables.push(table);
        }
        if let Some((line, col, tok)) = tokens.peek_raw() {
            return Err(Error::parse(
                path,
                line,
                col,
                format!("unexpected trailing token '{tok}'"),
            ));
        }
        Ok(NkLandscape {
            n,
            k,
            seed,
            neighbours,
            tables,
        })
    }
}

/// Whitespace tokenizer that remembers line and column of every token.
pub(crate) struct Tokens<'a> {
    path: &'a str,
    items: Vec<(usize, usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str, path: &'a str) -> Self {
        let mut items = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let mut col = 0;
            for part in line.split(|c: char| c.is_whitespace()) {
                if !part.is_empty() {
                    items.push((ln + 1, col + 1, part));
                }
                col += part.len() + 1;
            }
        }
        Tokens { path, items, pos: 0 }
    }

    pub(crate) fn next_parsed<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        match self.items.get(self.pos) {
            None => {
                let (line, col) = self.items.last().map_or((1, 1), |&(l, c, t)| (l, c + t.len()));
                Err(Error::parse(
                    self.path,
                    line,
                    col,
                    format!("unexpected end of input, expected {what}"),
                ))
            }
            Some(&(line, col, tok)) => {
                self.pos += 1;
                tok.parse()
                    .map_err(|_| Error::parse(self.path, line, col, format!("expected {what}, found '{tok}'")))
            }
        }
    }

    pub(crate) fn peek_raw(&self) -> Option<(usize, usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    pub(crate) fn error(&self, message: String) -> Error {
        let (line, col) = self
            .items
            .get(self.pos.saturating_sub(1))
            .map_or((1, 1), |&(l, c, _)| (l, c));
        Error::parse(self.path, line, col, message)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let nk = NkLandscape::generate(8, 2, 11).unwrap();
        let back = NkLandscape::parse(&nk.to_text(), "mem").unwrap();
        assert_eq!(nk, back);
    }

    #[test]
    fn neighbours_are_distinct_and_exclude_self() {
        let nk = NkLandscape::generate(12, 5, 3).unwrap();
        for i in 0..12 {
            let nb = nk.neighbours(i);
            assert_eq!(nb.len(), 5);
            assert!(!nb.contains(&i));
            let mut s = nb.to_vec();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), 5);
        }
    }

    #[test]
    fn k_must_be_below_n() {
        assert!(NkLandscape::generate(4, 4, 0).is_err());
    }

    #[test]
    fn parse_error_reports_position() {
        let err = NkLandscape::parse("2 0 1\n0.5 x\n0.1 0.2\n", "bad.nk").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 5)),
            other => panic!("unexpected {other}"),
        }
    }
}
