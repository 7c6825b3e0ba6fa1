//! MAX3SAT over DIMACS CNF. Fitness is the number of satisfied clauses.

use rand::seq::index::sample;
use rand::Rng;

use crate::dependency::Vig;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A literal: zero-based variable and polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cnf {
    n: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Cnf {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Self {
        Cnf { n, clauses }
    }

    /// Random 3-SAT with a planted assignment; every clause is satisfied by
    /// the planted solution, so the optimum equals the clause count.
    pub fn planted(n: usize, clause_ratio: f64, seed: u64) -> Result<(Self, Vec<bool>)> {
        if n < 3 {
            return Err(Error::InvalidParameter("MAX3SAT needs at least 3 variables".into()));
        }
        let mut rng = RngStream::new(seed);
        let planted: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        let m = (clause_ratio * n as f64).round() as usize;
        let mut clauses = Vec::with_capacity(m);
        while clauses.len() < m {
            let vars = sample(&mut rng, n, 3);
            let clause: Vec<Literal> = vars
                .iter()
                .map(|var| Literal {
                    var,
                    positive: rng.gen(),
                })
                .collect();
            if clause.iter().any(|l| planted[l.var] == l.positive) {
                clauses.push(clause);
            }
        }
        Ok((Cnf { n, clauses }, planted))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    pub fn value(&self, bits: &[bool]) -> f64 {
        self.clauses
            .iter()
            .filter(|c| c.iter().any(|l| bits[l.var] == l.positive))
            .count() as f64
    }

    pub fn vig(&self) -> Vig {
        let groups: Vec<Vec<usize>> = self.clauses.iter().map(|c| c.iter().map(|l| l.var).collect()).collect();
        Vig::from_cliques(self.n, &groups)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                out.push_str(&format!("{} ", if l.positive { v } else { -v }));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses DIMACS CNF. Comment lines start with `c`; clauses may span
    /// lines and end with `0`; a trailing `%` line is tolerated.
    pub fn parse_dimacs(text: &str, path: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        let mut last_pos = (1, 1);
        for (ln, line) in text.lines().enumerate() {
            let lineno = ln + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') {
                continue;
            }
            if trimmed.starts_with('%') {
                break;
            }
            if trimmed.starts_with('p') {
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                if header.is_some() {
                    return Err(Error::parse(path, lineno, 1, "duplicate problem line"));
                }
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(Error::parse(path, lineno, 1, "expected 'p cnf <vars> <clauses>'"));
                }
                let nv = parts[2]
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, 1, "bad variable count"))?;
                let nc = parts[3]
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, 1, "bad clause count"))?;
                header = Some((nv, nc));
                continue;
            }
            let Some((nv, _)) = header else {
                return Err(Error::parse(path, lineno, 1, "clause before problem line"));
            };
            let mut col = 0;
            for part in line.split(|c: char| c.is_whitespace()) {
                let at = col + 1;
                col += part.len() + 1;
                if part.is_empty() {
                    continue;
                }
                last_pos = (lineno, at);
                let lit: i64 = part
                    .parse()
                    .map_err(|_| Error::parse(path, lineno, at, format!("expected literal, found '{part}'")))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(Error::parse(path, lineno, at, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else {
                    let var = lit.unsigned_abs() as usize;
                    if var > nv {
                        return Err(Error::parse(
                            path,
                            lineno,
                            at,
                            format!("literal {lit} exceeds declared {nv} variables"),
                        ));
                    }
                    current.push(Literal {
                        var: var - 1,
                        positive: lit > 0,
                    });
                }
            }
        }
        let Some((nv, nc)) = header else {
            return Err(Error::parse(path, 1, 1, "missing problem line"));
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != nc {
            return Err(Error::parse(
                path,
                last_pos.0,
                last_pos.1,
                format!("declared {nc} clauses, found {}", clauses.len()),
            ));
        }
        Ok(Cnf { n: nv, clauses })
    }
}
