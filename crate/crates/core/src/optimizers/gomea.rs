use crate::dependency::{fihc_with_ll, Vig};
use crate::eval::{Evaluator, Halt};
use crate::mixing::{om_with_masks, ordered_masks, MaskObserver, NodeOrdering};
use crate::rng::RngStream;
use crate::sll::{build_lt, estimate_dsm};
use crate::solution::Solution;

use super::{RunOptions, Variant};

/// Generations a population runs for each generation of the next larger
/// one.
const INTERLEAVE: u64 = 4;

struct Population {
    members: Vec<Solution>,
    generations: u64,
    terminated: bool,
}

impl Population {
    fn mean_fitness(&self) -> f64 {
        let sum: f64 = self
            .members
            .iter()
            .map(|s| s.fitness().unwrap_or(f64::NEG_INFINITY))
            .sum();
        sum / self.members.len() as f64
    }

    fn converged(&self) -> bool {
        self.members.windows(2).all(|w| w[0].same_bits(&w[1]))
    }
}

/// LT-GOMEA under an interleaved multistart scheme: population sizes
/// 1, 2, 4, ... where each population runs four generations per generation
/// of the next.
pub struct LtGomea {
    n: usize,
    variant: Variant,
    pops: Vec<Population>,
    evig: Vig,
    pairs_per_flip: usize,
    init_rng: RngStream,
    climb_rng: RngStream,
    mix_rng: RngStream,
}

impl LtGomea {
    pub fn new(n: usize, variant: Variant, options: &RunOptions, rng: &RngStream) -> Self {
        LtGomea {
            n,
            variant,
            pops: Vec::new(),
            evig: Vig::new(n),
            pairs_per_flip: options.pairs_per_flip.unwrap_or(n),
            init_rng: rng.child_named("gomea-init"),
            climb_rng: rng.child_named("gomea-climb"),
            mix_rng: rng.child_named("gomea-mix"),
        }
    }

    pub fn empirical_vig(&self) -> &Vig {
        &self.evig
    }

    pub fn population_count(&self) -> usize {
        self.pops.len()
    }

    pub fn run(&mut self, eval: &mut Evaluator<'_>, observer: &mut dyn MaskObserver) -> Halt {
        loop {
            if let Err(halt) = self.step(eval, observer) {
                return halt;
            }
        }
    }

    /// One generation of the smallest live population, cascading into the
    /// next population every fourth generation.
    fn step(&mut self, eval: &mut Evaluator<'_>, observer: &mut dyn MaskObserver) -> Result<(), Halt> {
        let mut i = self.pops.iter().position(|p| !p.terminated).unwrap_or(self.pops.len());
        loop {
            if i == self.pops.len() {
                self.spawn(eval)?;
            }
            if self.pops[i].terminated {
                i += 1;
                continue;
            }
            self.generation(i, eval, observer)?;
            self.pops[i].generations += 1;
            self.cull(i);
            if self.pops[i].generations.is_multiple_of(INTERLEAVE) {
                i += 1;
            } else {
                return Ok(());
            }
        }
    }

    fn spawn(&mut self, eval: &mut Evaluator<'_>) -> Result<(), Halt> {
        let size = 1usize << self.pops.len();
        let mut members = Vec::with_capacity(size);
        for _ in 0..size {
            let mut s = Solution::random(self.n, &mut self.init_rng);
            if self.variant == Variant::LtGomeaFihcWll {
                fihc_with_ll(eval, &mut s, &mut self.evig, &mut self.climb_rng, self.pairs_per_flip)?;
            } else {
                eval.evaluate(&mut s)?;
            }
            members.push(s);
        }
        self.pops.push(Population {
            members,
            generations: 0,
            terminated: false,
        });
        Ok(())
    }

    fn generation(&mut self, i: usize, eval: &mut Evaluator<'_>, observer: &mut dyn MaskObserver) -> Result<(), Halt> {
        let pop = &mut self.pops[i];
        let dsm = estimate_dsm(&pop.members);
        let tree = build_lt(&dsm);
        let donors = pop.members.clone();
        for s in pop.members.iter_mut() {
            let mut masks = ordered_masks(&tree, NodeOrdering::Random, &mut self.mix_rng);
            if self.variant == Variant::LtGomeaFihcWll {
                masks.retain(|m| m.len() == 1 || self.evig.internal_edges(m.indices()) > 0);
            }
            om_with_masks(eval, s, &donors, &masks, &mut self.mix_rng, observer)?;
        }
        Ok(())
    }

    /// Terminates converged populations and every population whose mean
    /// fitness is beaten by a larger live one.
    fn cull(&mut self, i: usize) {
        if self.pops[i].converged() {
            self.pops[i].terminated = true;
        }
        let mean = self.pops[i].mean_fitness();
        for j in 0..i {
            if !self.pops[j].terminated && self.pops[j].mean_fitness() < mean {
                self.pops[j].terminated = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::EvalBudget;
    use crate::mixing::NoObserver;
    use crate::problems::ProblemInstance;

    #[test]
    fn populations_double() {
        let p = ProblemInstance::trap_concat(4, 5).unwrap();
        let mut eval = Evaluator::new(&p, EvalBudget::new(5_000));
        let mut g = LtGomea::new(20, Variant::LtGomea, &RunOptions::default(), &RngStream::new(1));
        let _ = g.run(&mut eval, &mut NoObserver);
        assert!(g.population_count() >= 3);
        for (k, pop) in g.pops.iter().enumerate() {
            assert_eq!(pop.members.len(), 1 << k);
        }
        // smaller populations ran at least as many generations
        for w in g.pops.windows(2) {
            assert!(w[0].generations >= w[1].generations || w[0].terminated);
        }
    }
}
