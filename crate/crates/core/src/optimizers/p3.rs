use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::dependency::{fihc, fihc_with_ll, Vig};
use crate::eval::{Evaluator, Halt};
use crate::mixing::{om_with_masks, ordered_masks, px_om, MaskObserver, MaskSelection, NodeOrdering};
use crate::rng::RngStream;
use crate::sll::{build_lt, Dsm, LinkageTree, PairCounts};
use crate::solution::Solution;
use crate::FITNESS_EPS;

use super::{RunOptions, Variant};

/// One pyramid level: its members and the pairwise statistics they induce.
#[derive(Debug, Clone)]
pub struct Level {
    members: Vec<Solution>,
    counts: PairCounts,
    model: Option<(Dsm, LinkageTree)>,
}

impl Level {
    fn new(n: usize) -> Self {
        Level {
            members: Vec::new(),
            counts: PairCounts::new(n),
            model: None,
        }
    }

    fn add(&mut self, s: Solution) {
        self.counts.add(&s);
        self.members.push(s);
        self.model = None;
    }

    fn model(&mut self) -> &(Dsm, LinkageTree) {
        self.model.get_or_insert_with(|| {
            let dsm = self.counts.dsm();
            let tree = build_lt(&dsm);
            (dsm, tree)
        })
    }

    pub fn members(&self) -> &[Solution] {
        &self.members
    }
}

/// Parameter-less population pyramid.
pub struct Pyramid {
    n: usize,
    variant: Variant,
    levels: Vec<Level>,
    seen: HashSet<Vec<bool>>,
    evig: Vig,
    pairs_per_flip: usize,
    injected: Option<Dsm>,
    init_rng: RngStream,
    climb_rng: RngStream,
    mix_rng: RngStream,
}

impl Pyramid {
    pub fn new(n: usize, variant: Variant, options: &RunOptions, rng: &RngStream) -> Self {
        Pyramid {
            n,
            variant,
            levels: Vec::new(),
            seen: HashSet::new(),
            evig: Vig::new(n),
            pairs_per_flip: options.pairs_per_flip.unwrap_or(n),
            injected: options.injected_dsm.clone(),
            init_rng: rng.child_named("p3-init"),
            climb_rng: rng.child_named("p3-climb"),
            mix_rng: rng.child_named("p3-mix"),
        }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn empirical_vig(&self) -> &Vig {
        &self.evig
    }

    /// Iterates until the evaluator halts.
    pub fn run(&mut self, eval: &mut Evaluator<'_>, observer: &mut dyn MaskObserver) -> Halt {
        loop {
            if let Err(halt) = self.iterate(eval, observer) {
                return halt;
            }
        }
    }

    /// A new hill-climbed solution enters the bottom level and is pushed
    /// upwards through every level it improves at.
    pub fn iterate(&mut self, eval: &mut Evaluator<'_>, observer: &mut dyn MaskObserver) -> Result<(), Halt> {
        let mut s = Solution::random(self.n, &mut self.init_rng);
        if self.variant.uses_fihcwll() {
            fihc_with_ll(eval, &mut s, &mut self.evig, &mut self.climb_rng, self.pairs_per_flip)?;
        } else {
            fihc(eval, &mut s, &mut self.climb_rng)?;
        }
        self.insert(0, &s);
        let mut level = 0;
        while level < self.levels.len() {
            let before = eval.fitness(&mut s)?;
            self.mix(level, eval, &mut s, observer)?;
            if s.fitness().unwrap_or(before) > before + FITNESS_EPS {
                self.insert(level + 1, &s);
            }
            level += 1;
        }
        Ok(())
    }

    fn insert(&mut self, level: usize, s: &Solution) {
        if self.seen.contains(s.bits()) {
            return;
        }
        self.seen.insert(s.bits().to_vec());
        if level == self.levels.len() {
            self.levels.push(Level::new(self.n));
        }
        self.levels[level].add(s.clone());
    }

    fn mix(
        &mut self,
        level: usize,
        eval: &mut Evaluator<'_>,
        s: &mut Solution,
        observer: &mut dyn MaskObserver,
    ) -> Result<(), Halt> {
        match self.variant {
            Variant::P3 | Variant::P3FihcWll => {
                let lvl = &mut self.levels[level];
                let (_, tree) = lvl.model();
                let mut masks = ordered_masks(tree, NodeOrdering::ShortestFirstIgnoreSingletons, &mut self.mix_rng);
                if self.variant == Variant::P3FihcWll {
                    masks.retain(|m| self.evig.internal_edges(m.indices()) > 0);
                }
                om_with_masks(eval, s, &lvl.members, &masks, &mut self.mix_rng, observer)?;
            }
            Variant::P3PxOmLTopWS | Variant::P3PxOmAll => {
                let selection = if self.variant == Variant::P3PxOmAll {
                    MaskSelection::AllInternal
                } else {
                    MaskSelection::LTopWS
                };
                let lvl = &mut self.levels[level];
                let differing: Vec<usize> = (0..lvl.members.len())
                    .filter(|&i| !lvl.members[i].same_bits(s))
                    .collect();
                let Some(&pick) = differing.choose(&mut self.mix_rng) else {
                    return Ok(());
                };
                let donor = lvl.members[pick].clone();
                let dsm = match &self.injected {
                    Some(d) => d,
                    None => &lvl.model().0,
                };
                px_om(eval, dsm, s, &donor, selection, &mut self.mix_rng, observer)?;
            }
            Variant::LtGomea | Variant::LtGomeaFihcWll => unreachable!("not a pyramid variant"),
        }
        Ok(())
    }
}
