//! Optimal mixing over linkage-tree masks and its PX-like variant.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dependency::Vig;
use crate::eval::{Evaluator, Halt};
use crate::pxlt::{all_internal_masks, build_px_lt, differing, ltop_ws, px_masks, Mask};
use crate::rng::RngStream;
use crate::sll::{Dsm, LinkageTree};
use crate::solution::Solution;
use crate::FITNESS_EPS;

/// What one mixing call did to its source solution, which is updated in
/// place.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MixOutcome {
    /// The source was replaced at least once.
    pub accepted: bool,
    /// The final source is strictly fitter than the original.
    pub improved: bool,
    pub masks_tried: usize,
    pub slide_used: bool,
    pub evaluations: u64,
}

/// Receives every mask whose offspring was evaluated, together with the
/// source as it was before the exchange and the donor.
pub trait MaskObserver {
    fn mask_applied(&mut self, src: &Solution, donor: &Solution, mask: &Mask);

    /// Called once per PX-like mixing call with the PX-LT of the pair.
    fn px_tree_built(&mut self, _src: &Solution, _donor: &Solution, _tree: &LinkageTree) {}
}

/// Ignores every event.
pub struct NoObserver;

impl MaskObserver for NoObserver {
    fn mask_applied(&mut self, _: &Solution, _: &Solution, _: &Mask) {}
}

/// Counts how many applied masks are exactly a PX component of the
/// ground-truth graph, and how many PX components each PX-LT contained.
#[derive(Debug, Clone)]
pub struct PxShareCounter {
    vig: Vig,
    pub applied: u64,
    pub px: u64,
    pub trees: u64,
    coverage_sum: f64,
}

impl PxShareCounter {
    pub fn new(vig: Vig) -> Self {
        PxShareCounter {
            vig,
            applied: 0,
            px: 0,
            trees: 0,
            coverage_sum: 0.0,
        }
    }

    /// Mean percentage of PX components present as PX-LT nodes, over all
    /// trees built.
    pub fn tree_coverage(&self) -> Option<f64> {
        (self.trees > 0).then(|| 100.0 * self.coverage_sum / self.trees as f64)
    }

    /// Percentage of applied masks that were PX masks, if any mask was
    /// applied.
    pub fn share(&self) -> Option<f64> {
        (self.applied > 0).then(|| 100.0 * self.px as f64 / self.applied as f64)
    }
}

/// Positions inside `mask` at which the two solutions differ.
pub fn exchanged(src: &Solution, donor: &Solution, mask: &Mask) -> Vec<usize> {
    mask.indices()
        .iter()
        .copied()
        .filter(|&i| src.get(i) != donor.get(i))
        .collect()
}

impl MaskObserver for PxShareCounter {
    fn mask_applied(&mut self, src: &Solution, donor: &Solution, mask: &Mask) {
        self.applied += 1;
        if px_masks(&self.vig, src, donor).iter().any(|m| m == mask) {
            self.px += 1;
        }
    }

    fn px_tree_built(&mut self, src: &Solution, donor: &Solution, tree: &LinkageTree) {
        let masks = px_masks(&self.vig, src, donor);
        if masks.is_empty() {
            return;
        }
        let covered = masks.iter().filter(|m| tree.contains(m.indices())).count();
        self.trees += 1;
        self.coverage_sum += covered as f64 / masks.len() as f64;
    }
}

/// Node visiting order for optimal mixing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrdering {
    /// Uniformly shuffled, as in GOMEA.
    Random,
    /// Ascending size with shuffling among equal sizes, singletons dropped,
    /// as in P3.
    ShortestFirstIgnoreSingletons,
}

/// The non-root nodes of `tree` in the requested order.
pub fn ordered_masks(tree: &LinkageTree, ordering: NodeOrdering, rng: &mut RngStream) -> Vec<Mask> {
    let mut masks: Vec<Mask> = tree.non_root().iter().map(|n| Mask::new(n.members.clone())).collect();
    masks.shuffle(rng);
    if ordering == NodeOrdering::ShortestFirstIgnoreSingletons {
        masks.retain(|m| m.len() > 1);
        masks.sort_by_key(Mask::len);
    }
    masks
}

/// Optimal mixing of `src` with donors from `population` over the nodes of
/// `tree`; see [`om_with_masks`].
pub fn om_step(
    eval: &mut Evaluator<'_>,
    src: &mut Solution,
    population: &[Solution],
    tree: &LinkageTree,
    ordering: NodeOrdering,
    rng: &mut RngStream,
    observer: &mut dyn MaskObserver,
) -> Result<MixOutcome, Halt> {
    let masks = ordered_masks(tree, ordering, rng);
    om_with_masks(eval, src, population, &masks, rng, observer)
}

/// For each mask in order, copies the mask from a donor drawn uniformly
/// among the members differing from `src` inside it, and keeps the result
/// when it is not worse. Masks without an eligible donor cost nothing.
pub fn om_with_masks(
    eval: &mut Evaluator<'_>,
    src: &mut Solution,
    population: &[Solution],
    masks: &[Mask],
    rng: &mut RngStream,
    observer: &mut dyn MaskObserver,
) -> Result<MixOutcome, Halt> {
    let start = eval.used();
    let mut out = MixOutcome::default();
    let original = eval.fitness(src)?;
    let mut current = original;
    let mut backup = src.clone();
    for mask in masks {
        let mut donor: Option<&Solution> = None;
        let mut seen = 0u32;
        for member in population {
            if member.differs_within(src, mask) {
                seen += 1;
                if rng.gen_range(0..seen) == 0 {
                    donor = Some(member);
                }
            }
        }
        let Some(donor) = donor else { continue };
        observer.mask_applied(src, donor, mask);
        backup.clone_from(src);
        src.copy_from(donor, mask);
        out.masks_tried += 1;
        let value = match eval.evaluate(src) {
            Ok(v) => v,
            Err(halt) => {
                src.clone_from(&backup);
                return Err(halt);
            }
        };
        if value >= current - FITNESS_EPS {
            current = value;
            out.accepted = true;
        } else {
            src.clone_from(&backup);
        }
    }
    out.improved = current > original + FITNESS_EPS;
    out.evaluations = eval.used() - start;
    Ok(out)
}

/// Which PX-LT nodes become masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskSelection {
    LTopWS,
    /// All internal nodes except the root.
    AllInternal,
}

/// PX-like optimal mixing of `src` with a single donor. Masks are taken
/// from the PX-LT of the pair and tried in random order; the first strict
/// improvement is kept. Failing that, one randomly chosen mask that left
/// the fitness unchanged is applied. Otherwise `src` is left as it was.
pub fn px_om(
    eval: &mut Evaluator<'_>,
    dsm: &Dsm,
    src: &mut Solution,
    donor: &Solution,
    selection: MaskSelection,
    rng: &mut RngStream,
    observer: &mut dyn MaskObserver,
) -> Result<MixOutcome, Halt> {
    let start = eval.used();
    let mut out = MixOutcome::default();
    let Some(tree) = build_px_lt(dsm, src, donor) else {
        return Ok(out);
    };
    observer.px_tree_built(src, donor, &tree);
    let mut masks = match selection {
        MaskSelection::LTopWS => ltop_ws(&tree, differing(src, donor).len()),
        MaskSelection::AllInternal => all_internal_masks(&tree),
    };
    if masks.is_empty() {
        return Ok(out);
    }
    masks.shuffle(rng);
    let current = eval.fitness(src)?;
    let mut backup = src.clone();
    let mut slides: Vec<(usize, f64)> = Vec::new();
    for (k, mask) in masks.iter().enumerate() {
        observer.mask_applied(src, donor, mask);
        backup.clone_from(src);
        src.copy_from(donor, mask);
        out.masks_tried += 1;
        let value = match eval.evaluate(src) {
            Ok(v) => v,
            Err(halt) => {
                src.clone_from(&backup);
                return Err(halt);
            }
        };
        if value > current + FITNESS_EPS {
            out.accepted = true;
            out.improved = true;
            out.evaluations = eval.used() - start;
            return Ok(out);
        }
        if (value - current).abs() <= FITNESS_EPS {
            slides.push((k, value));
        }
        src.clone_from(&backup);
    }
    if let Some(&(k, value)) = slides.choose(rng) {
        src.copy_from(donor, &masks[k]);
        src.set_fitness(value);
        out.accepted = true;
        out.slide_used = true;
    }
    out.evaluations = eval.used() - start;
    Ok(out)
}

/// The two offspring of exchanging `mask` between the parents.
pub fn exchange(p1: &Solution, p2: &Solution, mask: &Mask) -> (Solution, Solution) {
    let mut o1 = p1.clone();
    let mut o2 = p2.clone();
    o1.copy_from(p2, mask);
    o2.copy_from(p1, mask);
    (o1, o2)
}
