//! P3 and LT-GOMEA assemblies with their hill-climbing and mixing
//! variants.

mod gomea;
mod p3;

pub use gomea::LtGomea;
pub use p3::{Level, Pyramid};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::eval::{EvalBudget, Evaluator, Halt};
use crate::mixing::{MaskObserver, NoObserver, PxShareCounter};
use crate::problems::ProblemInstance;
use crate::rng::RngStream;
use crate::sll::Dsm;
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Variant {
    P3,
    P3FihcWll,
    P3PxOmLTopWS,
    P3PxOmAll,
    LtGomea,
    LtGomeaFihcWll,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::P3,
        Variant::P3FihcWll,
        Variant::P3PxOmLTopWS,
        Variant::P3PxOmAll,
        Variant::LtGomea,
        Variant::LtGomeaFihcWll,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::P3 => "p3",
            Variant::P3FihcWll => "p3-fihcwll",
            Variant::P3PxOmLTopWS => "p3-px-om-ltopws",
            Variant::P3PxOmAll => "p3-px-om-all",
            Variant::LtGomea => "ltgomea",
            Variant::LtGomeaFihcWll => "ltgomea-fihcwll",
        }
    }

    pub fn uses_fihcwll(self) -> bool {
        matches!(self, Variant::P3FihcWll | Variant::LtGomeaFihcWll)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown optimizer '{s}'")))
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> String {
        v.as_str().to_string()
    }
}

impl TryFrom<String> for Variant {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Pairs checked after every accepted hill-climbing flip; defaults to
    /// the problem size.
    pub pairs_per_flip: Option<usize>,
    /// Replaces every learned matrix used by PX-like mixing.
    pub injected_dsm: Option<Dsm>,
    /// Counts applied masks that are PX masks of the ground-truth graph.
    pub track_px_share: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub variant: Variant,
    pub seed: u64,
    pub best: Option<Solution>,
    pub best_fitness: Option<f64>,
    pub evaluations: u64,
    /// Evaluation count at which the known optimum was first reached.
    pub solved_at: Option<u64>,
    /// `(ffe, fitness)` at every best-so-far improvement.
    pub trace: Vec<(u64, f64)>,
    pub masks_applied: u64,
    pub px_masks_applied: u64,
    /// Mean percentage of PX components present as nodes of the PX-LTs
    /// built during the run (PX-like mixing only).
    pub px_tree_coverage: Option<f64>,
}

impl RunResult {
    pub fn solved(&self) -> bool {
        self.solved_at.is_some()
    }

    /// Percentage of applied masks that were PX masks, when tracked.
    pub fn px_share(&self) -> Option<f64> {
        (self.masks_applied > 0).then(|| 100.0 * self.px_masks_applied as f64 / self.masks_applied as f64)
    }
}

pub(crate) enum Observer {
    Off(NoObserver),
    Counting(PxShareCounter),
}

impl Observer {
    fn for_instance(instance: &ProblemInstance, track: bool) -> Self {
        match (track, instance.ground_truth_vig()) {
            (true, Some(vig)) => Observer::Counting(PxShareCounter::new(vig.clone())),
            _ => Observer::Off(NoObserver),
        }
    }

    pub(crate) fn as_dyn(&mut self) -> &mut dyn MaskObserver {
        match self {
            Observer::Off(o) => o,
            Observer::Counting(c) => c,
        }
    }

    fn counts(&self) -> (u64, u64, Option<f64>) {
        match self {
            Observer::Off(_) => (0, 0, None),
            Observer::Counting(c) => (c.applied, c.px, c.tree_coverage()),
        }
    }
}

/// Runs `variant` on `instance` until the known optimum is found or
/// `limit` evaluations are spent.
pub fn optimize(
    instance: &ProblemInstance,
    variant: Variant,
    limit: u64,
    seed: u64,
    options: &RunOptions,
) -> RunResult {
    let mut eval = Evaluator::new(instance, EvalBudget::new(limit)).with_target(instance.known_optimum());
    let rng = RngStream::new(seed);
    let mut observer = Observer::for_instance(instance, options.track_px_share);
    let halt = match variant {
        Variant::LtGomea | Variant::LtGomeaFihcWll => {
            LtGomea::new(instance.n(), variant, options, &rng).run(&mut eval, observer.as_dyn())
        }
        _ => Pyramid::new(instance.n(), variant, options, &rng).run(&mut eval, observer.as_dyn()),
    };
    debug_assert!(matches!(halt, Halt::Exhausted | Halt::Solved));
    let (masks_applied, px_masks_applied, px_tree_coverage) = observer.counts();
    let best = eval.best().cloned();
    RunResult {
        variant,
        seed,
        best_fitness: best.as_ref().map(|b| b.fitness),
        best: best.map(|b| b.solution),
        evaluations: eval.used(),
        solved_at: eval.solved_at(),
        trace: eval.trace().to_vec(),
        masks_applied,
        px_masks_applied,
        px_tree_coverage,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("p4".parse::<Variant>().is_err());
    }

    #[test]
    fn every_variant_solves_small_onemax() {
        let p = ProblemInstance::onemax(30);
        for v in Variant::ALL {
            let r = optimize(&p, v, 100_000, 1, &RunOptions::default());
            assert!(r.solved(), "{v}");
            assert!(r.evaluations <= 100_000);
            assert!(r.trace.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 <= w[1].0));
        }
    }

    #[test]
    fn zero_budget_fails_without_evaluations() {
        let p = ProblemInstance::trap_concat(5, 4).unwrap();
        for v in Variant::ALL {
            let r = optimize(&p, v, 0, 3, &RunOptions::default());
            assert!(!r.solved());
            assert_eq!(r.evaluations, 0);
            assert!(r.best.is_none());
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let p = ProblemInstance::cyclic_trap(5, 1, 5).unwrap();
        for v in Variant::ALL {
            let a = optimize(&p, v, 20_000, 9, &RunOptions::default());
            let b = optimize(&p, v, 20_000, 9, &RunOptions::default());
            assert_eq!(a.trace, b.trace, "{v}");
            assert_eq!(a.evaluations, b.evaluations);
        }
    }

    #[test]
    fn budget_is_respected_and_exhausted() {
        let p = ProblemInstance::cyclic_trap(6, 2, 8).unwrap();
        for v in Variant::ALL {
            let r = optimize(&p, v, 3_000, 4, &RunOptions::default());
            assert!(r.solved() || r.evaluations == 3_000, "{v}");
        }
    }
}
