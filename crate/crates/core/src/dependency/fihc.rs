//! First-improvement hill climbing, optionally learning non-monotonic
//! dependencies along the way.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::eval::{Evaluator, Halt};
use crate::rng::RngStream;
use crate::solution::Solution;
use crate::FITNESS_EPS;

use super::{nonmonotonicity_check, Vig};

/// Sweeps over a freshly shuffled variable order, keeping strictly improving
/// flips, until a sweep changes nothing. On a halt `s` holds the last
/// accepted state.
pub fn fihc(eval: &mut Evaluator<'_>, s: &mut Solution, rng: &mut RngStream) -> Result<(), Halt> {
    climb(eval, s, rng, |_, _, _| Ok(()))
}

/// [`fihc`] that, after every accepted flip of gene `g`, tests up to
/// `pairs_per_flip` pairs `(g, h)` with `h` drawn uniformly at the current
/// context, adding every detected non-monotonic dependency to `evig`.
/// Pairs already in `evig` are skipped without evaluations.
pub fn fihc_with_ll(
    eval: &mut Evaluator<'_>,
    s: &mut Solution,
    evig: &mut Vig,
    rng: &mut RngStream,
    pairs_per_flip: usize,
) -> Result<(), Halt> {
    let n = s.len();
    let mut pair_rng = rng.child_named("fihcwll-pairs");
    climb(eval, s, rng, |eval, s, g| {
        if n < 2 {
            return Ok(());
        }
        for _ in 0..pairs_per_flip {
            let mut h = pair_rng.gen_range(0..n - 1);
            if h >= g {
                h += 1;
            }
            if evig.has_edge(g, h) {
                continue;
            }
            if nonmonotonicity_check(eval, s, g, h)? {
                evig.add_edge(g, h);
            }
        }
        Ok(())
    })
}

fn climb<F>(eval: &mut Evaluator<'_>, s: &mut Solution, rng: &mut RngStream, mut on_accept: F) -> Result<(), Halt>
where
    F: FnMut(&mut Evaluator<'_>, &mut Solution, usize) -> Result<(), Halt>,
{
    let mut current = eval.fitness(s)?;
    let mut order: Vec<usize> = (0..s.len()).collect();
    loop {
        order.shuffle(rng);
        let mut changed = false;
        for &i in &order {
            s.flip(i);
            let value = match eval.evaluate(s) {
                Ok(v) => v,
                Err(halt) => {
                    s.revert_flip(i, Some(current));
                    return Err(halt);
                }
            };
            if value > current + FITNESS_EPS {
                current = value;
                changed = true;
                on_accept(eval, s, i)?;
            } else {
                s.revert_flip(i, Some(current));
            }
        }
        if !changed {
            return Ok(());
        }
    }
}
