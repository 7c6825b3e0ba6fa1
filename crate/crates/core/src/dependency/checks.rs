use crate::error::{Error, Result};
use crate::eval::{Evaluator, Halt, Objective};
use crate::solution::Solution;
use crate::FITNESS_EPS;

use super::Vig;

/// Largest `n` accepted by [`exhaustive_vig`].
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    NonLinear,
    NonMonotonic,
}

fn lt(a: f64, b: f64) -> bool {
    a < b - FITNESS_EPS
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= FITNESS_EPS
}

/// `f + f_gh != f_g + f_h`.
pub fn nonlinear_pattern(f: f64, f_g: f64, f_h: f64, f_gh: f64) -> bool {
    !eq(f + f_gh, f_g + f_h)
}

/// True when flipping one variable changes the direction or the equality of
/// the other variable's effect.
pub fn nonmonotone_pattern(f: f64, f_g: f64, f_h: f64, f_gh: f64) -> bool {
    let c1 = lt(f, f_g) && !lt(f_h, f_gh);
    let c2 = eq(f, f_g) && !eq(f_h, f_gh);
    let c3 = lt(f_g, f) && !lt(f_gh, f_h);
    let c4 = lt(f, f_h) && !lt(f_g, f_gh);
    let c5 = eq(f, f_h) && !eq(f_g, f_gh);
    let c6 = lt(f_h, f) && !lt(f_gh, f_g);
    c1 || c2 || c3 || c4 || c5 || c6
}

impl CheckKind {
    pub fn pattern(self, f: f64, f_g: f64, f_h: f64, f_gh: f64) -> bool {
        match self {
            CheckKind::NonLinear => nonlinear_pattern(f, f_g, f_h, f_gh),
            CheckKind::NonMonotonic => nonmonotone_pattern(f, f_g, f_h, f_gh),
        }
    }
}

/// Evaluates the three flip neighbours of `x` and reports `(f, f_g, f_h, f_gh)`.
/// The cached fitness of `x` is reused; `x` itself is left unchanged.
fn four_points(eval: &mut Evaluator<'_>, x: &mut Solution, g: usize, h: usize) -> Result<[f64; 4], Halt> {
    assert_ne!(g, h, "dependency checks need two distinct variables");
    let f = eval.fitness(x)?;
    let mut y = x.clone();
    y.flip(g);
    let f_g = eval.evaluate(&mut y)?;
    y.flip(h);
    let f_gh = eval.evaluate(&mut y)?;
    y.flip(g);
    let f_h = eval.evaluate(&mut y)?;
    Ok([f, f_g, f_h, f_gh])
}

/// Four-point additivity test at context `x`. Uses at most four evaluations.
pub fn nonlinearity_check(eval: &mut Evaluator<'_>, x: &mut Solution, g: usize, h: usize) -> Result<bool, Halt> {
    let [f, f_g, f_h, f_gh] = four_points(eval, x, g, h)?;
    Ok(nonlinear_pattern(f, f_g, f_h, f_gh))
}

/// Monotonicity test at context `x`. Uses at most four evaluations.
pub fn nonmonotonicity_check(eval: &mut Evaluator<'_>, x: &mut Solution, g: usize, h: usize) -> Result<bool, Halt> {
    let [f, f_g, f_h, f_gh] = four_points(eval, x, g, h)?;
    Ok(nonmonotone_pattern(f, f_g, f_h, f_gh))
}

/// Links `(g, h)` iff the check fires in at least one of the `2^n` contexts.
pub fn exhaustive_vig(objective: &dyn Objective, check: CheckKind) -> Result<Vig> {
    let n = objective.num_vars();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut eval = Evaluator::unlimited(objective);
    let table: Vec<f64> = (0..1u64 << n)
        .map(|i| {
            let mut s = Solution::from_index(i, n);
            eval.evaluate(&mut s).expect("unlimited budget")
        })
        .collect();
    let mut vig = Vig::new(n);
    for g in 0..n {
        for h in g + 1..n {
            let (bg, bh) = (1usize << g, 1usize << h);
            let fires =
                (0..table.len()).any(|x| check.pattern(table[x], table[x ^ bg], table[x ^ bh], table[x ^ bg ^ bh]));
            if fires {
                vig.add_edge(g, h);
            }
        }
    }
    Ok(vig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::FnObjective;
    use crate::problems::{generate_nk, ProblemInstance};
    use crate::rng::RngStream;
    use proptest::prelude::*;

    #[test]
    fn onemax_is_linear_everywhere() {
        let p = ProblemInstance::onemax(6);
        let mut eval = Evaluator::unlimited(&p);
        let mut rng = RngStream::new(1);
        for _ in 0..20 {
            let mut x = Solution::random(6, &mut rng);
            for g in 0..6 {
                for h in g + 1..6 {
                    assert!(!nonlinearity_check(&mut eval, &mut x, g, h).unwrap());
                }
            }
        }
    }

    #[test]
    fn squared_onemax_is_nonlinear_but_monotone() {
        let p = ProblemInstance::onemax_squared(5);
        let mut eval = Evaluator::unlimited(&p);
        let mut x = Solution::from_str_bits("01101").unwrap();
        for g in 0..5 {
            for h in g + 1..5 {
                assert!(nonlinearity_check(&mut eval, &mut x, g, h).unwrap());
                assert!(!nonmonotonicity_check(&mut eval, &mut x, g, h).unwrap());
            }
        }
    }

    #[test]
    fn xor_pair_is_nonlinear() {
        let f = FnObjective::new(2, |b: &[bool]| (b[0] ^ b[1]) as u8 as f64);
        let mut eval = Evaluator::unlimited(&f);
        for i in 0..4 {
            let mut x = Solution::from_index(i, 2);
            assert!(nonlinearity_check(&mut eval, &mut x, 0, 1).unwrap());
        }
    }

    #[test]
    fn check_costs_at_most_four_evaluations() {
        let p = ProblemInstance::fe4();
        let mut eval = Evaluator::unlimited(&p);
        let mut x = Solution::zeros(9);
        nonmonotonicity_check(&mut eval, &mut x, 0, 1).unwrap();
        assert_eq!(eval.used(), 4);
        nonmonotonicity_check(&mut eval, &mut x, 0, 2).unwrap();
        assert_eq!(eval.used(), 7);
        assert_eq!(x.bits(), Solution::zeros(9).bits());
        assert_eq!(x.fitness(), Some(27.0));
    }

    #[test]
    fn budget_exhaustion_propagates() {
        let p = ProblemInstance::fe4();
        let mut eval = Evaluator::new(&p, crate::eval::EvalBudget::new(2));
        let mut x = Solution::zeros(9);
        assert_eq!(nonlinearity_check(&mut eval, &mut x, 0, 1), Err(Halt::Exhausted));
    }

    #[test]
    fn nk_without_interactions_has_empty_linear_vig() {
        let p = generate_nk(8, 0, 4).unwrap();
        assert_eq!(exhaustive_vig(&p, CheckKind::NonLinear).unwrap().edge_count(), 0);
    }

    #[test]
    fn refuses_large_instances() {
        let p = ProblemInstance::onemax(25);
        assert!(matches!(
            exhaustive_vig(&p, CheckKind::NonLinear),
            Err(Error::TooLarge { .. })
        ));
    }

    proptest! {
        #[test]
        fn checks_are_symmetric(values in proptest::collection::vec(0u8..4, 32), g in 0usize..5, h in 0usize..5, ctx in 0u64..32) {
            prop_assume!(g != h);
            let table: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let f = FnObjective::new(5, move |b: &[bool]| table[crate::solution::bits_to_index(b) as usize]);
            let mut eval = Evaluator::unlimited(&f);
            let mut x = Solution::from_index(ctx, 5);
            let a = nonmonotonicity_check(&mut eval, &mut x, g, h).unwrap();
            let b = nonmonotonicity_check(&mut eval, &mut x, h, g).unwrap();
            prop_assert_eq!(a, b);
            let a = nonlinearity_check(&mut eval, &mut x, g, h).unwrap();
            let b = nonlinearity_check(&mut eval, &mut x, h, g).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
