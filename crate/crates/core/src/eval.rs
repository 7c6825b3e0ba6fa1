//! The fitness-evaluation gateway.
//!
//! All fitness values reach the optimizers through [`Evaluator::evaluate`],
//! which charges one evaluation per call against an [`EvalBudget`]. The
//! evaluator also records the best value seen and when it was first reached,
//! so the FFE at success is exact even if an operator keeps running briefly.

use thiserror::Error;

use crate::solution::Solution;
use crate::FITNESS_EPS;

/// An evaluable pseudo-boolean function.
pub trait Objective: Send + Sync {
    fn num_vars(&self) -> usize;
    fn value(&self, bits: &[bool]) -> f64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn num_vars(&self) -> usize {
        (**self).num_vars()
    }
    fn value(&self, bits: &[bool]) -> f64 {
        (**self).value(bits)
    }
}

/// Wraps a closure as an [`Objective`].
pub struct FnObjective<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> FnObjective<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnObjective { n, f }
    }
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> Objective for FnObjective<F> {
    fn num_vars(&self) -> usize {
        self.n
    }
    fn value(&self, bits: &[bool]) -> f64 {
        (self.f)(bits)
    }
}

/// Why an evaluation was refused. Both variants unwind the optimizer loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Halt {
    #[error("evaluation budget exhausted")]
    Exhausted,
    #[error("target fitness reached")]
    Solved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    used: u64,
    limit: u64,
}

impl EvalBudget {
    pub fn new(limit: u64) -> Self {
        EvalBudget { used: 0, limit }
    }

    pub fn unlimited() -> Self {
        EvalBudget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    pub fn is_exhausted(&self) -> bool {
        self.used >= self.limit
    }

    fn charge(&mut self) -> Result<(), Halt> {
        if self.used >= self.limit {
            return Err(Halt::Exhausted);
        }
        self.used += 1;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BestSoFar {
    pub fitness: f64,
    pub solution: Solution,
    /// Evaluation count at which `fitness` was first reached.
    pub ffe: u64,
}

pub struct Evaluator<'a> {
    objective: &'a dyn Objective,
    budget: EvalBudget,
    target: Option<f64>,
    solved_at: Option<u64>,
    best: Option<BestSoFar>,
    trace: Vec<(u64, f64)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn Objective, budget: EvalBudget) -> Self {
        Evaluator {
            objective,
            budget,
            target: None,
            solved_at: None,
            best: None,
            trace: Vec::new(),
        }
    }

    pub fn unlimited(objective: &'a dyn Objective) -> Self {
        Evaluator::new(objective, EvalBudget::unlimited())
    }

    /// Once a value within tolerance of `target` is evaluated, every later
    /// call returns [`Halt::Solved`].
    pub fn with_target(mut self, target: Option<f64>) -> Self {
        self.target = target;
        self
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }

    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    pub fn budget(&self) -> &EvalBudget {
        &self.budget
    }

    pub fn used(&self) -> u64 {
        self.budget.used()
    }

    pub fn best(&self) -> Option<&BestSoFar> {
        self.best.as_ref()
    }

    /// `(ffe, fitness)` at every improvement of the best-so-far value.
    pub fn trace(&self) -> &[(u64, f64)] {
        &self.trace
    }

    pub fn solved_at(&self) -> Option<u64> {
        self.solved_at
    }

    pub fn is_solved(&self) -> bool {
        self.solved_at.is_some()
    }

    /// Evaluates `s`, caches the value in it and charges one evaluation.
    pub fn evaluate(&mut self, s: &mut Solution) -> Result<f64, Halt> {
        assert_eq!(
            s.len(),
            self.objective.num_vars(),
            "solution length does not match the instance"
        );
        if self.solved_at.is_some() {
            return Err(Halt::Solved);
        }
        self.budget.charge()?;
        let value = self.objective.value(s.bits());
        s.set_fitness(value);
        self.observe(s, value);
        Ok(value)
    }

    /// Returns the cached fitness, evaluating only when the cache is empty.
    pub fn fitness(&mut self, s: &mut Solution) -> Result<f64, Halt> {
        match s.fitness() {
            Some(v) => Ok(v),
            None => self.evaluate(s),
        }
    }

    fn observe(&mut self, s: &Solution, value: f64) {
        let improved = match &self.best {
            None => true,
            Some(b) => value > b.fitness,
        };
        if improved {
            let ffe = self.budget.used();
            self.best = Some(BestSoFar {
                fitness: value,
                solution: s.clone(),
                ffe,
            });
            self.trace.push((ffe, value));
        }
        if let Some(t) = self.target {
            if self.solved_at.is_none() && value >= t - FITNESS_EPS {
                self.solved_at = Some(self.budget.used());
            }
        }
    }
}
