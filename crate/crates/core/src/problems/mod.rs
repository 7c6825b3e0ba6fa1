//! Benchmark problems and the instance type every optimizer evaluates.

pub mod blocks;
pub mod fixtures;
pub mod isg;
pub mod maxsat;
pub mod nk;

use std::fmt;
use std::path::Path;

pub use blocks::{
    bim, dec, evaluate_overlapping_product, evaluate_overlapping_sum, BlockFn, BlockProblem, Combine, OverlapLayout,
};
pub use isg::SpinGlass;
pub use maxsat::{Cnf, Literal};
pub use nk::NkLandscape;

use crate::dependency::Vig;
use crate::error::{Error, Result};
use crate::eval::Objective;
use crate::noise::NoiseConfig;
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    TrapConcat,
    CyclicTrap,
    BimodalConcat,
    BimodalCyclic,
    NkLandscape,
    IsingSpinGlass,
    Max3Sat,
    ExampleFixture,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::TrapConcat => "trap-concat",
            ProblemKind::CyclicTrap => "cyclic-trap",
            ProblemKind::BimodalConcat => "bimodal-concat",
            ProblemKind::BimodalCyclic => "bimodal-cyclic",
            ProblemKind::NkLandscape => "nk-landscape",
            ProblemKind::IsingSpinGlass => "ising-spin-glass",
            ProblemKind::Max3Sat => "max3sat",
            ProblemKind::ExampleFixture => "example-fixture",
        })
    }
}

#[derive(Debug, Clone)]
pub enum Function {
    Blocks(BlockProblem),
    Nk(NkLandscape),
    SpinGlass(SpinGlass),
    MaxSat(Cnf),
    OneMax(usize),
    OneMaxSquared(usize),
    Fe6,
}

impl Function {
    fn n(&self) -> usize {
        match self {
            Function::Blocks(p) => p.layout.n(),
            Function::Nk(p) => p.n(),
            Function::SpinGlass(p) => p.n(),
            Function::MaxSat(p) => p.n(),
            Function::OneMax(n) | Function::OneMaxSquared(n) => *n,
            Function::Fe6 => 8,
        }
    }

    fn value(&self, bits: &[bool]) -> f64 {
        match self {
            Function::Blocks(p) => p.value(bits),
            Function::Nk(p) => p.value(bits),
            Function::SpinGlass(p) => p.value(bits),
            Function::MaxSat(p) => p.value(bits),
            Function::OneMax(_) => fixtures::onemax(bits),
            Function::OneMaxSquared(_) => fixtures::onemax_squared(bits),
            Function::Fe6 => fixtures::fe6(bits),
        }
    }
}

/// An immutable, evaluable problem instance, optionally wrapped in noise.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    name: String,
    kind: ProblemKind,
    function: Function,
    noise: Option<NoiseConfig>,
    known_optimum: Option<f64>,
    ground_truth_vig: Option<Vig>,
}

impl ProblemInstance {
    pub fn new(name: impl Into<String>, kind: ProblemKind, function: Function) -> Self {
        ProblemInstance {
            name: name.into(),
            kind,
            function,
            noise: None,
            known_optimum: None,
            ground_truth_vig: None,
        }
    }

    pub fn with_optimum(mut self, optimum: Option<f64>) -> Self {
        self.known_optimum = optimum;
        self
    }

    pub fn with_vig(mut self, vig: Option<Vig>) -> Self {
        self.ground_truth_vig = vig;
        self
    }

    /// Wraps the instance in noise. The ground-truth VIG and the known
    /// optimum stay those of the undisturbed function.
    pub fn with_noise(mut self, noise: NoiseConfig) -> Self {
        assert!(
            noise.noise_vars().iter().all(|&i| i < self.n()),
            "noise variables out of range"
        );
        self.noise = Some(noise);
        self
    }

    pub fn without_noise(&self) -> Self {
        let mut p = self.clone();
        p.noise = None;
        p
    }

    fn blocks(name: String, kind: ProblemKind, p: BlockProblem) -> Self {
        let opt = p.optimum();
        let vig = p.layout.vig();
        ProblemInstance::new(name, kind, Function::Blocks(p))
            .with_optimum(Some(opt))
            .with_vig(Some(vig))
    }

    /// `blocks` disjoint `dec_order` traps.
    pub fn trap_concat(order: usize, blocks: usize) -> Result<Self> {
        let layout = OverlapLayout::regular(order, 0, blocks, false)?;
        Ok(Self::blocks(
            format!("dec{order}"),
            ProblemKind::TrapConcat,
            BlockProblem {
                layout,
                base: BlockFn::Dec(order),
                combine: Combine::Sum,
            },
        ))
    }

    pub fn cyclic_trap(order: usize, overlap: usize, blocks: usize) -> Result<Self> {
        let layout = OverlapLayout::regular(order, overlap, blocks, true)?;
        Ok(Self::blocks(
            format!("dec{order}o{overlap}"),
            ProblemKind::CyclicTrap,
            BlockProblem {
                layout,
                base: BlockFn::Dec(order),
                combine: Combine::Sum,
            },
        ))
    }

    pub fn bimodal_concat(order: usize, blocks: usize) -> Result<Self> {
        check_even(order)?;
        let layout = OverlapLayout::regular(order, 0, blocks, false)?;
        Ok(Self::blocks(
            format!("bim{order}"),
            ProblemKind::BimodalConcat,
            BlockProblem {
                layout,
                base: BlockFn::Bim(order),
                combine: Combine::Sum,
            },
        ))
    }

    pub fn bimodal_cyclic(order: usize, overlap: usize, blocks: usize) -> Result<Self> {
        check_even(order)?;
        let layout = OverlapLayout::regular(order, overlap, blocks, true)?;
        Ok(Self::blocks(
            format!("bim{order}o{overlap}"),
            ProblemKind::BimodalCyclic,
            BlockProblem {
                layout,
                base: BlockFn::Bim(order),
                combine: Combine::Sum,
            },
        ))
    }

    pub fn nk(landscape: NkLandscape) -> Self {
        let vig = landscape.vig();
        ProblemInstance::new(
            format!("nk{}k{}", landscape.n(), landscape.k()),
            ProblemKind::NkLandscape,
            Function::Nk(landscape),
        )
        .with_vig(Some(vig))
    }

    pub fn spin_glass(glass: SpinGlass) -> Self {
        let vig = glass.vig();
        ProblemInstance::new(
            format!("isg{}", glass.n()),
            ProblemKind::IsingSpinGlass,
            Function::SpinGlass(glass),
        )
        .with_vig(Some(vig))
    }

    pub fn max3sat(cnf: Cnf, optimum: Option<f64>) -> Self {
        let vig = cnf.vig();
        ProblemInstance::new(format!("m3s{}", cnf.n()), ProblemKind::Max3Sat, Function::MaxSat(cnf))
            .with_optimum(optimum)
            .with_vig(Some(vig))
    }

    /// Planted random 3-SAT; the optimum is the clause count.
    pub fn planted_max3sat(n: usize, clause_ratio: f64, seed: u64) -> Result<Self> {
        let (cnf, _) = Cnf::planted(n, clause_ratio, seed)?;
        let m = cnf.clauses().len() as f64;
        Ok(Self::max3sat(cnf, Some(m)))
    }

    pub fn fe1() -> Self {
        Self::blocks("fe1".into(), ProblemKind::ExampleFixture, fixtures::fe1())
    }

    pub fn fe4() -> Self {
        Self::blocks("fe4".into(), ProblemKind::ExampleFixture, fixtures::fe4())
    }

    pub fn onemax(n: usize) -> Self {
        ProblemInstance::new("onemax", ProblemKind::ExampleFixture, Function::OneMax(n))
            .with_optimum(Some(n as f64))
            .with_vig(Some(Vig::new(n)))
    }

    /// Squared onemax. Its non-monotonic VIG is empty.
    pub fn onemax_squared(n: usize) -> Self {
        ProblemInstance::new("onemax2", ProblemKind::ExampleFixture, Function::OneMaxSquared(n))
            .with_optimum(Some((n * n) as f64))
            .with_vig(Some(Vig::new(n)))
    }

    pub fn fe6() -> Self {
        ProblemInstance::new("fe6", ProblemKind::ExampleFixture, Function::Fe6).with_optimum(Some(8.0))
    }

    pub fn dec3_ring() -> Self {
        Self::blocks("dec3ring".into(), ProblemKind::ExampleFixture, fixtures::dec3_ring())
    }

    pub fn dec4_ring() -> Self {
        Self::blocks("dec4ring".into(), ProblemKind::ExampleFixture, fixtures::dec4_ring())
    }

    /// Looks up a fixture by name: `fe1`, `fe3`, `fe4`, `fe6`, `dec3-ring`,
    /// `dec4-ring`, `onemax:<n>`, `onemax2:<n>`.
    pub fn fixture(name: &str) -> Result<Self> {
        let (base, arg) = match name.split_once(':') {
            Some((b, a)) => (b, Some(a)),
            None => (name, None),
        };
        let size = |default: usize| -> Result<usize> {
            arg.map_or(Ok(default), |a| {
                a.parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad fixture size '{a}'")))
            })
        };
        match base {
            "fe1" => Ok(Self::fe1()),
            "fe2" | "onemax" => Ok(Self::onemax(size(9)?)),
            "fe3" | "onemax2" => Ok(Self::onemax_squared(size(9)?)),
            "fe4" => Ok(Self::fe4()),
            "fe6" => Ok(Self::fe6()),
            "dec3-ring" => Ok(Self::dec3_ring()),
            "dec4-ring" => Ok(Self::dec4_ring()),
            other => Err(Error::InvalidParameter(format!("unknown fixture '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn function(&self) -> &Function {
        &self.function
    }

    pub fn n(&self) -> usize {
        self.function.n()
    }

    pub fn noise(&self) -> Option<&NoiseConfig> {
        self.noise.as_ref()
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    pub fn ground_truth_vig(&self) -> Option<&Vig> {
        self.ground_truth_vig.as_ref()
    }

    /// The undisturbed function value.
    pub fn true_value(&self, bits: &[bool]) -> f64 {
        self.function.value(bits)
    }

    /// Fills in the optimum by enumeration when it is unknown and `n <= limit`.
    pub fn with_enumerated_optimum(mut self, limit: usize) -> Self {
        if self.known_optimum.is_none() && self.n() <= limit.min(24) {
            let n = self.n();
            let best = (0..1u64 << n)
                .map(|i| self.true_value(Solution::from_index(i, n).bits()))
                .fold(f64::NEG_INFINITY, f64::max);
            self.known_optimum = Some(best);
        }
        self
    }
}

impl Objective for ProblemInstance {
    fn num_vars(&self) -> usize {
        self.n()
    }

    fn value(&self, bits: &[bool]) -> f64 {
        let f_true = self.function.value(bits);
        match &self.noise {
            Some(cfg) => cfg.apply(f_true, bits),
            None => f_true,
        }
    }
}

fn check_even(order: usize) -> Result<()> {
    if !order.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "bimodal order must be even, got {order}"
        )));
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// NK-landscape with `k` random neighbours per position, drawn from `seed`.
pub fn generate_nk(n: usize, k: usize, seed: u64) -> Result<ProblemInstance> {
    Ok(ProblemInstance::nk(NkLandscape::generate(n, k, seed)?))
}

pub fn load_nk(path: &Path) -> Result<ProblemInstance> {
    let text = read(path)?;
    Ok(ProblemInstance::nk(NkLandscape::parse(
        &text,
        &path.display().to_string(),
    )?))
}

pub fn load_isg(path: &Path) -> Result<ProblemInstance> {
    let text = read(path)?;
    Ok(ProblemInstance::spin_glass(SpinGlass::parse(
        &text,
        &path.display().to_string(),
    )?))
}

/// Loads a DIMACS CNF. The optimum is unknown unless supplied separately.
pub fn load_max3sat(path: &Path) -> Result<ProblemInstance> {
    let text = read(path)?;
    Ok(ProblemInstance::max3sat(
        Cnf::parse_dimacs(&text, &path.display().to_string())?,
        None,
    ))
}
