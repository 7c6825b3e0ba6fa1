use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseConfig;
use crate::optimizers::Variant;
use crate::problems::{generate_nk, load_isg, load_max3sat, load_nk, Function, ProblemInstance, SpinGlass};
use crate::rng::RngStream;

/// A complete, replayable experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub noise: NoiseSection,
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// `trap-concat`, `cyclic-trap`, `bimodal-concat`, `bimodal-cyclic`,
    /// `nk-landscape`, `ising-spin-glass`, `max3sat` or `example-fixture`.
    pub kind: String,
    pub order: Option<usize>,
    pub overlap: Option<usize>,
    pub blocks: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub side: Option<usize>,
    pub clause_ratio: Option<f64>,
    pub seed: Option<u64>,
    pub path: Option<PathBuf>,
    pub name: Option<String>,
}

/// `level` is a number, `"midpoint"` (between the optimum and the
/// deceptive attractor) or `"random-mean"` (mean fitness of uniformly
/// random solutions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelSpec {
    Value(f64),
    Rule(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub size_percent: f64,
    pub level: Option<LevelSpec>,
    #[serde(default = "default_modulus")]
    pub modulus: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_modulus() -> u32 {
    2
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            size_percent: 0.0,
            level: None,
            modulus: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub variant: Variant,
    #[serde(default = "default_budget")]
    pub budget: u64,
    pub pairs_per_flip: Option<usize>,
    #[serde(default = "yes")]
    pub track_px_share: bool,
}

fn default_budget() -> u64 {
    1_000_000
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    #[serde(default = "default_seed_count")]
    pub count: u64,
    #[serde(default)]
    pub first: u64,
    pub list: Option<Vec<u64>>,
}

fn default_seed_count() -> u64 {
    30
}

impl Default for SeedSection {
    fn default() -> Self {
        SeedSection {
            count: 30,
            first: 0,
            list: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
}

impl SeedSection {
    pub fn seeds(&self) -> Vec<u64> {
        match &self.list {
            Some(list) => list.clone(),
            None => (self.first..self.first + self.count).collect(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// A minimal configuration for a block problem.
    pub fn blocks(kind: &str, order: usize, overlap: usize, blocks: usize, variant: Variant) -> Self {
        ExperimentConfig {
            problem: ProblemConfig {
                kind: kind.to_string(),
                order: Some(order),
                overlap: Some(overlap),
                blocks: Some(blocks),
                n: None,
                k: None,
                side: None,
                clause_ratio: None,
                seed: None,
                path: None,
                name: None,
            },
            noise: NoiseSection::default(),
            optimizer: OptimizerSection {
                variant,
                budget: default_budget(),
                pairs_per_flip: None,
                track_px_share: true,
            },
            seeds: SeedSection::default(),
            output: OutputSection::default(),
        }
    }

    /// Builds the (possibly noised) instance this configuration describes.
    pub fn instance(&self) -> Result<ProblemInstance> {
        let base = self.problem.instance()?;
        let noise = &self.noise;
        if noise.size_percent == 0.0 {
            return Ok(base);
        }
        let level = match &noise.level {
            Some(LevelSpec::Value(v)) => *v,
            Some(LevelSpec::Rule(rule)) => level_by_rule(&base, rule, noise.seed)?,
            None => level_by_rule(&base, DEFAULT_LEVEL_RULE, noise.seed)?,
        };
        let cfg = NoiseConfig::draw(base.n(), noise.size_percent, level, noise.modulus, noise.seed)?;
        Ok(base.with_noise(cfg))
    }

    /// A copy resized to `n` variables; block problems derive their block
    /// count from it.
    pub fn with_size(&self, n: usize) -> Result<Self> {
        let mut c = self.clone();
        let p = &mut c.problem;
        match p.kind.as_str() {
            "trap-concat" | "bimodal-concat" | "cyclic-trap" | "bimodal-cyclic" => {
                let k = need(p.order, "order")?;
                let o = if p.kind.ends_with("concat") {
                    0
                } else {
                    need(p.overlap, "overlap")?
                };
                let step = k
                    .checked_sub(o)
                    .filter(|&s| s > 0)
                    .ok_or_else(|| Error::Config("overlap must be below order".into()))?;
                if !n.is_multiple_of(step) {
                    return Err(Error::Config(format!("size {n} is not a multiple of {step}")));
                }
                p.blocks = Some(n / step);
            }
            "nk-landscape" => p.n = Some(n),
            "max3sat" if p.path.is_none() => p.n = Some(n),
            "example-fixture" if matches!(p.name.as_deref(), Some("onemax" | "onemax2" | "fe2" | "fe3")) => {
                p.n = Some(n)
            }
            other => return Err(Error::Config(format!("problem kind '{other}' cannot be resized"))),
        }
        Ok(c)
    }
}

/// Rule used when no noise level is configured.
pub const DEFAULT_LEVEL_RULE: &str = "random-mean";

fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("problem.{key} is required")))
}

/// Resolves a named noise level rule for `instance`.
pub fn level_by_rule(instance: &ProblemInstance, rule: &str, seed: u64) -> Result<f64> {
    match rule {
        "midpoint" => match (instance.function(), instance.known_optimum()) {
            (Function::Blocks(p), Some(opt)) => Ok((opt + p.attractor_value()) / 2.0),
            _ => Err(Error::Config(
                "the midpoint level needs a block problem; set noise.level".into(),
            )),
        },
        "random-mean" => {
            let mut rng = RngStream::new(seed).child_named("noise-level");
            let samples = 4096;
            let n = instance.n();
            let total: f64 = (0..samples)
                .map(|_| {
                    let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                    instance.true_value(&bits)
                })
                .sum();
            Ok(total / samples as f64)
        }
        other => Err(Error::Config(format!("unknown noise level rule '{other}'"))),
    }
}

impl ProblemConfig {
    pub fn instance(&self) -> Result<ProblemInstance> {
        let k = self.kind.as_str();
        let path = || {
            self.path
                .as_deref()
                .ok_or_else(|| Error::Config("problem.path is required".into()))
        };
        let inst = match k {
            "trap-concat" => ProblemInstance::trap_concat(need(self.order, "order")?, need(self.blocks, "blocks")?)?,
            "bimodal-concat" => {
                ProblemInstance::bimodal_concat(need(self.order, "order")?, need(self.blocks, "blocks")?)?
            }
            "cyclic-trap" => ProblemInstance::cyclic_trap(
                need(self.order, "order")?,
                need(self.overlap, "overlap")?,
                need(self.blocks, "blocks")?,
            )?,
            "bimodal-cyclic" => ProblemInstance::bimodal_cyclic(
                need(self.order, "order")?,
                need(self.overlap, "overlap")?,
                need(self.blocks, "blocks")?,
            )?,
            "nk-landscape" => match &self.path {
                Some(p) => load_nk(p)?,
                None => generate_nk(need(self.n, "n")?, need(self.k, "k")?, self.seed.unwrap_or(0))?,
            },
            "ising-spin-glass" => match &self.path {
                Some(p) => load_isg(p)?,
                None => {
                    ProblemInstance::spin_glass(SpinGlass::generate(need(self.side, "side")?, self.seed.unwrap_or(0))?)
                }
            },
            "max3sat" => match &self.path {
                Some(_) => load_max3sat(path()?)?,
                None => ProblemInstance::planted_max3sat(
                    need(self.n, "n")?,
                    self.clause_ratio.unwrap_or(4.27),
                    self.seed.unwrap_or(0),
                )?,
            },
            "example-fixture" => {
                let name = self
                    .name
                    .as_deref()
                    .ok_or_else(|| Error::Config("problem.name is required".into()))?;
                match self.n {
                    Some(n) => ProblemInstance::fixture(&format!("{name}:{n}"))?,
                    None => ProblemInstance::fixture(name)?,
                }
            }
            other => return Err(Error::Config(format!("unknown problem kind '{other}'"))),
        };
        Ok(inst.with_enumerated_optimum(20))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[problem]
kind = "cyclic-trap"
order = 5
overlap = 1
blocks = 10

[noise]
size_percent = 50
level = 12.5
seed = 3

[optimizer]
variant = "p3-px-om-ltopws"
budget = 100000

[seeds]
count = 4
first = 10
"#;

    #[test]
    fn parses_and_builds() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.optimizer.variant, Variant::P3PxOmLTopWS);
        assert_eq!(c.seeds.seeds(), vec![10, 11, 12, 13]);
        let inst = c.instance().unwrap();
        assert_eq!(inst.n(), 40);
        assert_eq!(inst.noise().unwrap().size(), 20);
        assert_eq!(inst.noise().unwrap().level(), 12.5);
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_kinds() {
        assert!(ExperimentConfig::parse(&SAMPLE.replace("budget", "budgett")).is_err());
        let c = ExperimentConfig::parse(&SAMPLE.replace("cyclic-trap", "mystery")).unwrap();
        assert!(c.instance().is_err());
        assert!(ExperimentConfig::parse(&SAMPLE.replace("p3-px-om-ltopws", "p9")).is_err());
    }

    #[test]
    fn level_rules() {
        let c = ExperimentConfig::parse(&SAMPLE.replace("level = 12.5", "level = \"midpoint\"")).unwrap();
        // optimum 50, all-zeros 40
        assert_eq!(c.instance().unwrap().noise().unwrap().level(), (50.0 + 40.0) / 2.0);
        let c = ExperimentConfig::parse(&SAMPLE.replace("level = 12.5\n", "")).unwrap();
        let level = c.instance().unwrap().noise().unwrap().level();
        assert!(level > 10.0 && level < 25.0, "{level}");
    }

    #[test]
    fn resizing() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.with_size(60).unwrap().instance().unwrap().n(), 60);
        assert!(c.with_size(61).is_err());
    }

    #[test]
    fn missing_instance_file_is_an_error() {
        let mut c = ExperimentConfig::parse(SAMPLE).unwrap();
        c.problem.kind = "max3sat".into();
        c.problem.path = Some("/nonexistent/x.cnf".into());
        assert!(matches!(c.instance(), Err(Error::Io { .. })));
    }
}
