use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pxlt_core::harness::{analyze, run, sweep, ExperimentConfig, LevelSpec};
use pxlt_core::optimizers::Variant;
use pxlt_core::oracle::{
    enumerate_local_optima, fihc_endpoint_distribution, hybrid_presence_population_size, theoretical_dsm, EndpointMode,
    HybridTarget,
};
use pxlt_core::problems::ProblemInstance;
use pxlt_core::sll::{build_lt, is_perfect};
use pxlt_core::{Result, RngStream};

#[derive(Parser)]
#[command(name = "pxlt", version, about = "Linkage-learning optimizers and their oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    budget: Option<u64>,
    /// Number of seeds, starting at the configured first seed.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    noise_percent: Option<f64>,
    #[arg(long)]
    noise_level: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Overrides {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::load(&self.config)?;
        if let Some(v) = self.variant {
            c.optimizer.variant = v;
        }
        if let Some(b) = self.budget {
            c.optimizer.budget = b;
        }
        if let Some(s) = self.seeds {
            c.seeds.count = s;
            c.seeds.list = None;
        }
        if let Some(p) = self.noise_percent {
            c.noise.size_percent = p;
        }
        if let Some(l) = self.noise_level {
            c.noise.level = Some(LevelSpec::Value(l));
        }
        if let Some(o) = &self.output {
            c.output.path = Some(o.clone());
        }
        Ok(c)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    One,
    Two,
    AllThree,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// All solutions without a strictly improving single flip.
    LocalOptima {
        #[arg(long)]
        fixture: String,
    },
    /// Hill-climber endpoint probabilities and the matrix they induce.
    Endpoints {
        #[arg(long)]
        fixture: String,
        /// Monte Carlo samples; exact propagation when omitted.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Smallest population holding fixed hybrid optima with a given
    /// confidence.
    Hybrid {
        #[arg(long)]
        ph: f64,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        #[arg(long, value_enum, default_value = "one")]
        target: Target,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Run the seed battery of a configuration.
    Run(Overrides),
    /// Run the battery at several sizes and report the largest passing one.
    Sweep {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Aggregate result CSVs into summary tables.
    Analyze {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
}

fn oracle(cmd: OracleCommand) -> Result<()> {
    match cmd {
        OracleCommand::LocalOptima { fixture } => {
            let p = ProblemInstance::fixture(&fixture)?;
            for s in enumerate_local_optima(&p)? {
                println!("{s}\t{}", p.true_value(s.bits()));
            }
        }
        OracleCommand::Endpoints { fixture, samples, seed } => {
            let p = ProblemInstance::fixture(&fixture)?;
            let mode = samples.map_or(EndpointMode::Exhaustive, |samples| EndpointMode::MonteCarlo { samples });
            let dist = fihc_endpoint_distribution(&p, mode, &RngStream::new(seed))?;
            for (s, q) in dist.endpoints() {
                println!("{s}\t{q:.9}");
            }
            let dsm = theoretical_dsm(&dist);
            println!("\n{}", dsm.to_text());
            if let Some(vig) = p.ground_truth_vig() {
                match is_perfect(&dsm, vig) {
                    Some(t) => println!("perfect with threshold {t:.6}"),
                    None => println!("not perfect"),
                }
            }
            print!("\n{}", build_lt(&dsm).to_text());
        }
        OracleCommand::Hybrid { ph, confidence, target } => {
            let target = match target {
                Target::One => HybridTarget::One,
                Target::Two => HybridTarget::Two,
                Target::AllThree => HybridTarget::AllThree,
            };
            println!("{}", hybrid_presence_population_size(ph, confidence, target)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(o) => o.load().and_then(|c| {
            let records = run(&c)?;
            let solved = records.iter().filter(|r| r.success).count();
            eprintln!("{solved}/{} runs reached the optimum", records.len());
            if c.output.path.is_none() {
                print!("{}", pxlt_core::harness::records_to_csv(&records)?);
            }
            Ok(())
        }),
        Command::Sweep {
            overrides,
            sizes,
            threshold,
        } => overrides.load().and_then(|c| {
            print!("{}", sweep(&c, &sizes, threshold)?.to_text());
            Ok(())
        }),
        Command::Oracle(cmd) => oracle(cmd),
        Command::Analyze { files, threshold } => {
            let paths: Vec<&std::path::Path> = files.iter().map(|p| p.as_path()).collect();
            analyze(&paths, threshold).map(|t| print!("{t}"))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
