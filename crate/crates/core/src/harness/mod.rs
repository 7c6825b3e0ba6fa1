//! Experiment protocol: seeded run batteries, size sweeps, PX-mask share
//! instrumentation and CSV reporting.

mod config;

pub use config::{
    level_by_rule, ExperimentConfig, LevelSpec, NoiseSection, OptimizerSection, OutputSection, ProblemConfig,
    SeedSection, DEFAULT_LEVEL_RULE,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::optimizers::{optimize, RunOptions, RunResult};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "PXLT_WORKERS";

/// Worker pool sized by [`WORKERS_ENV`], or by rayon's default.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{WORKERS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(e.to_string()))
}

/// One seeded run, as written to CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub n: usize,
    pub variant: String,
    pub noise_percent: f64,
    pub seed: u64,
    pub success: bool,
    pub ffe_at_success: Option<u64>,
    pub evaluations: u64,
    pub best_fitness: Option<f64>,
    /// Percentage of applied masks that were PX masks.
    pub px_share: Option<f64>,
    /// Mean percentage of PX masks present in the PX-LTs of the run.
    pub px_tree_coverage: Option<f64>,
}

pub const CSV_HEADER: [&str; 11] = [
    "problem",
    "n",
    "variant",
    "noise_percent",
    "seed",
    "success",
    "ffe_at_success",
    "evaluations",
    "best_fitness",
    "px_share",
    "px_tree_coverage",
];

fn fixed(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| format!("{x:.6}"))
}

impl RunRecord {
    fn from_result(config: &ExperimentConfig, problem: &str, n: usize, r: &RunResult) -> Self {
        RunRecord {
            problem: problem.to_string(),
            n,
            variant: r.variant.to_string(),
            noise_percent: config.noise.size_percent,
            seed: r.seed,
            success: r.solved(),
            ffe_at_success: r.solved_at,
            evaluations: r.evaluations,
            best_fitness: r.best_fitness,
            px_share: r.px_share(),
            px_tree_coverage: r.px_tree_coverage,
        }
    }

    fn to_row(&self) -> [String; 11] {
        [
            self.problem.clone(),
            self.n.to_string(),
            self.variant.clone(),
            format!("{:.6}", self.noise_percent),
            self.seed.to_string(),
            (self.success as u8).to_string(),
            self.ffe_at_success.map_or(String::new(), |v| v.to_string()),
            self.evaluations.to_string(),
            fixed(self.best_fitness),
            fixed(self.px_share),
            fixed(self.px_tree_coverage),
        ]
    }

    fn from_row(row: &csv::StringRecord, path: &str, line: usize) -> Result<Self> {
        let field = |i: usize| row.get(i).unwrap_or("");
        let bad = |i: usize| Error::parse(path, line, i + 1, format!("bad value for {}", CSV_HEADER[i]));
        let opt_f = |i: usize| -> Result<Option<f64>> {
            match field(i) {
                "" => Ok(None),
                s => s.parse().map(Some).map_err(|_| bad(i)),
            }
        };
        Ok(RunRecord {
            problem: field(0).to_string(),
            n: field(1).parse().map_err(|_| bad(1))?,
            variant: field(2).to_string(),
            noise_percent: field(3).parse().map_err(|_| bad(3))?,
            seed: field(4).parse().map_err(|_| bad(4))?,
            success: match field(5) {
                "1" => true,
                "0" => false,
                _ => return Err(bad(5)),
            },
            ffe_at_success: match field(6) {
                "" => None,
                s => Some(s.parse().map_err(|_| bad(6))?),
            },
            evaluations: field(7).parse().map_err(|_| bad(7))?,
            best_fitness: opt_f(8)?,
            px_share: opt_f(9)?,
            px_tree_coverage: opt_f(10)?,
        })
    }
}

/// Serializes records with the fixed header and float precision.
pub fn records_to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_row())?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.display().to_string();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::parse(&name, 1, 1, "unexpected header"));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        out.push(RunRecord::from_row(&row?, &name, i + 2)?);
    }
    Ok(out)
}

fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("csv.partial");
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs every seed of `config` to success or budget exhaustion. Results
/// are in seed order whatever the scheduling. When an output path is
/// configured the CSV is written once, after all runs.
pub fn run(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let instance = config.instance()?;
    let pool = worker_pool()?;
    let options = RunOptions {
        pairs_per_flip: config.optimizer.pairs_per_flip,
        injected_dsm: None,
        track_px_share: config.optimizer.track_px_share,
    };
    let seeds = config.seeds.seeds();
    let results: Vec<RunResult> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                optimize(
                    &instance,
                    config.optimizer.variant,
                    config.optimizer.budget,
                    seed,
                    &options,
                )
            })
            .collect()
    });
    let records: Vec<RunRecord> = results
        .iter()
        .map(|r| RunRecord::from_result(config, instance.name(), instance.n(), r))
        .collect();
    if let Some(path) = &config.output.path {
        write_atomically(path, &records_to_csv(&records)?)?;
    }
    Ok(records)
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

pub fn success_rate(records: &[RunRecord]) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    records.iter().filter(|r| r.success).count() as f64 / records.len() as f64
}

/// Median evaluations-to-success over successful runs.
pub fn median_success_ffe(records: &[RunRecord]) -> Option<f64> {
    let mut v: Vec<f64> = records
        .iter()
        .filter_map(|r| r.ffe_at_success.map(|x| x as f64))
        .collect();
    median(&mut v)
}

/// Cross-seed median of the per-run PX-mask shares; `None` when no run
/// reported one.
pub fn px_mask_share(records: &[RunRecord]) -> Option<f64> {
    let mut v: Vec<f64> = records.iter().filter_map(|r| r.px_share).collect();
    median(&mut v)
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub n: usize,
    pub success_rate: f64,
    pub median_ffe: Option<f64>,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    pub threshold: f64,
    /// Largest size whose success rate meets the threshold.
    pub largest_passing: Option<usize>,
}

impl SweepReport {
    pub fn to_text(&self) -> String {
        let mut out = String::from("n\tsuccess\tmedian_ffe\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{}\t{:.3}\t{}",
                p.n,
                p.success_rate,
                p.median_ffe.map_or("-".to_string(), |v| format!("{v:.1}"))
            );
        }
        let _ = writeln!(
            out,
            "largest size with success >= {:.2}: {}",
            self.threshold,
            self.largest_passing.map_or("none".to_string(), |n| n.to_string())
        );
        out
    }
}

/// Runs the seed battery at every size. The output path, if any, receives
/// the records of all sizes.
pub fn sweep(config: &ExperimentConfig, sizes: &[usize], threshold: f64) -> Result<SweepReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("sweep sizes must be strictly ascending".into()));
    }
    let configs: Vec<ExperimentConfig> = sizes
        .iter()
        .map(|&n| {
            let mut c = config.with_size(n)?;
            c.output.path = None;
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    for (c, &n) in configs.iter().zip(sizes) {
        let records = run(c)?;
        points.push(SweepPoint {
            n,
            success_rate: success_rate(&records),
            median_ffe: median_success_ffe(&records),
            records,
        });
    }
    let largest_passing = points.iter().filter(|p| p.success_rate >= threshold).map(|p| p.n).max();
    if let Some(path) = &config.output.path {
        let all: Vec<RunRecord> = points.iter().flat_map(|p| p.records.iter().cloned()).collect();
        write_atomically(path, &records_to_csv(&all)?)?;
    }
    Ok(SweepReport {
        points,
        threshold,
        largest_passing,
    })
}

/// One row of the aggregated summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub n: usize,
    pub variant: String,
    pub noise_percent: f64,
    pub runs: usize,
    pub success_percent: f64,
    pub median_ffe: Option<f64>,
    pub px_share: Option<f64>,
}

/// Groups records by problem, size, optimizer and noise.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(String, usize, String, String), Vec<RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (
            r.problem.clone(),
            r.n,
            r.variant.clone(),
            format!("{:.6}", r.noise_percent),
        );
        groups.entry(key).or_default().push(r.clone());
    }
    groups
        .into_values()
        .map(|rs| SummaryRow {
            problem: rs[0].problem.clone(),
            n: rs[0].n,
            variant: rs[0].variant.clone(),
            noise_percent: rs[0].noise_percent,
            runs: rs.len(),
            success_percent: 100.0 * success_rate(&rs),
            median_ffe: median_success_ffe(&rs),
            px_share: px_mask_share(&rs),
        })
        .collect()
}

/// Reads result CSVs and renders two tab-separated tables: per-group
/// success and cost, and per problem/optimizer/noise the largest size
/// with at least `threshold` success.
pub fn analyze(paths: &[&Path], threshold: f64) -> Result<String> {
    let mut records = Vec::new();
    for p in paths {
        records.extend(read_records(p)?);
    }
    let rows = summarize(&records);
    let mut out = String::from("problem\tn\tvariant\tnoise\truns\topt_percent\tffe_median\tpx_share\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.0}\t{}\t{:.1}\t{}\t{}",
            r.problem,
            r.n,
            r.variant,
            r.noise_percent,
            r.runs,
            r.success_percent,
            r.median_ffe.map_or("-".to_string(), |v| format!("{v:.3e}")),
            r.px_share.map_or("-".to_string(), |v| format!("{v:.2}")),
        );
    }
    let mut best: BTreeMap<(String, String, String), Option<usize>> = BTreeMap::new();
    for r in &rows {
        let key = (r.problem.clone(), r.variant.clone(), format!("{:.0}", r.noise_percent));
        let slot = best.entry(key).or_insert(None);
        if r.success_percent >= 100.0 * threshold {
            *slot = Some(slot.map_or(r.n, |m: usize| m.max(r.n)));
        }
    }
    out.push_str("\nproblem\tvariant\tnoise\tlargest_passing_n\n");
    for ((problem, variant, noise), n) in best {
        let _ = writeln!(
            out,
            "{problem}\t{variant}\t{noise}\t{}",
            n.map_or("none".to_string(), |n| n.to_string())
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::Variant;

    fn small(variant: Variant) -> ExperimentConfig {
        let mut c = ExperimentConfig::blocks("trap-concat", 4, 0, 4, variant);
        c.optimizer.budget = 20_000;
        c.seeds.count = 4;
        c
    }

    #[test]
    fn zero_budget_fails_every_run() {
        let mut c = small(Variant::P3);
        c.optimizer.budget = 0;
        let records = run(&c).unwrap();
        assert_eq!(records.len(), 4);
        assert!(records.iter().all(|r| !r.success && r.evaluations == 0));
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(Variant::P3PxOmLTopWS);
        c.output.path = Some(dir.path().join("a.csv"));
        run(&c).unwrap();
        c.output.path = Some(dir.path().join("b.csv"));
        run(&c).unwrap();
        let a = std::fs::read(dir.path().join("a.csv")).unwrap();
        let b = std::fs::read(dir.path().join("b.csv")).unwrap();
        assert_eq!(a, b);
        let back = read_records(&dir.path().join("a.csv")).unwrap();
        assert_eq!(back.len(), 4);
        assert!(back.iter().all(|r| r.success && r.ffe_at_success.unwrap() <= 20_000));
    }

    #[test]
    fn missing_file_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = small(Variant::P3);
        c.problem.kind = "ising-spin-glass".into();
        c.problem.path = Some(dir.path().join("missing.isg"));
        c.output.path = Some(dir.path().join("out.csv"));
        assert!(run(&c).is_err());
        assert!(!dir.path().join("out.csv").exists());
    }

    #[test]
    fn sweep_reports_largest_passing_size() {
        let c = small(Variant::P3);
        let report = sweep(&c, &[8, 16], 0.8).unwrap();
        assert_eq!(report.largest_passing, Some(16));
        let mut dead = small(Variant::P3);
        dead.optimizer.budget = 1;
        let report = sweep(&dead, &[8, 16], 0.8).unwrap();
        assert_eq!(report.largest_passing, None);
        assert!(sweep(&c, &[16, 8], 0.8).is_err());
    }

    #[test]
    fn share_median_and_analysis() {
        let rec = |seed: u64, share: Option<f64>, success: bool| RunRecord {
            problem: "dec5".into(),
            n: 50,
            variant: "p3".into(),
            noise_percent: 0.0,
            seed,
            success,
            ffe_at_success: success.then_some(100 * seed),
            evaluations: 1000,
            best_fitness: Some(50.0),
            px_share: share,
            px_tree_coverage: None,
        };
        let records = vec![rec(1, Some(10.0), true), rec(2, Some(30.0), true), rec(3, None, false)];
        assert_eq!(px_mask_share(&records), Some(20.0));
        assert_eq!(px_mask_share(&records[2..]), None);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, records_to_csv(&records).unwrap()).unwrap();
        let text = analyze(&[path.as_path()], 0.8).unwrap();
        assert!(text.contains("dec5\t50\tp3\t0\t3\t66.7\t1.500e2\t20.00"), "{text}");
        assert!(text.contains("dec5\tp3\t0\tnone"));
    }
}
