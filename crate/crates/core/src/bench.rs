//! Experiment harness: batch runs, aggregation, latency probes and the
//! files the CLI writes.
//!
//! Every (problem, repeat) pair is an independent job with its own policy
//! instance. Stochastic policies seed from `(seed, problem id, repeat)`, so
//! results do not depend on how jobs are spread over worker threads.
//!
//! Output files of `bench`:
//!
//! * `raw.csv`: one row per run. Outcome columns only, so the file is
//!   byte-identical across reruns.
//! * `timing.csv`: decision wall time per run, keyed like `raw.csv`.
//! * `aggregate.csv`: one row per (test set, scheduler).
//! * `latency.csv`: colony decision time versus queue size.
//! * `<set>_miss_ratio.svg`, `<set>_throughput.svg`, `latency.svg`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aco::{self, AcoParams, AcoPolicy, PheromoneAudit};
use crate::baselines::Baseline;
use crate::disk::{DiskGeometry, HeadState};
use crate::error::{Error, Result};
use crate::oracle;
use crate::plot;
use crate::policy::PolicyKind;
use crate::seed;
use crate::sim::{self, RunOutput};
use crate::units::{MS_PER_SECOND, THROUGHPUT_UNIT_BPS};
use crate::workload::{self, Problem, TestSet, WorkloadSpec};

/// Column order of the `run` CSV.
pub const RUN_COLUMNS: [&str; 10] = [
    "problem_id",
    "scheduler",
    "repeat",
    "miss_count",
    "total_tasks",
    "miss_ratio",
    "completed_bytes",
    "makespan_ms",
    "throughput_bps",
    "mean_decision_ms",
];

pub const DEFAULT_BENCH_PROBLEMS: usize = 100;
pub const DEFAULT_REPEATS: u32 = 100;
pub const DEFAULT_LATENCY_SIZES: [usize; 5] = [10, 20, 30, 40, 50];
pub const DEFAULT_LATENCY_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub problem_id: u32,
    pub scheduler: String,
    pub repeat: u32,
    pub miss_count: usize,
    pub total_tasks: usize,
    pub miss_ratio: f64,
    pub completed_bytes: u64,
    pub makespan_ms: f64,
    pub throughput_bps: f64,
    pub mean_decision_ms: f64,
}

/// One finished run with the diagnostics the CSV does not carry.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub row: RunRow,
    pub picks: usize,
    pub pheromone: Option<PheromoneAudit>,
}

#[derive(Clone, Debug)]
pub struct RunSettings {
    pub geometry: DiskGeometry,
    pub aco: AcoParams,
    /// Repeats per problem for stochastic policies; deterministic ones run
    /// once.
    pub repeats: u32,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            geometry: DiskGeometry::default(),
            aco: AcoParams::default(),
            repeats: DEFAULT_REPEATS,
            seed: 0,
            threads: 0,
        }
    }
}

pub fn run_seed(seed: u64, problem_id: u32, repeat: u32) -> u64 {
    seed::derive(&[seed, u64::from(problem_id), u64::from(repeat)])
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs one policy over one problem, auditing the run's safety properties.
pub fn run_one(
    problem: &Problem,
    kind: PolicyKind,
    repeat: u32,
    settings: &RunSettings,
) -> Result<RunResult> {
    let (output, pheromone): (RunOutput, _) = match kind {
        PolicyKind::Aco => {
            let params = AcoParams {
                seed: run_seed(settings.seed, problem.id, repeat),
                ..settings.aco.clone()
            };
            let mut policy = AcoPolicy::new(params)?;
            let output = sim::run(problem, &mut policy, &settings.geometry)?;
            (output, Some(policy.audit()))
        }
        PolicyKind::Baseline(b) => {
            let mut policy = Baseline::new(b);
            (sim::run(problem, &mut policy, &settings.geometry)?, None)
        }
    };
    sim::audit_run(problem, &output, &settings.geometry)?;
    let m = &output.metrics;
    Ok(RunResult {
        row: RunRow {
            problem_id: problem.id,
            scheduler: kind.name().to_string(),
            repeat,
            miss_count: m.miss_count,
            total_tasks: m.total_tasks,
            miss_ratio: m.miss_ratio(),
            completed_bytes: m.completed_bytes,
            makespan_ms: m.makespan,
            throughput_bps: m.throughput,
            mean_decision_ms: m.mean_decision_ms(),
        },
        picks: m.decision_times.len(),
        pheromone,
    })
}

/// Runs `kind` over every problem, `settings.repeats` times for stochastic
/// policies. Results come back ordered by (problem, repeat).
pub fn run_policy(
    problems: &[Problem],
    kind: PolicyKind,
    settings: &RunSettings,
) -> Result<Vec<RunResult>> {
    if settings.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let repeats = if kind.is_stochastic() { settings.repeats } else { 1 };
    let jobs: Vec<(&Problem, u32)> = problems
        .iter()
        .flat_map(|p| (0..repeats).map(move |r| (p, r)))
        .collect();
    with_pool(settings.threads, || {
        jobs.par_iter()
            .map(|&(problem, repeat)| run_one(problem, kind, repeat, settings))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn write_run_csv<W: Write>(rows: &[RunRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    if rows.is_empty() {
        out.write_record(RUN_COLUMNS)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_run_csv<R: std::io::Read>(reader: R) -> Result<Vec<RunRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub testset: String,
    pub scheduler: String,
    pub problems: usize,
    pub runs: usize,
    pub mean_miss_ratio: f64,
    pub std_miss_ratio: f64,
    pub mean_throughput_bps: f64,
    /// Throughput in 36 KB/s units.
    pub mean_throughput_units: f64,
    pub std_throughput_bps: f64,
    pub mean_makespan_ms: f64,
    pub mean_decision_ms: f64,
    pub median_decision_ms: f64,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn std_dev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// Exact means over run rows, one aggregate per scheduler in order of first
/// appearance.
pub fn aggregate(testset: &str, rows: &[RunRow]) -> Vec<AggregateRow> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&RunRow>> = BTreeMap::new();
    for row in rows {
        let key = row.scheduler.as_str();
        if !groups.contains_key(key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(row);
    }
    order
        .into_iter()
        .map(|scheduler| {
            let group = &groups[scheduler];
            let pick = |f: fn(&RunRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let miss = pick(|r| r.miss_ratio);
            let throughput = pick(|r| r.throughput_bps);
            let decision = pick(|r| r.mean_decision_ms);
            let mut problems: Vec<u32> = group.iter().map(|r| r.problem_id).collect();
            problems.sort_unstable();
            problems.dedup();
            AggregateRow {
                testset: testset.to_string(),
                scheduler: scheduler.to_string(),
                problems: problems.len(),
                runs: group.len(),
                mean_miss_ratio: mean(&miss),
                std_miss_ratio: std_dev(&miss),
                mean_throughput_bps: mean(&throughput),
                mean_throughput_units: mean(&throughput) / THROUGHPUT_UNIT_BPS,
                std_throughput_bps: std_dev(&throughput),
                mean_makespan_ms: mean(&pick(|r| r.makespan_ms)),
                mean_decision_ms: mean(&decision),
                median_decision_ms: median(&decision),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyPoint {
    pub queue_size: usize,
    pub samples: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub mean_iterations: f64,
}

/// Static queue used for latency probes: every request ready at time 0,
/// relative deadlines drawn from the workload's period range.
pub fn latency_queue(queue_size: usize, template: &WorkloadSpec, geometry: &DiskGeometry, sample: u32) -> Problem {
    let spec = WorkloadSpec {
        n_tasks: queue_size,
        ready_max: 0.0,
        n_problems: 1,
        seed: seed::derive(&[template.seed, queue_size as u64]),
        ..template.clone()
    };
    workload::generate_problem(&spec, geometry, sample)
}

/// Times single colony decisions on fresh static queues of each size. Runs
/// on the calling thread so probes do not compete with each other.
pub fn latency_curve(
    sizes: &[usize],
    samples: usize,
    template: &WorkloadSpec,
    geometry: &DiskGeometry,
    params: &AcoParams,
) -> Result<Vec<LatencyPoint>> {
    let mut points = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let mut times = Vec::with_capacity(samples);
        let mut iterations = 0usize;
        for sample in 0..samples as u32 {
            let queue = latency_queue(size, template, geometry, sample);
            let params = AcoParams {
                seed: seed::derive(&[params.seed, size as u64, u64::from(sample)]),
                ..params.clone()
            };
            let started = Instant::now();
            let decision = aco::decide(&queue.tasks, HeadState::default(), geometry, &params)?;
            times.push(started.elapsed().as_secs_f64() * MS_PER_SECOND);
            iterations += decision.map_or(0, |d| d.iterations);
        }
        points.push(LatencyPoint {
            queue_size: size,
            samples,
            mean_ms: mean(&times),
            median_ms: median(&times),
            mean_iterations: iterations as f64 / samples.max(1) as f64,
        });
    }
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub problem_id: u32,
    pub n_tasks: usize,
    pub oracle_fitness: f64,
    pub oracle_miss_count: usize,
    pub aco_fitness: f64,
    pub aco_miss_count: usize,
    pub ratio: f64,
}

/// Compares the colony's best-global fitness against the exhaustive optimum
/// on each problem, treated as a static queue at time 0 on cylinder 0.
/// With `truncate`, problems larger than the oracle limit keep their first
/// tasks; otherwise they are an error.
pub fn oracle_report(
    problems: &[Problem],
    geometry: &DiskGeometry,
    params: &AcoParams,
    truncate: bool,
) -> Result<Vec<OracleRow>> {
    problems
        .par_iter()
        .map(|problem| {
            let mut tasks = problem.tasks.clone();
            if truncate {
                tasks.truncate(oracle::MAX_ORACLE_TASKS);
            }
            let head = HeadState::default();
            let best = oracle::solve(&tasks, head, geometry)?;
            let params = AcoParams {
                seed: seed::derive(&[params.seed, u64::from(problem.id)]),
                ..params.clone()
            };
            let decision = aco::decide(&tasks, head, geometry, &params)?
                .expect("oracle accepted a non-empty queue");
            Ok(OracleRow {
                problem_id: problem.id,
                n_tasks: tasks.len(),
                oracle_fitness: best.best_fitness,
                oracle_miss_count: best.optimal_miss_count,
                aco_fitness: decision.best.fitness,
                aco_miss_count: decision.best.miss_count,
                ratio: decision.best.fitness / best.best_fitness,
            })
        })
        .collect()
}

pub fn write_oracle_csv<W: Write>(rows: &[OracleRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Where a bench workload comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum WorkloadSource {
    Builtin(TestSet),
    File(PathBuf),
}

impl WorkloadSource {
    pub fn label(&self) -> String {
        match self {
            WorkloadSource::Builtin(set) => set.name().to_string(),
            WorkloadSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "workload".into()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub workloads: Vec<WorkloadSource>,
    pub schedulers: Vec<PolicyKind>,
    pub problems: usize,
    pub period_min: f64,
    pub period_max: f64,
    pub out_dir: PathBuf,
    pub settings: RunSettings,
    pub latency_sizes: Vec<usize>,
    pub latency_samples: usize,
}

impl BenchConfig {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        BenchConfig {
            workloads: TestSet::ALL.map(WorkloadSource::Builtin).to_vec(),
            schedulers: PolicyKind::ALL.to_vec(),
            problems: DEFAULT_BENCH_PROBLEMS,
            period_min: workload::DEFAULT_PERIOD_MIN_MS,
            period_max: workload::DEFAULT_PERIOD_MAX_MS,
            out_dir: out_dir.into(),
            settings: RunSettings::default(),
            latency_sizes: DEFAULT_LATENCY_SIZES.to_vec(),
            latency_samples: DEFAULT_LATENCY_SAMPLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedulers.is_empty() {
            return Err(Error::Config("at least one scheduler is required".into()));
        }
        if self.workloads.is_empty() {
            return Err(Error::Config("at least one workload is required".into()));
        }
        if self.settings.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        self.settings.geometry.validate()?;
        self.settings.aco.validate()
    }

    fn spec_for(&self, set: TestSet) -> WorkloadSpec {
        WorkloadSpec {
            n_problems: self.problems,
            period_min: self.period_min,
            period_max: self.period_max,
            seed: self.settings.seed,
            ..WorkloadSpec::builtin(set)
        }
    }

    fn load(&self, source: &WorkloadSource) -> Result<Vec<Problem>> {
        match source {
            WorkloadSource::Builtin(set) => {
                workload::generate(&self.spec_for(*set), &self.settings.geometry)
            }
            WorkloadSource::File(path) => workload::load(path),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct RawRow<'a> {
    testset: &'a str,
    problem_id: u32,
    scheduler: &'a str,
    repeat: u32,
    miss_count: usize,
    total_tasks: usize,
    miss_ratio: f64,
    completed_bytes: u64,
    makespan_ms: f64,
    throughput_bps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct TimingRow<'a> {
    testset: &'a str,
    problem_id: u32,
    scheduler: &'a str,
    repeat: u32,
    picks: usize,
    mean_decision_ms: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub aggregates: Vec<AggregateRow>,
    pub latency: Vec<LatencyPoint>,
    /// `(workload, scheduler, error)` for every sub-run that failed.
    pub failures: Vec<(String, String, String)>,
    pub files: Vec<PathBuf>,
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    files.push(path.to_path_buf());
    Ok(())
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let out = &config.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let mut report = BenchReport::default();
    let raw_path = out.join("raw.csv");
    let timing_path = out.join("timing.csv");
    let mut raw = csv::Writer::from_writer(create(&raw_path)?);
    let mut timing = csv::Writer::from_writer(create(&timing_path)?);

    for source in &config.workloads {
        let label = source.label();
        let problems = config.load(source)?;
        let mut rows = Vec::new();
        for &kind in &config.schedulers {
            match run_policy(&problems, kind, &config.settings) {
                Ok(results) => {
                    for r in results {
                        let row = &r.row;
                        raw.serialize(RawRow {
                            testset: &label,
                            problem_id: row.problem_id,
                            scheduler: &row.scheduler,
                            repeat: row.repeat,
                            miss_count: row.miss_count,
                            total_tasks: row.total_tasks,
                            miss_ratio: row.miss_ratio,
                            completed_bytes: row.completed_bytes,
                            makespan_ms: row.makespan_ms,
                            throughput_bps: row.throughput_bps,
                        })?;
                        timing.serialize(TimingRow {
                            testset: &label,
                            problem_id: row.problem_id,
                            scheduler: &row.scheduler,
                            repeat: row.repeat,
                            picks: r.picks,
                            mean_decision_ms: row.mean_decision_ms,
                        })?;
                        rows.push(r.row);
                    }
                }
                Err(e) => report
                    .failures
                    .push((label.clone(), kind.name().to_string(), e.to_string())),
            }
        }
        let aggregates = aggregate(&label, &rows);
        let bars = |f: fn(&AggregateRow) -> f64| -> Vec<(String, f64)> {
            aggregates.iter().map(|a| (a.scheduler.clone(), f(a))).collect()
        };
        write_text(
            &out.join(format!("{label}_miss_ratio.svg")),
            &plot::bar_chart(
                &format!("Average miss ratio ({label})"),
                "miss ratio",
                &bars(|a| a.mean_miss_ratio),
            ),
            &mut report.files,
        )?;
        write_text(
            &out.join(format!("{label}_throughput.svg")),
            &plot::bar_chart(
                &format!("Average throughput ({label})"),
                "throughput (36 KB/s)",
                &bars(|a| a.mean_throughput_units),
            ),
            &mut report.files,
        )?;
        report.aggregates.extend(aggregates);
    }
    raw.flush().map_err(|e| Error::io(&raw_path, e))?;
    timing.flush().map_err(|e| Error::io(&timing_path, e))?;
    report.files.push(raw_path);
    report.files.push(timing_path);

    let aggregate_path = out.join("aggregate.csv");
    let mut agg = csv::Writer::from_writer(create(&aggregate_path)?);
    for row in &report.aggregates {
        agg.serialize(row)?;
    }
    agg.flush().map_err(|e| Error::io(&aggregate_path, e))?;
    report.files.push(aggregate_path);

    if config.schedulers.contains(&PolicyKind::Aco) && !config.latency_sizes.is_empty() {
        let template = WorkloadSpec {
            seed: config.settings.seed,
            ..config.spec_for(TestSet::Tc1)
        };
        report.latency = latency_curve(
            &config.latency_sizes,
            config.latency_samples,
            &template,
            &config.settings.geometry,
            &config.settings.aco,
        )?;
        let latency_path = out.join("latency.csv");
        let mut lat = csv::Writer::from_writer(create(&latency_path)?);
        for point in &report.latency {
            lat.serialize(point)?;
        }
        lat.flush().map_err(|e| Error::io(&latency_path, e))?;
        report.files.push(latency_path);
        let points: Vec<(f64, f64)> = report
            .latency
            .iter()
            .map(|p| (p.queue_size as f64, p.mean_ms))
            .collect();
        write_text(
            &out.join("latency.svg"),
            &plot::line_chart(
                "Colony decision time vs. queue size",
                "queue size",
                "mean decision time (ms)",
                &points,
            ),
            &mut report.files,
        )?;
    }

    if !report.failures.is_empty() {
        let mut text = String::from("partial results: the following runs failed\n");
        for (w, s, e) in &report.failures {
            text.push_str(&format!("{w}\t{s}\t{e}\n"));
        }
        write_text(&out.join("FAILED.txt"), &text, &mut report.files)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheduler: &str, problem_id: u32, miss_ratio: f64, decision: f64) -> RunRow {
        RunRow {
            problem_id,
            scheduler: scheduler.into(),
            repeat: 0,
            miss_count: 0,
            total_tasks: 10,
            miss_ratio,
            completed_bytes: 0,
            makespan_ms: 10.0,
            throughput_bps: 36864.0,
            mean_decision_ms: decision,
        }
    }

    #[test]
    fn aggregate_means() {
        let rows = vec![
            row("edf", 0, 0.2, 1.0),
            row("aco", 0, 0.1, 3.0),
            row("edf", 1, 0.4, 2.0),
            row("aco", 0, 0.3, 5.0),
            row("aco", 1, 0.2, 4.0),
        ];
        let agg = aggregate("tc1", &rows);
        assert_eq!(agg.len(), 2);
        assert_eq!(agg[0].scheduler, "edf");
        assert!((agg[0].mean_miss_ratio - 0.3).abs() < 1e-12);
        assert_eq!(agg[1].runs, 3);
        assert_eq!(agg[1].problems, 2);
        assert!((agg[1].mean_miss_ratio - 0.2).abs() < 1e-12);
        assert_eq!(agg[1].median_decision_ms, 4.0);
        assert!((agg[1].mean_throughput_units - 1.0).abs() < 1e-12);
    }

    #[test]
    fn median_and_std() {
        assert_eq!(median(&[3.0, 1.0, 2.0, 10.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
        assert!((std_dev(&[1.0, 3.0]) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_policies_run_once() {
        let spec = WorkloadSpec {
            n_problems: 3,
            seed: 1,
            ..WorkloadSpec::builtin(TestSet::Tc1)
        };
        let problems = workload::generate(&spec, &DiskGeometry::default()).unwrap();
        let settings = RunSettings {
            repeats: 4,
            ..RunSettings::default()
        };
        let fifo = run_policy(&problems, "fifo".parse().unwrap(), &settings).unwrap();
        assert_eq!(fifo.len(), 3);
        let aco = run_policy(&problems, PolicyKind::Aco, &settings).unwrap();
        assert_eq!(aco.len(), 12);
        assert!(aco.iter().all(|r| r.pheromone.is_some()));
        let zero = RunSettings {
            repeats: 0,
            ..settings
        };
        assert!(run_policy(&problems, PolicyKind::Aco, &zero).is_err());
    }

    #[test]
    fn run_csv_round_trip() {
        let rows = vec![row("edf", 0, 0.25, 0.5), row("aco", 3, 0.0, 1.25)];
        let mut buf = Vec::new();
        write_run_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), RUN_COLUMNS.join(","));
        assert_eq!(read_run_csv(&buf[..]).unwrap(), rows);

        let mut empty = Vec::new();
        write_run_csv(&[], &mut empty).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim(), RUN_COLUMNS.join(","));
    }
}
