use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rtdisk::bench::{self, BenchConfig, RunSettings, WorkloadSource};
use rtdisk::workload::{self, WorkloadSpec};
use rtdisk::{AcoParams, DiskGeometry, Error, PolicyKind, RotationMode, TestSet};

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rtdisk", version, about = "Real-time disk scheduling testbed")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded workload file (JSON Lines, one problem per line).
    Gen(GenArgs),
    /// Run one scheduler over a workload file and emit per-run CSV.
    Run(RunArgs),
    /// Run the full comparison and write CSV tables and SVG charts.
    Bench(BenchArgs),
    /// Compare colony decisions against the exhaustive optimum.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct DiskArgs {
    /// JSON geometry file; omitted fields keep the HP 97560 defaults.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// angular | fixed-half
    #[arg(long)]
    rotation_mode: Option<RotationMode>,
}

impl DiskArgs {
    fn geometry(&self) -> Result<DiskGeometry, Error> {
        let mut geometry = match &self.geometry {
            Some(path) => DiskGeometry::from_json_file(path)?,
            None => DiskGeometry::default(),
        };
        if let Some(mode) = self.rotation_mode {
            geometry.rotation_mode = mode;
        }
        Ok(geometry)
    }
}

#[derive(Debug, Args)]
struct AcoArgs {
    /// JSON file with colony parameters; flags below override it.
    #[arg(long)]
    aco_config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    /// Iterations without best-fitness change before the colony stops.
    #[arg(long)]
    patience: Option<usize>,
    /// Lower bound on ants per iteration.
    #[arg(long)]
    min_ants: Option<usize>,
}

impl AcoArgs {
    fn params(&self) -> Result<AcoParams, Error> {
        let mut p = match &self.aco_config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                AcoParams::from_json_str(&text)?
            }
            None => AcoParams::default(),
        };
        macro_rules! apply {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field { p.$target = v; })*
            };
        }
        apply!(alpha => alpha, beta => beta, rho => rho, gamma => gamma, tau_min => tau_min,
               tau_max => tau_max, patience => convergence_patience, min_ants => min_ants);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
struct PeriodArgs {
    /// Lower bound of the uniform relative deadline, ms.
    #[arg(long)]
    period_min: Option<f64>,
    /// Upper bound of the uniform relative deadline, ms.
    #[arg(long)]
    period_max: Option<f64>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, default_value = "tc1")]
    testset: TestSet,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of problems.
    #[arg(long)]
    problems: Option<usize>,
    /// Override the number of tasks per problem.
    #[arg(long)]
    tasks: Option<usize>,
    /// Override the ready-time upper bound, ms.
    #[arg(long)]
    ready_max: Option<f64>,
    #[command(flatten)]
    period: PeriodArgs,
    #[command(flatten)]
    disk: DiskArgs,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Workload file produced by `gen`.
    #[arg(long)]
    workload: PathBuf,
    #[arg(long)]
    scheduler: String,
    /// Repeats per problem for stochastic schedulers.
    #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
    repeats: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    disk: DiskArgs,
    #[command(flatten)]
    aco: AcoArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Built-in test sets (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    testset: Vec<TestSet>,
    /// Workload files to bench instead of, or in addition to, test sets.
    #[arg(long)]
    workload: Vec<PathBuf>,
    /// Schedulers to compare (comma separated); all when omitted.
    #[arg(long, value_delimiter = ',')]
    schedulers: Vec<String>,
    #[arg(long, default_value_t = bench::DEFAULT_REPEATS)]
    repeats: u32,
    /// Problems per built-in test set.
    #[arg(long, default_value_t = bench::DEFAULT_BENCH_PROBLEMS)]
    problems: usize,
    /// Use the full 1000 problems per test set.
    #[arg(long, conflicts_with = "problems")]
    full: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "RTDISK_OUT_DIR", default_value = "bench-out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Queue sizes for the decision-time curve; empty to skip.
    #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_LATENCY_SIZES)]
    latency_sizes: Vec<usize>,
    #[arg(long, default_value_t = bench::DEFAULT_LATENCY_SAMPLES)]
    latency_samples: usize,
    #[arg(long)]
    no_latency: bool,
    #[command(flatten)]
    period: PeriodArgs,
    #[command(flatten)]
    disk: DiskArgs,
    #[command(flatten)]
    aco: AcoArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    workload: PathBuf,
    /// Keep only the first tasks of problems above the oracle size limit.
    #[arg(long)]
    truncate: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    disk: DiskArgs,
    #[command(flatten)]
    aco: AcoArgs,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Error::io(p, e))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_gen(args: GenArgs) -> Result<(), Error> {
    let geometry = args.disk.geometry()?;
    let mut spec = WorkloadSpec {
        seed: args.seed,
        ..WorkloadSpec::builtin(args.testset)
    };
    if let Some(n) = args.problems {
        spec.n_problems = n;
    }
    if let Some(n) = args.tasks {
        spec.n_tasks = n;
    }
    if let Some(r) = args.ready_max {
        spec.ready_max = r;
    }
    if let Some(v) = args.period.period_min {
        spec.period_min = v;
    }
    if let Some(v) = args.period.period_max {
        spec.period_max = v;
    }
    let problems = workload::generate(&spec, &geometry)?;
    workload::write_jsonl(&problems, output(args.out.as_deref())?)?;
    eprintln!(
        "generated {} problems of {} tasks ({})",
        problems.len(),
        spec.n_tasks,
        args.testset
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let kind: PolicyKind = args.scheduler.parse()?;
    let settings = RunSettings {
        geometry: args.disk.geometry()?,
        aco: args.aco.params()?,
        repeats: args.repeats,
        seed: args.seed,
        threads: args.threads,
    };
    let problems = workload::load(&args.workload)?;
    let results = bench::run_policy(&problems, kind, &settings)?;
    let rows: Vec<_> = results.into_iter().map(|r| r.row).collect();
    bench::write_run_csv(&rows, output(args.out.as_deref())?)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<bool, Error> {
    let mut config = BenchConfig::new(&args.out_dir);
    let mut workloads: Vec<WorkloadSource> =
        args.testset.iter().copied().map(WorkloadSource::Builtin).collect();
    workloads.extend(args.workload.iter().cloned().map(WorkloadSource::File));
    if !workloads.is_empty() {
        config.workloads = workloads;
    }
    if !args.schedulers.is_empty() {
        config.schedulers = args
            .schedulers
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()?;
    }
    config.problems = if args.full { 1000 } else { args.problems };
    if let Some(v) = args.period.period_min {
        config.period_min = v;
    }
    if let Some(v) = args.period.period_max {
        config.period_max = v;
    }
    config.settings = RunSettings {
        geometry: args.disk.geometry()?,
        aco: args.aco.params()?,
        repeats: args.repeats,
        seed: args.seed,
        threads: args.threads,
    };
    config.latency_sizes = if args.no_latency { Vec::new() } else { args.latency_sizes };
    config.latency_samples = args.latency_samples;

    let report = bench::run_bench(&config)?;
    println!(
        "{:<8} {:<8} {:>9} {:>12} {:>12} {:>12}",
        "testset", "sched", "runs", "miss_ratio", "tput_36KB/s", "decision_ms"
    );
    for row in &report.aggregates {
        println!(
            "{:<8} {:<8} {:>9} {:>12.4} {:>12.3} {:>12.4}",
            row.testset,
            row.scheduler,
            row.runs,
            row.mean_miss_ratio,
            row.mean_throughput_units,
            row.mean_decision_ms
        );
    }
    for point in &report.latency {
        println!(
            "latency queue={:<3} mean={:.3} ms median={:.3} ms",
            point.queue_size, point.mean_ms, point.median_ms
        );
    }
    for (w, s, e) in &report.failures {
        eprintln!("FAILED {w}/{s}: {e}");
    }
    eprintln!("wrote {} files to {}", report.files.len(), args.out_dir.display());
    Ok(report.failures.is_empty())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), Error> {
    let geometry = args.disk.geometry()?;
    let params = AcoParams {
        seed: args.seed,
        ..args.aco.params()?
    };
    let problems = workload::load(&args.workload)?;
    let rows = bench::oracle_report(&problems, &geometry, &params, args.truncate)?;
    bench::write_oracle_csv(&rows, output(args.out.as_deref())?)?;
    let within = rows.iter().filter(|r| r.ratio <= 1.05).count();
    eprintln!(
        "{} problems, {} within 5% of the optimum",
        rows.len(),
        within
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_RUNTIME),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Config(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_RUNTIME),
            }
        }
    }
}
