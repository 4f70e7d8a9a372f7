//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rtdisk::aco::{self, PheromoneMatrix};
use rtdisk::baselines::{BaselineKind, ScanVariant};
use rtdisk::bench::{self, BenchConfig, RunResult, RunSettings, WorkloadSource};
use rtdisk::workload::{self, WorkloadSpec};
use rtdisk::{AcoParams, AcoPolicy, AntResult, DiskGeometry, PolicyKind, TestSet};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn a1_disk_model() -> Check {
    let g = DiskGeometry::default();
    let mut worst = 0.0f64;
    for d in 1..1972u32 {
        let expected = if d <= 383 {
            3.24 + 0.4 * f64::from(d).sqrt()
        } else {
            8.0 + 0.008 * f64::from(d)
        };
        let got = g.seek_time(d).map_err(|e| e.to_string())?;
        worst = worst.max((got - expected).abs());
    }
    let zero = g.seek_time(0).map_err(|e| e.to_string())?;
    let period = g.rotation_period();
    let transfer = g.transfer_time(36864);
    ensure(
        worst <= 1e-9 && zero == 0.0 && (period - 60000.0 / 4002.0).abs() <= 1e-9 && (transfer - 3.6864).abs() <= 1e-9,
        format!("max seek error {worst:e}, seek(0)={zero}, period={period}, transfer={transfer}"),
    )
}

fn a2_equations() -> Check {
    let m = PheromoneMatrix::new(3, 10.0);
    let p = aco::selection_probability(&m, &[0.0, 0.5, 0.25], 1.0, 2.0, 0, &[false, true, true]);
    let sum: f64 = p.iter().sum();
    let eq3 = (sum - 1.0).abs() <= 1e-9 && (p[1] - 0.8).abs() <= 1e-9 && (p[2] - 0.2).abs() <= 1e-9;

    let eta = aco::heuristic_from_parts(0.1, 7.24, 20.0).map_err(|e| e.to_string())?;
    let eq4 = (eta - 1.0 / 18.724).abs() <= 1e-9;

    let fit = aco::fitness(50.0, 2, 200.0);
    let eq5 = (fit - 450.0).abs() <= 1e-9;

    let mut trail = PheromoneMatrix::new(1, 15.0);
    let best = AntResult {
        sequence: vec![0],
        path: vec![0],
        virtual_finish: 100.0,
        makespan: 100.0,
        miss_count: 0,
        fitness: 100.0,
    };
    aco::update_pheromone(&mut trail, &best, 0.98, 10.0, 20.0).map_err(|e| e.to_string())?;
    let tau = trail.get(trail.start(), 0);
    let eq67 = (tau - 14.71).abs() <= 1e-9;

    ensure(
        eq3 && eq4 && eq5 && eq67,
        format!("eq3 p={:?} sum={sum}, eq4 eta={eta}, eq5 fit={fit}, eq6-7 tau={tau}", &p[1..]),
    )
}

fn a3_pheromone_bounds() -> Check {
    let geometry = DiskGeometry::default();
    let spec = WorkloadSpec {
        n_problems: 10,
        ..WorkloadSpec::builtin(TestSet::Tc1)
    };
    let problems = workload::generate(&spec, &geometry).map_err(|e| e.to_string())?;
    let (mut updates, mut lo, mut hi) = (0usize, f64::INFINITY, f64::NEG_INFINITY);
    for problem in &problems {
        let mut policy = AcoPolicy::new(AcoParams {
            seed: u64::from(problem.id),
            ..AcoParams::default()
        })
        .map_err(|e| e.to_string())?;
        rtdisk::run(problem, &mut policy, &geometry).map_err(|e| e.to_string())?;
        let audit = policy.audit();
        updates += audit.updates;
        lo = lo.min(audit.min);
        hi = hi.max(audit.max);
    }
    ensure(
        updates > 0 && lo >= 10.0 && hi <= 20.0,
        format!("{updates} updates over {} TC1 runs, trail range [{lo}, {hi}]", problems.len()),
    )
}

fn a4_oracle() -> Check {
    let geometry = DiskGeometry::default();
    let spec = WorkloadSpec {
        n_tasks: 6,
        ready_max: 0.0,
        n_problems: 50,
        seed: 4,
        ..WorkloadSpec::builtin(TestSet::Tc1)
    };
    let problems = workload::generate(&spec, &geometry).map_err(|e| e.to_string())?;
    let rows = bench::oracle_report(&problems, &geometry, &AcoParams::default(), false).map_err(|e| e.to_string())?;
    let n = rows.len() as f64;
    let within = rows.iter().filter(|r| r.aco_fitness <= 1.05 * r.oracle_fitness).count() as f64 / n;
    let misses = rows.iter().filter(|r| r.aco_miss_count == r.oracle_miss_count).count() as f64 / n;
    ensure(
        within >= 0.90 && misses >= 0.95,
        format!("fitness within 5%: {:.0}%, miss count match: {:.0}%", within * 100.0, misses * 100.0),
    )
}

struct Comparison {
    means: Vec<(PolicyKind, f64, f64)>,
    safety: Result<usize, String>,
}

fn compare_tc1() -> Comparison {
    let geometry = DiskGeometry::default();
    let spec = WorkloadSpec {
        n_problems: 100,
        ..WorkloadSpec::builtin(TestSet::Tc1)
    };
    let settings = RunSettings {
        repeats: 20,
        ..RunSettings::default()
    };
    let kinds = [
        PolicyKind::Baseline(BaselineKind::Fifo),
        PolicyKind::Baseline(BaselineKind::Edf),
        PolicyKind::Baseline(BaselineKind::ScanEdf),
        PolicyKind::Baseline(BaselineKind::Sstf),
        PolicyKind::Baseline(BaselineKind::Scan(ScanVariant::CLook)),
        PolicyKind::Aco,
    ];
    let problems = match workload::generate(&spec, &geometry) {
        Ok(p) => p,
        Err(e) => {
            return Comparison {
                means: Vec::new(),
                safety: Err(e.to_string()),
            }
        }
    };
    let mut means = Vec::new();
    let mut audited = 0;
    for kind in kinds {
        // run_policy audits every run and fails on the first violation.
        let results: Vec<RunResult> = match bench::run_policy(&problems, kind, &settings) {
            Ok(r) => r,
            Err(e) => {
                return Comparison {
                    means,
                    safety: Err(format!("{}: {e}", kind.name())),
                }
            }
        };
        audited += results.len();
        let n = results.len() as f64;
        let miss = results.iter().map(|r| r.row.miss_ratio).sum::<f64>() / n;
        let tput = results.iter().map(|r| r.row.throughput_bps).sum::<f64>() / n;
        means.push((kind, miss, tput));
    }
    Comparison {
        means,
        safety: Ok(audited),
    }
}

fn a5_ordering(cmp: &Comparison) -> Check {
    let lookup = |name: &str| cmp.means.iter().find(|(k, _, _)| k.name() == name).map(|&(_, m, t)| (m, t));
    let (Some((aco_miss, aco_tput)), true) = (lookup("aco"), cmp.safety.is_ok()) else {
        return Err("comparison did not complete".into());
    };
    let mut ok = true;
    let mut parts = vec![format!("aco miss {:.4} tput {:.0}", aco_miss, aco_tput)];
    for name in ["fifo", "edf", "scanedf", "sstf", "clook"] {
        let (miss, tput) = lookup(name).ok_or(format!("{name} missing"))?;
        let margin = if matches!(name, "edf" | "scanedf") { 0.01 } else { 0.0 };
        ok &= aco_miss <= miss - margin;
        if matches!(name, "edf" | "fifo") {
            ok &= aco_tput >= tput;
        }
        parts.push(format!("{name} miss {miss:.4} tput {tput:.0}"));
    }
    ensure(ok, parts.join(", "))
}

fn a6_safety(cmp: &Comparison) -> Check {
    match &cmp.safety {
        Ok(runs) => Ok(format!("{runs} audited runs, no violations")),
        Err(e) => Err(e.clone()),
    }
}

fn a7_determinism() -> Check {
    let raw = |threads: usize| -> Result<Vec<u8>, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = BenchConfig::new(dir.path());
        config.workloads = vec![WorkloadSource::Builtin(TestSet::Tc1), WorkloadSource::Builtin(TestSet::Tc2)];
        config.problems = 20;
        config.latency_sizes.clear();
        config.settings.repeats = 3;
        config.settings.seed = 7;
        config.settings.threads = threads;
        let report = bench::run_bench(&config).map_err(|e| e.to_string())?;
        if !report.failures.is_empty() {
            return Err(format!("{:?}", report.failures));
        }
        std::fs::read(dir.path().join("raw.csv")).map_err(|e| e.to_string())
    };
    let one = raw(1)?;
    let four = raw(4)?;
    let again = raw(4)?;
    ensure(
        one == four && four == again && !one.is_empty(),
        format!("raw.csv {} bytes, 1 vs 4 threads identical: {}, rerun identical: {}", one.len(), one == four, four == again),
    )
}

fn a8_latency() -> Check {
    let geometry = DiskGeometry::default();
    let template = WorkloadSpec::builtin(TestSet::Tc3);
    let points = bench::latency_curve(&[20, 50], 20, &template, &geometry, &AcoParams::default())
        .map_err(|e| e.to_string())?;
    let (t20, t50) = (points[0].mean_ms, points[1].mean_ms);
    let ratio = t50 / t20;
    ensure(
        ratio <= 6.0 && t20 <= 50.0,
        format!("mean decision 20 tasks {t20:.3} ms, 50 tasks {t50:.3} ms, ratio {ratio:.2} (limit 6)"),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, started: Instant, check: Check| {
        let secs = started.elapsed().as_secs_f64();
        match check {
            Ok(detail) => println!("{id} PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{id} FAIL ({secs:.1}s) {detail}");
            }
        }
    };
    let t = Instant::now();
    report("A1", t, a1_disk_model());
    let t = Instant::now();
    report("A2", t, a2_equations());
    let t = Instant::now();
    report("A3", t, a3_pheromone_bounds());
    let t = Instant::now();
    report("A4", t, a4_oracle());
    let t = Instant::now();
    let cmp = compare_tc1();
    report("A5", t, a5_ordering(&cmp));
    report("A6", t, a6_safety(&cmp));
    let t = Instant::now();
    report("A7", t, a7_determinism());
    let t = Instant::now();
    report("A8", t, a8_latency());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
