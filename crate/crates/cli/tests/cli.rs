use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rtdisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rtdisk"))
        .args(args)
        .env_remove("RTDISK_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = rtdisk(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut args = vec!["gen", "--out", path.as_str()];
    args.extend_from_slice(extra);
    ok(&args);
    path
}

#[test]
fn gen_is_seeded_and_sized() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "a.jsonl", &["--testset", "tc3", "--problems", "10", "--seed", "5"]);
    let b = gen(dir.path(), "b.jsonl", &["--testset", "tc3", "--problems", "10", "--seed", "5"]);
    let c = gen(dir.path(), "c.jsonl", &["--testset", "tc3", "--problems", "10", "--seed", "6"]);
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_ne!(text, fs::read_to_string(&c).unwrap());
    let problems = rtdisk::workload::load(Path::new(&a)).unwrap();
    assert_eq!(problems.len(), 10);
    assert!(problems.iter().all(|p| p.tasks.len() == 50));
}

#[test]
fn gen_to_stdout() {
    let out = ok(&["gen", "--testset", "tc1", "--problems", "2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);
}

#[test]
fn run_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let w = gen(dir.path(), "w.jsonl", &["--problems", "3"]);
    let fifo = ok(&["run", "--workload", &w, "--scheduler", "fifo", "--repeats", "4"]);
    let text = String::from_utf8(fifo.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), rtdisk::bench::RUN_COLUMNS.join(","));
    assert_eq!(lines.count(), 3);

    let aco = ok(&["run", "--workload", &w, "--scheduler", "ACO", "--repeats", "2"]);
    assert_eq!(String::from_utf8(aco.stdout).unwrap().lines().count(), 1 + 6);
}

#[test]
fn bad_input_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let w = gen(dir.path(), "w.jsonl", &["--problems", "1"]);
    let out = rtdisk(&["run", "--workload", &w, "--scheduler", "elevator"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("clook"));

    assert_eq!(rtdisk(&["gen", "--testset", "tc9"]).status.code(), Some(1));
    assert_eq!(rtdisk(&["run", "--workload", &w, "--scheduler", "aco", "--rho", "2"]).status.code(), Some(1));
    assert_eq!(rtdisk(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rtdisk(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_workload_is_a_runtime_error() {
    let out = rtdisk(&["run", "--workload", "/nonexistent/w.jsonl", "--scheduler", "edf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_raw_csv_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let raw = |threads: &str| {
        let out = dir.path().join(format!("t{threads}"));
        ok(&[
            "bench", "--testset", "tc1", "--problems", "8", "--repeats", "3",
            "--schedulers", "edf,clook,aco", "--no-latency", "--seed", "2",
            "--threads", threads, "--out-dir", out.to_str().unwrap(),
        ]);
        for name in ["aggregate.csv", "timing.csv", "tc1_miss_ratio.svg", "tc1_throughput.svg"] {
            assert!(out.join(name).exists(), "{name}");
        }
        fs::read(out.join("raw.csv")).unwrap()
    };
    let one = raw("1");
    assert!(!one.is_empty());
    assert_eq!(one, raw("3"));
}

#[test]
fn oracle_on_single_task_problems_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let w = gen(dir.path(), "w.jsonl", &["--problems", "4", "--tasks", "1"]);
    let out = ok(&["oracle", "--workload", &w]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let ratio = header.iter().position(|h| *h == "ratio").unwrap();
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row.split(',').nth(ratio).unwrap(), "1.0");
    }
}

#[test]
fn oracle_refuses_large_problems_unless_truncated() {
    let dir = tempfile::tempdir().unwrap();
    let w = gen(dir.path(), "w.jsonl", &["--problems", "1", "--tasks", "12"]);
    assert_eq!(rtdisk(&["oracle", "--workload", &w]).status.code(), Some(2));
    ok(&["oracle", "--workload", &w, "--truncate"]);
}
