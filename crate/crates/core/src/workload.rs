//! Disk request model and seeded problem generation.
//!
//! Each problem draws from its own ChaCha8 stream: the key comes from the
//! workload seed and the stream number is the problem id, so any single
//! problem can be regenerated without producing the ones before it.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::DiskGeometry;
use crate::error::{Error, Result};
use crate::units::DEFAULT_REQUEST_BYTES;

/// One disk request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    #[serde(rename = "ready_ms")]
    pub ready: f64,
    #[serde(rename = "deadline_ms")]
    pub deadline: f64,
    pub cylinder: u32,
    pub sector: u32,
    #[serde(rename = "size_bytes")]
    pub size: u64,
}

impl Task {
    pub fn validate(&self, geometry: &DiskGeometry) -> Result<()> {
        let fail = |what: String| Err(Error::Domain(format!("task {}: {what}", self.id)));
        if !(self.ready.is_finite() && self.ready >= 0.0) {
            return fail(format!("ready time {} must be finite and >= 0", self.ready));
        }
        if !(self.deadline.is_finite() && self.deadline > self.ready) {
            return fail(format!(
                "deadline {} must be finite and after ready time {}",
                self.deadline, self.ready
            ));
        }
        if self.size == 0 {
            return fail("size must be positive".into());
        }
        if self.cylinder >= geometry.cylinders {
            return fail(format!("cylinder {} out of range", self.cylinder));
        }
        if self.sector >= geometry.sectors_per_track {
            return fail(format!("sector {} out of range", self.sector));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub id: u32,
    pub tasks: Vec<Task>,
}

impl Problem {
    pub fn validate(&self, geometry: &DiskGeometry) -> Result<()> {
        let mut seen = HashSet::with_capacity(self.tasks.len());
        for task in &self.tasks {
            task.validate(geometry)?;
            if !seen.insert(task.id) {
                return Err(Error::Domain(format!(
                    "problem {}: duplicate task id {}",
                    self.id, task.id
                )));
            }
        }
        Ok(())
    }
}

/// The three built-in test sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestSet {
    Tc1,
    Tc2,
    Tc3,
}

impl TestSet {
    pub const ALL: [TestSet; 3] = [TestSet::Tc1, TestSet::Tc2, TestSet::Tc3];

    pub fn name(self) -> &'static str {
        match self {
            TestSet::Tc1 => "tc1",
            TestSet::Tc2 => "tc2",
            TestSet::Tc3 => "tc3",
        }
    }
}

impl fmt::Display for TestSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tc1" => Ok(TestSet::Tc1),
            "tc2" => Ok(TestSet::Tc2),
            "tc3" => Ok(TestSet::Tc3),
            other => Err(Error::Usage(format!(
                "unknown test set `{other}` (expected tc1|tc2|tc3)"
            ))),
        }
    }
}

pub const DEFAULT_PERIOD_MIN_MS: f64 = 100.0;
pub const DEFAULT_PERIOD_MAX_MS: f64 = 300.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n_tasks: usize,
    /// Ready times are uniform on `[0, ready_max]`.
    pub ready_max: f64,
    /// Relative deadlines (periods) are uniform on `[period_min, period_max]`.
    pub period_min: f64,
    pub period_max: f64,
    pub size: u64,
    pub seed: u64,
    pub n_problems: usize,
}

impl WorkloadSpec {
    pub fn builtin(set: TestSet) -> Self {
        let (n_tasks, ready_max) = match set {
            TestSet::Tc1 => (20, 160.0),
            TestSet::Tc2 => (30, 240.0),
            TestSet::Tc3 => (50, 400.0),
        };
        WorkloadSpec {
            n_tasks,
            ready_max,
            period_min: DEFAULT_PERIOD_MIN_MS,
            period_max: DEFAULT_PERIOD_MAX_MS,
            size: DEFAULT_REQUEST_BYTES,
            seed: 0,
            n_problems: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tasks == 0 {
            return Err(Error::Config("n_tasks must be positive".into()));
        }
        if !(self.ready_max.is_finite() && self.ready_max >= 0.0) {
            return Err(Error::Config("ready_max must be finite and >= 0".into()));
        }
        if !(self.period_min > 0.0 && self.period_min <= self.period_max && self.period_max.is_finite())
        {
            return Err(Error::Config(format!(
                "period bounds must satisfy 0 < min <= max (got {}..{})",
                self.period_min, self.period_max
            )));
        }
        if self.size == 0 {
            return Err(Error::Config("size must be positive".into()));
        }
        Ok(())
    }
}

/// Looks up a built-in test set by name.
pub fn builtin_spec(name: &str) -> Result<WorkloadSpec> {
    Ok(WorkloadSpec::builtin(name.parse()?))
}

/// RNG stream for one problem of a workload.
pub fn problem_rng(seed: u64, problem_id: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(problem_id));
    rng
}

pub fn generate_problem(spec: &WorkloadSpec, geometry: &DiskGeometry, id: u32) -> Problem {
    let mut rng = problem_rng(spec.seed, id);
    let tasks = (0..spec.n_tasks as u32)
        .map(|task_id| {
            let ready = rng.gen_range(0.0..=spec.ready_max);
            let period = rng.gen_range(spec.period_min..=spec.period_max);
            Task {
                id: task_id,
                ready,
                deadline: ready + period,
                cylinder: rng.gen_range(0..geometry.cylinders),
                sector: rng.gen_range(0..geometry.sectors_per_track),
                size: spec.size,
            }
        })
        .collect();
    Problem { id, tasks }
}

pub fn generate(spec: &WorkloadSpec, geometry: &DiskGeometry) -> Result<Vec<Problem>> {
    spec.validate()?;
    geometry.validate()?;
    Ok((0..spec.n_problems as u32)
        .into_par_iter()
        .map(|id| generate_problem(spec, geometry, id))
        .collect())
}

pub fn write_jsonl<W: Write>(problems: &[Problem], writer: W) -> Result<()> {
    let mut out = BufWriter::new(writer);
    for problem in problems {
        serde_json::to_writer(&mut out, problem)?;
        out.write_all(b"\n").map_err(|e| Error::io("<writer>", e))?;
    }
    out.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

pub fn read_jsonl<R: Read>(reader: R) -> Result<Vec<Problem>> {
    let mut problems = Vec::new();
    for (index, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let problem = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        problems.push(problem);
    }
    Ok(problems)
}

pub fn save(problems: &[Problem], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_jsonl(problems, file)
}

pub fn load(path: &Path) -> Result<Vec<Problem>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_jsonl(file)
}
