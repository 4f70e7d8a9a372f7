//! The online service loop.
//!
//! Starting at time 0 on cylinder 0, the loop repeatedly admits arrived
//! requests, drops every queued request that would miss its deadline even
//! if it were served immediately, and asks the policy for the next request.
//! When the queue drains but arrivals remain, the clock jumps to the next
//! ready time. Decision wall time is measured on the side and never
//! advances the simulated clock.

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::disk::{DiskGeometry, HeadState};
use crate::error::{Error, Result};
use crate::units::MS_PER_SECOND;
use crate::workload::{Problem, Task};

/// A scheduling policy driven by [`run`].
pub trait SchedulerPolicy {
    fn name(&self) -> &str;

    /// Chooses the next request to serve. `queue` is never empty and every
    /// entry in it is still feasible at `head`.
    fn pick_next(
        &mut self,
        queue: &[Task],
        head: HeadState,
        geometry: &DiskGeometry,
    ) -> Result<Option<u32>>;

    /// Optional arm movement before the next pick, for policies whose
    /// sweep travels to the disk edge. Called before every `pick_next`;
    /// returning a cylinder moves the head there (charged as seek time)
    /// and restarts the admission and drop step.
    fn reposition(
        &mut self,
        _queue: &[Task],
        _head: HeadState,
        _geometry: &DiskGeometry,
    ) -> Option<u32> {
        None
    }

    /// Clears per-problem state.
    fn reset(&mut self);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    Dropped,
}

/// What happened to one request. Dropped requests carry the decision time
/// at which they were discarded as both `start` and `finish`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionRecord {
    pub task_id: u32,
    pub start: f64,
    pub finish: f64,
    pub size: u64,
    pub outcome: Outcome,
}

/// An arm movement that served no request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeadMove {
    /// Number of execution records emitted before this move.
    pub before_record: usize,
    pub from: u32,
    pub to: u32,
    pub start: f64,
    pub finish: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub total_tasks: usize,
    pub miss_count: usize,
    pub completed_bytes: u64,
    /// Finish time of the last completed request, ms.
    pub makespan: f64,
    /// Bytes per second.
    pub throughput: f64,
    /// Wall time of each `pick_next` call, ms.
    pub decision_times: Vec<f64>,
}

impl RunMetrics {
    pub fn completed(&self) -> usize {
        self.total_tasks - self.miss_count
    }

    pub fn miss_ratio(&self) -> f64 {
        if self.total_tasks == 0 {
            0.0
        } else {
            self.miss_count as f64 / self.total_tasks as f64
        }
    }

    pub fn mean_decision_ms(&self) -> f64 {
        if self.decision_times.is_empty() {
            0.0
        } else {
            self.decision_times.iter().sum::<f64>() / self.decision_times.len() as f64
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub records: Vec<ExecutionRecord>,
    pub moves: Vec<HeadMove>,
    pub metrics: RunMetrics,
}

/// Completed bytes over the finish time of the last completed request,
/// in bytes per second; 0 when nothing completed.
pub fn throughput(records: &[ExecutionRecord]) -> f64 {
    let (bytes, last_finish) = records
        .iter()
        .filter(|r| r.outcome == Outcome::Completed)
        .fold((0u64, 0.0f64), |(b, f), r| (b + r.size, f.max(r.finish)));
    if last_finish > 0.0 {
        bytes as f64 / (last_finish / MS_PER_SECOND)
    } else {
        0.0
    }
}

/// Whether `task` would still meet its deadline if served next from `head`.
pub fn is_feasible(geometry: &DiskGeometry, head: HeadState, task: &Task) -> Result<bool> {
    Ok(head.time + geometry.service_time(head, task)? <= task.deadline)
}

pub fn run(
    problem: &Problem,
    policy: &mut dyn SchedulerPolicy,
    geometry: &DiskGeometry,
) -> Result<RunOutput> {
    problem.validate(geometry)?;

    let mut arrivals: Vec<&Task> = problem.tasks.iter().collect();
    arrivals.sort_by(|a, b| a.ready.total_cmp(&b.ready).then(a.id.cmp(&b.id)));
    let mut arrivals: VecDeque<&Task> = arrivals.into();

    let mut head = HeadState::default();
    let mut queue: Vec<Task> = Vec::new();
    let mut records = Vec::with_capacity(problem.tasks.len());
    let mut decision_times = Vec::new();
    let mut moves = Vec::new();

    loop {
        while arrivals.front().is_some_and(|t| t.ready <= head.time) {
            queue.push(arrivals.pop_front().unwrap().clone());
        }

        let mut kept = Vec::with_capacity(queue.len());
        for task in queue.drain(..) {
            if is_feasible(geometry, head, &task)? {
                kept.push(task);
            } else {
                records.push(ExecutionRecord {
                    task_id: task.id,
                    start: head.time,
                    finish: head.time,
                    size: task.size,
                    outcome: Outcome::Dropped,
                });
            }
        }
        queue = kept;

        if queue.is_empty() {
            match arrivals.front() {
                Some(next) => {
                    head.time = head.time.max(next.ready);
                    continue;
                }
                None => break,
            }
        }

        if let Some(target) = policy.reposition(&queue, head, geometry) {
            if target != head.cylinder {
                let finish = head.time + geometry.seek_time(target.abs_diff(head.cylinder))?;
                moves.push(HeadMove {
                    before_record: records.len(),
                    from: head.cylinder,
                    to: target,
                    start: head.time,
                    finish,
                });
                head = HeadState::new(finish, target);
                continue;
            }
        }

        let started = Instant::now();
        let picked = policy.pick_next(&queue, head, geometry)?;
        decision_times.push(started.elapsed().as_secs_f64() * MS_PER_SECOND);

        let id = picked.ok_or_else(|| {
            Error::Contract(format!(
                "{} returned no task for a queue of {}",
                policy.name(),
                queue.len()
            ))
        })?;
        let index = queue.iter().position(|t| t.id == id).ok_or_else(|| {
            Error::Contract(format!("{} picked task {id}, which is not queued", policy.name()))
        })?;
        let task = queue.remove(index);

        let start = head.time.max(task.ready);
        let finish = start + geometry.service_time(HeadState::new(start, head.cylinder), &task)?;
        if finish > task.deadline {
            return Err(Error::Invariant(format!(
                "task {} completed at {finish} after its deadline {}",
                task.id, task.deadline
            )));
        }
        records.push(ExecutionRecord {
            task_id: task.id,
            start,
            finish,
            size: task.size,
            outcome: Outcome::Completed,
        });
        head = HeadState::new(finish, task.cylinder);
    }

    let metrics = summarize(problem.tasks.len(), &records, decision_times);
    Ok(RunOutput {
        records,
        moves,
        metrics,
    })
}

fn summarize(total_tasks: usize, records: &[ExecutionRecord], decision_times: Vec<f64>) -> RunMetrics {
    let completed = records.iter().filter(|r| r.outcome == Outcome::Completed);
    let completed_bytes = completed.clone().map(|r| r.size).sum();
    let makespan = completed.map(|r| r.finish).fold(0.0, f64::max);
    RunMetrics {
        total_tasks,
        miss_count: records.iter().filter(|r| r.outcome == Outcome::Dropped).count(),
        completed_bytes,
        makespan,
        throughput: throughput(records),
        decision_times,
    }
}

/// Checks the safety properties of a finished run: every request accounted
/// for exactly once, a monotone clock, no late completions, and each start
/// equal to the later of its ready time and the previous finish (or the end
/// of an intervening arm movement).
pub fn audit_run(problem: &Problem, output: &RunOutput, geometry: &DiskGeometry) -> Result<()> {
    let fail = |msg: String| Err(Error::Invariant(format!("problem {}: {msg}", problem.id)));
    let by_id: std::collections::HashMap<u32, &Task> =
        problem.tasks.iter().map(|t| (t.id, t)).collect();

    let mut seen = HashSet::new();
    let mut clock = 0.0f64;
    let mut head = HeadState::default();
    let mut moves = output.moves.iter().peekable();
    for (index, record) in output.records.iter().enumerate() {
        while let Some(mv) = moves.next_if(|m| m.before_record == index) {
            if mv.from != head.cylinder || mv.start < clock || mv.finish < mv.start {
                return fail(format!("inconsistent arm movement before record {index}"));
            }
            clock = mv.finish;
            head = HeadState::new(mv.finish, mv.to);
        }
        let Some(task) = by_id.get(&record.task_id) else {
            return fail(format!("record for unknown task {}", record.task_id));
        };
        if !seen.insert(record.task_id) {
            return fail(format!("task {} recorded twice", record.task_id));
        }
        if record.start < clock || record.finish < record.start {
            return fail(format!("clock went backwards at task {}", record.task_id));
        }
        clock = record.finish;
        if record.outcome == Outcome::Completed {
            if record.finish > task.deadline {
                return fail(format!("task {} finished late", task.id));
            }
            if record.start != task.ready.max(head.time) {
                return fail(format!(
                    "task {} started at {} instead of max(ready, previous finish)",
                    task.id, record.start
                ));
            }
            let expected = record.start
                + geometry.service_time(HeadState::new(record.start, head.cylinder), task)?;
            if record.finish != expected {
                return fail(format!("task {} finish disagrees with service time", task.id));
            }
            head = HeadState::new(record.finish, task.cylinder);
        }
    }
    if seen.len() != problem.tasks.len() {
        return fail(format!(
            "{} of {} tasks accounted for",
            seen.len(),
            problem.tasks.len()
        ));
    }
    let m = &output.metrics;
    if m.miss_count + m.completed() != m.total_tasks || m.total_tasks != problem.tasks.len() {
        return fail("miss and completion counts do not add up".into());
    }
    Ok(())
}
