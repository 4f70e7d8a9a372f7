//! Exhaustive reference optimizer for small static queues.
//!
//! Solves the same static problem an ant sees: a fixed queue snapshot, no
//! future arrivals. Every ordering of the queue is treated as a priority
//! list. At each step the requests that can no longer meet their deadline
//! are dropped, and the highest-priority survivor is served. Each ordering
//! is scored as `makespan + misses * worst_deadline`.
//!
//! The replay loop here is written independently of the colony code so the
//! two can check each other.

use std::cmp::Ordering;

use crate::disk::{DiskGeometry, HeadState};
use crate::error::{Error, Result};
use crate::workload::Task;

pub const MAX_ORACLE_TASKS: usize = 9;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Task ids actually served, in order.
    pub best_sequence: Vec<u32>,
    pub best_fitness: f64,
    pub optimal_miss_count: usize,
    pub enumerated: u64,
}

struct Scored {
    served: Vec<u32>,
    misses: usize,
    fitness: f64,
}

fn simulate(order: &[usize], tasks: &[Task], head: HeadState, geometry: &DiskGeometry, worst: f64) -> Result<Scored> {
    let mut alive = vec![true; tasks.len()];
    let mut time = head.time;
    let mut cylinder = head.cylinder;
    let mut served = Vec::with_capacity(tasks.len());
    let mut misses = 0;
    loop {
        let now = HeadState::new(time, cylinder);
        let mut next = None;
        for &i in order {
            if !alive[i] {
                continue;
            }
            let finish = time + geometry.service_time(now, &tasks[i])?;
            if finish > tasks[i].deadline {
                alive[i] = false;
                misses += 1;
            } else if next.is_none() {
                next = Some((i, finish));
            }
        }
        let Some((i, finish)) = next else { break };
        alive[i] = false;
        served.push(tasks[i].id);
        time = finish;
        cylinder = tasks[i].cylinder;
    }
    let makespan = time - head.time;
    Ok(Scored {
        served,
        misses,
        fitness: makespan + misses as f64 * worst,
    })
}

/// Rearranges `perm` into the next lexicographic permutation; false once
/// the last one has been reached.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(pivot) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let successor = perm.iter().rposition(|&x| x > perm[pivot]).unwrap();
    perm.swap(pivot, successor);
    perm[pivot + 1..].reverse();
    true
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("oracle needs at least one task".into()));
    }
    if n > MAX_ORACLE_TASKS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_ORACLE_TASKS,
        });
    }
    Ok(())
}

fn worst_deadline(tasks: &[Task]) -> f64 {
    tasks.iter().map(|t| t.deadline).fold(f64::NEG_INFINITY, f64::max)
}

/// Ids served first by any ordering whose fitness is within `tolerance` of
/// the optimum, sorted ascending.
pub fn optimal_first_tasks(
    tasks: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    tolerance: f64,
) -> Result<Vec<u32>> {
    let best = solve(tasks, head, geometry)?;
    let worst = worst_deadline(tasks);
    let mut perm: Vec<usize> = (0..tasks.len()).collect();
    let mut firsts = Vec::new();
    loop {
        let s = simulate(&perm, tasks, head, geometry, worst)?;
        if s.fitness <= best.best_fitness + tolerance {
            if let Some(&first) = s.served.first() {
                firsts.push(first);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    firsts.sort_unstable();
    firsts.dedup();
    Ok(firsts)
}

pub fn solve(tasks: &[Task], head: HeadState, geometry: &DiskGeometry) -> Result<OracleResult> {
    let n = tasks.len();
    check_size(n)?;
    let worst = worst_deadline(tasks);

    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Scored> = None;
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let candidate = simulate(&perm, tasks, head, geometry, worst)?;
        let better = match &best {
            None => true,
            Some(b) => match candidate.fitness.total_cmp(&b.fitness) {
                Ordering::Less => true,
                Ordering::Equal => candidate.served < b.served,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some(candidate);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let best = best.expect("at least one permutation");
    Ok(OracleResult {
        best_sequence: best.served,
        best_fitness: best.fitness,
        optimal_miss_count: best.misses,
        enumerated,
    })
}
