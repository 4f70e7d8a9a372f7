//! MAX-MIN Ant System scheduler.
//!
//! Every decision runs a fresh colony over the current queue snapshot.
//! Each ant builds a complete service order: the first request is drawn
//! uniformly, later ones by roulette over `tau^alpha * eta^beta`, where the
//! heuristic `eta` mixes the seek cost and the deadline slack:
//!
//! ```text
//! eta(i, j) = 1 / (gamma * seek(|a_i - a_j|) + (1 - gamma) * (d_j - f_i))
//! ```
//!
//! Before every step the ant replays the disk on a virtual clock and drops
//! requests that can no longer make their deadline. A finished ant scores
//!
//! ```text
//! fitness = makespan + misses * worst_deadline
//! ```
//!
//! where `worst_deadline` is the largest deadline in the snapshot. Only the
//! best ant of each iteration deposits `1 / fitness` on its edges, after
//! evaporation by `rho`; trails are then clamped into `[tau_min, tau_max]`.
//! The first request of the best ant seen over all iterations is returned.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk::{DiskGeometry, HeadState};
use crate::error::{Error, Result};
use crate::seed;
use crate::sim::SchedulerPolicy;
use crate::workload::Task;

/// Added to the heuristic denominator so a zero-seek, `gamma = 1` step
/// stays finite.
pub const HEURISTIC_EPSILON: f64 = 1e-9;

/// Fitness values closer than this count as unchanged for convergence.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcoParams {
    pub alpha: f64,
    pub beta: f64,
    /// Pheromone retention per iteration.
    pub rho: f64,
    pub gamma: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Ants per iteration as a fraction of the queue length (rounded up).
    pub ants_fraction: f64,
    /// Lower bound on ants per iteration.
    pub min_ants: usize,
    /// Iteration cap as a fraction of the queue length (rounded up).
    pub max_iterations_fraction: f64,
    pub convergence_patience: usize,
    pub seed: u64,
    /// Build the ants of an iteration on the rayon pool. Results do not
    /// depend on this flag.
    pub parallel_ants: bool,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            alpha: 1.0,
            beta: 2.0,
            rho: 0.98,
            gamma: 0.1,
            tau_min: 10.0,
            tau_max: 20.0,
            ants_fraction: 0.5,
            min_ants: 8,
            max_iterations_fraction: 0.5,
            convergence_patience: 5,
            seed: 0,
            parallel_ants: false,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.tau_min > 0.0 && self.tau_min <= self.tau_max && self.tau_max.is_finite()) {
            return bad("pheromone bounds must satisfy 0 < tau_min <= tau_max");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad("rho must lie in (0, 1)");
        }
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.alpha.is_finite() && self.beta.is_finite())
        {
            return bad("alpha and beta must be positive");
        }
        if !(self.ants_fraction > 0.0 && self.max_iterations_fraction > 0.0) {
            return bad("colony fractions must be positive");
        }
        if self.convergence_patience == 0 {
            return bad("convergence_patience must be at least 1");
        }
        Ok(())
    }

    /// Parses a JSON parameter document; omitted fields keep the defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let params: AcoParams = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn ants_for(&self, queue_len: usize) -> usize {
        scaled(queue_len, self.ants_fraction).max(self.min_ants).max(1)
    }

    pub fn iterations_for(&self, queue_len: usize) -> usize {
        scaled(queue_len, self.max_iterations_fraction).max(1)
    }
}

fn scaled(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction).ceil() as usize
}

/// Trail strengths between queued requests, plus a start row for the
/// (start -> first request) edge.
#[derive(Clone, Debug, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    tau: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn new(n: usize, initial: f64) -> Self {
        PheromoneMatrix {
            n,
            tau: vec![initial; (n + 1) * n],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Row index of the virtual start node.
    pub fn start(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.tau[from * self.n + to]
    }

    pub fn set(&mut self, from: usize, to: usize, value: f64) {
        self.tau[from * self.n + to] = value;
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.tau[from * self.n..(from + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.tau
    }

    pub fn min_entry(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.tau.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// One ant's service order over a queue snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct AntResult {
    /// Task ids in service order.
    pub sequence: Vec<u32>,
    /// Queue positions in service order.
    pub path: Vec<usize>,
    pub virtual_finish: f64,
    pub makespan: f64,
    pub miss_count: usize,
    pub fitness: f64,
}

pub fn heuristic(
    geometry: &DiskGeometry,
    gamma: f64,
    last_finish: f64,
    last_cylinder: u32,
    candidate: &Task,
) -> Result<f64> {
    let seek = geometry.seek_time(candidate.cylinder.abs_diff(last_cylinder))?;
    heuristic_from_parts(gamma, seek, candidate.deadline - last_finish)
}

/// The heuristic for a known seek time and deadline slack.
pub fn heuristic_from_parts(gamma: f64, seek: f64, slack: f64) -> Result<f64> {
    let denominator = gamma * seek + (1.0 - gamma) * slack;
    if denominator < 0.0 || denominator.is_nan() {
        return Err(Error::Invariant(format!(
            "heuristic denominator {denominator} is negative (seek {seek}, slack {slack})"
        )));
    }
    Ok(1.0 / (denominator + HEURISTIC_EPSILON))
}

#[inline]
fn power(x: f64, exponent: f64) -> f64 {
    if exponent == 1.0 {
        x
    } else if exponent == 2.0 {
        x * x
    } else {
        x.powf(exponent)
    }
}

/// Selection weight of moving from `last` to `candidate`.
#[inline]
fn weight(tau: f64, eta: f64, alpha: f64, beta: f64) -> f64 {
    power(tau, alpha) * power(eta, beta)
}

/// Probability of each queue position being chosen next from `last`.
/// `eligible[j]` is false for requests already served or dropped; those get
/// probability zero.
pub fn selection_probability(
    pheromone: &PheromoneMatrix,
    heuristics: &[f64],
    alpha: f64,
    beta: f64,
    last: usize,
    eligible: &[bool],
) -> Vec<f64> {
    let row = pheromone.row(last);
    let weights: Vec<f64> = (0..pheromone.len())
        .map(|j| {
            if eligible[j] {
                weight(row[j], heuristics[j], alpha, beta)
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        weights.into_iter().map(|w| w / total).collect()
    } else {
        let count = eligible.iter().filter(|&&e| e).count().max(1) as f64;
        eligible
            .iter()
            .map(|&e| if e { 1.0 / count } else { 0.0 })
            .collect()
    }
}

pub fn fitness(makespan: f64, miss_count: usize, worst_deadline: f64) -> f64 {
    makespan + miss_count as f64 * worst_deadline
}

/// Outcome of replaying a fixed service order on the virtual clock.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub path: Vec<usize>,
    pub finish: f64,
    pub miss_count: usize,
}

/// Shared virtual-run machinery for ants and the oracle: before each step,
/// every remaining request that would miss its deadline if served next is
/// dropped; `choose` then picks among the survivors.
pub(crate) fn replay_with<F>(
    queue: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    mut choose: F,
) -> Result<Replay>
where
    F: FnMut(&Step<'_>) -> Result<usize>,
{
    let mut remaining: Vec<usize> = (0..queue.len()).collect();
    let mut services = Vec::with_capacity(queue.len());
    let mut state = head;
    let mut path = Vec::with_capacity(queue.len());
    let mut miss_count = 0;
    let mut last = None;

    loop {
        services.clear();
        let mut kept = 0;
        for k in 0..remaining.len() {
            let i = remaining[k];
            let service = geometry.service_time(state, &queue[i])?;
            if state.time + service <= queue[i].deadline {
                remaining[kept] = i;
                services.push(service);
                kept += 1;
            } else {
                miss_count += 1;
            }
        }
        remaining.truncate(kept);
        if remaining.is_empty() {
            break;
        }
        let slot = choose(&Step {
            queue,
            head: state,
            last,
            candidates: &remaining,
        })?;
        let i = remaining.remove(slot);
        let service = services[slot];
        state = HeadState::new(state.time + service, queue[i].cylinder);
        last = Some(i);
        path.push(i);
    }
    Ok(Replay {
        path,
        finish: state.time,
        miss_count,
    })
}

/// The virtual state an ant sees when choosing its next request.
pub(crate) struct Step<'a> {
    pub queue: &'a [Task],
    pub head: HeadState,
    /// Queue position of the previously served request.
    pub last: Option<usize>,
    /// Queue positions still feasible.
    pub candidates: &'a [usize],
}

pub fn worst_deadline(queue: &[Task]) -> f64 {
    queue.iter().map(|t| t.deadline).fold(f64::NEG_INFINITY, f64::max)
}

pub(crate) fn score(queue: &[Task], head: HeadState, replay: Replay, worst: f64) -> AntResult {
    let makespan = replay.finish - head.time;
    AntResult {
        sequence: replay.path.iter().map(|&i| queue[i].id).collect(),
        path: replay.path,
        virtual_finish: replay.finish,
        makespan,
        miss_count: replay.miss_count,
        fitness: fitness(makespan, replay.miss_count, worst),
    }
}

pub fn construct_ant<R: Rng + ?Sized>(
    queue: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    params: &AcoParams,
    pheromone: &PheromoneMatrix,
    rng: &mut R,
) -> Result<AntResult> {
    let mut weights = Vec::with_capacity(queue.len());
    let replay = replay_with(queue, head, geometry, |step| {
        let Some(last) = step.last else {
            return Ok(rng.gen_range(0..step.candidates.len()));
        };
        let row = pheromone.row(last);
        weights.clear();
        let mut total = 0.0;
        for &j in step.candidates {
            let task = &step.queue[j];
            let seek = geometry.seek_time(task.cylinder.abs_diff(step.head.cylinder))?;
            let eta = heuristic_from_parts(params.gamma, seek, task.deadline - step.head.time)?;
            let w = weight(row[j], eta, params.alpha, params.beta);
            total += w;
            weights.push(total);
        }
        Ok(roulette(&weights, rng))
    })?;
    Ok(score(queue, head, replay, worst_deadline(queue)))
}

/// Scores a fixed service order through the colony's replay and fitness
/// path. Requests are taken in `order` (task ids) as long as they stay
/// feasible; ids missing from `order` rank after all listed ones.
pub fn evaluate_sequence(
    queue: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    order: &[u32],
) -> Result<AntResult> {
    let rank = |i: usize| {
        order
            .iter()
            .position(|&id| id == queue[i].id)
            .unwrap_or(order.len() + i)
    };
    let replay = replay_with(queue, head, geometry, |step| {
        Ok((0..step.candidates.len())
            .min_by_key(|&slot| rank(step.candidates[slot]))
            .expect("non-empty candidate set"))
    })?;
    Ok(score(queue, head, replay, worst_deadline(queue)))
}

/// Samples an index from cumulative weights.
fn roulette<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("roulette over an empty set");
    if !(total > 0.0 && total.is_finite()) {
        return rng.gen_range(0..cumulative.len());
    }
    let target = rng.gen::<f64>() * total;
    cumulative
        .iter()
        .position(|&c| c > target)
        .unwrap_or(cumulative.len() - 1)
}

/// Evaporates every trail, deposits `1 / fitness` along the best ant's
/// path (including the start edge), then clamps into the bounds.
pub fn update_pheromone(
    pheromone: &mut PheromoneMatrix,
    best_local: &AntResult,
    rho: f64,
    tau_min: f64,
    tau_max: f64,
) -> Result<()> {
    if !(best_local.fitness > 0.0) {
        return Err(Error::Invariant(format!(
            "best fitness {} must be positive",
            best_local.fitness
        )));
    }
    let deposit = 1.0 / best_local.fitness;
    for tau in pheromone.tau.iter_mut() {
        *tau *= rho;
    }
    let mut from = pheromone.start();
    for &to in &best_local.path {
        let value = pheromone.get(from, to) + deposit;
        pheromone.set(from, to, value);
        from = to;
    }
    for tau in pheromone.tau.iter_mut() {
        *tau = tau.clamp(tau_min, tau_max);
    }
    Ok(())
}

/// Everything one colony run produced.
#[derive(Clone, Debug)]
pub struct Decision {
    pub task_id: u32,
    pub best: AntResult,
    pub iterations: usize,
    /// Best-global fitness after each iteration.
    pub best_history: Vec<f64>,
    pub pheromone_updates: usize,
    /// Smallest and largest trail seen after any update.
    pub pheromone_min: f64,
    pub pheromone_max: f64,
}

fn ant_rng(seed: u64, iteration: usize, ant: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | ant as u64);
    rng
}

pub fn get_next_task(
    queue: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    params: &AcoParams,
) -> Result<Option<u32>> {
    Ok(decide(queue, head, geometry, params)?.map(|d| d.task_id))
}

/// Runs one colony and reports its full outcome.
pub fn decide(
    queue: &[Task],
    head: HeadState,
    geometry: &DiskGeometry,
    params: &AcoParams,
) -> Result<Option<Decision>> {
    params.validate()?;
    let n = queue.len();
    if n == 0 {
        return Ok(None);
    }
    let worst = worst_deadline(queue);
    if n == 1 {
        let replay = replay_with(queue, head, geometry, |_| Ok(0))?;
        let best = score(queue, head, replay, worst);
        return Ok(Some(Decision {
            task_id: queue[0].id,
            best,
            iterations: 0,
            best_history: Vec::new(),
            pheromone_updates: 0,
            pheromone_min: params.tau_max,
            pheromone_max: params.tau_max,
        }));
    }

    let ants = params.ants_for(n);
    let max_iterations = params.iterations_for(n);
    let mut pheromone = PheromoneMatrix::new(n, params.tau_max);
    let mut best_global: Option<AntResult> = None;
    let mut best_history = Vec::with_capacity(max_iterations);
    let mut previous_local: Option<f64> = None;
    let mut unchanged = 0;
    let mut pheromone_min = f64::INFINITY;
    let mut pheromone_max = f64::NEG_INFINITY;
    let mut iterations = 0;

    for iteration in 0..max_iterations {
        iterations += 1;
        let build = |ant: usize| {
            let mut rng = ant_rng(params.seed, iteration, ant);
            construct_ant(queue, head, geometry, params, &pheromone, &mut rng)
        };
        let colony: Vec<AntResult> = if params.parallel_ants {
            (0..ants).into_par_iter().map(build).collect::<Result<_>>()?
        } else {
            (0..ants).map(build).collect::<Result<_>>()?
        };

        // First ant wins ties, so the outcome is independent of scheduling.
        let best_local = colony
            .iter()
            .reduce(|best, ant| if ant.fitness < best.fitness { ant } else { best })
            .expect("colony has at least one ant");

        update_pheromone(
            &mut pheromone,
            best_local,
            params.rho,
            params.tau_min,
            params.tau_max,
        )?;
        pheromone_min = pheromone_min.min(pheromone.min_entry());
        pheromone_max = pheromone_max.max(pheromone.max_entry());

        if best_global
            .as_ref()
            .is_none_or(|g| best_local.fitness < g.fitness)
        {
            best_global = Some(best_local.clone());
        }
        best_history.push(best_global.as_ref().unwrap().fitness);

        match previous_local {
            Some(prev) if (prev - best_local.fitness).abs() <= CONVERGENCE_TOLERANCE => {
                unchanged += 1
            }
            _ => unchanged = 0,
        }
        previous_local = Some(best_local.fitness);
        let uniform = colony.iter().all(|a| a.path == colony[0].path);
        if unchanged >= params.convergence_patience || uniform {
            break;
        }
    }

    let best = best_global.expect("at least one iteration ran");
    let task_id = *best
        .sequence
        .first()
        .ok_or_else(|| Error::Invariant("best ant served nothing from a feasible queue".into()))?;
    Ok(Some(Decision {
        task_id,
        best,
        iterations,
        best_history,
        pheromone_updates: iterations,
        pheromone_min,
        pheromone_max,
    }))
}

/// Running record of pheromone bounds across every update of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PheromoneAudit {
    pub updates: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for PheromoneAudit {
    fn default() -> Self {
        PheromoneAudit {
            updates: 0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

/// The colony as an online [`SchedulerPolicy`]. Decision `k` of a problem
/// seeds its colony from `(params.seed, k)`.
#[derive(Clone, Debug)]
pub struct AcoPolicy {
    params: AcoParams,
    decisions: u64,
    audit: PheromoneAudit,
}

impl AcoPolicy {
    pub fn new(params: AcoParams) -> Result<Self> {
        params.validate()?;
        Ok(AcoPolicy {
            params,
            decisions: 0,
            audit: PheromoneAudit::default(),
        })
    }

    pub fn params(&self) -> &AcoParams {
        &self.params
    }

    pub fn audit(&self) -> PheromoneAudit {
        self.audit
    }
}

impl SchedulerPolicy for AcoPolicy {
    fn name(&self) -> &str {
        "aco"
    }

    fn pick_next(
        &mut self,
        queue: &[Task],
        head: HeadState,
        geometry: &DiskGeometry,
    ) -> Result<Option<u32>> {
        let params = AcoParams {
            seed: seed::derive(&[self.params.seed, self.decisions]),
            ..self.params.clone()
        };
        self.decisions += 1;
        let Some(decision) = decide(queue, head, geometry, &params)? else {
            return Ok(None);
        };
        self.audit.updates += decision.pheromone_updates;
        if decision.pheromone_updates > 0 {
            self.audit.min = self.audit.min.min(decision.pheromone_min);
            self.audit.max = self.audit.max.max(decision.pheromone_max);
        }
        Ok(Some(decision.task_id))
    }

    fn reset(&mut self) {
        self.decisions = 0;
        self.audit = PheromoneAudit::default();
    }
}
